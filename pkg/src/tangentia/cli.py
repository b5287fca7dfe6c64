"""Batch front-end: corpus generation, sweeps, classification, lemma checks.

All runs are deterministic given the config and seed: floats are serialized
with shortest-roundtrip repr, rows are emitted in index order, and the SVG
plots are plain generated markup.  Exit codes: 0 success, 1 check failure,
2 input error.  Partially written outputs are removed when a run fails.

The environment variable ``TANGENTIA_THREADS`` caps worker parallelism for
row evaluation (default 1; results are assembled in index order either way,
so the outputs do not depend on the worker count).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import generators
from .alpha import GroupWindow, SearchConfig, compute_profile
from .classify import decompose
from .errors import TangentiaError
from .measure import load_measure, save_measure
from .multiscale import ScaleLadder, sweep
from .verify import run_all


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return repr(float(x))


def worker_count() -> int:
    cap = os.environ.get("TANGENTIA_THREADS", "1")
    try:
        return max(1, int(cap))
    except ValueError:
        return 1


def _load_probes(path) -> np.ndarray:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("points", data.get("probes"))
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return arr


def sweep_rows_to_csv(rows, n: int, path) -> None:
    """Fixed-order CSV: probe_id, coords, r, alpha columns, mass, flags."""
    header = (
        ["probe_id"]
        + [f"x{i}" for i in range(n)]
        + ["r", "alpha_D", "alpha_G"]
        + [f"alpha_{d}" for d in range(n + 1)]
        + ["alpha_min", "best_d", "ball_mass", "flags"]
    )
    probe_ids = {}
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            key = tuple(row.probe.tolist())
            pid = probe_ids.setdefault(key, len(probe_ids))
            writer.writerow(
                [pid]
                + [_fmt(c) for c in row.probe]
                + [_fmt(row.scale), _fmt(row.alpha_D), _fmt(row.alpha_G)]
                + [_fmt(a) for a in row.alpha_flat]
                + [_fmt(row.alpha_min), row.best_d, _fmt(row.ball_mass)]
                + ["|".join(row.flags)]
            )


def plot_profile(rows, value: str = "alpha_min") -> str:
    """Log-log alpha-versus-scale SVG line plot, one polyline per probe.

    Rows with NaN values (empty or unresolved cells) are dropped; at least
    one plottable row is required.
    """
    series: dict[tuple, list] = {}
    for row in rows:
        v = getattr(row, value)
        if isinstance(v, tuple):
            v = min(v)
        if v is None or (isinstance(v, float) and math.isnan(v)):
            continue
        series.setdefault(tuple(row.probe.tolist()), []).append((row.scale, max(v, 1e-12)))
    if not series:
        raise ValueError("no plottable rows")
    width, height, pad = 640, 420, 50
    xs = [math.log10(r) for pts in series.values() for r, _ in pts]
    ys = [math.log10(v) for pts in series.values() for _, v in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0

    def sx(x):
        return pad + (x - x_lo) / x_span * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y_lo) / y_span * (height - 2 * pad)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="{height - 12}" text-anchor="middle" '
        f'font-size="12">log10 scale</text>',
        f'<text x="14" y="{height // 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {height // 2})">log10 {value}</text>',
    ]
    for k, (probe, pts) in enumerate(sorted(series.items())):
        pts = sorted(pts)
        path = " ".join(f"{sx(math.log10(r)):.2f},{sy(math.log10(v)):.2f}" for r, v in pts)
        color = colors[k % len(colors)]
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{path}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def _cmd_gen(args) -> int:
    kind = args.kind
    if kind == "cantor":
        mu = generators.cantor_measure(args.depth)
    elif kind == "sierpinski":
        mu = generators.sierpinski_measure(args.depth)
    elif kind == "spiral":
        mu = generators.spiral_measure(args.depth, angle=args.angle)
    elif kind == "snowflake":
        angle = args.angle
        if args.decay:
            # 1/log(g+2) exceeds the admissible angle range for g <= 1;
            # clamp the early generations.
            seq = lambda g: min(1.0 / math.log(g + 2.0), 0.75)
        else:
            seq = lambda g: angle
        mu = generators.snowflake_measure(
            generators.SnowflakeSpec(angle_sequence=seq, depth=args.depth)
        )
    elif kind == "flat":
        n = args.ambient_dim
        d = args.flat_dim
        basis = np.eye(n)[:, :d]
        mu = generators.flat_measure(
            d, basis, np.zeros(n), half_extent=args.half_extent, spacing=args.spacing
        )
    else:
        raise TangentiaError(f"unknown generator kind {kind!r}")
    save_measure(mu, args.output)
    print(f"wrote {args.output}: {len(mu)} points, mass {mu.total_mass:.12g}")
    return 0


def _parse_common(args):
    window = GroupWindow(args.lambda1, args.lambda2)
    cfg = SearchConfig(
        scale_grid_size=args.scale_grid,
        rotation_grid_size=args.rotation_grid,
        refine_iters=args.refine_iters,
        plane_grid_size=args.plane_grid,
        mc_samples=args.mc_samples,
    )
    return window, cfg


def _cmd_alpha(args) -> int:
    mu = load_measure(args.input)
    window, cfg = _parse_common(args)
    x = np.asarray(json.loads(args.probe), dtype=float)
    profile = compute_profile(mu, x, args.radius, window, cfg)
    out = {
        "probe": x.tolist(),
        "scale": args.radius,
        "alpha_D": profile.alpha_D,
        "alpha_G": profile.alpha_G,
        "alpha_flat": list(profile.alpha_flat),
        "alpha_min": profile.alpha_min,
        "best_d": profile.best_d,
        "ball_mass": profile.ball_mass,
        "flags": list(profile.flags),
    }
    text = json.dumps(out, indent=1)
    if args.output:
        Path(args.output).write_text(text)
    else:
        print(text)
    return 0


def _parallel_rows(mu, probes, ladder, window, cfg):
    jobs = [(x, float(r)) for x in probes for r in ladder.radii]
    workers = worker_count()
    if workers == 1:
        return [compute_profile(mu, x, r, window, cfg) for x, r in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futs = [pool.submit(compute_profile, mu, x, r, window, cfg) for x, r in jobs]
        return [f.result() for f in futs]


def _cmd_sweep(args) -> int:
    mu = load_measure(args.input)
    probes = _load_probes(args.probes)
    window, cfg = _parse_common(args)
    ladder = ScaleLadder(r_max=args.r_max, depth=args.depth)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = _parallel_rows(mu, probes, ladder, window, cfg)
    csv_path = outdir / "sweep.csv"
    sweep_rows_to_csv(rows, mu.ambient_dim, csv_path)
    written = [csv_path]
    if args.plot:
        svg_path = outdir / "sweep.svg"
        svg_path.write_text(plot_profile(rows))
        written.append(svg_path)
    print("wrote " + ", ".join(str(p) for p in written))
    return 0


def _cmd_classify(args) -> int:
    mu = load_measure(args.input)
    probes = _load_probes(args.probes)
    window, cfg = _parse_common(args)
    ladder = ScaleLadder(r_max=args.r_max, depth=args.depth)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    report = decompose(mu, probes, ladder, window, cfg)
    report.save_json(outdir / "classification.json")
    report.save_csv(outdir / "classification.csv")
    print(f"wrote {outdir}/classification.json; summary: {report.summary}")
    return 0


def _cmd_verify(args) -> int:
    reports = run_all(args.trials, args.seed, quad_points=args.quad_points)
    outdir = Path(args.output) if args.output else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
        payload = [r.to_dict() for r in reports]
        (outdir / "lemma_checks.json").write_text(json.dumps(payload, indent=1))
    ok = True
    for r in reports:
        status = "pass" if r.passed else "FAIL"
        print(f"[{status}] {r.name}: trials={r.trials} lhs_max={r.lhs_max:.6g} "
              f"min_margin={r.min_margin:.6g} slack={r.slack:.3g}")
        ok = ok and r.passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tangentia")
    p.add_argument("--config", help="JSON config file; explicit flags win")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a corpus measure as JSON")
    g.add_argument("--kind", required=True,
                   choices=["cantor", "sierpinski", "spiral", "snowflake", "flat"])
    g.add_argument("--depth", type=int, default=8)
    g.add_argument("--angle", type=float, default=0.6)
    g.add_argument("--decay", action="store_true",
                   help="snowflake angles 1/log(g+2) instead of constant")
    g.add_argument("--ambient-dim", type=int, default=2)
    g.add_argument("--flat-dim", type=int, default=1)
    g.add_argument("--half-extent", type=float, default=1.0)
    g.add_argument("--spacing", type=float, default=0.05)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=_cmd_gen)

    def add_search_flags(q):
        q.add_argument("--lambda1", type=float, default=1.5)
        q.add_argument("--lambda2", type=float, default=4.0)
        q.add_argument("--scale-grid", type=int, default=8)
        q.add_argument("--rotation-grid", type=int, default=8)
        q.add_argument("--refine-iters", type=int, default=8)
        q.add_argument("--plane-grid", type=int, default=4)
        q.add_argument("--mc-samples", type=int, default=24)
        q.add_argument("--seed", type=int, default=0)

    a = sub.add_parser("alpha", help="all coefficients at one probe and radius")
    a.add_argument("-i", "--input", required=True)
    a.add_argument("--probe", required=True, help="JSON list of coordinates")
    a.add_argument("-r", "--radius", type=float, required=True)
    a.add_argument("-o", "--output")
    add_search_flags(a)
    a.set_defaults(func=_cmd_alpha)

    s = sub.add_parser("sweep", help="coefficient table over probes x ladder")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--probes", required=True, help="JSON file with a points list")
    s.add_argument("--r-max", type=float, default=0.25)
    s.add_argument("--depth", type=int, default=6)
    s.add_argument("--plot", action="store_true")
    s.add_argument("-o", "--output", required=True)
    add_search_flags(s)
    s.set_defaults(func=_cmd_sweep)

    c = sub.add_parser("classify", help="stratify probes into atoms and d-rectifiable")
    c.add_argument("-i", "--input", required=True)
    c.add_argument("--probes", required=True)
    c.add_argument("--r-max", type=float, default=0.25)
    c.add_argument("--depth", type=int, default=5)
    c.add_argument("-o", "--output", required=True)
    add_search_flags(c)
    c.set_defaults(func=_cmd_classify)

    v = sub.add_parser("verify-lemmas", help="run the distance-lemma check suite")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--quad-points", type=int, default=16)
    v.add_argument("-o", "--output")
    v.set_defaults(func=_cmd_verify)
    return p


def _apply_config_file(argv, parser):
    """Fold config-file values in as defaults; command-line flags win."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    cfg_path = argv[i + 1]
    data = json.loads(Path(cfg_path).read_text())
    rest = argv[:i] + argv[i + 2 :]
    extra = []
    for key, val in data.items():
        flag = "--" + key.replace("_", "-")
        if flag in rest:
            continue
        if isinstance(val, bool):
            if val:
                extra.append(flag)
        else:
            extra.extend([flag, str(val)])
    return rest + extra


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(argv, parser)
        args = parser.parse_args(argv)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    outputs_before = None
    out = getattr(args, "output", None)
    try:
        return args.func(args)
    except (TangentiaError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        if out and Path(out).is_file():
            Path(out).unlink()
        elif out and Path(out).is_dir():
            for name in ("sweep.csv", "sweep.svg", "classification.json",
                         "classification.csv", "lemma_checks.json"):
                f = Path(out) / name
                if f.is_file():
                    f.unlink()
        return 2


if __name__ == "__main__":
    sys.exit(main())
