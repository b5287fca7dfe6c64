"""Stratification of probe points into atoms and d-rectifiable pieces.

A probe is an atom when it carries weight and is isolated at the ladder's
finest radius; otherwise it is d-rectifiable when the flatness coefficients
vote for a stable dimension d across the resolved scales, the best flatness
value at the finest resolved scale clears the threshold, and the ball-mass
dimension slope agrees with d.  Everything else stays unclassified.

The "for all tangent measures" quantifier of the limiting theory is not
observable from finite data; the modal vote across scales stands in for it,
and the thresholds here are engineering calibrations, not paper constants.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .alpha import GroupWindow, SearchConfig
from .errors import DegenerateSpectrum, EmptyBall
from .measure import BallQuery, DiscreteMeasure, blowup_restricted, support_distance
from .multiscale import (
    RESOLUTION_FLOOR,
    DiniReport,
    ScaleLadder,
    dini_report,
    sweep,
)

# Flatness threshold: flat generators pass with >= 3x margin over their
# measured discretization floor at desk resolutions (floors run 0.002-0.01,
# well below), while Cantor-type measures sit near 0.2 at every resolved
# scale and fail by >= 2x.
TAU_FLAT = 0.08
# Modal best-dimension agreement required across resolved scales.
VOTE_STABILITY = 0.8
# Allowed gap between the dimension slope and the voted dimension.
SLOPE_TOL = 0.25

_ATOM_EPS = 1e-12


@dataclass(frozen=True)
class StratumLabel:
    """Classification outcome for one probe."""

    kind: str  # "atom" | "rectifiable" | "unclassified"
    dimension: int
    confidence: float

    def __post_init__(self):
        if self.kind not in ("atom", "rectifiable", "unclassified"):
            raise ValueError(f"unknown stratum kind {self.kind!r}")
        if self.kind == "atom" and self.dimension != 0:
            raise ValueError("atom labels carry dimension 0")
        if self.kind == "rectifiable" and self.dimension < 1:
            raise ValueError("rectifiable labels require dimension >= 1")

    @staticmethod
    def atom() -> "StratumLabel":
        return StratumLabel("atom", 0, 1.0)

    @staticmethod
    def rectifiable(d: int, confidence: float) -> "StratumLabel":
        return StratumLabel("rectifiable", d, confidence)

    @staticmethod
    def unclassified(confidence: float = 0.0) -> "StratumLabel":
        return StratumLabel("unclassified", -1, confidence)


@dataclass(frozen=True)
class ProbeRecord:
    probe: np.ndarray
    label: StratumLabel
    dimension_slope: float
    best_d_sequence: tuple[int, ...]
    tangent_basis: np.ndarray | None
    tangent_offset: np.ndarray | None
    dini: DiniReport


@dataclass(frozen=True)
class ClassificationReport:
    records: tuple[ProbeRecord, ...]
    summary: dict

    def to_dict(self) -> dict:
        return {
            "records": [
                {
                    "probe": r.probe.tolist(),
                    "kind": r.label.kind,
                    "dimension": r.label.dimension,
                    "confidence": r.label.confidence,
                    "dimension_slope": r.dimension_slope,
                    "best_d_sequence": list(r.best_d_sequence),
                    "tangent_basis": None
                    if r.tangent_basis is None
                    else r.tangent_basis.tolist(),
                    "tangent_offset": None
                    if r.tangent_offset is None
                    else r.tangent_offset.tolist(),
                    "dini_plain": r.dini.plain_sum,
                    "dini_log": r.dini.log_weighted_sum,
                }
                for r in self.records
            ],
            "summary": self.summary,
        }

    def save_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1))

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["probe_id", "kind", "dimension", "confidence", "dimension_slope",
                 "best_d_sequence", "dini_plain", "dini_log"]
            )
            for i, r in enumerate(self.records):
                writer.writerow(
                    [
                        i,
                        r.label.kind,
                        r.label.dimension,
                        repr(r.label.confidence),
                        repr(r.dimension_slope),
                        "|".join(str(d) for d in r.best_d_sequence),
                        repr(r.dini.plain_sum),
                        repr(r.dini.log_weighted_sum),
                    ]
                )


def detect_atom(mu: DiscreteMeasure, x, ladder: ScaleLadder) -> bool:
    """True when x carries weight and is isolated beyond the finest radius."""
    x = np.asarray(x, dtype=float)
    d2 = np.sum((mu.points - x) ** 2, axis=1)
    at_x = d2 <= _ATOM_EPS ** 2
    if not np.any(at_x):
        return False
    rest = mu.points[~at_x]
    if len(rest) == 0:
        return True
    gap = float(np.sqrt(np.min(np.sum((rest - x) ** 2, axis=1))))
    return gap > ladder.r_min


def tangent_plane(
    mu: DiscreteMeasure, x, r: float, d: int
) -> tuple[np.ndarray, float]:
    """Weighted principal d-plane of the blow-up at (x, r), with its residual.

    The fit is uncentered (the plane passes through the probe).  The residual
    is the worst ratio dist(y, V)/|y| over blow-up support points with
    |y| >= 0.05, i.e. the tangent-plane approximation quality excluding the
    singularity at the center.
    """
    if not 1 <= d <= mu.ambient_dim:
        raise ValueError(f"d must lie in [1, {mu.ambient_dim}]")
    blow = blowup_restricted(mu, BallQuery(x, r))
    Y = blow.points * np.sqrt(blow.weights)[:, None]
    _, svals, vt = np.linalg.svd(Y, full_matrices=True)
    svals = np.concatenate([svals, np.zeros(mu.ambient_dim - len(svals))])
    if d < mu.ambient_dim and abs(svals[d - 1] - svals[d]) <= 1e-12:
        raise DegenerateSpectrum(
            f"singular values {svals[d-1]} and {svals[d]} coincide; plane not unique"
        )
    basis = vt[:d].T
    norms = np.linalg.norm(blow.points, axis=1)
    keep = norms >= 0.05
    if not np.any(keep):
        return basis, 0.0
    pts = blow.points[keep]
    proj = pts @ basis
    residual_vec = pts - proj @ basis.T
    ratios = np.linalg.norm(residual_vec, axis=1) / norms[keep]
    return basis, float(np.max(ratios))


def _finest_resolved(rows):
    resolved = [p for p in rows if not p.flags]
    return resolved[-1] if resolved else None


def classify_point(
    mu: DiscreteMeasure,
    x,
    ladder: ScaleLadder,
    w: GroupWindow = GroupWindow(),
    cfg: SearchConfig = SearchConfig(),
    backend: str = "highs",
    tau_flat: float = TAU_FLAT,
) -> StratumLabel:
    """Label one probe as atom, d-rectifiable, or unclassified."""
    label, _ = _classify_with_evidence(mu, x, ladder, w, cfg, backend, tau_flat)
    return label


def _classify_with_evidence(mu, x, ladder, w, cfg, backend, tau_flat):
    x = np.asarray(x, dtype=float)
    if detect_atom(mu, x, ladder):
        record = ProbeRecord(
            probe=x,
            label=StratumLabel.atom(),
            dimension_slope=0.0,
            best_d_sequence=(),
            tangent_basis=None,
            tangent_offset=None,
            dini=dini_report(x, [], ladder.depth),
        )
        return record.label, record

    rows = sweep(
        mu, [x], ladder, w, cfg, backend=backend, components="flat"
    )
    resolved = [p for p in rows if not p.flags]
    best_seq = tuple(p.best_d for p in rows)
    dini = dini_report(
        x, [(p.scale, p.alpha_min) for p in rows if not math.isnan(p.alpha_min)],
        ladder.depth,
    )
    try:
        slope = _mass_slope(rows)
    except Exception:
        slope = float("nan")

    def finish(label):
        basis = offset = None
        if label.kind == "rectifiable":
            finest = _finest_resolved(rows)
            try:
                basis, _ = tangent_plane(mu, x, finest.scale, label.dimension)
                offset = x
            except (DegenerateSpectrum, EmptyBall):
                basis = offset = None
        record = ProbeRecord(
            probe=x,
            label=label,
            dimension_slope=slope,
            best_d_sequence=best_seq,
            tangent_basis=basis,
            tangent_offset=offset,
            dini=dini,
        )
        return record.label, record

    if not resolved:
        return finish(StratumLabel.unclassified(0.0))
    votes = [p.best_d for p in resolved]
    modal = max(set(votes), key=lambda d: (votes.count(d), -d))
    agreement = votes.count(modal) / len(votes)
    finest = resolved[-1]
    if (
        agreement >= VOTE_STABILITY
        and modal >= 1
        and finest.alpha_min < tau_flat
        and not math.isnan(slope)
        and abs(slope - modal) <= SLOPE_TOL
    ):
        return finish(StratumLabel.rectifiable(modal, agreement))
    return finish(StratumLabel.unclassified(agreement))


def _mass_slope(rows) -> float:
    from .multiscale import dimension_slope

    profile = [(p.scale, p.ball_mass) for p in rows if p.ball_mass > 0]
    return dimension_slope(profile)


def decompose(
    mu: DiscreteMeasure,
    probes,
    ladder: ScaleLadder,
    w: GroupWindow = GroupWindow(),
    cfg: SearchConfig = SearchConfig(),
    backend: str = "highs",
    tau_flat: float = TAU_FLAT,
) -> ClassificationReport:
    """Classify every probe and summarize stratum counts."""
    probes = list(probes)
    if not probes:
        raise ValueError("probes must be nonempty")
    records = []
    for x in probes:
        _, record = _classify_with_evidence(mu, x, ladder, w, cfg, backend, tau_flat)
        records.append(record)
    summary: dict = {"atom": 0, "unclassified": 0}
    for r in records:
        if r.label.kind == "rectifiable":
            key = f"rectifiable_{r.label.dimension}"
            summary[key] = summary.get(key, 0) + 1
        else:
            summary[r.label.kind] += 1
    return ClassificationReport(records=tuple(records), summary=summary)
