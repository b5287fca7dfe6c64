"""Self-similarity and flatness coefficients of a measure at a probe and scale.

``alpha_D`` measures how far a blow-up is from its re-dilated self inside a
scale window, ``alpha_G`` additionally searches over rotations and
reflections, and ``alpha_flat`` measures the distance to the nearest
normalized flat d-plane measure.  The continuous infima are replaced by grid
search plus local refinement, so every reported value is a certified upper
bound for the true infimum (it is an exact transport distance at some
feasible group element or plane).

Candidate group elements are pruned before their LPs are solved: a feasible
test-function dictionary yields a lower bound on each candidate's distance,
and candidates whose lower bound already exceeds the incumbent minimum are
skipped.  This leaves the grid minimum unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptyBall, UnsupportedDim
from .measure import BallQuery, DiscreteMeasure, ball_mass, blowup_restricted
from .transport import lipschitz_lower_bound, w1

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_OFFSET_CLAMP = 0.499


@dataclass(frozen=True)
class GroupWindow:
    """Scale window: admissible inverse dilation factors lie in [l1*r, l2*r]."""

    lambda1: float = 1.5
    lambda2: float = 4.0

    def __post_init__(self):
        if not 1.0 < self.lambda1 < self.lambda2:
            raise ValueError("window requires 1 < lambda1 < lambda2")


@dataclass(frozen=True)
class SearchConfig:
    """Grid and refinement budgets for the coefficient searches.

    ``stop_tol`` short-circuits a search as soon as the incumbent minimum
    falls below it.  The returned value is still an exact transport distance
    at a feasible candidate, hence still a certified upper bound for the
    infimum; only its tightness is given up.  Zero disables the shortcut.
    """

    scale_grid_size: int = 8
    rotation_grid_size: int = 8
    refine_iters: int = 8
    plane_grid_size: int = 4
    mc_samples: int = 24
    stop_tol: float = 0.0

    def __post_init__(self):
        for name in ("scale_grid_size", "rotation_grid_size", "plane_grid_size", "mc_samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.refine_iters < 0:
            raise ValueError("refine_iters must be nonnegative")
        if self.stop_tol < 0:
            raise ValueError("stop_tol must be nonnegative")


@dataclass(frozen=True)
class AlphaProfile:
    """All coefficients of one (probe, scale) pair."""

    probe: np.ndarray
    scale: float
    alpha_D: float
    alpha_G: float
    alpha_flat: tuple[float, ...]
    alpha_min: float
    best_d: int
    ball_mass: float
    flags: tuple[str, ...] = ()


def _dictionary(n: int) -> np.ndarray:
    """Cone centers for the pruning lower bound."""
    centers = [np.zeros(n)]
    for i in range(n):
        for s in (1.0, -1.0):
            for rad in (0.45, 0.8):
                e = np.zeros(n)
                e[i] = s * rad
                centers.append(e)
    return np.array(centers)


def _blow(mu: DiscreteMeasure, x, r: float) -> DiscreteMeasure:
    return blowup_restricted(mu, BallQuery(x, r))


def _golden_refine(f, x_lo, x_best, x_hi, iters):
    """Golden-section descent on [x_lo, x_hi]; returns (argmin, value) seen."""
    best_x, best = x_best, f(x_best)
    a, b = x_lo, x_hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    if fc < best:
        best_x, best = c, fc
    if fd < best:
        best_x, best = d, fd
    for _ in range(max(iters - 2, 0)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
            if fc < best:
                best_x, best = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
            if fd < best:
                best_x, best = d, fd
    return best_x, best


class _ScaleCache:
    """Blow-ups of mu at (x, s), computed once per distinct scale."""

    def __init__(self, mu, x):
        self.mu = mu
        self.x = np.asarray(x, dtype=float)
        self._store: dict[float, DiscreteMeasure] = {}

    def get(self, s: float) -> DiscreteMeasure:
        out = self._store.get(s)
        if out is None:
            out = _blow(self.mu, self.x, s)
            self._store[s] = out
        return out


def alpha_D(
    mu: DiscreteMeasure,
    x,
    r: float,
    w: GroupWindow = GroupWindow(),
    cfg: SearchConfig = SearchConfig(),
    backend: str = "highs",
) -> float:
    """Dilation self-similarity defect at (x, r).

    Minimizes the transport distance between the blow-up at radius s and the
    blow-up at radius r over a log-spaced grid of s in [lambda1*r, lambda2*r],
    then golden-section refines around the best grid point.
    """
    base = _blow(mu, x, r)
    cache = _ScaleCache(mu, x)
    lo, hi = w.lambda1 * r, w.lambda2 * r
    if ball_mass(mu, BallQuery(x, lo)) <= 0.0:
        raise EmptyBall(f"ball at scale lambda1*r = {lo} carries no mass")

    def f(log_s: float) -> float:
        return w1(cache.get(math.exp(log_s)), base, backend=backend)[0]

    grid = np.linspace(math.log(lo), math.log(hi), cfg.scale_grid_size)
    vals = []
    for g in grid:
        vals.append(f(g))
        if vals[-1] < cfg.stop_tol:
            return vals[-1]
    i = int(np.argmin(vals))
    best = vals[i]
    if cfg.refine_iters > 0:
        a = grid[max(i - 1, 0)]
        b = grid[min(i + 1, len(grid) - 1)]
        if a < b:
            best = min(best, _golden_refine(f, a, grid[i], b, cfg.refine_iters)[1])
    return best


def _rotation_2d(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _rotation_3d(a: float, b: float, g: float) -> np.ndarray:
    """Z-Y-Z Euler rotation."""
    za = _rot_axis3(2, a)
    yb = _rot_axis3(1, b)
    zg = _rot_axis3(2, g)
    return za @ yb @ zg


def _rot_axis3(axis: int, t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    R = np.eye(3)
    i, j = [(1, 2), (0, 2), (0, 1)][axis]
    R[i, i] = c
    R[j, j] = c
    R[i, j] = -s if axis != 1 else s
    R[j, i] = s if axis != 1 else -s
    return R


def _rotation_candidates(n: int, g: int):
    """Grid of (angle-parameters, flip) pairs covering O(n), identity included."""
    if n == 1:
        return [((), False), ((), True)]
    if n == 2:
        thetas = np.linspace(0.0, 2.0 * math.pi, g, endpoint=False)
        return [((t,), flip) for flip in (False, True) for t in thetas]
    if n == 3:
        band = np.linspace(0.0, 2.0 * math.pi, g, endpoint=False)
        betas = np.linspace(0.0, math.pi, max(g // 2, 2))
        out = []
        for flip in (False, True):
            for a in band:
                for b in betas:
                    for c in band:
                        out.append(((a, b, c), flip))
        return out
    raise UnsupportedDim(f"rotation search is not implemented for n = {n} > 3")


def _rotation_matrix(n: int, params, flip: bool) -> np.ndarray:
    if n == 1:
        R = np.array([[1.0]])
    elif n == 2:
        R = _rotation_2d(params[0])
    else:
        R = _rotation_3d(*params)
    if flip:
        if n == 1:
            R = -R
        elif n == 2:
            R = R @ np.diag([1.0, -1.0])
        else:
            R = -R
    return R


def alpha_G(
    mu: DiscreteMeasure,
    x,
    r: float,
    w: GroupWindow = GroupWindow(),
    cfg: SearchConfig = SearchConfig(),
    backend: str = "highs",
) -> float:
    """Rotation-aware self-similarity defect at (x, r).

    Searches the scale window crossed with a grid of the orthogonal group
    (rotations plus the orientation-reversing branch), followed by
    coordinate-wise refinement.  The identity rotation is in the grid, and
    the pure-dilation search result is one of the candidates, so the value
    never exceeds :func:`alpha_D` at the same inputs.
    """
    n = mu.ambient_dim
    if n > 3:
        raise UnsupportedDim(f"rotation search is not implemented for n = {n} > 3")
    best = alpha_D(mu, x, r, w, cfg, backend=backend)
    if best < cfg.stop_tol:
        return best
    base = _blow(mu, x, r)
    cache = _ScaleCache(mu, x)
    probes = _dictionary(n)
    lo, hi = w.lambda1 * r, w.lambda2 * r
    scales = np.exp(np.linspace(math.log(lo), math.log(hi), cfg.scale_grid_size))
    rotations = _rotation_candidates(n, cfg.rotation_grid_size)

    def candidate_value(s: float, R: np.ndarray) -> float:
        cand = cache.get(s)
        rotated = DiscreteMeasure(cand.points @ R.T, cand.weights)
        return w1(rotated, base, backend=backend)[0]

    # Score all grid candidates with the cheap lower bound, then solve LPs in
    # ascending order, skipping any candidate whose bound cannot beat the
    # incumbent.
    scored = []
    for s in scales:
        cand = cache.get(s)
        for params, flip in rotations:
            R = _rotation_matrix(n, params, flip)
            lb = lipschitz_lower_bound(
                cand.points @ R.T, cand.weights, base.points, base.weights, probes
            )
            scored.append((lb, s, params, flip))
    scored.sort(key=lambda t: t[0])
    best_state = None
    for lb, s, params, flip in scored:
        if lb >= best or best < cfg.stop_tol:
            break
        val = candidate_value(s, _rotation_matrix(n, params, flip))
        if val < best:
            best = val
            best_state = (s, params, flip)

    if best_state is not None and cfg.refine_iters > 0 and n >= 2 and best >= cfg.stop_tol:
        s0, params, flip = best_state
        state = [math.log(s0)] + list(params)
        dlog = (math.log(hi) - math.log(lo)) / max(cfg.scale_grid_size - 1, 1)
        dang = 2.0 * math.pi / cfg.rotation_grid_size
        steps = [dlog] + [dang] * len(params)

        def f_coord(k: int, t: float) -> float:
            trial = list(state)
            trial[k] = t
            s = min(max(math.exp(trial[0]), lo), hi)
            return candidate_value(s, _rotation_matrix(n, tuple(trial[1:]), flip))

        # Two alternating passes of per-coordinate golden sections, shrinking
        # the bracket on the second pass.
        for shrink in (1.0, 0.2):
            for k in range(len(state)):
                if best < cfg.stop_tol:
                    return best
                t0 = state[k]
                h = steps[k] * shrink
                lo_k, hi_k = t0 - h, t0 + h
                if k == 0:
                    lo_k = max(lo_k, math.log(lo))
                    hi_k = min(hi_k, math.log(hi))
                arg, val = _golden_refine(
                    lambda t, k=k: f_coord(k, t), lo_k, t0, hi_k, cfg.refine_iters
                )
                state[k] = arg
                best = min(best, val)
    return best


def _median_nn_spacing(points: np.ndarray) -> float:
    if len(points) < 2:
        return 0.5
    tree = cKDTree(points)
    d, _ = tree.query(points, k=2)
    return float(np.median(d[:, 1]))


_BALL_VOLUME = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}
_LATTICE_CAP = 2048


def _plane_lattice(
    Q: np.ndarray, b: np.ndarray, spacing: float, cap: int = _LATTICE_CAP
) -> DiscreteMeasure:
    """Lattice discretization of the normalized flat measure on (Q, b) in B(0,1).

    Q is an (n, d) orthonormal frame, b the plane offset (orthogonal to the
    span).  Equal weights, renormalized to total mass 1; falls back to the
    single point b when the spacing exceeds the chord radius.  The spacing is
    widened when the requested resolution would exceed ``cap`` points, which
    only happens when the candidate dimension exceeds the measure's own
    (where the distance is large and extra resolution buys nothing).
    """
    d = Q.shape[1]
    rad2 = 1.0 - float(b @ b)
    if rad2 <= 0.0:
        return DiscreteMeasure(b.reshape(1, -1), [1.0])
    rad = math.sqrt(rad2)
    min_spacing = rad * (_BALL_VOLUME[d] / cap) ** (1.0 / d)
    spacing = max(spacing, min_spacing)
    m = int(math.floor(rad / spacing))
    if m < 1:
        return DiscreteMeasure(b.reshape(1, -1), [1.0])
    axis = spacing * np.arange(-m, m + 1)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)
    keep = np.sum(U ** 2, axis=1) < rad2
    U = U[keep]
    if len(U) == 0:
        return DiscreteMeasure(b.reshape(1, -1), [1.0])
    pts = U @ Q.T + b
    return DiscreteMeasure(pts, np.full(len(pts), 1.0 / len(pts)))


def _complement_basis(Q: np.ndarray) -> np.ndarray:
    n, d = Q.shape
    if d == n:
        return np.zeros((n, 0))
    full, _ = np.linalg.qr(np.hstack([Q, np.eye(n)]))
    return full[:, d:n]


def _direction_frames(n: int, d: int, g: int) -> list[np.ndarray]:
    """Grid of orthonormal d-frames in R^n (n <= 3)."""
    if d == 0 or d == n:
        return [np.eye(n)[:, :d]]
    if n == 2:
        thetas = np.linspace(0.0, math.pi, g, endpoint=False)
        return [np.array([[math.cos(t)], [math.sin(t)]]) for t in thetas]
    if n == 3:
        out = []
        phis = np.linspace(0.0, math.pi / 2.0, max(g, 2))
        thetas = np.linspace(0.0, 2.0 * math.pi, 2 * g, endpoint=False)
        for phi in phis:
            for th in thetas:
                u = np.array(
                    [math.sin(phi) * math.cos(th), math.sin(phi) * math.sin(th), math.cos(phi)]
                )
                if d == 1:
                    out.append(u.reshape(3, 1))
                else:
                    # u is the plane normal; complete it to a frame.
                    out.append(_complement_basis(u.reshape(3, 1)))
        return out
    raise UnsupportedDim(
        f"plane search for 1 <= d <= n-1 is not implemented for n = {n} > 3"
    )


def _frame_from_sphere(n: int, d: int, params) -> np.ndarray:
    if n == 2:
        t = params[0]
        return np.array([[math.cos(t)], [math.sin(t)]])
    th, phi = params
    u = np.array(
        [math.sin(phi) * math.cos(th), math.sin(phi) * math.sin(th), math.cos(phi)]
    )
    return u.reshape(3, 1) if d == 1 else _complement_basis(u.reshape(3, 1))


def _pca_frame(base: DiscreteMeasure, d: int) -> np.ndarray:
    M = (base.points * base.weights[:, None]).T @ base.points
    vals, vecs = np.linalg.eigh(M)
    return vecs[:, ::-1][:, :d]


def alpha_flat(
    mu: DiscreteMeasure,
    x,
    r: float,
    d: int,
    cfg: SearchConfig = SearchConfig(),
    backend: str = "highs",
) -> float:
    """Distance from the blow-up at (x, r) to the nearest flat d-plane measure.

    Candidate planes are affine d-planes meeting B(0, 1/2) (offsets clamped
    to norm < 1/2); each is discretized as an equal-weight lattice with
    spacing matched to the blow-up's median nearest-neighbor spacing and
    compared by the exact transport LP.  Coordinate descent refines the best
    grid candidate.
    """
    base = _blow(mu, x, r)
    n = mu.ambient_dim
    if not 0 <= d <= n:
        raise ValueError(f"d must lie in [0, {n}]")
    probes = _dictionary(n)
    spacing = _median_nn_spacing(base.points)
    # Cap the candidate lattice relative to the blow-up's own support size;
    # the cap binds only when the candidate dimension exceeds the measure's.
    cap = max(256, 2 * len(base))

    def make_plane(Q: np.ndarray, b: np.ndarray) -> DiscreteMeasure:
        if d == 0:
            return DiscreteMeasure(b.reshape(1, -1), [1.0])
        return _plane_lattice(Q, b, spacing, cap=cap)

    def plane_value(Q: np.ndarray, b: np.ndarray) -> float:
        return w1(base, make_plane(Q, b), backend=backend)[0]

    def plane_lower_bound(Q: np.ndarray, b: np.ndarray) -> float:
        nu = make_plane(Q, b)
        return lipschitz_lower_bound(
            base.points, base.weights, nu.points, nu.weights, probes
        )

    g = cfg.plane_grid_size
    mean = base.points.T @ base.weights

    if d == 0:
        axis = np.linspace(-0.45, 0.45, g)
        grids = np.meshgrid(*([axis] * n), indexing="ij")
        offsets = [v for v in np.stack([a.ravel() for a in grids], axis=1)]
        offsets.append(_clamp_offset(mean))
        offsets.append(np.zeros(n))
        best = math.inf
        best_b = offsets[0]
        scored = sorted(
            ((plane_lower_bound(np.zeros((n, 0)), b), k, b) for k, b in enumerate(offsets)),
            key=lambda t: (t[0], t[1]),
        )
        for lb, _, b in scored:
            if lb >= best or best < cfg.stop_tol:
                break
            val = plane_value(np.zeros((n, 0)), b)
            if val < best:
                best, best_b = val, b
        if best >= cfg.stop_tol:
            best = _refine_offsets(
                plane_value, np.zeros((n, 0)), best_b, best, cfg.refine_iters, n
            )
        return best

    if d == n:
        return plane_value(np.eye(n), np.zeros(n))

    frames = _direction_frames(n, d, g)
    frames.append(_pca_frame(base, d))
    candidates: list[tuple[np.ndarray, np.ndarray]] = []
    for Q in frames:
        N = _complement_basis(Q)
        k = N.shape[1]
        axis = np.linspace(-0.45, 0.45, g)
        grids = np.meshgrid(*([axis] * k), indexing="ij")
        coords = np.stack([a.ravel() for a in grids], axis=1)
        for o in coords:
            candidates.append((Q, _clamp_offset(N @ o)))
        candidates.append((Q, _clamp_offset(N @ (N.T @ mean))))
    best = math.inf
    best_Q, best_b = candidates[0]
    scored = sorted(
        ((plane_lower_bound(Q, b), k, Q, b) for k, (Q, b) in enumerate(candidates)),
        key=lambda t: (t[0], t[1]),
    )
    for lb, _, Q, b in scored:
        if lb >= best or best < cfg.stop_tol:
            break
        val = plane_value(Q, b)
        if val < best:
            best, best_Q, best_b = val, Q, b

    if cfg.refine_iters > 0 and best >= cfg.stop_tol:
        best = _refine_plane(plane_value, n, d, best_Q, best_b, best, cfg, g)
    return best


def _clamp_offset(b: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(b))
    if norm >= _OFFSET_CLAMP:
        return b * (_OFFSET_CLAMP / norm)
    return b


def _refine_offsets(plane_value, Q, b0, best, iters, k):
    """Coordinate descent on the offset coordinates, two shrinking passes."""
    if iters <= 0 or k == 0:
        return best
    b = np.array(b0, dtype=float)
    for step in (0.15, 0.03):
        for i in range(len(b)):
            def f(t: float, i=i) -> float:
                trial = b.copy()
                trial[i] = t
                return plane_value(Q, _clamp_offset(trial))

            arg, val = _golden_refine(f, b[i] - step, b[i], b[i] + step, iters)
            b[i] = arg
            best = min(best, val)
    return best


def _refine_plane(plane_value, n, d, Q0, b0, best, cfg, g):
    """Coordinate descent over sphere parameters and offset coordinates."""
    # Recover sphere parameters from the frame when possible; otherwise only
    # refine the offset (e.g. for the PCA-seeded frame).
    params = None
    if n == 2:
        params = [math.atan2(Q0[1, 0], Q0[0, 0]) % math.pi]
    elif n == 3:
        u = Q0[:, 0] if d == 1 else _complement_basis(Q0)[:, 0]
        if u[2] < 0:
            u = -u
        phi = math.acos(min(max(u[2], -1.0), 1.0))
        th = math.atan2(u[1], u[0]) % (2.0 * math.pi)
        params = [th, phi]
    N0 = _complement_basis(Q0)
    o0 = N0.T @ b0

    dang = math.pi / max(g, 2)
    state_params = list(params) if params is not None else []
    state_o = np.array(o0, dtype=float)

    def value_at(ps, o):
        Q = _frame_from_sphere(n, d, tuple(ps)) if ps else Q0
        N = _complement_basis(Q)
        return plane_value(Q, _clamp_offset(N @ o))

    for shrink in (1.0, 0.2):
        for k in range(len(state_params)):
            def f(t: float, k=k) -> float:
                trial = list(state_params)
                trial[k] = t
                return value_at(trial, state_o)

            t0 = state_params[k]
            h = dang * shrink
            arg, val = _golden_refine(f, t0 - h, t0, t0 + h, cfg.refine_iters)
            state_params[k] = arg
            best = min(best, val)
        for i in range(len(state_o)):
            def f(t: float, i=i) -> float:
                trial = state_o.copy()
                trial[i] = t
                return value_at(state_params, trial)

            t0 = state_o[i]
            h = 0.15 * shrink
            arg, val = _golden_refine(f, t0 - h, t0, t0 + h, cfg.refine_iters)
            state_o[i] = arg
            best = min(best, val)
    return best


def alpha_min(
    mu: DiscreteMeasure,
    x,
    r: float,
    cfg: SearchConfig = SearchConfig(),
    backend: str = "highs",
) -> tuple[float, int]:
    """Minimum flatness coefficient over d = 0..n and its argmin.

    Ties break to the smallest dimension.
    """
    best = math.inf
    best_d = 0
    for d in range(mu.ambient_dim + 1):
        val = alpha_flat(mu, x, r, d, cfg, backend=backend)
        if val < best:
            best, best_d = val, d
    return best, best_d


def alpha_G_star(
    mu: DiscreteMeasure,
    x,
    r: float,
    w: GroupWindow = GroupWindow(),
    cfg: SearchConfig = SearchConfig(),
    rng=None,
    backend: str = "highs",
) -> tuple[float, float]:
    """Monte Carlo average of alpha_G over B(x, r) x [r, 2r].

    Samples probe points from mu restricted to B(x, r) with
    weight-proportional probability and scales uniformly from [r, 2r].
    Returns (mean, standard error); samples are accumulated in index order,
    so the result is deterministic given the generator state.
    """
    rng = np.random.default_rng(rng)
    idx = mu.ball_indices(np.asarray(x, dtype=float), r)
    if idx.size == 0:
        raise EmptyBall(f"ball at {x} radius {r} carries no mass")
    wts = mu.weights[idx]
    probs = wts / wts.sum()
    picks = rng.choice(idx, size=cfg.mc_samples, p=probs)
    ts = rng.uniform(r, 2.0 * r, size=cfg.mc_samples)
    vals = np.array(
        [
            alpha_G(mu, mu.points[i], t, w, cfg, backend=backend)
            for i, t in zip(picks, ts)
        ]
    )
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return mean, stderr


def compute_profile(
    mu: DiscreteMeasure,
    x,
    r: float,
    w: GroupWindow = GroupWindow(),
    cfg: SearchConfig = SearchConfig(),
    backend: str = "highs",
    resolution_floor: int = 30,
    components: str = "all",
) -> AlphaProfile:
    """One full coefficient record at (x, r); see :class:`AlphaProfile`.

    ``components`` may be "all" or "flat" (skip the group searches, leaving
    NaNs).  Balls with fewer support points than ``resolution_floor`` are
    flagged "under_resolved"; an empty ball yields an all-NaN flagged row
    instead of an error.
    """
    x = np.asarray(x, dtype=float)
    n = mu.ambient_dim
    idx = mu.ball_indices(x, r)
    mass = float(mu.weights[idx].sum())
    nan = float("nan")
    if idx.size == 0 or mass <= 0.0:
        return AlphaProfile(
            probe=x,
            scale=r,
            alpha_D=nan,
            alpha_G=nan,
            alpha_flat=tuple([nan] * (n + 1)),
            alpha_min=nan,
            best_d=-1,
            ball_mass=0.0,
            flags=("empty",),
        )
    flags = []
    if idx.size < resolution_floor:
        flags.append("under_resolved")
    flat = tuple(alpha_flat(mu, x, r, d, cfg, backend=backend) for d in range(n + 1))
    a_min = min(flat)
    best_d = int(np.argmin(flat))
    if components == "all":
        try:
            a_D = alpha_D(mu, x, r, w, cfg, backend=backend)
        except EmptyBall:
            a_D = nan
            flags.append("window_empty")
        a_G = alpha_G(mu, x, r, w, cfg, backend=backend) if not math.isnan(a_D) else nan
    else:
        a_D = nan
        a_G = nan
    return AlphaProfile(
        probe=x,
        scale=r,
        alpha_D=a_D,
        alpha_G=a_G,
        alpha_flat=flat,
        alpha_min=a_min,
        best_d=best_d,
        ball_mass=mass,
        flags=tuple(flags),
    )
