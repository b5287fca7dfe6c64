"""Dyadic-scale sweeps, discretized Dini sums, and density diagnostics.

The Dini integrals are truncated to the ladder range and discretized by a
midpoint rule over dyadic bands in log scale, which is exact whenever the
coefficient is constant on each band.  Scales whose balls hold fewer than
``RESOLUTION_FLOOR`` support points are flagged "under_resolved" and excluded
from the sums: below the inter-point spacing the transport LP has no room to
vary and the coefficients are meaningless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .alpha import AlphaProfile, GroupWindow, SearchConfig, compute_profile
from .errors import EmptyBall, InsufficientData
from .measure import BallQuery, DiscreteMeasure, ball_mass, blowup_restricted
from .transport import BumpFunction, w_phi

RESOLUTION_FLOOR = 30

_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class ScaleLadder:
    """Dyadic radii r_max * 2**-k for k = 0..depth-1."""

    r_max: float
    depth: int

    def __post_init__(self):
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")

    @property
    def radii(self) -> np.ndarray:
        return self.r_max * 2.0 ** (-np.arange(self.depth, dtype=float))

    @property
    def r_min(self) -> float:
        return float(self.r_max * 2.0 ** (-(self.depth - 1)))


@dataclass(frozen=True)
class DiniReport:
    """Truncated Dini sums of one coefficient at one probe."""

    probe: np.ndarray
    plain_sum: float
    log_weighted_sum: float
    per_scale: tuple[tuple[float, float], ...]
    truncation_depth: int


def dini_sum(alpha_values, weight: str = "plain") -> float:
    """Midpoint-rule surrogate for the truncated Dini integral.

    ``alpha_values`` is a list of (radius, alpha) pairs with strictly
    decreasing dyadic radii.  "plain" returns sum(alpha_k) * log 2, the
    surrogate for the integral of alpha dr/r; "log" weights each term by
    log(1/r_k), the surrogate with the extra logarithm.
    """
    pairs = list(alpha_values)
    if not pairs:
        return 0.0
    radii = np.array([r for r, _ in pairs], dtype=float)
    vals = np.array([a for _, a in pairs], dtype=float)
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    if len(radii) > 1:
        ratios = radii[1:] / radii[:-1]
        if np.any(np.abs(ratios - 0.5) > 1e-9):
            raise ValueError("radii must be strictly decreasing and dyadic")
    if weight == "plain":
        return float(vals.sum() * _LOG2)
    if weight == "log":
        return float(np.sum(vals * np.log(1.0 / radii)) * _LOG2)
    raise ValueError(f"unknown weight {weight!r}")


def dini_report(probe, per_scale, depth: int) -> DiniReport:
    """Bundle per-scale values into a report; NaN rows are skipped."""
    clean = [(r, a) for r, a in per_scale if not math.isnan(a)]
    return DiniReport(
        probe=np.asarray(probe, dtype=float),
        plain_sum=dini_sum(clean, "plain") if clean else 0.0,
        log_weighted_sum=dini_sum(clean, "log") if clean else 0.0,
        per_scale=tuple((float(r), float(a)) for r, a in per_scale),
        truncation_depth=depth,
    )


def sweep(
    mu: DiscreteMeasure,
    probes,
    ladder: ScaleLadder,
    w: GroupWindow = GroupWindow(),
    cfg: SearchConfig = SearchConfig(),
    backend: str = "highs",
    components: str = "all",
    resolution_floor: int = RESOLUTION_FLOOR,
) -> list[AlphaProfile]:
    """Tabulate every coefficient at each (probe, scale) of the ladder.

    Empty balls become flagged rows rather than failures.  Rows appear in
    (probe, scale) index order, so output is deterministic.
    """
    rows = []
    for x in probes:
        for r in ladder.radii:
            rows.append(
                compute_profile(
                    mu,
                    x,
                    float(r),
                    w,
                    cfg,
                    backend=backend,
                    resolution_floor=resolution_floor,
                    components=components,
                )
            )
    return rows


def density_profile(mu: DiscreteMeasure, x, d: int, ladder: ScaleLadder):
    """Density ratios (r_k, mass(B(x, r_k)) / r_k**d) along the ladder."""
    out = []
    for r in ladder.radii:
        m = ball_mass(mu, BallQuery(x, float(r)))
        out.append((float(r), m / float(r) ** d))
    return out


def dimension_slope(profile) -> float:
    """Least-squares slope of log mass against log radius.

    ``profile`` is a list of (radius, mass) pairs of raw ball masses
    (:func:`density_profile` with d = 0 produces exactly that).  The slope
    estimates the local dimension.  Requires at least three scales with
    positive mass.
    """
    pts = [(math.log(r), math.log(v)) for r, v in profile if v > 0]
    if len(pts) < 3:
        raise InsufficientData("need >= 3 scales with positive mass")
    lx = np.array([p[0] for p in pts])
    ly = np.array([p[1] for p in pts])
    lx = lx - lx.mean()
    return float((lx @ (ly - ly.mean())) / (lx @ lx))


def local_dimension(mu: DiscreteMeasure, x, ladder: ScaleLadder) -> float:
    """Dimension estimate from raw ball masses along the ladder."""
    return dimension_slope(density_profile(mu, x, 0, ladder))


def ahlfors_check(mu: DiscreteMeasure, probes, ladder: ScaleLadder, d: int):
    """Extremes of mass(B(x, r)) / r**d over all (probe, scale) rows.

    Returns (max_ratio, min_ratio); their quotient estimates the square of
    the regularity constant.
    """
    hi = -math.inf
    lo = math.inf
    for x in probes:
        for r, v in density_profile(mu, x, d, ladder):
            hi = max(hi, v)
            lo = min(lo, v)
    return hi, lo


def tangent_uniqueness_diagnostic(
    mu: DiscreteMeasure,
    x,
    ladder: ScaleLadder,
    phi: BumpFunction,
    backend: str = "highs",
) -> np.ndarray:
    """Pairwise smoothed distances between blow-ups along the ladder.

    Entry (j, k) is the smoothed transport distance between the blow-ups at
    radii r_j and r_k.  A vanishing off-diagonal tail indicates that the
    rescalings settle toward a single tangent direction.
    """
    blows = []
    for r in ladder.radii:
        blows.append(blowup_restricted(mu, BallQuery(x, float(r))))
    K = len(blows)
    M = np.zeros((K, K))
    for j in range(K):
        for k in range(j + 1, K):
            val = w_phi(blows[j], blows[k], phi, backend=backend)
            M[j, k] = val
            M[k, j] = val
    return M
