"""Synthetic measure corpus with analytically known structure.

Flat lattice samples, iterated-function-system attractors (exactly
self-similar at map fixed points), Koch-type snowflake curves with a
per-generation angle schedule, and mixtures of all of the above.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BadBasis, DepthOverflow, DimensionMismatch
from .measure import DiscreteMeasure, SimilarityMap


@dataclass(frozen=True)
class IfsSpec:
    """Iterated function system: contracting similarities with probabilities."""

    maps: tuple[SimilarityMap, ...]
    probabilities: tuple[float, ...]
    depth: int

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        object.__setattr__(self, "probabilities", tuple(float(p) for p in self.probabilities))
        if len(self.maps) != len(self.probabilities):
            raise ValueError("one probability per map required")
        if not self.maps:
            raise ValueError("at least one map required")
        for g in self.maps:
            if not 0.0 < g.scale < 1.0:
                raise ValueError("all maps must be contractions (scale in (0,1))")
        if any(p <= 0 for p in self.probabilities):
            raise ValueError("probabilities must be positive")
        if abs(sum(self.probabilities) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1 (tol 1e-12)")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")


@dataclass(frozen=True)
class SnowflakeSpec:
    """Koch-type curve with a generation-indexed bump angle in [0, pi/4)."""

    angle_sequence: Callable[[int], float]
    depth: int

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        for g in range(self.depth):
            a = float(self.angle_sequence(g))
            if not 0.0 <= a < np.pi / 4:
                raise ValueError(f"angle at generation {g} is {a}; must lie in [0, pi/4)")


def flat_measure(
    d: int,
    basis: np.ndarray,
    offset,
    density: float = 1.0,
    half_extent: float = 1.0,
    spacing: float = 0.05,
) -> DiscreteMeasure:
    """Lattice sample of density * Hausdorff^d on an affine d-plane.

    ``basis`` is an (n, d) orthonormal frame of the plane directions; each
    lattice point carries weight density * spacing**d (its cell measure).
    d = 0 returns a single atom of mass ``density`` at the offset.
    """
    offset = np.asarray(offset, dtype=float)
    n = offset.shape[0]
    if not 0 <= d <= n:
        raise ValueError(f"d must lie in [0, {n}]")
    if density <= 0:
        raise ValueError("density must be positive")
    if d == 0:
        return DiscreteMeasure(offset.reshape(1, n), [density])
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    B = np.asarray(basis, dtype=float)
    if B.shape == (d, n):
        B = B.T
    if B.shape != (n, d):
        raise BadBasis(f"basis must be (n={n}, d={d}); got {B.shape}")
    if np.max(np.abs(B.T @ B - np.eye(d))) > 1e-10:
        raise BadBasis("basis is not orthonormal to 1e-10")
    m = int(np.floor(half_extent / spacing))
    axis = spacing * np.arange(-m, m + 1)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)
    points = offset + U @ B.T
    weights = np.full(len(points), density * spacing ** d)
    return DiscreteMeasure(points, weights)


def ifs_measure(
    spec: IfsSpec,
    seed_point=None,
    budget: int = 1_000_000,
    truncate: bool = False,
) -> DiscreteMeasure:
    """Depth-truncated attractor measure of an IFS.

    Applies every depth-length word to the seed point (default: fixed point
    of the first map); the weight of a word is the product of its map
    probabilities.  Raises :class:`DepthOverflow` when the branch count
    exceeds ``budget`` unless ``truncate`` is set, in which case the depth is
    reduced (with a warning) rather than the points subsampled, keeping
    self-similarity exact.
    """
    k = len(spec.maps)
    depth = spec.depth
    if k ** depth > budget:
        if not truncate:
            raise DepthOverflow(
                f"{k}^{depth} branches exceed the {budget}-point budget"
            )
        depth = int(np.floor(np.log(budget) / np.log(k)))
        depth = max(depth, 1)
        warnings.warn(
            f"IFS depth truncated from {spec.depth} to {depth} to fit the budget",
            stacklevel=2,
        )
    if seed_point is None:
        g0 = spec.maps[0]
        # Fixed point of u -> s R u + a solves (I - s R) x = a.
        n = g0.ambient_dim
        seed_point = np.linalg.solve(np.eye(n) - g0.scale * g0.rotation, g0.translation)
    pts = np.atleast_2d(np.asarray(seed_point, dtype=float))
    wts = np.ones(1)
    # Expand words front-first so output order is lexicographic in the word.
    for _ in range(depth):
        new_pts = []
        new_wts = []
        for g, p in zip(spec.maps, spec.probabilities):
            new_pts.append(g(pts))
            new_wts.append(p * wts)
        pts = np.vstack(new_pts)
        wts = np.concatenate(new_wts)
    return DiscreteMeasure(pts, wts)


def cantor_measure(depth: int, ratio: float = 1.0 / 3.0) -> DiscreteMeasure:
    """Two-map Cantor measure on [0, 1] with equal branch probabilities."""
    maps = (
        SimilarityMap.dilation(ratio, np.zeros(1)),
        SimilarityMap.dilation(ratio, np.array([1.0 - ratio])),
    )
    return ifs_measure(IfsSpec(maps=maps, probabilities=(0.5, 0.5), depth=depth))


def spiral_measure(depth: int, angle: float = 0.7, ratio: float = 1.0 / 3.0) -> DiscreteMeasure:
    """Planar IFS whose first map rotates by ``angle`` while contracting.

    At the fixed point 0 the attractor is exactly self-similar under the
    rotation-dilation of ratio 1/``ratio`` and angle ``angle``, but not under
    any pure dilation, which separates the rotation-aware coefficient from
    the dilation-only one.
    """
    c, s = np.cos(angle), np.sin(angle)
    R = np.array([[c, -s], [s, c]])
    maps = (
        SimilarityMap(ratio, R, np.zeros(2)),
        SimilarityMap.dilation(ratio, np.array([1.0 - ratio, 0.0])),
    )
    return ifs_measure(IfsSpec(maps=maps, probabilities=(0.5, 0.5), depth=depth))


def sierpinski_measure(depth: int) -> DiscreteMeasure:
    """Equal-weight Sierpinski triangle IFS in the plane."""
    corners = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
    maps = tuple(SimilarityMap.dilation(0.5, c / 2.0) for c in corners)
    return ifs_measure(IfsSpec(maps=maps, probabilities=(1 / 3, 1 / 3, 1 / 3), depth=depth))


def _koch_subdivide(segments: np.ndarray, angle: float) -> np.ndarray:
    """Replace each segment by the 4-segment Koch generator with bump angle."""
    p, q = segments[:, 0, :], segments[:, 1, :]
    v = q - p
    a = 1.0 / (2.0 * (1.0 + np.cos(angle)))
    ca, sa = np.cos(angle), np.sin(angle)
    rot = np.array([[ca, -sa], [sa, ca]])
    A = p + a * v
    B = q - a * v
    tip = A + a * v @ rot.T
    out = np.empty((len(segments) * 4, 2, 2))
    out[0::4, 0], out[0::4, 1] = p, A
    out[1::4, 0], out[1::4, 1] = A, tip
    out[2::4, 0], out[2::4, 1] = tip, B
    out[3::4, 0], out[3::4, 1] = B, q
    return out


def snowflake_measure(spec: SnowflakeSpec) -> DiscreteMeasure:
    """Parameterization measure of a Koch-type curve over [0,1] x {0}.

    Each depth-level edge carries equal parameter mass 4**(-depth), placed at
    the edge midpoint.  Generation g uses bump angle ``angle_sequence(g)``,
    so slowly decaying angles give an asymptotically flat but nonrectifiable
    curve.
    """
    segments = np.array([[[0.0, 0.0], [1.0, 0.0]]])
    for g in range(spec.depth):
        segments = _koch_subdivide(segments, float(spec.angle_sequence(g)))
    midpoints = segments.mean(axis=1)
    weights = np.full(len(midpoints), 4.0 ** (-spec.depth))
    return DiscreteMeasure(midpoints, weights)


def mix(measures: Sequence[DiscreteMeasure], weights: Sequence[float]) -> DiscreteMeasure:
    """Weighted union: the result is sum_i weights[i] * measures[i]."""
    if len(measures) != len(weights):
        raise ValueError("one weight per measure required")
    if not measures:
        raise ValueError("at least one measure required")
    if any(w <= 0 for w in weights):
        raise ValueError("mixture weights must be positive")
    n = measures[0].ambient_dim
    for m in measures[1:]:
        if m.ambient_dim != n:
            raise DimensionMismatch(
                f"ambient dims differ: {m.ambient_dim} vs {n}"
            )
    pts = np.vstack([m.points for m in measures])
    wts = np.concatenate([w * m.weights for m, w in zip(measures, weights)])
    return DiscreteMeasure(pts, wts)
