"""Discrete weighted point measures on R^n.

A :class:`DiscreteMeasure` is a finite weighted point cloud standing in for a
Radon measure.  All queries use *open* balls with strict inequality, so ties
at the exact radius are excluded.  Instances are immutable and safe to share
across threads; every operation here is a pure function.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import DimensionMismatch, EmptyBall, EmptyMeasure

# Brute-force distance scans beat a KD-tree below this support size.
_TREE_MIN_POINTS = 256

_MASS_RTOL = 1e-12


@dataclass(frozen=True)
class BallQuery:
    """An open ball B(center, radius)."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        object.__setattr__(self, "center", center)
        if not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class SimilarityMap:
    """Affine similarity u -> scale * rotation @ u + translation.

    ``scale`` is the dilation factor lambda; ``rotation`` must be orthogonal
    (orthogonality checked to 1e-10 entrywise).  When ``is_dilation_only`` is
    set, the rotation part must be the identity, so the map is a pure
    translation-dilation.
    """

    scale: float
    rotation: np.ndarray
    translation: np.ndarray
    is_dilation_only: bool = False

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        R = np.asarray(self.rotation, dtype=float)
        a = np.asarray(self.translation, dtype=float)
        if R.ndim != 2 or R.shape[0] != R.shape[1]:
            raise ValueError("rotation must be a square matrix")
        if a.shape != (R.shape[0],):
            raise ValueError("translation length must match rotation size")
        eye = np.eye(R.shape[0])
        if np.max(np.abs(R.T @ R - eye)) > 1e-10:
            raise ValueError("rotation matrix is not orthogonal (tol 1e-10)")
        if self.is_dilation_only and np.max(np.abs(R - eye)) > 1e-12:
            raise ValueError("is_dilation_only requires an identity rotation")
        R.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", a)

    @property
    def ambient_dim(self) -> int:
        return self.rotation.shape[0]

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = self.scale * pts @ self.rotation.T + self.translation
        return out if np.ndim(points) > 1 else out[0]

    def compose(self, other: "SimilarityMap") -> "SimilarityMap":
        """Return self o other (apply ``other`` first)."""
        return SimilarityMap(
            scale=self.scale * other.scale,
            rotation=self.rotation @ other.rotation,
            translation=self.scale * self.rotation @ other.translation
            + self.translation,
            is_dilation_only=self.is_dilation_only and other.is_dilation_only,
        )

    def inverse(self) -> "SimilarityMap":
        Rinv = self.rotation.T
        return SimilarityMap(
            scale=1.0 / self.scale,
            rotation=Rinv,
            translation=-(Rinv @ self.translation) / self.scale,
            is_dilation_only=self.is_dilation_only,
        )

    @staticmethod
    def dilation(scale: float, translation, dim: int | None = None) -> "SimilarityMap":
        a = np.asarray(translation, dtype=float)
        n = a.shape[0] if dim is None else dim
        return SimilarityMap(scale, np.eye(n), a, is_dilation_only=True)

    @staticmethod
    def fixing(x, scale: float, rotation: np.ndarray | None = None) -> "SimilarityMap":
        """The similarity u -> scale * R (u - x), which sends x to 0."""
        x = np.asarray(x, dtype=float)
        R = np.eye(x.shape[0]) if rotation is None else np.asarray(rotation, float)
        return SimilarityMap(
            scale,
            R,
            -scale * R @ x,
            is_dilation_only=rotation is None,
        )


class DiscreteMeasure:
    """Finite weighted point cloud in R^n.

    Zero-weight points are pruned at construction so the support is exactly
    the stored point set.  ``total_mass`` is cached.  Instances are immutable:
    the coordinate and weight arrays are write-protected.
    """

    __slots__ = ("ambient_dim", "points", "weights", "total_mass", "_tree")

    def __init__(self, points, weights=None, ambient_dim: int | None = None):
        pts = np.asarray(points, dtype=float)
        if pts.size == 0:
            n = int(ambient_dim) if ambient_dim else (pts.shape[1] if pts.ndim == 2 else 1)
            pts = pts.reshape(0, n)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2:
            raise ValueError("points must be a (N, n) array")
        n = pts.shape[1]
        if ambient_dim is not None and int(ambient_dim) != n:
            raise DimensionMismatch(
                f"ambient_dim {ambient_dim} does not match point width {n}"
            )
        if weights is None:
            w = np.full(len(pts), 1.0 / len(pts)) if len(pts) else np.zeros(0)
        else:
            w = np.asarray(weights, dtype=float)
        if w.shape != (len(pts),):
            raise ValueError("weights must have one entry per point")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        keep = w > 0
        pts, w = pts[keep], w[keep]
        pts = np.ascontiguousarray(pts)
        w = np.ascontiguousarray(w)
        pts.setflags(write=False)
        w.setflags(write=False)
        self.ambient_dim = n
        self.points = pts
        self.weights = w
        self.total_mass = float(w.sum())
        self._tree = None

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return (
            f"DiscreteMeasure(n={self.ambient_dim}, points={len(self)}, "
            f"mass={self.total_mass:.6g})"
        )

    def _kdtree(self) -> cKDTree:
        tree = self._tree
        if tree is None:
            tree = cKDTree(self.points)
            object.__setattr__(self, "_tree", tree)
        return tree

    def __setattr__(self, name, value):
        if name in DiscreteMeasure.__slots__ and hasattr(self, "_tree") and name != "_tree":
            raise AttributeError("DiscreteMeasure is immutable")
        object.__setattr__(self, name, value)

    def ball_indices(self, center, radius: float) -> np.ndarray:
        """Indices of points in the open ball, in increasing index order."""
        x = np.asarray(center, dtype=float)
        if len(self) == 0:
            return np.zeros(0, dtype=np.int64)
        if len(self) < _TREE_MIN_POINTS:
            d2 = np.sum((self.points - x) ** 2, axis=1)
            return np.flatnonzero(d2 < radius * radius)
        idx = np.asarray(self._kdtree().query_ball_point(x, radius), dtype=np.int64)
        if idx.size == 0:
            return idx
        idx.sort()
        # KD-tree returns the closed ball; enforce the open-ball convention.
        d2 = np.sum((self.points[idx] - x) ** 2, axis=1)
        return idx[d2 < radius * radius]


def ball_mass(mu: DiscreteMeasure, q: BallQuery) -> float:
    """Mass of the open ball: sum of weights at points with |p - center| < radius."""
    idx = mu.ball_indices(q.center, q.radius)
    return float(mu.weights[idx].sum())


def pushforward(mu: DiscreteMeasure, g: SimilarityMap) -> DiscreteMeasure:
    """Image measure under g: points mapped, weights unchanged."""
    if g.ambient_dim != mu.ambient_dim:
        raise DimensionMismatch(
            f"map dim {g.ambient_dim} != measure dim {mu.ambient_dim}"
        )
    if len(mu) == 0:
        return mu
    return DiscreteMeasure(g(mu.points), mu.weights)


def blowup(mu: DiscreteMeasure, q: BallQuery) -> DiscreteMeasure:
    """Normalized blow-up of mu at the ball q.

    Points are mapped by u -> (u - center)/radius and all weights are divided
    by the open-ball mass, so the result carries mass exactly 1 on B(0, 1).
    The full pushforward is retained (points outside B(0,1) are kept).
    """
    m = ball_mass(mu, q)
    if m <= 0.0:
        raise EmptyBall(
            f"ball at {np.asarray(q.center)} radius {q.radius} carries no mass"
        )
    return DiscreteMeasure((mu.points - q.center) / q.radius, mu.weights / m)


def blowup_restricted(mu: DiscreteMeasure, q: BallQuery) -> DiscreteMeasure:
    """Blow-up restricted to the open unit ball.

    Same normalization as :func:`blowup` but only the points inside the
    query ball are kept, which is what the local transport distances consume.
    Total mass of the result is exactly 1.
    """
    idx = mu.ball_indices(q.center, q.radius)
    w = mu.weights[idx]
    m = float(w.sum())
    if m <= 0.0:
        raise EmptyBall(
            f"ball at {np.asarray(q.center)} radius {q.radius} carries no mass"
        )
    return DiscreteMeasure((mu.points[idx] - q.center) / q.radius, w / m)


def doubling_constant(
    mu: DiscreteMeasure,
    probes: Iterable[Sequence[float]],
    scales: Iterable[float],
) -> float:
    """Empirical lower bound for the doubling constant.

    Returns max over (probe, scale) of mass(B(x, 2r)) / mass(B(x, r)).  Every
    probe must carry positive mass at every scale.
    """
    best = 0.0
    probes = list(probes)
    scales = list(scales)
    if not probes or not scales:
        raise ValueError("probes and scales must be nonempty")
    for x in probes:
        for r in scales:
            small = ball_mass(mu, BallQuery(x, r))
            if small <= 0.0:
                raise EmptyBall(f"probe {x} has empty ball at scale {r}")
            big = ball_mass(mu, BallQuery(x, 2.0 * r))
            best = max(best, big / small)
    return best


def support_distance(mu: DiscreteMeasure, x) -> float:
    """Distance from x to the nearest support point."""
    if len(mu) == 0:
        raise EmptyMeasure("measure has no support points")
    x = np.asarray(x, dtype=float)
    if len(mu) < _TREE_MIN_POINTS:
        return float(np.sqrt(np.min(np.sum((mu.points - x) ** 2, axis=1))))
    d, _ = mu._kdtree().query(x)
    return float(d)


def measure_to_dict(mu: DiscreteMeasure) -> dict:
    return {
        "ambient_dim": mu.ambient_dim,
        "points": mu.points.tolist(),
        "weights": mu.weights.tolist(),
    }


def measure_from_dict(data: dict) -> DiscreteMeasure:
    """Build a measure from the JSON schema; missing weights mean uniform 1/N."""
    n = int(data["ambient_dim"])
    points = np.asarray(data["points"], dtype=float).reshape(-1, n)
    weights = data.get("weights")
    return DiscreteMeasure(points, weights, ambient_dim=n)


def save_measure(mu: DiscreteMeasure, path) -> None:
    Path(path).write_text(json.dumps(measure_to_dict(mu)))


def load_measure(path) -> DiscreteMeasure:
    return measure_from_dict(json.loads(Path(path).read_text()))
