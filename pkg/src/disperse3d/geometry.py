"""Metric-aware geometric primitives.

Distances between points, segments and planes under the Euclidean, Chebyshev
and Manhattan metrics, orthogonal plane projection, and seeded random unit
directions. Everything here is pure except :func:`random_unit_direction`,
which advances a caller-owned generator.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Metric",
    "Segment3",
    "as_point",
    "distance",
    "distance_point_segment",
    "metric_direction",
    "metric_length",
    "metric_plane_factor",
    "project_onto_plane",
    "random_unit_direction",
    "random_unit_directions",
    "segment_distance",
]

# Golden-section parameters for point-to-segment minimization under
# non-Euclidean metrics. 50 iterations shrink the bracket below 1e-10.
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_GOLDEN_ITERS = 50


def as_point(value) -> np.ndarray:
    """Coerce ``value`` to a finite float64 3-vector."""
    p = np.asarray(value, dtype=float)
    if p.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {p.shape}")
    if not np.isfinite(p).all():
        raise ValueError("coordinates must be finite")
    return p


class Metric(enum.Enum):
    """Distance metric used for dispersion and boundary clearance."""

    EUCLIDEAN = "euclidean"
    CHEBYSHEV = "chebyshev"
    MANHATTAN = "manhattan"

    @classmethod
    def from_name(cls, name: str) -> "Metric":
        try:
            return cls(str(name).lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown metric {name!r} (valid: {valid})") from None


@dataclass(frozen=True)
class Segment3:
    """Directed segment between two distinct points."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", as_point(self.a))
        object.__setattr__(self, "b", as_point(self.b))
        if float(np.max(np.abs(self.b - self.a))) < 1e-12:
            raise ValueError("degenerate segment: endpoints coincide")

    @property
    def vector(self) -> np.ndarray:
        return self.b - self.a


def metric_length(metric: Metric, delta: np.ndarray) -> np.ndarray:
    """Length of displacement vectors; broadcasts over leading axes of ``delta``."""
    delta = np.asarray(delta, dtype=float)
    if metric is Metric.EUCLIDEAN:
        return np.sqrt(np.einsum("...j,...j->...", delta, delta))
    if metric is Metric.CHEBYSHEV:
        return np.max(np.abs(delta), axis=-1)
    return np.sum(np.abs(delta), axis=-1)


def metric_direction(metric: Metric, delta: np.ndarray) -> np.ndarray:
    """Subgradient of the metric length with respect to the vector tip.

    Deterministic at kinks: a zero displacement maps to the zero vector, and
    Chebyshev ties resolve to the lowest coordinate index.
    """
    delta = np.asarray(delta, dtype=float)
    if metric is Metric.EUCLIDEAN:
        norm = np.sqrt(np.sum(delta * delta, axis=-1, keepdims=True))
        out = np.zeros_like(delta)
        np.divide(delta, norm, out=out, where=norm > 0)
        return out
    if metric is Metric.CHEBYSHEV:
        mags = np.abs(delta)
        k = np.argmax(mags, axis=-1)
        picked = np.take_along_axis(delta, k[..., None], axis=-1)
        out = np.zeros_like(delta)
        np.put_along_axis(out, k[..., None], np.sign(picked), axis=-1)
        return out
    return np.sign(delta)


def metric_plane_factor(metric: Metric, unit_normals: np.ndarray) -> np.ndarray:
    """Metric length of Euclidean-unit normals.

    Multiplying a signed Euclidean plane offset by this factor yields the
    metric distance from a point to its orthogonal foot on that plane.
    """
    return metric_length(metric, unit_normals)


def distance(metric: Metric, a, b) -> float:
    """Metric distance between two points."""
    return float(metric_length(metric, as_point(a) - as_point(b)))


def segment_distance(metric: Metric, points: np.ndarray, starts: np.ndarray,
                     vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distance from points to segments ``start + t * vector`` for t in [0, 1].

    Broadcasts ``points`` against ``starts``/``vectors`` and returns
    ``(distances, t)``. The Euclidean case uses the clamped closed-form
    projection; other metrics run a vectorized golden-section search, valid
    because any norm is convex (hence unimodal) along a line.
    """
    points = np.asarray(points, dtype=float)
    starts = np.asarray(starts, dtype=float)
    vectors = np.asarray(vectors, dtype=float)

    if metric is Metric.EUCLIDEAN:
        rel = points - starts
        denom = np.sum(vectors * vectors, axis=-1)
        t = np.clip(np.sum(rel * vectors, axis=-1) / denom, 0.0, 1.0)
        d = metric_length(metric, points - (starts + t[..., None] * vectors))
        return d, t

    def f(t):
        return metric_length(metric, points - (starts + t[..., None] * vectors))

    shape = np.broadcast_shapes(points.shape[:-1], starts.shape[:-1])
    lo = np.zeros(shape)
    hi = np.ones(shape)
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1 = f(x1)
    f2 = f(x2)
    for _ in range(_GOLDEN_ITERS):
        keep_left = f1 <= f2
        hi = np.where(keep_left, x2, hi)
        lo = np.where(keep_left, lo, x1)
        width = hi - lo
        q = np.where(keep_left, hi - _INVPHI * width, lo + _INVPHI * width)
        fq = f(q)
        x1, f1, x2, f2 = (
            np.where(keep_left, q, x2),
            np.where(keep_left, fq, f2),
            np.where(keep_left, x1, q),
            np.where(keep_left, f1, fq),
        )
    t = np.where(f1 <= f2, x1, x2)
    return np.minimum(f1, f2), t


def distance_point_segment(metric: Metric, p, segment: Segment3) -> tuple[float, np.ndarray]:
    """Minimum metric distance from ``p`` to a segment and the minimizing point."""
    p = as_point(p)
    d, t = segment_distance(metric, p, segment.a, segment.vector)
    foot = segment.a + float(t) * segment.vector
    return float(d), foot


def project_onto_plane(p, plane_point, unit_normal) -> np.ndarray:
    """Orthogonal (Euclidean) projection of ``p`` onto a plane.

    The plane passes through ``plane_point`` with the given unit normal.
    A zero-length normal is rejected; a slightly non-unit normal is
    renormalized so the projection stays exact.
    """
    p = as_point(p)
    q = as_point(plane_point)
    n = as_point(unit_normal)
    nn = float(np.dot(n, n))
    if nn < 1e-24:
        raise ValueError("zero-length plane normal")
    if abs(nn - 1.0) > 1e-12:
        n = n / math.sqrt(nn)
    return p - np.dot(p - q, n) * n


def random_unit_directions(rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw ``count`` directions uniformly on the unit sphere.

    Gaussian samples are normalized; near-zero draws (probability ~0) are
    redrawn so every row has Euclidean norm 1 to machine precision.
    """
    out = rng.normal(size=(count, 3))
    norms = np.linalg.norm(out, axis=1)
    while np.any(norms < 1e-12):
        bad = norms < 1e-12
        out[bad] = rng.normal(size=(int(bad.sum()), 3))
        norms = np.linalg.norm(out, axis=1)
    return out / norms[:, None]


def random_unit_direction(rng: np.random.Generator) -> np.ndarray:
    """One uniformly random unit direction from a caller-owned generator."""
    return random_unit_directions(rng, 1)[0]
