"""Feasibility-residual (energy) model.

The energy of a configuration ``X`` at radius ``D`` is

    E(X, D) = sum_{i<j} l_ij^2 + sum_i O_i

where ``l_ij = max(0, 2D - d(c_i, c_j))`` penalizes pairwise crowding and
``O_i`` penalizes boundary violations. For a point inside the container,
``O_i`` sums squared clearance deficits over every container vertex, every
edge, and every active footpoint; for a point outside it is
``D + 2 * (min distance to vertices and active footpoints)^2``, which is
strictly positive. ``E`` is zero exactly on feasible solutions and is
differentiable almost everywhere, so quasi-Newton local optimization
applies.

Within one evaluation the interior classification and active sets are
frozen, keeping the value and its gradient mutually consistent; they are
recomputed from scratch on the next call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .container import PolyhedralContainer
from .geometry import (
    Metric,
    as_point,
    metric_direction,
    metric_length,
    metric_plane_factor,
    segment_distance,
)

__all__ = [
    "EnergyBreakdown",
    "boundary_penalty",
    "energy_gradient",
    "pair_penalty",
    "point_energy",
    "sumt_objective",
    "sumt_gradient",
    "total_energy",
    "vacancy_energies",
    "vacancy_energy",
]


@dataclass(frozen=True)
class EnergyBreakdown:
    """Total energy split into its dispersion and per-point boundary parts."""

    total: float
    dispersion_term: float
    boundary_terms: tuple[float, ...]


def _as_config(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"configuration must have shape (p, 3), got {pts.shape}")
    if pts.shape[0] < 1:
        raise ValueError("configuration needs at least one point")
    if not np.isfinite(pts).all():
        raise ValueError("configuration contains non-finite coordinates")
    return pts


def pair_penalty(metric: Metric, c_i, c_j, d_radius: float) -> float:
    """Crowding penalty ``max(0, 2D - d(c_i, c_j))`` (not squared)."""
    if d_radius <= 0:
        raise ValueError("radius must be positive")
    return max(0.0, 2.0 * d_radius - float(metric_length(metric, as_point(c_i) - as_point(c_j))))


class _BoundaryEval:
    """Per-point boundary terms plus everything needed for the gradient."""

    __slots__ = ("terms", "inside", "dv", "de", "te", "signed", "valid_feet",
                 "dh", "out_min", "out_kind", "out_index", "d_term_dD")


def _boundary_eval(container: PolyhedralContainer, metric: Metric, pts: np.ndarray,
                   d_radius: float, rng, rays=None) -> _BoundaryEval:
    ev = _BoundaryEval()
    ev.inside = container.classify_points(pts, rng, rays)

    verts = container.vertices
    ev.dv = metric_length(metric, pts[:, None, :] - verts[None, :, :])
    ev.de, ev.te = segment_distance(
        metric, pts[:, None, :], container.edge_starts[None, :, :],
        container.edge_vectors[None, :, :])

    ev.signed = container.signed_plane_offsets(pts)
    active = container.active_face_matrix(pts, ev.inside, ev.signed)
    in_poly = container.feet_in_polygon(pts, ev.signed)
    ev.valid_feet = active & in_poly
    plane_factor = metric_plane_factor(metric, container.face_normals)
    ev.dh = np.where(ev.valid_feet, np.abs(ev.signed) * plane_factor[None, :], np.inf)

    def deficit(d):
        return np.maximum(0.0, d_radius - d)

    pen = deficit(ev.dv) ** 2
    pen_sum = pen.sum(axis=1)
    pen_sum += (deficit(ev.de) ** 2).sum(axis=1)
    dh_finite = np.where(np.isfinite(ev.dh), ev.dh, d_radius)  # deficit 0 either way
    pen_sum += (deficit(dh_finite) ** 2).sum(axis=1)
    dD_inside = (2.0 * deficit(ev.dv)).sum(axis=1) + (2.0 * deficit(ev.de)).sum(axis=1) \
        + (2.0 * deficit(dh_finite)).sum(axis=1)

    # outside branch: D + 2 * (min distance to vertices and active feet)^2
    cand = np.concatenate([ev.dv, np.where(np.isfinite(ev.dh), ev.dh, np.inf)], axis=1)
    out_index = np.argmin(cand, axis=1)
    ev.out_min = cand[np.arange(len(pts)), out_index]
    ev.out_kind = out_index < ev.dv.shape[1]  # True -> vertex, False -> footpoint
    ev.out_index = np.where(ev.out_kind, out_index, out_index - ev.dv.shape[1])
    outside_terms = d_radius + 2.0 * ev.out_min ** 2

    ev.terms = np.where(ev.inside, pen_sum, outside_terms)
    ev.d_term_dD = np.where(ev.inside, dD_inside, 1.0)
    return ev


def _boundary_grad(container: PolyhedralContainer, metric: Metric, pts: np.ndarray,
                   d_radius: float, ev: _BoundaryEval) -> np.ndarray:
    """d(sum_i O_i)/d(c_i), assembled per point from the frozen active sets."""
    n = pts.shape[0]
    grad = np.zeros((n, 3))
    plane_factor = metric_plane_factor(metric, container.face_normals)
    foot_dirs = np.sign(ev.signed)[:, :, None] * (
        plane_factor[None, :, None] * container.face_normals[None, :, :])

    inside = ev.inside
    if inside.any():
        # vertex and edge-foot targets share the point-difference gradient,
        # so they run as one stacked contraction
        feet_e = container.edge_starts[None] + ev.te[..., None] * container.edge_vectors[None]
        deltas = np.concatenate(
            [pts[:, None, :] - container.vertices[None, :, :], pts[:, None, :] - feet_e],
            axis=1)
        coef = -2.0 * np.maximum(0.0, d_radius - np.concatenate([ev.dv, ev.de], axis=1))
        gve = np.einsum("nv,nvk->nk", coef, metric_direction(metric, deltas))

        dh = np.where(np.isfinite(ev.dh), ev.dh, d_radius)
        coef_h = -2.0 * np.maximum(0.0, d_radius - dh)
        gh = np.einsum("nf,nfk->nk", coef_h, foot_dirs)

        grad[inside] = (gve + gh)[inside]

    outside = ~inside
    if outside.any():
        idx = np.nonzero(outside)[0]
        for i in idx:
            m = ev.out_min[i]
            if ev.out_kind[i]:
                direction = metric_direction(
                    metric, pts[i] - container.vertices[ev.out_index[i]])
            else:
                direction = foot_dirs[i, ev.out_index[i]]
            grad[i] = 4.0 * m * direction
    return grad


class Evaluation:
    """Full energy evaluation: breakdown, per-point energies, gradients, signature."""

    __slots__ = ("breakdown", "point_pair_sq", "boundary", "inside", "grad",
                 "d_energy_dD", "_sig")

    def signature(self) -> bytes:
        return self._sig


def evaluate(container: PolyhedralContainer, metric: Metric, points, d_radius: float,
             rng, rays=None, want_grad: bool = False) -> Evaluation:
    """Evaluate E(X, D) and optionally its gradient in one pass."""
    pts = _as_config(points)
    if d_radius <= 0:
        raise ValueError("radius must be positive")
    p = pts.shape[0]

    diffs = pts[:, None, :] - pts[None, :, :]
    dists = metric_length(metric, diffs)
    np.fill_diagonal(dists, np.inf)
    ell = np.maximum(0.0, 2.0 * d_radius - dists)
    ell_sq = ell * ell
    point_pair_sq = ell_sq.sum(axis=1)
    dispersion = 0.5 * float(ell_sq.sum())

    bev = _boundary_eval(container, metric, pts, d_radius, rng, rays)
    boundary = bev.terms
    total = dispersion + float(np.sum(boundary))

    ev = Evaluation()
    ev.breakdown = EnergyBreakdown(total=total, dispersion_term=dispersion,
                                   boundary_terms=tuple(float(b) for b in boundary))
    ev.point_pair_sq = point_pair_sq
    ev.boundary = boundary
    ev.inside = bev.inside
    ev.grad = None
    ev.d_energy_dD = 2.0 * float(ell.sum()) + float(np.sum(bev.d_term_dD))

    active_bits = np.concatenate([
        bev.inside.ravel(),
        (ell > 0).ravel(),
        (bev.dv < d_radius).ravel(),
        (bev.de < d_radius).ravel(),
        (np.where(np.isfinite(bev.dh), bev.dh, np.inf) < d_radius).ravel(),
    ])
    ev._sig = np.packbits(active_bits).tobytes()

    if want_grad:
        coef = -2.0 * ell
        dirs = metric_direction(metric, diffs)
        pair_grad = np.einsum("ij,ijk->ik", coef, dirs)
        ev.grad = pair_grad + _boundary_grad(container, metric, pts, d_radius, bev)
    return ev


# ----------------------------------------------------------------------
# public operations
# ----------------------------------------------------------------------

def boundary_penalty(container: PolyhedralContainer, metric: Metric, c_i, d_radius: float,
                     rng, rays=None) -> float:
    """Boundary violation term O_i for a single point."""
    pts = _as_config(c_i)
    if d_radius <= 0:
        raise ValueError("radius must be positive")
    return float(_boundary_eval(container, metric, pts, d_radius, rng, rays).terms[0])


def total_energy(container: PolyhedralContainer, metric: Metric, points, d_radius: float,
                 rng, rays=None) -> EnergyBreakdown:
    """E(X, D) with its dispersion/boundary breakdown. Zero iff feasible."""
    return evaluate(container, metric, points, d_radius, rng, rays).breakdown


def point_energy(container: PolyhedralContainer, metric: Metric, points, index: int,
                 d_radius: float, rng, rays=None) -> float:
    """Energy attributed to one point: its pair penalties plus its boundary term."""
    pts = _as_config(points)
    if not 0 <= index < pts.shape[0]:
        raise IndexError(f"point index {index} out of range for p={pts.shape[0]}")
    ev = evaluate(container, metric, pts, d_radius, rng, rays)
    return float(ev.point_pair_sq[index] + ev.boundary[index])


def point_energies(container: PolyhedralContainer, metric: Metric, points,
                   d_radius: float, rng, rays=None) -> np.ndarray:
    """Vector of per-point energies (pair terms counted toward both endpoints)."""
    ev = evaluate(container, metric, points, d_radius, rng, rays)
    return ev.point_pair_sq + ev.boundary


def vacancy_energy(container: PolyhedralContainer, metric: Metric, points, c,
                   d_radius: float, rng, rays=None) -> float:
    """Energy a candidate site would have against the current configuration."""
    return float(vacancy_energies(container, metric, points,
                                  _as_config(c), d_radius, rng, rays)[0])


def vacancy_energies(container: PolyhedralContainer, metric: Metric, points, candidates,
                     d_radius: float, rng, rays=None) -> np.ndarray:
    """Vacancy energies of many candidate sites at once."""
    pts = _as_config(points)
    cands = _as_config(candidates)
    if d_radius <= 0:
        raise ValueError("radius must be positive")
    cross = metric_length(metric, cands[:, None, :] - pts[None, :, :])
    ell = np.maximum(0.0, 2.0 * d_radius - cross)
    pair_part = (ell * ell).sum(axis=1)
    bev = _boundary_eval(container, metric, cands, d_radius, rng, rays)
    return pair_part + bev.terms


def sumt_objective(container: PolyhedralContainer, metric: Metric, points, d_radius: float,
                   mu: float, rng, rays=None) -> float:
    """Penalty objective -D^2 + mu * E(X, D) used for radius maximization."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    br = total_energy(container, metric, points, d_radius, rng, rays)
    return -d_radius * d_radius + mu * br.total


def energy_gradient(container: PolyhedralContainer, metric: Metric, points, d_radius: float,
                    rng, rays=None) -> np.ndarray:
    """Analytic (p, 3) gradient of E with respect to the points.

    Piecewise smooth: at kinks (coincident points, Chebyshev component ties,
    equidistant nearest features) a deterministic subgradient is returned,
    with ties resolved toward the lowest feature or component index.
    """
    return evaluate(container, metric, points, d_radius, rng, rays, want_grad=True).grad


def sumt_gradient(container: PolyhedralContainer, metric: Metric, points, d_radius: float,
                  mu: float, rng, rays=None) -> tuple[np.ndarray, float]:
    """Gradient of the penalty objective: (mu * dE/dX, -2D + mu * dE/dD)."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    ev = evaluate(container, metric, points, d_radius, rng, rays, want_grad=True)
    return mu * ev.grad, -2.0 * d_radius + mu * ev.d_energy_dD
