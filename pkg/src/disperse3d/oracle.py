"""Independent brute-force feasibility checking.

Everything here re-derives geometry from the raw container data (vertex
coordinates and face loops) instead of reusing the energy machinery, so it
can serve as an oracle for the solver's output. Interiority uses the
half-space test on convex containers and falls back to ray casting
otherwise. Boundary distance is exact: the Euclidean case enumerates
in-polygon feet, edges and vertices; the Chebyshev and Manhattan cases are
polyhedral norms, so the distance to each convex face is a small linear
program.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .container import PolyhedralContainer
from .geometry import Metric

__all__ = ["FeasibilityReport", "boundary_distance", "feasibility_margins"]

_TOL = 1e-9


@dataclass(frozen=True)
class FeasibilityReport:
    """Per-constraint margins of a candidate solution.

    Margins are distances minus the required clearance: containment is
    boolean per point, ``pair_margins[i][j] = d(c_i, c_j) - 2D`` and
    ``boundary_margins[i] = d(c_i, boundary) - D``. A solution is feasible
    at tolerance ``tol`` when every point is inside and every margin is at
    least ``-tol``.
    """

    inside: tuple[bool, ...]
    pair_margins: tuple[tuple[int, int, float], ...]
    boundary_margins: tuple[float, ...]
    d_radius: float

    @property
    def min_pair_margin(self) -> float:
        return min((m for _, _, m in self.pair_margins), default=float("inf"))

    @property
    def min_boundary_margin(self) -> float:
        return min(self.boundary_margins)

    def feasible(self, tol: float = 1e-7) -> bool:
        return (all(self.inside)
                and self.min_pair_margin >= -tol
                and self.min_boundary_margin >= -tol)

    def violations(self, tol: float = 1e-7) -> list[str]:
        out = []
        for i, ok in enumerate(self.inside):
            if not ok:
                out.append(f"point {i} lies outside the container")
        for i, j, m in self.pair_margins:
            if m < -tol:
                out.append(f"pair ({i}, {j}) violates separation by {-m:.3e}")
        for i, m in enumerate(self.boundary_margins):
            if m < -tol:
                out.append(f"point {i} violates boundary clearance by {-m:.3e}")
        return out


def _face_loops(container: PolyhedralContainer):
    for face in container.faces:
        yield container.vertices[list(face.vertex_loop)]


def _euclid_face_distance(loop_pts: np.ndarray, point: np.ndarray) -> float:
    n = np.cross(loop_pts[1] - loop_pts[0], loop_pts[2] - loop_pts[0])
    # Newell for robustness on near-degenerate fans
    if np.linalg.norm(n) < 1e-12:
        nxt = np.roll(loop_pts, -1, axis=0)
        n = np.array([
            np.sum((loop_pts[:, 1] - nxt[:, 1]) * (loop_pts[:, 2] + nxt[:, 2])),
            np.sum((loop_pts[:, 2] - nxt[:, 2]) * (loop_pts[:, 0] + nxt[:, 0])),
            np.sum((loop_pts[:, 0] - nxt[:, 0]) * (loop_pts[:, 1] + nxt[:, 1])),
        ])
    n = n / np.linalg.norm(n)
    s = float(np.dot(point - loop_pts[0], n))
    foot = point - s * n
    nxt = np.roll(loop_pts, -1, axis=0)
    cross = np.cross(nxt - loop_pts, foot - loop_pts)
    side = cross @ n
    if np.all(side >= -_TOL) or np.all(side <= _TOL):
        return abs(s)
    # foot misses the polygon: closest point is on its rim
    best = np.inf
    for a, b in zip(loop_pts, nxt):
        v = b - a
        t = float(np.clip(np.dot(point - a, v) / np.dot(v, v), 0.0, 1.0))
        best = min(best, float(np.linalg.norm(point - (a + t * v))))
    return best


def _lp_face_distance(metric: Metric, loop_pts: np.ndarray, point: np.ndarray) -> float:
    """Exact metric distance to a convex polygon via linear programming.

    The closest polygon point is a convex combination ``y = V^T lam``; the
    Chebyshev ball radius (one slack) or the Manhattan slack per axis then
    bounds ``|point - y|`` componentwise.
    """
    k = loop_pts.shape[0]
    if metric is Metric.CHEBYSHEV:
        n_var = k + 1
        cost = np.zeros(n_var)
        cost[-1] = 1.0
        a_ub = np.zeros((6, n_var))
        b_ub = np.zeros(6)
        for axis in range(3):
            #  point_a - sum lam v_a <= t
            a_ub[axis, :k] = -loop_pts[:, axis]
            a_ub[axis, -1] = -1.0
            b_ub[axis] = -point[axis]
            #  sum lam v_a - point_a <= t
            a_ub[3 + axis, :k] = loop_pts[:, axis]
            a_ub[3 + axis, -1] = -1.0
            b_ub[3 + axis] = point[axis]
        bounds = [(0, None)] * k + [(0, None)]
    else:  # Manhattan
        n_var = k + 3
        cost = np.zeros(n_var)
        cost[k:] = 1.0
        a_ub = np.zeros((6, n_var))
        b_ub = np.zeros(6)
        for axis in range(3):
            a_ub[axis, :k] = -loop_pts[:, axis]
            a_ub[axis, k + axis] = -1.0
            b_ub[axis] = -point[axis]
            a_ub[3 + axis, :k] = loop_pts[:, axis]
            a_ub[3 + axis, k + axis] = -1.0
            b_ub[3 + axis] = point[axis]
        bounds = [(0, None)] * k + [(0, None)] * 3
    a_eq = np.zeros((1, n_var))
    a_eq[0, :k] = 1.0
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
                  bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"face-distance LP failed: {res.message}")
    return float(res.fun)


def boundary_distance(container: PolyhedralContainer, metric: Metric, point) -> float:
    """Exact metric distance from a point to the container boundary."""
    point = np.asarray(point, dtype=float)
    best = np.inf
    for loop_pts in _face_loops(container):
        if metric is Metric.EUCLIDEAN:
            d = _euclid_face_distance(loop_pts, point)
        else:
            d = _lp_face_distance(metric, loop_pts, point)
        best = min(best, d)
    return best


def _inside_oracle(container: PolyhedralContainer, points: np.ndarray,
                   rng: np.random.Generator) -> np.ndarray:
    if container.convex:
        offsets = container.signed_plane_offsets(points)
        return np.all(offsets >= -_TOL, axis=1)
    return container.classify_points(points, rng)


def feasibility_margins(container: PolyhedralContainer, metric: Metric, points,
                        d_radius: float, rng: np.random.Generator) -> FeasibilityReport:
    """Direct evaluation of the containment, separation and clearance constraints."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    p = pts.shape[0]
    inside = _inside_oracle(container, pts, rng)
    pair = []
    for i in range(p - 1):
        for j in range(i + 1, p):
            delta = pts[i] - pts[j]
            if metric is Metric.EUCLIDEAN:
                d = float(np.linalg.norm(delta))
            elif metric is Metric.CHEBYSHEV:
                d = float(np.max(np.abs(delta)))
            else:
                d = float(np.sum(np.abs(delta)))
            pair.append((i, j, d - 2.0 * d_radius))
    boundary = tuple(boundary_distance(container, metric, pts[i]) - d_radius
                     for i in range(p))
    return FeasibilityReport(inside=tuple(bool(b) for b in inside),
                             pair_margins=tuple(pair),
                             boundary_margins=boundary,
                             d_radius=float(d_radius))
