"""Oriented polyhedral containers.

A container is a closed polyhedral solid, optionally with polyhedral holes.
Faces carry inward unit normals (pointing into the solid); interiority is
decided by casting several random rays and majority-voting the crossing
parities, which stays robust on non-convex solids where half-space tests do
not apply. Rays that graze a triangle edge or vertex are discarded and
recast, so votes are never contaminated by tangential hits.

Containers are immutable after construction and safe to share across
threads; every operation that needs randomness takes a caller-owned
generator.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .geometry import Segment3, random_unit_directions

__all__ = [
    "ActiveSet",
    "ContainerError",
    "DegenerateFaceError",
    "EmptyInteriorError",
    "Face",
    "NonConvexFaceError",
    "NonManifoldError",
    "NonPlanarFaceError",
    "PolyhedralContainer",
    "SamplingExhausted",
    "active_faces",
    "active_footpoints",
    "build_container",
    "builtin_container",
    "contains",
    "container_from_json",
    "load_container",
    "sample_interior",
]

SURFACE_TOL = 1e-9
DEFAULT_RAYS = 5
MAX_RECASTS = 20
_ORIENT_SEED = 20240331  # fixed: construction must be deterministic


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Broadcasting cross product without np.cross's axis bookkeeping."""
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    out[..., 0] = a1 * b2 - a2 * b1
    out[..., 1] = a2 * b0 - a0 * b2
    out[..., 2] = a0 * b1 - a1 * b0
    return out


class ContainerError(ValueError):
    """Invalid container geometry."""


class DegenerateFaceError(ContainerError):
    pass


class NonPlanarFaceError(ContainerError):
    pass


class NonConvexFaceError(ContainerError):
    pass


class NonManifoldError(ContainerError):
    pass


class EmptyInteriorError(ContainerError):
    pass


class SamplingExhausted(RuntimeError):
    """Rejection sampling failed to hit the interior within the attempt budget."""


@dataclass(frozen=True)
class Face:
    """Planar convex face: a vertex loop, an inward unit normal, a plane point."""

    vertex_loop: tuple[int, ...]
    inward_normal: np.ndarray
    plane_point: np.ndarray


@dataclass(frozen=True)
class ActiveSet:
    """Active faces of a point and the footpoints that land on them."""

    active_faces: list[int]
    footpoints: list[tuple[int, np.ndarray]]


def _newell_normal(pts: np.ndarray) -> np.ndarray:
    nxt = np.roll(pts, -1, axis=0)
    n = np.array([
        np.sum((pts[:, 1] - nxt[:, 1]) * (pts[:, 2] + nxt[:, 2])),
        np.sum((pts[:, 2] - nxt[:, 2]) * (pts[:, 0] + nxt[:, 0])),
        np.sum((pts[:, 0] - nxt[:, 0]) * (pts[:, 1] + nxt[:, 1])),
    ])
    return n


def _validate_shell(verts: np.ndarray, loops: list[list[int]], label: str) -> None:
    if len(verts) < 4:
        raise ContainerError(f"{label}: need at least 4 vertices, got {len(verts)}")
    if len(loops) < 4:
        raise ContainerError(f"{label}: need at least 4 faces, got {len(loops)}")
    if not np.isfinite(verts).all():
        raise ContainerError(f"{label}: non-finite vertex coordinates")
    scale = float(np.max(np.ptp(verts, axis=0)))
    if scale <= 0:
        raise EmptyInteriorError(f"{label}: all vertices coincide")

    edge_count: Counter = Counter()
    for fi, loop in enumerate(loops):
        if len(loop) < 3:
            raise DegenerateFaceError(f"{label} face {fi}: fewer than 3 vertices")
        if len(set(loop)) != len(loop):
            raise DegenerateFaceError(f"{label} face {fi}: repeated vertex in loop")
        if min(loop) < 0 or max(loop) >= len(verts):
            raise ContainerError(f"{label} face {fi}: vertex index out of range")
        pts = verts[loop]
        n = _newell_normal(pts)
        area2 = float(np.linalg.norm(n))
        if area2 < 1e-12 * scale * scale:
            raise DegenerateFaceError(f"{label} face {fi}: zero area")
        unit = n / area2
        offsets = (pts - pts[0]) @ unit
        if float(np.max(np.abs(offsets))) > SURFACE_TOL:
            raise NonPlanarFaceError(
                f"{label} face {fi}: vertices deviate from a plane by "
                f"{float(np.max(np.abs(offsets))):.2e}")
        # Convexity (fan triangulation requires convex faces): consecutive
        # edge cross products must all align with the face normal.
        prev = pts - np.roll(pts, 1, axis=0)
        nxt = np.roll(pts, -1, axis=0) - pts
        turns = np.cross(prev, nxt) @ unit
        if np.any(turns < 1e-12 * scale * scale):
            raise NonConvexFaceError(
                f"{label} face {fi}: reflex or collinear vertices (convex faces required)")
        for a, b in zip(loop, loop[1:] + loop[:1]):
            edge_count[(min(a, b), max(a, b))] += 1
    bad = [e for e, c in edge_count.items() if c != 2]
    if bad:
        raise NonManifoldError(
            f"{label}: {len(bad)} edge(s) not shared by exactly two faces, e.g. {bad[0]}")


class PolyhedralContainer:
    """Validated polyhedral solid with oriented faces and derived edges.

    Use :func:`build_container`, :func:`builtin_container` or
    :func:`load_container` instead of calling this constructor directly.
    """

    def __init__(self, vertices: np.ndarray, faces: list[Face], edges: list[Segment3],
                 holes: int, bounding_box: tuple[np.ndarray, np.ndarray], volume: float,
                 convex: bool, json_spec: dict):
        self.vertices = vertices
        self.faces = faces
        self.edges = edges
        self.holes = holes
        self.bounding_box = bounding_box
        self.volume = volume
        self.convex = convex
        self._json_spec = json_spec

        self.face_normals = np.array([f.inward_normal for f in faces])
        self.face_plane_points = np.array([f.plane_point for f in faces])
        self.face_offsets = np.sum(self.face_normals * self.face_plane_points, axis=1)
        self.edge_starts = np.array([s.a for s in edges])
        self.edge_vectors = np.array([s.vector for s in edges])

        # Per-face polygon edge data for boundary-inclusive in-polygon tests:
        # for each face, in-plane normals of its edges pointing toward the
        # polygon interior. Padded to the longest loop (padding repeats the
        # first edge, which never changes the minimum margin) so the test
        # runs as one batched contraction.
        max_loop = max(len(f.vertex_loop) for f in faces)
        self._poly_pts = np.zeros((len(faces), max_loop, 3))
        self._poly_normals = np.zeros((len(faces), max_loop, 3))
        for fi, f in enumerate(faces):
            pts = vertices[list(f.vertex_loop)]
            nxt = np.roll(pts, -1, axis=0)
            inward = np.cross(f.inward_normal, nxt - pts)
            norms = np.linalg.norm(inward, axis=1, keepdims=True)
            inward = inward / norms
            centroid = pts.mean(axis=0)
            # flip each edge normal toward the centroid if needed
            flip = np.sum(inward * (centroid - pts), axis=1) < 0
            inward[flip] *= -1.0
            k = len(pts)
            self._poly_pts[fi, :k] = pts
            self._poly_normals[fi, :k] = inward
            if k < max_loop:
                self._poly_pts[fi, k:] = pts[0]
                self._poly_normals[fi, k:] = inward[0]
        self._poly_base = np.einsum("fkj,fkj->fk", self._poly_pts, self._poly_normals)

        # Fan triangulation for ray casting.
        tri_v0, tri_v1, tri_v2, tri_face = [], [], [], []
        for fi, f in enumerate(faces):
            loop = f.vertex_loop
            for k in range(1, len(loop) - 1):
                tri_v0.append(vertices[loop[0]])
                tri_v1.append(vertices[loop[k]])
                tri_v2.append(vertices[loop[k + 1]])
                tri_face.append(fi)
        self._tri_v0 = np.array(tri_v0)
        self._tri_e1 = np.array(tri_v1) - self._tri_v0
        self._tri_e2 = np.array(tri_v2) - self._tri_v0
        self._tri_face = np.array(tri_face, dtype=int)
        tri_n = np.cross(self._tri_e1, self._tri_e2)
        self._tri_n = tri_n
        self._tri_n_len = np.linalg.norm(tri_n, axis=1)
        # Gram inverse for barycentric coordinates of projected points.
        d11 = np.sum(self._tri_e1 * self._tri_e1, axis=1)
        d12 = np.sum(self._tri_e1 * self._tri_e2, axis=1)
        d22 = np.sum(self._tri_e2 * self._tri_e2, axis=1)
        det = d11 * d22 - d12 * d12
        self._bary = (d11, d12, d22, 1.0 / det)

    # ------------------------------------------------------------------
    # interiority
    # ------------------------------------------------------------------

    def _on_surface(self, points: np.ndarray) -> np.ndarray:
        """True where a point lies within SURFACE_TOL of some face triangle."""
        w = points[:, None, :] - self._tri_v0[None, :, :]
        plane_dist = np.abs(np.einsum("ntj,tj->nt", w, self._tri_n)) / self._tri_n_len[None]
        d1 = np.einsum("ntj,tj->nt", w, self._tri_e1)
        d2 = np.einsum("ntj,tj->nt", w, self._tri_e2)
        d11, d12, d22, inv_det = self._bary
        u = (d22 * d1 - d12 * d2) * inv_det
        v = (d11 * d2 - d12 * d1) * inv_det
        on_tri = ((plane_dist <= SURFACE_TOL) & (u >= -SURFACE_TOL)
                  & (v >= -SURFACE_TOL) & (u + v <= 1.0 + SURFACE_TOL))
        return on_tri.any(axis=1)

    def _ray_parity(self, origins: np.ndarray, dirs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Crossing parity and graze flag for one ray per origin row."""
        s = origins[:, None, :] - self._tri_v0[None, :, :]           # (m, T, 3)
        plane_term = np.einsum("mtj,tj->mt", s, self._tri_n)         # s . (e1 x e2)
        h = _cross(dirs[:, None, :], self._tri_e2[None, :, :])
        a = np.einsum("tj,mtj->mt", self._tri_e1, h)
        near_parallel = np.abs(a) < 1e-12
        f = 1.0 / np.where(near_parallel, 1.0, a)
        u = f * np.einsum("mtj,mtj->mt", s, h)
        q = _cross(s, self._tri_e1[None, :, :])
        v = f * np.einsum("mj,mtj->mt", dirs, q)
        t = f * plane_term
        wbar = 1.0 - u - v
        tol = SURFACE_TOL
        hit = (~near_parallel) & (t > tol) & (u > tol) & (v > tol) & (wbar > tol)
        graze_hit = ((~near_parallel) & (t > tol)
                     & (u > -tol) & (v > -tol) & (wbar > -tol) & ~hit)
        in_plane = near_parallel & (np.abs(plane_term) / self._tri_n_len[None] < tol)
        graze = (graze_hit | in_plane).any(axis=1)
        parity = (hit.sum(axis=1) % 2).astype(bool)
        return parity, graze

    def classify_points(self, points: np.ndarray, rng: np.random.Generator,
                        rays: int | None = None) -> np.ndarray:
        """Interiority of many points at once (majority vote of ray parities).

        Points on the boundary (within SURFACE_TOL of a face) count as
        inside. Points strictly outside the bounding box are classified
        without casting rays.
        """
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[None, :]
        if not np.isfinite(points).all():
            raise ValueError("non-finite point passed to interiority test")
        r = DEFAULT_RAYS if rays is None else int(rays)
        n = points.shape[0]
        result = np.zeros(n, dtype=bool)

        lo, hi = self.bounding_box
        in_box = np.all((points >= lo - SURFACE_TOL) & (points <= hi + SURFACE_TOL), axis=1)
        idx_box = np.nonzero(in_box)[0]
        if idx_box.size == 0:
            return result

        for start in range(0, idx_box.size, 1024):
            idx = idx_box[start:start + 1024]
            pts = points[idx]
            m = pts.shape[0]
            on_surf = self._on_surface(pts)
            origins = np.repeat(pts, r, axis=0)
            dirs = random_unit_directions(rng, m * r)
            parity, graze = self._ray_parity(origins, dirs)
            attempts = 0
            while graze.any() and attempts < MAX_RECASTS:
                bad = np.nonzero(graze)[0]
                dirs[bad] = random_unit_directions(rng, bad.size)
                parity[bad], graze[bad] = self._ray_parity(origins[bad], dirs[bad])
                attempts += 1
            votes = parity.reshape(m, r).sum(axis=1)
            result[idx] = on_surf | (votes > r // 2)
        return result

    # ------------------------------------------------------------------
    # active faces and footpoints
    # ------------------------------------------------------------------

    def signed_plane_offsets(self, points: np.ndarray) -> np.ndarray:
        """Signed offset of each point from each face plane along the inward normal."""
        return points @ self.face_normals.T - self.face_offsets[None, :]

    def active_face_matrix(self, points: np.ndarray, inside: np.ndarray,
                           signed: np.ndarray | None = None) -> np.ndarray:
        """Boolean (n, F) matrix of the active-face rule.

        A face is active for an inside point lying on or above its inward
        side, and for an outside point lying strictly behind it.
        """
        if signed is None:
            signed = self.signed_plane_offsets(points)
        return np.where(inside[:, None], signed >= 0.0, signed < 0.0)

    def feet_in_polygon(self, points: np.ndarray, signed: np.ndarray) -> np.ndarray:
        """Boolean (n, F): does the orthogonal foot land on the face polygon?

        Boundary-inclusive with SURFACE_TOL slack. The polygon edge normals
        are perpendicular to the face normal, so the foot's margins equal the
        point's own margins and the feet never need materializing.
        """
        margins = np.einsum("nj,fkj->nfk", points, self._poly_normals) - self._poly_base[None]
        return margins.min(axis=2) >= -SURFACE_TOL

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------

    def to_json_dict(self) -> dict:
        """Geometry in the interchange schema (normals are derived, not stored)."""
        return json.loads(json.dumps(self._json_spec))

    def __repr__(self):
        return (f"PolyhedralContainer(|V|={len(self.vertices)}, |E|={len(self.edges)}, "
                f"|F|={len(self.faces)}, holes={self.holes}, volume={self.volume:.6g})")


def _raw_parity_vote(tri_v0, tri_e1, tri_e2, tri_n, tri_n_len, point, rng, rays=DEFAULT_RAYS):
    """Orientation bootstrap: parity vote before normals are fixed."""
    tmp = PolyhedralContainer.__new__(PolyhedralContainer)
    tmp._tri_v0, tmp._tri_e1, tmp._tri_e2 = tri_v0, tri_e1, tri_e2
    tmp._tri_n, tmp._tri_n_len = tri_n, tri_n_len
    origins = np.repeat(point[None, :], rays, axis=0)
    dirs = random_unit_directions(rng, rays)
    parity, graze = PolyhedralContainer._ray_parity(tmp, origins, dirs)
    attempts = 0
    while graze.any() and attempts < MAX_RECASTS:
        bad = np.nonzero(graze)[0]
        dirs[bad] = random_unit_directions(rng, bad.size)
        parity[bad], graze[bad] = PolyhedralContainer._ray_parity(
            tmp, origins[bad], dirs[bad])
        attempts += 1
    return int(parity.sum()) > rays // 2


def build_container(vertices, face_loops, hole_shells=()) -> PolyhedralContainer:
    """Construct and validate a container from raw shell data.

    ``vertices``/``face_loops`` describe the outer boundary; each entry of
    ``hole_shells`` is a ``(vertices, face_loops)`` pair for one polyhedral
    hole. Inward normals are derived automatically: each face normal is
    flipped, if necessary, so that stepping a small distance off the face
    centroid along it lands inside the solid. Volume comes from the
    divergence theorem over the oriented faces.
    """
    shells = [(np.asarray(vertices, dtype=float), [list(l) for l in face_loops])]
    for hv, hf in hole_shells:
        shells.append((np.asarray(hv, dtype=float), [list(l) for l in hf]))

    for si, (verts, loops) in enumerate(shells):
        label = "outer shell" if si == 0 else f"hole {si - 1}"
        _validate_shell(verts, loops, label)

    all_verts = []
    all_loops = []
    offset = 0
    for verts, loops in shells:
        all_verts.append(verts)
        for loop in loops:
            all_loops.append([i + offset for i in loop])
        offset += len(verts)
    merged = np.vstack(all_verts)

    lo = merged.min(axis=0)
    hi = merged.max(axis=0)
    diag = float(np.linalg.norm(hi - lo))
    delta = 1e-6 * diag

    # provisional normals from loop orientation
    normals = []
    for loop in all_loops:
        n = _newell_normal(merged[loop])
        normals.append(n / np.linalg.norm(n))
    normals = np.array(normals)

    tri_v0, tri_v1, tri_v2 = [], [], []
    for loop in all_loops:
        for k in range(1, len(loop) - 1):
            tri_v0.append(merged[loop[0]])
            tri_v1.append(merged[loop[k]])
            tri_v2.append(merged[loop[k + 1]])
    tri_v0 = np.array(tri_v0)
    tri_e1 = np.array(tri_v1) - tri_v0
    tri_e2 = np.array(tri_v2) - tri_v0
    tri_n = np.cross(tri_e1, tri_e2)
    tri_n_len = np.linalg.norm(tri_n, axis=1)

    orient_rng = np.random.default_rng(_ORIENT_SEED)
    for fi, loop in enumerate(all_loops):
        centroid = merged[loop].mean(axis=0)
        plus = _raw_parity_vote(tri_v0, tri_e1, tri_e2, tri_n, tri_n_len,
                                centroid + delta * normals[fi], orient_rng)
        minus = _raw_parity_vote(tri_v0, tri_e1, tri_e2, tri_n, tri_n_len,
                                 centroid - delta * normals[fi], orient_rng)
        if plus and not minus:
            continue
        if minus and not plus:
            normals[fi] = -normals[fi]
        else:
            raise ContainerError(
                f"cannot orient face {fi}: both sides classify as "
                f"{'inside' if plus else 'outside'}")

    faces = [Face(tuple(loop), normals[fi], merged[loop[0]].copy())
             for fi, loop in enumerate(all_loops)]

    # unique undirected edges with actual coordinates
    seen = set()
    edges = []
    for loop in all_loops:
        for a, b in zip(loop, loop[1:] + loop[:1]):
            key = (min(a, b), max(a, b))
            if key in seen:
                continue
            seen.add(key)
            if float(np.max(np.abs(merged[b] - merged[a]))) < 1e-12:
                raise DegenerateFaceError(f"zero-length edge between vertices {a} and {b}")
            edges.append(Segment3(merged[a].copy(), merged[b].copy()))

    # divergence theorem: V = (1/3) sum over faces of (p . n_out) * area,
    # with n_out = -inward. Face area from the fan (faces are convex).
    volume = 0.0
    for fi, loop in enumerate(all_loops):
        pts = merged[loop]
        area = 0.0
        for k in range(1, len(loop) - 1):
            area += 0.5 * np.linalg.norm(np.cross(pts[k] - pts[0], pts[k + 1] - pts[0]))
        volume += float(np.dot(pts[0], -normals[fi])) * area
    volume /= 3.0
    if volume <= 0:
        raise EmptyInteriorError(f"non-positive enclosed volume {volume:.3e}")

    holes = len(shells) - 1
    convex = holes == 0
    if convex:
        offs = merged @ normals.T - np.sum(normals * np.array(
            [merged[loop[0]] for loop in all_loops]), axis=1)[None, :]
        convex = bool(np.all(offs >= -SURFACE_TOL))

    json_spec = {
        "vertices": [[float(c) for c in v] for v in shells[0][0]],
        "faces": [[int(i) for i in loop] for loop in shells[0][1]],
    }
    if holes:
        json_spec["holes"] = [
            {"vertices": [[float(c) for c in v] for v in hv],
             "faces": [[int(i) for i in loop] for loop in hf]}
            for hv, hf in shells[1:]
        ]

    container = PolyhedralContainer(
        vertices=merged, faces=faces, edges=edges, holes=holes,
        bounding_box=(lo, hi), volume=volume, convex=convex, json_spec=json_spec)

    # interior must be non-empty and reachable by sampling
    probe_rng = np.random.default_rng(_ORIENT_SEED + 1)
    try:
        sample_interior(container, 1, probe_rng, max_attempts_per_point=5000)
    except SamplingExhausted:
        raise EmptyInteriorError("no interior point found by rejection sampling") from None

    # orientation consistency: stepping inward off each face centroid must land inside
    checks = np.array([container.vertices[list(f.vertex_loop)].mean(axis=0)
                       + delta * f.inward_normal for f in faces])
    if not container.classify_points(checks, probe_rng).all():
        raise ContainerError("inconsistent face orientation after normal fixing")
    return container


def contains(container: PolyhedralContainer, p, rng: np.random.Generator,
             rays: int | None = None) -> bool:
    """Point-in-container test by majority-voted ray casting.

    Boundary points count as inside (ties break toward feasibility).
    """
    return bool(container.classify_points(np.asarray(p, dtype=float)[None, :], rng, rays)[0])


def active_faces(container: PolyhedralContainer, c, inside: bool) -> list[int]:
    """Indices of faces active for ``c`` given its interiority."""
    pts = np.asarray(c, dtype=float)[None, :]
    mask = container.active_face_matrix(pts, np.array([inside]))
    return [int(i) for i in np.nonzero(mask[0])[0]]


def active_footpoints(container: PolyhedralContainer, c, inside: bool) -> ActiveSet:
    """Active faces of ``c`` plus the orthogonal feet that land on their polygons."""
    pts = np.asarray(c, dtype=float)[None, :]
    signed = container.signed_plane_offsets(pts)
    mask = container.active_face_matrix(pts, np.array([inside]), signed)
    in_poly = container.feet_in_polygon(pts, signed)
    act = [int(i) for i in np.nonzero(mask[0])[0]]
    feet = []
    for fi in act:
        if in_poly[0, fi]:
            foot = pts[0] - signed[0, fi] * container.face_normals[fi]
            feet.append((fi, foot))
    return ActiveSet(active_faces=act, footpoints=feet)


def sample_interior(container: PolyhedralContainer, count: int, rng: np.random.Generator,
                    max_attempts_per_point: int = 1000,
                    rays: int | None = None) -> np.ndarray:
    """Uniform samples inside the container via rejection from the bounding box."""
    lo, hi = container.bounding_box
    out = np.empty((count, 3))
    have = 0
    budget = max_attempts_per_point * max(count, 1)
    spent = 0
    while have < count:
        want = count - have
        batch = min(max(4 * want, 64), budget - spent)
        if batch <= 0:
            raise SamplingExhausted(
                f"interior sampling exhausted after {spent} attempts "
                f"({have}/{count} accepted)")
        cand = rng.uniform(lo, hi, size=(batch, 3))
        spent += batch
        ok = container.classify_points(cand, rng, rays)
        take = min(int(ok.sum()), want)
        if take:
            out[have:have + take] = cand[ok][:take]
            have += take
    return out


# ----------------------------------------------------------------------
# built-in geometries
# ----------------------------------------------------------------------

def _box_union_surface(cells: list[tuple[int, int, int]], origin=(0.0, 0.0, 0.0),
                       size: float = 1.0):
    """Boundary squares of a union of unit grid cells.

    Returns (vertices, face_loops) with one square face per cell side that
    borders an unoccupied cell, so the decomposition is manifold with
    consistent edge granularity.
    """
    occupied = set(cells)
    origin = np.asarray(origin, dtype=float)
    node_index: dict[tuple[int, int, int], int] = {}
    verts: list[np.ndarray] = []

    def node(ix, iy, iz):
        key = (ix, iy, iz)
        if key not in node_index:
            node_index[key] = len(verts)
            verts.append(origin + size * np.array(key, dtype=float))
        return node_index[key]

    # corner offsets of each cell side, ordered as a loop
    sides = {
        (-1, 0, 0): [(0, 0, 0), (0, 1, 0), (0, 1, 1), (0, 0, 1)],
        (1, 0, 0): [(1, 0, 0), (1, 1, 0), (1, 1, 1), (1, 0, 1)],
        (0, -1, 0): [(0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 0, 1)],
        (0, 1, 0): [(0, 1, 0), (1, 1, 0), (1, 1, 1), (0, 1, 1)],
        (0, 0, -1): [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)],
        (0, 0, 1): [(0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)],
    }
    loops = []
    for cell in sorted(occupied):
        cx, cy, cz = cell
        for (dx, dy, dz), corners in sides.items():
            if (cx + dx, cy + dy, cz + dz) in occupied:
                continue
            loops.append([node(cx + ox, cy + oy, cz + oz) for ox, oy, oz in corners])
    return np.array(verts), loops


def _unit_cube():
    verts = np.array([[x, y, z] for x in (0.0, 1.0) for y in (0.0, 1.0) for z in (0.0, 1.0)])
    loops = [
        [0, 1, 3, 2], [4, 5, 7, 6],  # x = 0, x = 1
        [0, 1, 5, 4], [2, 3, 7, 6],  # y = 0, y = 1
        [0, 2, 6, 4], [1, 3, 7, 5],  # z = 0, z = 1
    ]
    return verts, loops


def _unit_tetrahedron():
    verts = np.array([
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.5, math.sqrt(3.0) / 2.0, 0.0],
        [0.5, math.sqrt(3.0) / 6.0, math.sqrt(6.0) / 3.0],
    ])
    loops = [[0, 1, 2], [0, 1, 3], [1, 2, 3], [0, 2, 3]]
    return verts, loops


def _h_box():
    # two 1x1x3 columns bridged by a 1x1x1 crossbar at mid-height
    cells = [(0, 0, 0), (0, 0, 1), (0, 0, 2),
             (2, 0, 0), (2, 0, 1), (2, 0, 2),
             (1, 0, 1)]
    return _box_union_surface(cells)


def _star():
    # cube core [-1,1]^3 whose six faces are replaced by square pyramids
    # apexed two units from the center
    corners = np.array([[x, y, z] for x in (-1.0, 1.0) for y in (-1.0, 1.0)
                        for z in (-1.0, 1.0)])
    apexes = np.array([
        [2.0, 0.0, 0.0], [-2.0, 0.0, 0.0],
        [0.0, 2.0, 0.0], [0.0, -2.0, 0.0],
        [0.0, 0.0, 2.0], [0.0, 0.0, -2.0],
    ])
    verts = np.vstack([corners, apexes])
    face_corner_sets = {
        8: [i for i, v in enumerate(corners) if v[0] > 0],
        9: [i for i, v in enumerate(corners) if v[0] < 0],
        10: [i for i, v in enumerate(corners) if v[1] > 0],
        11: [i for i, v in enumerate(corners) if v[1] < 0],
        12: [i for i, v in enumerate(corners) if v[2] > 0],
        13: [i for i, v in enumerate(corners) if v[2] < 0],
    }
    loops = []
    for apex, idx in face_corner_sets.items():
        # order the 4 corners cyclically around the face center
        pts = corners[idx]
        center = pts.mean(axis=0)
        axis = verts[apex] - center
        axis = axis / np.linalg.norm(axis)
        ref = pts[0] - center
        ref = ref - np.dot(ref, axis) * axis
        ref = ref / np.linalg.norm(ref)
        other = np.cross(axis, ref)
        ang = np.arctan2((pts - center) @ other, (pts - center) @ ref)
        ordered = [idx[k] for k in np.argsort(ang)]
        for k in range(4):
            loops.append([ordered[k], ordered[(k + 1) % 4], apex])
    return verts, loops


_BUILTIN_ALIASES = {
    "cube": "unit_cube",
    "unit_cube": "unit_cube",
    "tetrahedron": "unit_tetrahedron",
    "unit_tetrahedron": "unit_tetrahedron",
    "h_box": "h_box",
    "hbox": "h_box",
    "star": "star",
}

_BUILTIN_BUILDERS = {
    "unit_cube": _unit_cube,
    "unit_tetrahedron": _unit_tetrahedron,
    "h_box": _h_box,
    "star": _star,
}

_builtin_cache: dict[str, PolyhedralContainer] = {}


def builtin_container(name: str) -> PolyhedralContainer:
    """One of the built-in benchmark geometries.

    ``unit_cube``: [0,1]^3. ``unit_tetrahedron``: regular, unit edge.
    ``h_box``: two 1x1x3 columns joined by a mid-height 1x1x1 crossbar.
    ``star``: cube core [-1,1]^3 with six square pyramids apexed at
    distance 2 from the center (24 triangular faces).
    """
    key = _BUILTIN_ALIASES.get(str(name).lower())
    if key is None:
        valid = ", ".join(sorted(_BUILTIN_BUILDERS))
        raise ValueError(f"unknown container {name!r} (valid: {valid})")
    if key not in _builtin_cache:
        verts, loops = _BUILTIN_BUILDERS[key]()
        c = build_container(verts, loops)
        c._json_spec = {"builtin": key}
        _builtin_cache[key] = c
    return _builtin_cache[key]


def container_from_json(obj: dict) -> PolyhedralContainer:
    """Container from the JSON interchange schema.

    ``{"vertices": [[x,y,z],...], "faces": [[i,j,k,...],...],
    "holes": [{"vertices": ..., "faces": ...}, ...]}`` with 0-based indices,
    or ``{"builtin": name}``.
    """
    if "builtin" in obj:
        return builtin_container(obj["builtin"])
    holes = [(h["vertices"], h["faces"]) for h in obj.get("holes", [])]
    return build_container(obj["vertices"], obj["faces"], holes)


def load_container(path) -> PolyhedralContainer:
    """Read a container from a JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        return container_from_json(json.load(fh))
