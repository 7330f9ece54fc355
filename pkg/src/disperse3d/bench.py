"""Benchmark harness: run sweeps, verify solutions, export results.

Reports compare achieved radii against the embedded reference values and
always recompute the error columns. Displayed distances are truncated (not
rounded) to eight decimal places; solution files keep full precision so
verification is exact. Solution JSON deliberately excludes wall-clock
runtime, which lands in the run report instead, so identical seeds produce
byte-identical solution files.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .container import PolyhedralContainer, builtin_container, container_from_json, load_container
from .energy import total_energy
from .geometry import Metric
from .oracle import FeasibilityReport, feasibility_margins
from .references import lookup
from .solver import Solution, default_params, solve

__all__ = [
    "RunReport",
    "VERIFY_TOL",
    "export",
    "load_solution",
    "resolve_container",
    "run_benchmark",
    "save_solution",
    "truncate8",
    "verify",
    "verify_solution",
]

VERIFY_TOL = 1e-7


def truncate8(x: float) -> float:
    """Truncate toward zero to eight decimal places (reporting convention)."""
    return math.trunc(x * 1e8) / 1e8


@dataclass
class RunReport:
    """One benchmark run joined with its reference value, if any."""

    solution: Solution
    container_name: str
    d_best: float | None = None
    reference_source: str | None = None

    @property
    def a_err(self) -> float | None:
        if self.d_best is None:
            return None
        return self.solution.d - self.d_best

    @property
    def r_err_percent(self) -> float | None:
        if self.d_best is None:
            return None
        return (self.solution.d - self.d_best) / self.d_best * 100.0

    def row(self) -> dict:
        out = {
            "container": self.container_name,
            "metric": self.solution.metric.value,
            "p": self.solution.p,
            "d": f"{truncate8(self.solution.d):.8f}",
            "d_best": "" if self.d_best is None else f"{truncate8(self.d_best):.8f}",
            "a_err": "" if self.a_err is None else f"{self.a_err:.3e}",
            "r_err_percent": "" if self.r_err_percent is None else f"{self.r_err_percent:+.4f}",
            "source": self.reference_source or "",
            "runtime_seconds": f"{self.solution.runtime_seconds:.3f}",
            "seed": self.solution.seed,
        }
        return out


def resolve_container(spec: str) -> tuple[str, PolyhedralContainer]:
    """Container from a built-in name or a JSON file path."""
    path = Path(spec)
    if path.suffix == ".json" or path.exists():
        return path.stem, load_container(path)
    c = builtin_container(spec)
    return c.to_json_dict().get("builtin", spec), c


def run_benchmark(suite: str, p_list, metric: Metric, params_overrides: dict | None = None,
                  seed: int = 0, out_dir=None, progress=None) -> list[RunReport]:
    """Solve a sweep of instance sizes on one container.

    ``suite`` is a built-in name or a container file path. Overrides are
    applied on top of the size-scaled default parameters for every run.
    When ``out_dir`` is given, a solution JSON per run and a cumulative
    ``report.csv`` are written there.
    """
    name, container = resolve_container(suite)
    reports: list[RunReport] = []
    for p in p_list:
        params = default_params(int(p), container, seed=seed)
        for key, value in (params_overrides or {}).items():
            if not hasattr(params, key):
                raise ValueError(f"unknown solver parameter {key!r}")
            setattr(params, key, value)
        solution = solve(container, metric, int(p), params)
        recheck = total_energy(container, metric, solution.configuration, solution.d,
                               np.random.default_rng(0), params.rays)
        if recheck.total > VERIFY_TOL:
            raise RuntimeError(
                f"internal error: re-verified energy {recheck.total:.3e} exceeds "
                f"{VERIFY_TOL} for p={p}; refusing to report an infeasible solution")
        ref = lookup(name, metric.value, int(p))
        report = RunReport(solution=solution, container_name=name,
                           d_best=None if ref is None else ref.d_best,
                           reference_source=None if ref is None else ref.source)
        reports.append(report)
        if progress is not None:
            progress(report)
        if out_dir is not None:
            out = Path(out_dir)
            out.mkdir(parents=True, exist_ok=True)
            save_solution(solution, out / f"solution_{name}_{metric.value}_p{p}.json")
            _write_report_csv(reports, out / "report.csv")
    return reports


def _write_report_csv(reports: list[RunReport], path: Path) -> None:
    rows = [r.row() for r in reports]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


# ----------------------------------------------------------------------
# solution files
# ----------------------------------------------------------------------

def save_solution(solution: Solution, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(solution.to_json_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_solution(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "points" not in data or "d" not in data:
        raise ValueError(f"{path}: not a solution file")
    return data


def verify_solution(data: dict, rng=None) -> FeasibilityReport:
    """Re-check a stored solution against the raw constraint definitions."""
    container = container_from_json(data["container"])
    metric = Metric.from_name(data["metric"])
    points = np.asarray(data["points"], dtype=float)
    d_radius = float(data["d"])
    rng = rng if rng is not None else np.random.default_rng(0)
    return feasibility_margins(container, metric, points, d_radius, rng)


def verify(path, rng=None, tol: float = VERIFY_TOL) -> tuple[bool, FeasibilityReport]:
    """Feasibility verdict for a solution file."""
    report = verify_solution(load_solution(path), rng)
    return report.feasible(tol), report


# ----------------------------------------------------------------------
# exports
# ----------------------------------------------------------------------

def _icosphere(subdivisions: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Unit icosphere mesh (vertices, triangles)."""
    t = (1.0 + math.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=float)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = list(verts)
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = verts[i] + verts[j]
                m /= np.linalg.norm(m)
                cache[key] = len(verts)
                verts.append(m)
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    return np.array(verts), np.array(faces, dtype=int)


def export(solution_or_data, fmt: str, path) -> Path:
    """Write a solution as ``json``, ``csv`` or ``obj-spheres``.

    The OBJ export writes one icosphere of radius D per point plus the
    container edges as polyline elements, viewable in standard mesh tools.
    """
    if isinstance(solution_or_data, Solution):
        data = solution_or_data.to_json_dict()
    else:
        data = solution_or_data
    path = Path(path)
    points = np.asarray(data["points"], dtype=float)
    d_radius = float(data["d"])

    if fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(data, fh, indent=1, sort_keys=True)
            fh.write("\n")
        return path

    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "x", "y", "z", "d"])
            for i, row in enumerate(points):
                writer.writerow([i, repr(float(row[0])), repr(float(row[1])),
                                 repr(float(row[2])), repr(d_radius)])
        return path

    if fmt == "obj-spheres":
        container = container_from_json(data["container"])
        sphere_v, sphere_f = _icosphere(1)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# disperse3d solution export\n")
            fh.write(f"# p={len(points)} d={d_radius!r}\n")
            offset = 1  # OBJ indices are 1-based
            for i, center in enumerate(points):
                fh.write(f"o sphere_{i}\n")
                for v in sphere_v * d_radius + center:
                    fh.write(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
                for a, b, c in sphere_f:
                    fh.write(f"f {a + offset} {b + offset} {c + offset}\n")
                offset += len(sphere_v)
            fh.write("o container\n")
            for v in container.vertices:
                fh.write(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
            index = {}
            for i in range(len(container.vertices)):
                index[i] = offset + i
            for seg in container.edges:
                a = int(np.argmin(np.linalg.norm(container.vertices - seg.a, axis=1)))
                b = int(np.argmin(np.linalg.norm(container.vertices - seg.b, axis=1)))
                fh.write(f"l {index[a]} {index[b]}\n")
        return path

    raise ValueError(f"unknown export format {fmt!r} (json, csv, obj-spheres)")


def default_output_dir() -> Path:
    """Output directory from the environment, or ./runs."""
    return Path(os.environ.get("DISPERSE3D_OUT", "runs"))
