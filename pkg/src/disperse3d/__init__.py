"""Continuous p-dispersion in 3D polyhedral containers.

Place p points inside a polyhedral container (convex or not, possibly with
holes) so that the minimum pairwise distance and the minimum clearance to
the boundary are maximized, under the Euclidean, Chebyshev or Manhattan
metric. Feasibility at a fixed radius is solved by tabu search over an
almost-everywhere differentiable violation energy; the radius is then grown
by a sequential penalty method inside a multi-start loop.
"""

from .container import (
    ActiveSet,
    ContainerError,
    DegenerateFaceError,
    EmptyInteriorError,
    Face,
    NonConvexFaceError,
    NonManifoldError,
    NonPlanarFaceError,
    PolyhedralContainer,
    SamplingExhausted,
    active_faces,
    active_footpoints,
    build_container,
    builtin_container,
    container_from_json,
    contains,
    load_container,
    sample_interior,
)
from .energy import (
    EnergyBreakdown,
    boundary_penalty,
    energy_gradient,
    pair_penalty,
    point_energy,
    sumt_gradient,
    sumt_objective,
    total_energy,
    vacancy_energy,
)
from .geometry import (
    Metric,
    Segment3,
    distance,
    distance_point_segment,
    project_onto_plane,
    random_unit_direction,
)
from .localopt import OptimizerSettings, local_opt, local_opt_phi
from .oracle import FeasibilityReport, boundary_distance, feasibility_margins
from .references import REFERENCES, ReferenceRecord, lookup
from .solver import (
    InfeasibleResult,
    MbhParams,
    Solution,
    SolverParams,
    TabuParams,
    adjust_distance,
    default_params,
    feasible_radius,
    solve,
)
from .tabu import Move, TabuEntry, TabuList, high_energy_points, mbh, tabu_search, vacancy_sites

__version__ = "0.1.0"

__all__ = [
    "ActiveSet",
    "ContainerError",
    "DegenerateFaceError",
    "EmptyInteriorError",
    "EnergyBreakdown",
    "Face",
    "FeasibilityReport",
    "InfeasibleResult",
    "MbhParams",
    "Metric",
    "Move",
    "NonConvexFaceError",
    "NonManifoldError",
    "NonPlanarFaceError",
    "OptimizerSettings",
    "PolyhedralContainer",
    "REFERENCES",
    "ReferenceRecord",
    "SamplingExhausted",
    "Segment3",
    "Solution",
    "SolverParams",
    "TabuEntry",
    "TabuList",
    "TabuParams",
    "active_faces",
    "active_footpoints",
    "adjust_distance",
    "boundary_distance",
    "boundary_penalty",
    "build_container",
    "builtin_container",
    "container_from_json",
    "contains",
    "default_params",
    "distance",
    "distance_point_segment",
    "energy_gradient",
    "feasibility_margins",
    "feasible_radius",
    "high_energy_points",
    "load_container",
    "local_opt",
    "local_opt_phi",
    "lookup",
    "mbh",
    "pair_penalty",
    "point_energy",
    "project_onto_plane",
    "random_unit_direction",
    "sample_interior",
    "solve",
    "sumt_gradient",
    "sumt_objective",
    "tabu_search",
    "total_energy",
    "vacancy_energy",
    "vacancy_sites",
]
