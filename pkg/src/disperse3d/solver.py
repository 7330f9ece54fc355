"""Global optimization driver.

The pipeline alternates two phases. Tabu search finds a zero-energy
(feasible) configuration at a fixed radius; a sequential penalty scheme then
maximizes the radius by minimizing ``-D^2 + mu * E(X, D)`` for a geometric
ladder of penalty weights, letting the configuration breathe while the
radius grows. A multi-start loop repeats the two phases from fresh random
configurations, each restart attempting to beat the incumbent radius, which
therefore never decreases.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .container import PolyhedralContainer, sample_interior
from .energy import EnergyBreakdown, _as_config, _boundary_eval, total_energy
from .geometry import Metric, metric_length
from .localopt import OptimizerSettings, local_opt_ex, local_opt_phi
from .tabu import tabu_search

__all__ = [
    "InfeasibleResult",
    "MbhParams",
    "Solution",
    "SolverParams",
    "TabuParams",
    "adjust_distance",
    "default_params",
    "feasible_radius",
    "solve",
]


class InfeasibleResult(RuntimeError):
    """The initial stage never produced a configuration within tolerance."""

    def __init__(self, message: str, energy: float, d_radius: float):
        super().__init__(message)
        self.energy = energy
        self.d_radius = d_radius


@dataclass
class TabuParams:
    tenure: int = 10
    capacity: int = 10
    radius_scale: float = 0.5


@dataclass
class MbhParams:
    trials: int = 3
    subset_fraction: float = 1.0 / 3.0
    scale_fraction: float = 0.5


@dataclass
class SolverParams:
    """Every tuning knob of the pipeline in one place."""

    beta: int = 5
    q: int = 3
    epsilon: float = 1e-8
    iterations: int = 1
    sumt_rounds: int = 15
    mu_init: float = 10.0
    mu_factor: float = 5.0
    d_init: float = 0.01
    rho_init: float = 0.3
    rays: int = 5
    seed: int = 0
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    sumt_optimizer: OptimizerSettings = field(
        default_factory=lambda: OptimizerSettings(max_iters=200))
    tabu: TabuParams = field(default_factory=TabuParams)
    mbh: MbhParams = field(default_factory=MbhParams)

    def __post_init__(self):
        positive = {
            "beta": self.beta, "q": self.q, "epsilon": self.epsilon,
            "iterations": self.iterations, "sumt_rounds": self.sumt_rounds,
            "mu_init": self.mu_init, "mu_factor": self.mu_factor,
            "d_init": self.d_init, "rho_init": self.rho_init, "rays": self.rays,
        }
        for name, value in positive.items():
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if self.mu_init > 100.0:
            raise ValueError("mu_init above 100 makes the first penalty stage ill-conditioned")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def to_json_dict(self) -> dict:
        return asdict(self)


@dataclass
class Solution:
    """A feasible placement: configuration, radius and its energy evidence."""

    configuration: np.ndarray
    d: float
    energy: EnergyBreakdown
    runtime_seconds: float
    seed: int
    metric: Metric
    container_spec: dict
    params: SolverParams

    @property
    def p(self) -> int:
        return self.configuration.shape[0]

    def to_json_dict(self) -> dict:
        """Serializable form. Runtime is deliberately excluded so that equal
        seeds reproduce byte-identical files; it travels in run reports."""
        return {
            "schema": "disperse3d-solution-v1",
            "container": self.container_spec,
            "metric": self.metric.value,
            "p": int(self.p),
            "d": float(self.d),
            "points": [[float(c) for c in row] for row in self.configuration],
            "energy": {
                "total": self.energy.total,
                "dispersion": self.energy.dispersion_term,
                "boundary": list(self.energy.boundary_terms),
            },
            "seed": int(self.seed),
            "params": self.params.to_json_dict(),
        }


def feasible_radius(container: PolyhedralContainer, metric: Metric, points, rng,
                    rays=None) -> float:
    """Largest radius at which the configuration has zero energy.

    The minimum of half the smallest pairwise distance and the smallest
    clearance to any boundary feature (vertices, edges, active footpoints).
    Returns 0.0 when some point lies outside the container.
    """
    pts = _as_config(points)
    bev = _boundary_eval(container, metric, pts, 1.0, rng, rays)
    if not bev.inside.all():
        return 0.0
    feature_min = min(
        float(bev.dv.min()),
        float(bev.de.min()),
        float(np.where(np.isfinite(bev.dh), bev.dh, np.inf).min()),
    )
    if pts.shape[0] > 1:
        diffs = pts[:, None, :] - pts[None, :, :]
        d = metric_length(metric, diffs)
        np.fill_diagonal(d, np.inf)
        feature_min = min(feature_min, 0.5 * float(d.min()))
    return feature_min


def adjust_distance(container: PolyhedralContainer, metric: Metric, points, d_radius: float,
                    sumt_rounds: int, params: SolverParams | None = None, rng=None,
                    rays=None) -> tuple[np.ndarray, float]:
    """Grow the radius from a feasible configuration by sequential penalties.

    Runs ``sumt_rounds`` joint minimizations of ``-D^2 + mu * E`` with ``mu``
    multiplied by ``mu_factor`` after each round, then polishes at fixed
    radius and snaps the radius to the configuration's exactly-feasible
    maximum. Returns whichever of the input and the adjusted output admits
    the larger feasible radius, so the result never regresses.
    """
    if rng is None:
        raise ValueError("an explicit random generator is required")
    params = params or SolverParams()
    if rays is None:
        rays = params.rays

    x0 = np.asarray(points, dtype=float).copy()
    best_x, best_d = None, -math.inf
    cap0 = feasible_radius(container, metric, x0, rng, rays)
    if cap0 > 0.0:
        best_x, best_d = x0, cap0

    x, d = x0.copy(), float(d_radius)
    mu = params.mu_init
    for _ in range(sumt_rounds):
        x, d = local_opt_phi(container, metric, x, d, mu, params.sumt_optimizer,
                             rng, rays=rays)
        mu *= params.mu_factor

    # final projection: re-minimize the energy at the reached radius, then
    # snap down to the exactly feasible radius of the polished configuration
    x, _ = local_opt_ex(container, metric, x, max(d, 1e-12), params.optimizer, rng,
                        energy_tol=params.epsilon / 10.0, rays=rays)
    cap = feasible_radius(container, metric, x, rng, rays)
    if cap > best_d:
        best_x, best_d = x, cap
    if best_x is None:
        return x, d  # nothing feasible; caller inspects the energy
    return best_x, best_d


def _schedule(p: int) -> tuple[int, int]:
    if p < 10:
        return 1, 5
    if p < 30:
        return 3, 10
    return 5, 15


def default_params(p: int, container: PolyhedralContainer, seed: int = 0) -> SolverParams:
    """Parameter schedule scaled with the instance size.

    Small instances (p < 10) start from a tiny radius; medium and large ones
    start from the radius of a 30% packing density, so the penalty terms are
    active from the first iteration without overwhelming the search.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    iterations, beta = _schedule(p)
    rho = 0.3
    if p < 10:
        d_init = 0.01
    else:
        d_init = (3.0 * container.volume * rho / (4.0 * math.pi * p)) ** (1.0 / 3.0)
    return SolverParams(beta=beta, iterations=iterations, d_init=d_init,
                        rho_init=rho, seed=seed)


def solve(container: PolyhedralContainer, metric: Metric, p: int,
          params: SolverParams | None = None, rng=None,
          on_stage=None) -> Solution:
    """Multi-start global optimization for ``p`` points.

    The initial stage seeds the incumbent: random configuration, tabu search
    at ``d_init``, radius adjustment. Each later stage restarts from a fresh
    random configuration at the incumbent radius and only enters radius
    adjustment after reaching feasibility there; the incumbent is replaced
    only by a strictly larger radius. Every stage draws from its own spawned
    random stream, so restarts are statistically independent of the
    incumbent. Raises :class:`InfeasibleResult` when even the initial stage
    cannot reach the tolerance.
    ``on_stage(stage_index, best_radius)`` is called after each stage.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    params = params or default_params(p, container)
    root = rng if rng is not None else np.random.default_rng(params.seed)
    stage_rngs = root.spawn(params.iterations + 1)

    t0 = time.perf_counter()
    tabu_kwargs = dict(
        tabu_tenure=params.tabu.tenure, tabu_capacity=params.tabu.capacity,
        tabu_radius_scale=params.tabu.radius_scale,
        mbh_trials=params.mbh.trials,
        mbh_subset_fraction=params.mbh.subset_fraction,
        mbh_scale_fraction=params.mbh.scale_fraction,
        rays=params.rays)

    srng = stage_rngs[0]
    x = sample_interior(container, p, srng, rays=params.rays)
    x = tabu_search(container, metric, x, params.d_init, params.beta, params.q,
                    params.epsilon, srng, params.optimizer, **tabu_kwargs)
    x, d = adjust_distance(container, metric, x, params.d_init, params.sumt_rounds,
                           params, srng)
    seed_energy = total_energy(container, metric, x, d, srng, params.rays)
    if seed_energy.total > params.epsilon:
        raise InfeasibleResult(
            f"initial stage stalled at energy {seed_energy.total:.3e} "
            f"(tolerance {params.epsilon:.1e}) for p={p}",
            energy=seed_energy.total, d_radius=d)
    x_star, d_star = x, d
    if on_stage is not None:
        on_stage(0, d_star)

    for stage in range(1, params.iterations + 1):
        srng = stage_rngs[stage]
        d_i = d_star
        x_i = sample_interior(container, p, srng, rays=params.rays)
        x_i = tabu_search(container, metric, x_i, d_i, params.beta, params.q,
                          params.epsilon, srng, params.optimizer, **tabu_kwargs)
        e_i = total_energy(container, metric, x_i, d_i, srng, params.rays).total
        if e_i < params.epsilon:
            x_i, d_i = adjust_distance(container, metric, x_i, d_i,
                                       params.sumt_rounds, params, srng)
            if d_i > d_star:
                x_star, d_star = x_i, d_i
        if on_stage is not None:
            on_stage(stage, d_star)

    breakdown = total_energy(container, metric, x_star, d_star, root, params.rays)
    runtime = time.perf_counter() - t0
    return Solution(configuration=x_star, d=float(d_star), energy=breakdown,
                    runtime_seconds=runtime, seed=params.seed, metric=metric,
                    container_spec=container.to_json_dict(), params=params)
