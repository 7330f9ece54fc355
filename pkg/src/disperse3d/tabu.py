"""Tabu-search feasibility solver at fixed radius.

Each iteration pairs the Q highest-energy points with the Q lowest-energy
vacancy sites sampled from the container, locally optimizes every candidate
move, and steps to the best neighbor that is not tabu. Reverse moves are
forbidden for a few iterations by remembering the vacated position: a move
is tabu when it would return the same point to within half a radius of a
spot it recently left, unless it beats the best energy seen so far
(aspiration). A short Monotonic Basin Hopping pass after each step perturbs
a random subset of points and keeps the result only on strict improvement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .container import PolyhedralContainer, sample_interior
from .energy import point_energies, total_energy, vacancy_energies
from .geometry import Metric, metric_length
from .localopt import OptimizerSettings, local_opt_ex

__all__ = [
    "Move",
    "TabuEntry",
    "TabuList",
    "high_energy_points",
    "mbh",
    "tabu_search",
    "vacancy_sites",
]

DEFAULT_TENURE = 10
DEFAULT_CAPACITY = 10
DEFAULT_RADIUS_SCALE = 0.5
MBH_TRIALS = 3
MBH_SUBSET_FRACTION = 1.0 / 3.0
MBH_SCALE_FRACTION = 0.5
VACANCY_POOL_FACTOR = 10


@dataclass(frozen=True)
class Move:
    """Relocation of one point to a vacancy site."""

    point_index: int
    target: np.ndarray


@dataclass(frozen=True)
class TabuEntry:
    """A recently vacated position, forbidden as a return target until expiry."""

    point_index: int
    vacated_position: np.ndarray
    expires_at_iteration: int


@dataclass
class TabuList:
    """Short-term memory of vacated positions (FIFO, bounded, time-expiring)."""

    tenure: int = DEFAULT_TENURE
    capacity: int = DEFAULT_CAPACITY
    entries: list[TabuEntry] = field(default_factory=list)

    def expire(self, iteration: int) -> None:
        self.entries = [e for e in self.entries if e.expires_at_iteration > iteration]

    def record(self, point_index: int, vacated_position: np.ndarray, iteration: int) -> None:
        self.entries.append(TabuEntry(point_index, np.array(vacated_position, dtype=float),
                                      iteration + self.tenure))
        if len(self.entries) > self.capacity:
            self.entries.pop(0)

    def forbids(self, metric: Metric, move: Move, radius: float) -> bool:
        for e in self.entries:
            if e.point_index != move.point_index:
                continue
            if float(metric_length(metric, move.target - e.vacated_position)) < radius:
                return True
        return False


def high_energy_points(container: PolyhedralContainer, metric: Metric, points,
                       d_radius: float, q: int, rng, rays=None) -> list[int]:
    """Indices of the q highest-energy points; ties go to the lowest index."""
    energies = point_energies(container, metric, points, d_radius, rng, rays)
    q = min(q, len(energies))
    order = np.argsort(-energies, kind="stable")
    return [int(i) for i in order[:q]]


def vacancy_sites(container: PolyhedralContainer, metric: Metric, points,
                  d_radius: float, q: int, rng, rays=None) -> np.ndarray:
    """The q lowest-energy vacancy sites from a pool of 10p interior samples.

    Ties keep generation order. Raises :class:`SamplingExhausted` when the
    container interior cannot be hit by rejection sampling.
    """
    pts = np.asarray(points, dtype=float)
    p = pts.shape[0] if pts.ndim == 2 else 1
    pool = sample_interior(container, VACANCY_POOL_FACTOR * p, rng, rays=rays)
    energies = vacancy_energies(container, metric, pts, pool, d_radius, rng, rays)
    q = min(q, pool.shape[0])
    order = np.argsort(energies, kind="stable")
    return pool[order[:q]]


def _subset_size(p: int, fraction: float) -> int:
    return max(1, min(p, int(math.ceil(p * fraction - 1e-9))))


def mbh(container: PolyhedralContainer, metric: Metric, points, d_radius: float, rng,
        settings: OptimizerSettings | None = None, *, trials: int = MBH_TRIALS,
        subset_fraction: float = MBH_SUBSET_FRACTION,
        scale_fraction: float = MBH_SCALE_FRACTION,
        energy_tol: float = 1e-9, rays=None) -> np.ndarray:
    """Monotonic Basin Hopping: perturb, re-optimize, keep strict improvements."""
    x, e = _mbh_ex(container, metric, np.asarray(points, dtype=float), d_radius, rng,
                   settings, None, trials, subset_fraction, scale_fraction,
                   energy_tol, rays)
    return x


def _mbh_ex(container, metric, points, d_radius, rng, settings, current_energy,
            trials, subset_fraction, scale_fraction, energy_tol, rays):
    x = points
    if current_energy is None:
        current_energy = total_energy(container, metric, x, d_radius, rng, rays).total
    p = x.shape[0]
    k = _subset_size(p, subset_fraction)
    for _ in range(trials):
        if current_energy <= energy_tol:
            break
        trial = x.copy()
        chosen = rng.choice(p, size=k, replace=False)
        trial[chosen] += rng.normal(0.0, scale_fraction * d_radius, size=(k, 3))
        trial, e = local_opt_ex(container, metric, trial, d_radius, settings, rng,
                                energy_tol=energy_tol, rays=rays)
        if e < current_energy:
            x, current_energy = trial, e
    return x, current_energy


def tabu_search(container: PolyhedralContainer, metric: Metric, points, d_radius: float,
                beta: int, q: int, epsilon: float, rng,
                settings: OptimizerSettings | None = None, *,
                tabu_tenure: int = DEFAULT_TENURE,
                tabu_capacity: int = DEFAULT_CAPACITY,
                tabu_radius_scale: float = DEFAULT_RADIUS_SCALE,
                mbh_trials: int = MBH_TRIALS,
                mbh_subset_fraction: float = MBH_SUBSET_FRACTION,
                mbh_scale_fraction: float = MBH_SCALE_FRACTION,
                rays=None, on_iteration=None) -> np.ndarray:
    """Drive a configuration toward zero energy at fixed radius.

    Runs until the best energy drops below ``epsilon`` or ``beta``
    consecutive iterations pass without improvement. Returns the best
    configuration found; its energy never exceeds the starting one.
    ``on_iteration(iteration, best_energy)``, when given, is called once per
    loop iteration (useful for progress logging and tests).
    """
    if beta < 1:
        raise ValueError("beta must be >= 1")
    if d_radius <= 0:
        raise ValueError("radius must be positive")
    x = np.asarray(points, dtype=float).copy()
    p = x.shape[0]
    q = min(q, p)
    energy_tol = epsilon / 10.0 if np.isfinite(epsilon) else 1e-9

    x, e = local_opt_ex(container, metric, x, d_radius, settings, rng,
                        energy_tol=energy_tol, rays=rays)
    x_best, e_best = x, e
    no_improve = 0
    tabu = TabuList(tenure=tabu_tenure, capacity=tabu_capacity)
    r_tabu = tabu_radius_scale * d_radius
    iteration = 0

    while no_improve <= beta and e_best > epsilon:
        iteration += 1
        tabu.expire(iteration)

        hot = high_energy_points(container, metric, x, d_radius, q, rng, rays)
        sites = vacancy_sites(container, metric, x, d_radius, q, rng, rays)

        # seed with the raw first move, before local optimization
        x_seed = x.copy()
        x_seed[hot[0]] = sites[0]
        best_nb = x_seed
        e_best_nb = total_energy(container, metric, x_seed, d_radius, rng, rays).total
        best_move: tuple[int, np.ndarray] | None = None

        for i in range(len(hot)):
            for j in range(len(sites)):
                x_nb = x.copy()
                x_nb[hot[i]] = sites[j]
                x_nb, e_nb = local_opt_ex(container, metric, x_nb, d_radius, settings,
                                          rng, energy_tol=energy_tol, rays=rays)
                move = Move(hot[i], sites[j])
                forbidden = tabu.forbids(metric, move, r_tabu) and not (e_nb < e_best)
                if not forbidden:
                    if e_nb < e_best_nb:
                        best_nb, e_best_nb = x_nb, e_nb
                    best_move = (hot[i], x[hot[i]].copy())

        x, e = best_nb, e_best_nb
        if best_move is not None:
            tabu.record(best_move[0], best_move[1], iteration)

        x, e = _mbh_ex(container, metric, x, d_radius, rng, settings, e,
                       mbh_trials, mbh_subset_fraction, mbh_scale_fraction,
                       energy_tol, rays)

        if e < e_best:
            x_best, e_best = x, e
            no_improve = 0
        else:
            no_improve += 1
        if on_iteration is not None:
            on_iteration(iteration, e_best)

    return x_best
