"""Limited-memory quasi-Newton local optimization.

Two entry points: :func:`local_opt` minimizes the energy over the point
coordinates at fixed radius, and :func:`local_opt_phi` jointly minimizes the
penalty objective ``-D^2 + mu * E`` over the 3p+1 variables (points plus
radius). Both use L-BFGS with a backtracking Armijo line search, which stays
robust on the piecewise-smooth energy where curvature conditions can be
unattainable. Whenever the energy's active set changes between accepted
iterates the curvature history is discarded, since stale pairs straddling a
kink poison the quasi-Newton model.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .container import PolyhedralContainer
from .energy import evaluate
from .geometry import Metric

__all__ = ["OptimizerSettings", "local_opt", "local_opt_phi"]

log = logging.getLogger(__name__)

_ARMIJO_C = 1e-4
_ARMIJO_SHRINK = 0.5
_ALPHA_MIN = 1e-20
_D_FLOOR = 1e-12
_STALL_LIMIT = 25  # iterations without measurable objective progress


def _reset_alpha(direction: np.ndarray, step_hint: float | None) -> float:
    """First trial step length for a raw gradient direction."""
    dinf = float(np.max(np.abs(direction)))
    if dinf <= 0.0:
        return 1.0
    if step_hint is not None and step_hint > 0.0:
        return min(1.0, 4.0 * step_hint / dinf)
    return min(1.0, 1.0 / dinf)


@dataclass
class OptimizerSettings:
    """L-BFGS knobs: history size, iteration cap and stopping tolerances."""

    memory: int = 10
    max_iters: int = 500
    grad_tol: float = 1e-9
    step_tol: float = 1e-12

    def __post_init__(self):
        if self.memory < 1:
            raise ValueError("memory must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.grad_tol <= 0 or self.step_tol <= 0:
            raise ValueError("tolerances must be positive")


def _two_loop(grad, s_list, y_list):
    q = grad.copy()
    alphas = []
    rhos = [1.0 / float(np.dot(y, s)) for s, y in zip(s_list, y_list)]
    for (s, y), rho in zip(reversed(list(zip(s_list, y_list))), reversed(rhos)):
        a = rho * float(np.dot(s, q))
        alphas.append(a)
        q -= a * y
    if s_list:
        s, y = s_list[-1], y_list[-1]
        q *= float(np.dot(s, y)) / float(np.dot(y, y))
    for (s, y), rho, a in zip(zip(s_list, y_list), rhos, reversed(alphas)):
        b = rho * float(np.dot(y, q))
        q += (a - b) * s
    return -q


def _minimize(eval_fn, x0: np.ndarray, settings: OptimizerSettings,
              f_floor: float = -math.inf):
    """L-BFGS core. ``eval_fn(x) -> (f, grad, signature)``.

    Returns ``(x_best, f_best, n_iters)``. Accepted objective values are
    non-increasing; on non-finite values the best iterate so far is
    returned.
    """
    x = np.asarray(x0, dtype=float).copy()
    f, g, sig = eval_fn(x)
    if not (np.isfinite(f) and np.isfinite(g).all()):
        log.warning("local optimizer: non-finite objective at the start point")
        return x, f, 0
    best_x, best_f = x.copy(), f
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    step_hint = None  # infinity norm of the last accepted step
    stall = 0

    iters = 0
    while iters < settings.max_iters:
        if f <= f_floor:
            break
        if float(np.max(np.abs(g))) < settings.grad_tol:
            break
        if stall >= _STALL_LIMIT:
            break
        iters += 1

        direction = _two_loop(g, s_hist, y_hist)
        gd = float(np.dot(g, direction))
        if not np.isfinite(gd) or gd >= 0.0:
            direction = -g
            gd = -float(np.dot(g, g))
            s_hist.clear()
            y_hist.clear()

        # quasi-Newton steps take the natural unit length; raw gradient
        # steps are scaled to recent step sizes so steep penalty surfaces
        # do not burn dozens of halvings
        alpha = 1.0 if s_hist else _reset_alpha(direction, step_hint)
        accepted = None
        tried_steepest = False
        while True:
            x_new = x + alpha * direction
            f_new, g_new, sig_new = eval_fn(x_new)
            ok = np.isfinite(f_new) and np.isfinite(g_new).all()
            if ok and f_new <= f + _ARMIJO_C * alpha * gd:
                accepted = (x_new, f_new, g_new, sig_new)
                break
            alpha *= _ARMIJO_SHRINK
            if alpha < _ALPHA_MIN:
                if not tried_steepest and s_hist:
                    # one steepest-descent rescue before giving up
                    direction = -g
                    gd = -float(np.dot(g, g))
                    s_hist.clear()
                    y_hist.clear()
                    alpha = _reset_alpha(direction, step_hint)
                    tried_steepest = True
                    continue
                accepted = None
                break
        if accepted is None:
            break

        x_new, f_new, g_new, sig_new = accepted
        step = x_new - x
        step_hint = float(np.max(np.abs(step)))
        if f_new < best_f - 1e-12 * (1.0 + abs(best_f)):
            stall = 0
        else:
            stall += 1
        if f_new < best_f:
            best_x, best_f = x_new.copy(), f_new

        if sig_new != sig:
            s_hist.clear()
            y_hist.clear()
        else:
            y = g_new - g
            sy = float(np.dot(step, y))
            if sy > 1e-12 * float(np.linalg.norm(step)) * float(np.linalg.norm(y)):
                s_hist.append(step.copy())
                y_hist.append(y.copy())
                if len(s_hist) > settings.memory:
                    s_hist.pop(0)
                    y_hist.pop(0)

        small_step = step_hint < settings.step_tol
        x, f, g, sig = x_new, f_new, g_new, sig_new
        if small_step:
            break
    return best_x, best_f, iters


def local_opt(container: PolyhedralContainer, metric: Metric, points, d_radius: float,
              settings: OptimizerSettings | None = None, rng=None, *,
              energy_tol: float = 1e-9, rays=None) -> np.ndarray:
    """Minimize E over the points at fixed radius; energy never increases.

    Stops on a small gradient, a small step, the iteration cap, or as soon
    as the energy drops below ``energy_tol`` (the configuration is then
    feasible for all practical purposes and further polishing is wasted).
    """
    pts, _ = local_opt_ex(container, metric, points, d_radius, settings, rng,
                          energy_tol=energy_tol, rays=rays)
    return pts


def local_opt_ex(container: PolyhedralContainer, metric: Metric, points, d_radius: float,
                 settings: OptimizerSettings | None = None, rng=None, *,
                 energy_tol: float = 1e-9, rays=None) -> tuple[np.ndarray, float]:
    """Like :func:`local_opt` but also returns the final energy value."""
    if rng is None:
        raise ValueError("an explicit random generator is required")
    if d_radius <= 0:
        raise ValueError("radius must be positive")
    settings = settings or OptimizerSettings()
    pts = np.asarray(points, dtype=float)
    shape = pts.shape

    def eval_fn(x):
        ev = evaluate(container, metric, x.reshape(shape), d_radius, rng,
                      rays=rays, want_grad=True)
        return ev.breakdown.total, ev.grad.ravel(), ev.signature()

    x_best, f_best, _ = _minimize(eval_fn, pts.ravel(), settings, f_floor=energy_tol)
    return x_best.reshape(shape), f_best


def local_opt_phi(container: PolyhedralContainer, metric: Metric, points, d_radius: float,
                  mu: float, settings: OptimizerSettings | None = None, rng=None, *,
                  rays=None) -> tuple[np.ndarray, float]:
    """Jointly minimize ``-D^2 + mu * E(X, D)`` over points and radius.

    The radius variable is clamped to stay positive. Returns the improved
    ``(points, radius)`` pair; the objective never increases across accepted
    steps.
    """
    if rng is None:
        raise ValueError("an explicit random generator is required")
    if mu <= 0:
        raise ValueError("mu must be positive")
    if d_radius <= 0:
        raise ValueError("radius must be positive")
    settings = settings or OptimizerSettings(max_iters=200)
    pts = np.asarray(points, dtype=float)
    shape = pts.shape

    def eval_fn(z):
        d = max(float(z[-1]), _D_FLOOR)
        ev = evaluate(container, metric, z[:-1].reshape(shape), d, rng,
                      rays=rays, want_grad=True)
        f = -d * d + mu * ev.breakdown.total
        g = np.empty_like(z)
        g[:-1] = mu * ev.grad.ravel()
        g[-1] = -2.0 * d + mu * ev.d_energy_dD
        return f, g, ev.signature()

    z0 = np.concatenate([pts.ravel(), [float(d_radius)]])
    z_best, _, _ = _minimize(eval_fn, z0, settings)
    return z_best[:-1].reshape(shape), max(float(z_best[-1]), _D_FLOOR)
