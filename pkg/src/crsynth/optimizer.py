"""Quasi-Newton minimizer: full-memory BFGS with a strong-Wolfe line search,
early stopping on a target cost, and seeded randomized restarts.

The line search is scipy's Wolfe search; the surrounding loop is owned here
so that the target-cost stop can fire on *any* evaluation (including inside
a line search), the best point ever seen is always returned, and restart
perturbations come from one seeded generator for bit-reproducible runs.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import line_search

from .errors import ArgumentError, NumericalError


class OptStatus(Enum):
    CONVERGED = "converged"
    TARGET_REACHED = "target_reached"
    ITER_LIMIT = "iter_limit"
    LINE_SEARCH_FAIL = "line_search_fail"


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 5000
    grad_tol: float = 1e-10
    target_cost: float = -math.inf
    wolfe_c1: float = 1e-4
    wolfe_c2: float = 0.9
    max_line_search_steps: int = 20
    restart_count: int = 3
    perturbation_scale: float = 0.3
    seed: int = 0
    # Give up early (counts as the iteration budget running out) when the
    # best cost improves by less than stall_decrease over stall_iters
    # iterations while still far above target_cost. 0 disables the check;
    # it exists so hopeless descents do not burn the whole budget.
    stall_iters: int = 0
    stall_decrease: float = 1e-10

    def __post_init__(self):
        if not (0.0 < self.wolfe_c1 < self.wolfe_c2 < 1.0):
            raise ArgumentError("need 0 < wolfe_c1 < wolfe_c2 < 1")
        if self.max_iters < 1:
            raise ArgumentError("max_iters must be >= 1")
        if self.perturbation_scale < 0.0:
            raise ArgumentError("perturbation_scale must be >= 0")


@dataclass
class OptimizeResult:
    x_best: np.ndarray
    f_best: float
    iterations: int
    status: OptStatus


class _TargetHit(Exception):
    pass


class _Tracker:
    """Wraps the objective callbacks: best-seen bookkeeping, finiteness
    checks, target-cost interrupt, and a one-point gradient cache."""

    def __init__(self, cost_fn, grad_fn, target: float):
        self._cost = cost_fn
        self._grad = grad_fn
        self._target = target
        self.f_best = math.inf
        self.x_best: np.ndarray | None = None
        self.iterations = 0
        self._gx: np.ndarray | None = None
        self._g: np.ndarray | None = None

    def cost(self, x: np.ndarray) -> float:
        v = float(self._cost(x))
        if not math.isfinite(v):
            raise NumericalError(f"non-finite cost {v}", point=np.array(x))
        if v < self.f_best:
            self.f_best = v
            self.x_best = np.array(x, dtype=np.float64)
        if v <= self._target:
            raise _TargetHit
        return v

    def grad(self, x: np.ndarray) -> np.ndarray:
        if self._gx is not None and np.array_equal(x, self._gx):
            return self._g
        g = np.asarray(self._grad(x), dtype=np.float64)
        if not np.all(np.isfinite(g)):
            raise NumericalError("non-finite gradient", point=np.array(x))
        self._gx = np.array(x, dtype=np.float64)
        self._g = g
        return g


def minimize(cost_fn, grad_fn, x0, cfg: OptimizerConfig) -> OptimizeResult:
    """Minimize cost_fn from x0; deterministic for fixed inputs and seed."""
    x0 = np.asarray(x0, dtype=np.float64).ravel()
    tracker = _Tracker(cost_fn, grad_fn, cfg.target_cost)

    if x0.size == 0:
        try:
            tracker.cost(x0)
            status = OptStatus.CONVERGED
        except _TargetHit:
            status = OptStatus.TARGET_REACHED
        return OptimizeResult(x0, tracker.f_best, 0, status)

    rng = np.random.default_rng(cfg.seed)
    status = OptStatus.ITER_LIMIT
    x_start = x0
    try:
        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", message=".*line search.*")
            warnings.filterwarnings("ignore", message=".*Rounding errors.*")
            for attempt in range(cfg.restart_count + 1):
                status = _bfgs_loop(tracker, x_start, cfg)
                if status is OptStatus.CONVERGED:
                    break
                if attempt == cfg.restart_count:
                    break
                x_start = tracker.x_best + rng.uniform(
                    -cfg.perturbation_scale, cfg.perturbation_scale, x0.size
                )
    except _TargetHit:
        status = OptStatus.TARGET_REACHED
    return OptimizeResult(tracker.x_best, tracker.f_best, tracker.iterations, status)


def _bfgs_loop(tracker: _Tracker, x0: np.ndarray, cfg: OptimizerConfig):
    x = np.array(x0, dtype=np.float64)
    fx = tracker.cost(x)
    gx = tracker.grad(x)
    dim = x.size
    identity = np.eye(dim)
    h = identity.copy()
    f_prev = fx + np.linalg.norm(gx) / 2.0  # initial-step heuristic
    stall_mark = tracker.f_best

    for it in range(cfg.max_iters):
        if np.max(np.abs(gx)) < cfg.grad_tol:
            return OptStatus.CONVERGED
        if cfg.stall_iters and it and it % cfg.stall_iters == 0:
            far_from_target = tracker.f_best > max(100.0 * cfg.target_cost, 0.0)
            if far_from_target and stall_mark - tracker.f_best < cfg.stall_decrease:
                return OptStatus.ITER_LIMIT
            stall_mark = tracker.f_best
        tracker.iterations += 1
        p = -h @ gx
        if p @ gx >= 0.0:  # curvature estimate lost positive definiteness
            h = identity.copy()
            p = -gx
        alpha, _, _, f_new, _, _ = line_search(
            tracker.cost,
            tracker.grad,
            x,
            p,
            gfk=gx,
            old_fval=fx,
            old_old_fval=f_prev,
            c1=cfg.wolfe_c1,
            c2=cfg.wolfe_c2,
            maxiter=cfg.max_line_search_steps,
        )
        if alpha is None:
            return OptStatus.LINE_SEARCH_FAIL
        x_new = x + alpha * p
        g_new = tracker.grad(x_new)
        s = x_new - x
        y = g_new - gx
        f_prev, fx = fx, (f_new if f_new is not None else tracker.cost(x_new))
        x, gx = x_new, g_new
        sy = s @ y
        if sy > 1e-14:
            rho = 1.0 / sy
            hy = h @ y
            h -= rho * (np.outer(s, hy) + np.outer(hy, s))
            h += rho * (rho * (y @ hy) + 1.0) * np.outer(s, s)
    return OptStatus.ITER_LIMIT


__all__ = ["OptStatus", "OptimizerConfig", "OptimizeResult", "minimize"]
