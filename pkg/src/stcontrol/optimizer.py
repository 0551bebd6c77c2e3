"""Projected gradient method over an exchangeable solver backend.

One iteration solves the state, solves the adjoint, takes the negative
gradient direction v = -(lam u + p1), finds a step by Armijo backtracking
(reset to the initial step every outer iteration) and projects onto the
box.  Two stopping tests run after each accepted iterate: the control
increment against the full-step trial candidate, and stagnation of the
objective decrease; whichever fires is reported (the increment test wins
ties).  The objective sequence is non-increasing by construction.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol

import numpy as np

from .problem import (
    DiscreteProblem,
    kkt_residual,
    objective_terms,
    project,
    reduced_gradient,
    weighted_inner,
    weighted_norm,
)

__all__ = [
    "PgmConfig",
    "RunRecord",
    "SolverBackend",
    "StepResult",
    "step_size",
    "stopping_check",
    "run",
]

STOP_CONTROL_INCREMENT = "control_increment"
STOP_OBJECTIVE_STAGNATION = "objective_stagnation"
STOP_MAX_ITERS = "max_iters"

IterationSink = Callable[[int, float, float, float, float], None]


class SolverBackend(Protocol):
    """State/adjoint solver pair sharing the coefficient layouts."""

    method_name: str

    def solve_state(self, u: np.ndarray) -> np.ndarray: ...

    def solve_adjoint(self, y: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class PgmConfig:
    """Tolerances and step rule knobs.

    The backtracking start value for outer iteration ell is
    s0 / ell**step_decay; step_decay = 0 resets to the same s0 every
    iteration, positive values give a diminishing schedule.  The benchmark
    plans use (s0=40, step_decay=0.9), calibrated so the runs stop at the
    same stagnation point as the reference results; see the README.
    """

    tau_rel: float = 1e-4
    tau_abs: float = 1e-8
    tau_stagnation: float = 1e-8
    s0: float = 1.0
    step_decay: float = 0.0
    backtrack_factor: float = 0.5
    armijo_c: float = 1e-4
    max_iters: int = 500
    max_backtracks: int = 40

    def __post_init__(self):
        if not 0 < self.tau_abs <= self.tau_rel:
            raise ValueError(
                f"tolerances must satisfy 0 < tau_abs <= tau_rel, got "
                f"tau_abs={self.tau_abs}, tau_rel={self.tau_rel}")
        if not self.tau_stagnation > 0:
            raise ValueError("tau_stagnation must be positive")
        if not self.s0 > 0:
            raise ValueError("initial step size must be positive")
        if self.step_decay < 0:
            raise ValueError("step_decay must be >= 0")
        if not 0 < self.backtrack_factor < 1:
            raise ValueError("backtrack factor must lie in (0, 1)")
        if not self.armijo_c > 0:
            raise ValueError("armijo_c must be positive")
        if self.max_iters < 1 or self.max_backtracks < 0:
            raise ValueError("max_iters must be >= 1 and max_backtracks >= 0")

    def initial_step(self, iteration: int) -> float:
        """Backtracking start value for the given outer iteration (1-based)."""
        return self.s0 / iteration ** self.step_decay


@dataclass
class RunRecord:
    """Everything one optimizer run produced."""

    iterations: int
    objective: list
    misfit: list
    regularization: list
    step_sizes: list
    stop_reason: str
    converged: bool
    wall_time: float
    final_u: np.ndarray = field(repr=False)
    final_y: np.ndarray = field(repr=False)
    final_adjoint: np.ndarray = field(repr=False)
    projected_gradient_norm: float = float("nan")


@dataclass
class StepResult:
    accepted: bool
    s: float
    u_trial: np.ndarray
    y_trial: Optional[np.ndarray]
    J_trial: float
    misfit_trial: float
    reg_trial: float
    u_full_step: np.ndarray  # candidate with the unreduced step s0
    backtracks: int


def step_size(
    dp: DiscreteProblem,
    u: np.ndarray,
    v: np.ndarray,
    J_current: float,
    backend: SolverBackend,
    config: PgmConfig,
    iteration: int = 1,
) -> StepResult:
    """Armijo backtracking from the scheduled initial step.

    Accepts the largest s = initial_step(iteration) * factor^m with
    J(P(u + s v)) <= J_current - armijo_c * s * ||v||^2 (weighted norm).
    The m = 0 trial is kept for the stopping test even when reduced steps
    are taken.  If no step passes, the result is flagged unaccepted, which
    the caller treats as stagnation.
    """
    vnorm_sq = weighted_inner(dp, v, v)
    s = config.initial_step(iteration)
    u_full_step = None
    for m in range(config.max_backtracks + 1):
        u_trial = project(dp, u + s * v)
        if m == 0:
            u_full_step = u_trial
        y_trial = backend.solve_state(u_trial)
        J_trial, misfit_t, reg_t = objective_terms(dp, y_trial, u_trial)
        if J_trial <= J_current - config.armijo_c * s * vnorm_sq:
            return StepResult(True, s, u_trial, y_trial, J_trial,
                              misfit_t, reg_t, u_full_step, m)
        s *= config.backtrack_factor
    return StepResult(False, s, u, None, J_current, float("nan"),
                      float("nan"), u_full_step, config.max_backtracks + 1)


def stopping_check(
    dp: DiscreteProblem,
    config: PgmConfig,
    u_first: np.ndarray,
    u_prev: np.ndarray,
    u_full_step: np.ndarray,
    J_prev: float,
    J_curr: float,
) -> Optional[str]:
    """Return the stop reason if a criterion fired, else None.

    Criterion 1 compares the previous control with the full-step candidate:
    ||u_prev - u_s0|| <= tau_rel ||u_first - u_s0|| + tau_abs.  Criterion 2
    is J_prev - J_curr <= tau_stagnation.  Ties report criterion 1.
    """
    increment = weighted_norm(dp, u_prev - u_full_step)
    scale = weighted_norm(dp, u_first - u_full_step)
    if increment <= config.tau_rel * scale + config.tau_abs:
        return STOP_CONTROL_INCREMENT
    if J_prev - J_curr <= config.tau_stagnation:
        return STOP_OBJECTIVE_STAGNATION
    return None


def run(
    dp: DiscreteProblem,
    backend: SolverBackend,
    config: Optional[PgmConfig] = None,
    iteration_sink: Optional[IterationSink] = None,
) -> RunRecord:
    """Run the projected gradient method to one of its stopping criteria."""
    config = config or PgmConfig()
    t_start = time.perf_counter()

    u = project(dp, dp.u_init)
    u_first = u.copy()
    y = backend.solve_state(u)
    J, misfit, reg = objective_terms(dp, y, u)

    objective_hist = [J]
    misfit_hist = [misfit]
    reg_hist = [reg]
    steps: list = []
    if iteration_sink is not None:
        iteration_sink(0, J, misfit, reg, float("nan"))

    stop_reason = STOP_MAX_ITERS
    iterations = 0
    for outer in range(1, config.max_iters + 1):
        p1 = backend.solve_adjoint(y)
        v = -reduced_gradient(dp, u, p1)
        result = step_size(dp, u, v, J, backend, config, iteration=outer)
        if not result.accepted:
            # exhausted backtracking: no descent direction left
            stop_reason = STOP_OBJECTIVE_STAGNATION
            break

        u_prev, J_prev = u, J
        u, y = result.u_trial, result.y_trial
        J, misfit, reg = result.J_trial, result.misfit_trial, result.reg_trial
        iterations += 1
        objective_hist.append(J)
        misfit_hist.append(misfit)
        reg_hist.append(reg)
        steps.append(result.s)
        if iteration_sink is not None:
            iteration_sink(iterations, J, misfit, reg, result.s)

        reason = stopping_check(dp, config, u_first, u_prev,
                                result.u_full_step, J_prev, J)
        if reason is not None:
            stop_reason = reason
            break

    final_adjoint = backend.solve_adjoint(y)
    diagnostics = kkt_residual(dp, u, final_adjoint)
    wall_time = time.perf_counter() - t_start

    return RunRecord(
        iterations=iterations,
        objective=objective_hist,
        misfit=misfit_hist,
        regularization=reg_hist,
        step_sizes=steps,
        stop_reason=stop_reason,
        converged=stop_reason != STOP_MAX_ITERS,
        wall_time=wall_time,
        final_u=u,
        final_y=y,
        final_adjoint=final_adjoint,
        projected_gradient_norm=diagnostics.projected_gradient_norm,
    )
