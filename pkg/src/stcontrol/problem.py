"""Problem data, control discretization, objective and optimality pieces.

The control is piecewise constant in time and nodal in space, stored as an
array of shape (K, n_h); its coefficients live in the same spatial basis as
the state, so the coupling matrix in the right-hand side is the mass matrix
and the reduced gradient is the plain coefficient combination lam*u + p1
(no mass inversion).  All control-space norms and inner products carry the
dt and mass weights of the discrete L2(I; L2) inner product.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .spacetime import (
    AdjointCoeffs,
    SpaceTimeOperator,
    assemble_operator,
    solve_forward,
    solve_transpose,
)
from .spatial import (
    SpatialDiscretization,
    assemble_boundary_load,
    build_interval_mesh,
    interpolate,
    tensorize,
)
from .temporal import TemporalGrid, build_temporal_grid

__all__ = [
    "BoxBounds",
    "ProblemData",
    "DiscreteProblem",
    "KktDiagnostics",
    "discretize",
    "weighted_inner",
    "weighted_norm",
    "build_rhs",
    "project",
    "objective",
    "objective_terms",
    "adjoint_rhs",
    "reduced_gradient",
    "kkt_residual",
    "SpaceTimeBackend",
]

TimeSpaceFunction = Union[float, Callable[..., np.ndarray]]


@dataclass(frozen=True)
class BoxBounds:
    """Pointwise control bounds, constants or functions of (t, x...)."""

    lower: TimeSpaceFunction
    upper: TimeSpaceFunction


@dataclass(frozen=True)
class ProblemData:
    """Full description of one box-constrained parabolic control problem.

    axes holds one (a, b) pair per spatial axis, n_cells the matching cell
    counts.  mu is the Robin coefficient (callable only in 1d), eta the
    boundary source eta(t, x...), y0 and y_d initial and desired states.
    """

    axes: tuple[tuple[float, float], ...]
    n_cells: tuple[int, ...]
    T: float
    K: int
    mu: TimeSpaceFunction
    eta: TimeSpaceFunction
    y0: TimeSpaceFunction
    y_d: TimeSpaceFunction
    lam: float
    bounds: BoxBounds
    u_init: TimeSpaceFunction = 0.0

    def __post_init__(self):
        if len(self.axes) != len(self.n_cells):
            raise ValueError("axes and n_cells must have matching lengths")
        if not self.lam > 0:
            raise ValueError(f"regularization weight must be positive, got {self.lam}")

    @property
    def dim(self) -> int:
        return len(self.axes)


@dataclass
class DiscreteProblem:
    """Assembled discretization of a ProblemData instance.

    Bounds and the initial control are evaluated at (interval midpoint,
    node); eta_loads[ell] is the boundary load integrated over interval ell.
    Immutable after discretize(); safe to share across threads.
    """

    problem: ProblemData
    grid: TemporalGrid
    spatial: SpatialDiscretization
    op: SpaceTimeOperator
    y0_vec: np.ndarray
    yd_vec: np.ndarray
    eta_loads: np.ndarray  # (K, n_h)
    lower: np.ndarray      # (K, n_h)
    upper: np.ndarray      # (K, n_h)
    u_init: np.ndarray     # (K, n_h)

    @property
    def lam(self) -> float:
        return self.problem.lam

    @property
    def K(self) -> int:
        return self.grid.K

    @property
    def n_h(self) -> int:
        return self.spatial.n_h


def _eval_time_space(f: TimeSpaceFunction, t: float, spatial: SpatialDiscretization) -> np.ndarray:
    if callable(f):
        cols = [spatial.coords[:, d] for d in range(spatial.dim)]
        return np.asarray(f(t, *cols), dtype=float) * np.ones(spatial.n_h)
    return np.full(spatial.n_h, float(f))


def discretize(problem: ProblemData) -> DiscreteProblem:
    """Assemble grid, spatial matrices, operator and all data vectors."""
    grid = build_temporal_grid(problem.T, problem.K)
    meshes = [build_interval_mesh(a, b, n)
              for (a, b), n in zip(problem.axes, problem.n_cells)]
    spatial = tensorize(meshes, problem.mu)
    op = assemble_operator(grid, spatial)

    K = grid.K
    eta_loads = np.empty((K, spatial.n_h))
    for ell in range(K):
        t0, t1 = grid.interval(ell)
        eta_loads[ell] = assemble_boundary_load(spatial, problem.eta, t0, t1)

    midpoints = (np.arange(K) + 0.5) * grid.dt
    lower = np.stack([_eval_time_space(problem.bounds.lower, t, spatial) for t in midpoints])
    upper = np.stack([_eval_time_space(problem.bounds.upper, t, spatial) for t in midpoints])
    if not np.all(lower < upper):
        raise ValueError("lower bound must be strictly below upper bound everywhere")
    u_init = np.stack([_eval_time_space(problem.u_init, t, spatial) for t in midpoints])

    return DiscreteProblem(
        problem=problem,
        grid=grid,
        spatial=spatial,
        op=op,
        y0_vec=interpolate(spatial, problem.y0),
        yd_vec=interpolate(spatial, problem.y_d),
        eta_loads=eta_loads,
        lower=lower,
        upper=upper,
        u_init=u_init,
    )


def weighted_inner(dp: DiscreteProblem, u: np.ndarray, v: np.ndarray) -> float:
    """Discrete L2(I; L2) inner product: dt * sum_ell u_ell^T M v_ell."""
    return dp.grid.dt * float(np.sum(u * (dp.spatial.M_h @ v.T).T))


def weighted_norm(dp: DiscreteProblem, u: np.ndarray) -> float:
    return float(np.sqrt(max(weighted_inner(dp, u, u), 0.0)))


def build_rhs(dp: DiscreteProblem, u: np.ndarray) -> np.ndarray:
    """Right-hand side blocks: dt * M u_ell + eta load, then M y0."""
    K, n = dp.K, dp.n_h
    f = np.empty((K + 1, n))
    f[:K] = dp.grid.dt * (dp.spatial.M_h @ u.T).T + dp.eta_loads
    f[K] = dp.spatial.M_h @ dp.y0_vec
    return f


def project(dp: DiscreteProblem, u: np.ndarray) -> np.ndarray:
    """Clamp every coefficient to its box; idempotent and non-expansive."""
    return np.clip(u, dp.lower, dp.upper)


def objective_terms(dp: DiscreteProblem, y: np.ndarray, u: np.ndarray) -> tuple[float, float, float]:
    """Return (J, terminal misfit term, regularization term)."""
    r = y[dp.K] - dp.yd_vec
    misfit = 0.5 * float(r @ (dp.spatial.M_h @ r))
    reg = 0.5 * dp.lam * dp.grid.dt * float(np.sum(u * (dp.spatial.M_h @ u.T).T))
    return misfit + reg, misfit, reg


def objective(dp: DiscreteProblem, y: np.ndarray, u: np.ndarray) -> float:
    return objective_terms(dp, y, u)[0]


def adjoint_rhs(dp: DiscreteProblem, y: np.ndarray) -> np.ndarray:
    """Transpose-system right-hand side: zero except M (y^K - y_d) in the
    terminal block (the terminal hat equals one at t = T)."""
    g = np.zeros((dp.K + 1, dp.n_h))
    g[dp.K] = dp.spatial.M_h @ (y[dp.K] - dp.yd_vec)
    return g


def _p1_of(p) -> np.ndarray:
    return p.p1 if isinstance(p, AdjointCoeffs) else np.asarray(p)


def reduced_gradient(dp: DiscreteProblem, u: np.ndarray, p) -> np.ndarray:
    """Gradient coefficients lam * u + p1; a basis identity, no mass solve."""
    p1 = _p1_of(p)
    if p1.shape != u.shape:
        raise ValueError(f"adjoint field shape {p1.shape} does not match control {u.shape}")
    return dp.lam * u + p1


@dataclass(frozen=True)
class KktDiagnostics:
    projected_gradient_norm: float
    complementarity_violation: float
    feasibility_violation: float


def kkt_residual(dp: DiscreteProblem, u: np.ndarray, p) -> KktDiagnostics:
    """First-order optimality diagnostics at (u, adjoint).

    The projected-gradient residual ||u - P(u - g)|| in the weighted norm
    vanishes exactly at KKT points, covering stationarity, bound activity
    and multiplier signs at once.  Complementarity is reported as the
    largest coefficientwise min(|g|, distance to the nearer bound) and
    feasibility as the largest bound violation.
    """
    g = reduced_gradient(dp, u, p)
    pg = u - np.clip(u - g, dp.lower, dp.upper)
    dist = np.minimum(u - dp.lower, dp.upper - u)
    comp = float(np.max(np.minimum(np.abs(g), np.maximum(dist, 0.0))))
    feas = float(max(np.max(dp.lower - u), np.max(u - dp.upper), 0.0))
    return KktDiagnostics(
        projected_gradient_norm=weighted_norm(dp, pg),
        complementarity_violation=comp,
        feasibility_violation=feas,
    )


class SpaceTimeBackend:
    """State and adjoint solves through the coupled space-time system."""

    method_name = "space-time"

    def __init__(self, dp: DiscreteProblem):
        self.dp = dp

    def solve_state(self, u: np.ndarray) -> np.ndarray:
        return solve_forward(self.dp.op, build_rhs(self.dp, u))

    def solve_adjoint(self, y: np.ndarray) -> np.ndarray:
        """Control-grid adjoint field p1 from the exact transpose solve."""
        return solve_transpose(self.dp.op, adjoint_rhs(self.dp, y)).p1

    def solve_adjoint_full(self, y: np.ndarray) -> AdjointCoeffs:
        return solve_transpose(self.dp.op, adjoint_rhs(self.dp, y))
