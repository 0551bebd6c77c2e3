"""Uniform temporal grid and the temporal coupling matrices.

The trial functions in time are the hat functions theta^0 .. theta^K on a
uniform grid, the test functions are the (unnormalized) indicator functions
xi^0 .. xi^{K-1} of the K subintervals.  All entries below are exact
integrals of products of these functions:

    C[k, l] = int  d/dt theta^k * xi^l dt   -> two entries -1/+1 per column
    N[k, l] = int  theta^k * xi^l dt        -> two entries dt/2 per column
    M_time  = diag(int xi^l^2 dt)           -> dt * identity
    e_time  = theta evaluated at t = 0      -> (1, 0, ..., 0)

With normalized indicators M_time would be the identity; we keep the plain
indicators and carry the dt weight explicitly in all norms and right-hand
sides, which leaves every solver output unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TemporalGrid",
    "TemporalMatrices",
    "build_temporal_grid",
    "assemble_temporal",
]


@dataclass(frozen=True)
class TemporalGrid:
    """Uniform partition of (0, T) into K steps of size dt = T/K."""

    T: float
    K: int
    dt: float

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.K + 1)

    def interval(self, ell: int) -> tuple[float, float]:
        """Endpoints (t_ell, t_{ell+1}) of subinterval ell."""
        return ell * self.dt, (ell + 1) * self.dt


@dataclass(frozen=True)
class TemporalMatrices:
    """Exact temporal coupling matrices for the hat/indicator basis pair."""

    C: np.ndarray       # (K+1, K)
    N: np.ndarray       # (K+1, K)
    M_time: np.ndarray  # (K, K), dt * identity
    e_time: np.ndarray  # (K+1,), evaluation of hats at t = 0


def build_temporal_grid(T: float, K: int) -> TemporalGrid:
    """Uniform time grid with nodes t_k = k * T/K, k = 0..K."""
    if not T > 0:
        raise ValueError(f"final time must be positive, got T={T}")
    if K < 1:
        raise ValueError(f"need at least one time step, got K={K}")
    return TemporalGrid(T=float(T), K=int(K), dt=float(T) / int(K))


def assemble_temporal(grid: TemporalGrid) -> TemporalMatrices:
    """Assemble C, N, M_time and e_time for a uniform grid.

    Hat k is supported on (t_{k-1}, t_{k+1}); on interval l it ramps 1 -> 0
    for k = l and 0 -> 1 for k = l + 1, so each column of C holds -1/+1 and
    each column of N holds dt/2 twice.
    """
    K, dt = grid.K, grid.dt
    C = np.zeros((K + 1, K))
    N = np.zeros((K + 1, K))
    for ell in range(K):
        C[ell, ell] = -1.0
        C[ell + 1, ell] = 1.0
        N[ell, ell] = 0.5 * dt
        N[ell + 1, ell] = 0.5 * dt
    M_time = dt * np.eye(K)
    e_time = np.zeros(K + 1)
    e_time[0] = 1.0
    return TemporalMatrices(C=C, N=N, M_time=M_time, e_time=e_time)
