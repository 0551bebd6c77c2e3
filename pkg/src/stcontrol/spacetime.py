"""The coupled space-time operator in factored block form.

The full system matrix couples all time slices at once:

    [ C^T x M + N^T x A ]         (K * n_h PDE rows, test index ell)
    [ e^T x M           ]         (n_h initial-value rows)

For the hat/indicator basis pair the PDE block row ell only touches the
slices y^ell and y^{ell+1}, through

    L = -M + dt/2 * A        and        U = M + dt/2 * A,

so the forward solve is a block forward substitution with the single SPD
factor of U (plus one mass solve for y^0), and the transpose solve is the
mirrored backward substitution.  Nothing larger than n_h x n_h is ever
factored; the assembled sparse matrix exists only as a test oracle.

Coefficient layout used throughout:

    states   y : array (K+1, n_h), slice k holds the nodal values at t_k
    rhs      f : array (K+1, n_h) or flat; rows 0..K-1 are the PDE blocks,
                 row K is the initial-value block
    adjoints p : AdjointCoeffs(p1 (K, n_h), p2 (n_h,)); the transpose rhs g
                 uses the same (K+1, n_h) layout with row k indexed by the
                 trial hat k (row K is the terminal block)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .factors import FactorizationError, SpdFactor
from .spatial import SpatialDiscretization
from .temporal import TemporalGrid, assemble_temporal

__all__ = [
    "AdjointCoeffs",
    "SpaceTimeOperator",
    "assemble_operator",
    "apply",
    "apply_transpose",
    "solve_forward",
    "solve_transpose",
    "assemble_sparse_oracle",
    "FactorizationError",
]


@dataclass
class AdjointCoeffs:
    """Adjoint coefficients: K interval blocks p1 and one nodal block p2."""

    p1: np.ndarray  # (K, n_h)
    p2: np.ndarray  # (n_h,)

    def ravel(self) -> np.ndarray:
        return np.concatenate([self.p1.reshape(-1), self.p2])


@dataclass
class SpaceTimeOperator:
    """Factored form of the coupled operator; immutable after assembly."""

    grid: TemporalGrid
    spatial: SpatialDiscretization
    L_block: sp.csr_matrix
    U_block: sp.csr_matrix
    init_block: sp.csr_matrix
    _U_factor: SpdFactor = field(repr=False)
    _M_factor: SpdFactor = field(repr=False)

    @property
    def n_delta(self) -> int:
        return (self.grid.K + 1) * self.spatial.n_h


def assemble_operator(grid: TemporalGrid, spatial: SpatialDiscretization) -> SpaceTimeOperator:
    """Build the factored operator; the dense matrix is never materialized."""
    M, A = spatial.M_h, spatial.A_h
    half_dt_A = 0.5 * grid.dt * A
    L = (-M + half_dt_A).tocsr()
    U = (M + half_dt_A).tocsr()
    return SpaceTimeOperator(
        grid=grid,
        spatial=spatial,
        L_block=L,
        U_block=U,
        init_block=M,
        _U_factor=SpdFactor(U, name="M + dt/2 A"),
        _M_factor=SpdFactor(M, name="mass matrix"),
    )


def _as_blocks(op: SpaceTimeOperator, vec: np.ndarray, what: str) -> np.ndarray:
    K, n = op.grid.K, op.spatial.n_h
    arr = np.asarray(vec, dtype=float)
    if arr.size != (K + 1) * n:
        raise ValueError(
            f"{what} has {arr.size} entries, expected {(K + 1) * n} "
            f"for K={K}, n_h={n}")
    return arr.reshape(K + 1, n)


def apply(op: SpaceTimeOperator, y) -> np.ndarray:
    """Residual vector: PDE block rows L y^ell + U y^{ell+1}, then M y^0."""
    Y = _as_blocks(op, y, "state vector")
    K = op.grid.K
    out = np.empty_like(Y)
    out[:K] = (op.L_block @ Y[:K].T + op.U_block @ Y[1:].T).T
    out[K] = op.init_block @ Y[0]
    return out.reshape(-1)


def apply_transpose(op: SpaceTimeOperator, p) -> np.ndarray:
    """Action of the transposed operator on (p1 blocks, p2)."""
    P = _as_blocks(op, p, "adjoint vector")
    K = op.grid.K
    p1, p2 = P[:K], P[K]
    out = np.zeros_like(P)
    out[:K] = (op.L_block.T @ p1.T).T
    out[1:] += (op.U_block.T @ p1.T).T
    out[0] += op.init_block.T @ p2
    return out.reshape(-1)


def solve_forward(op: SpaceTimeOperator, f) -> np.ndarray:
    """Block forward substitution: M y^0 = f^2, then U y^{ell+1} = f^1_ell - L y^ell."""
    F = _as_blocks(op, f, "right-hand side")
    K, n = op.grid.K, op.spatial.n_h
    y = np.empty((K + 1, n))
    y[0] = op._M_factor.solve(F[K])
    for ell in range(K):
        y[ell + 1] = op._U_factor.solve(F[ell] - op.L_block @ y[ell])
    return y


def solve_transpose(op: SpaceTimeOperator, g) -> AdjointCoeffs:
    """Block backward substitution for the transposed system.

    Rows of the transpose are indexed by the trial hats k = 0..K: row K
    couples only p1_{K-1}, rows K-1..1 couple consecutive p1 blocks, and
    row 0 determines p2 through the mass matrix.
    """
    G = _as_blocks(op, g, "adjoint right-hand side")
    K, n = op.grid.K, op.spatial.n_h
    p1 = np.empty((K, n))
    p1[K - 1] = op._U_factor.solve(G[K], transpose=True)
    for k in range(K - 1, 0, -1):
        p1[k - 1] = op._U_factor.solve(G[k] - op.L_block.T @ p1[k], transpose=True)
    p2 = op._M_factor.solve(G[0] - op.L_block.T @ p1[0])
    return AdjointCoeffs(p1=p1, p2=p2)


def assemble_sparse_oracle(op: SpaceTimeOperator, max_nnz: int = 100_000) -> sp.csr_matrix:
    """Explicitly assembled sparse matrix, for tests only.

    Built independently of the L/U blocks, directly from the temporal
    matrices via Kronecker products, so structured and assembled paths
    cross-check each other.
    """
    K = op.grid.K
    M, A = op.spatial.M_h, op.spatial.A_h
    estimate = 2 * K * (M.nnz + A.nnz) + M.nnz
    if estimate > max_nnz:
        raise ValueError(
            f"oracle would hold about {estimate} nonzeros, over the cap "
            f"{max_nnz}; raise max_nnz explicitly for large instances")
    tm = assemble_temporal(op.grid)
    top = sp.kron(sp.csr_matrix(tm.C.T), M) + sp.kron(sp.csr_matrix(tm.N.T), A)
    bottom = sp.kron(sp.csr_matrix(tm.e_time[None, :]), M)
    return sp.vstack([top, bottom]).tocsr()
