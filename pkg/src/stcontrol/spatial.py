"""Nodal finite elements on tensor-product grids of intervals.

1d uses P1 hat functions on a uniform interval mesh; 2d and 3d use Q1
elements obtained as tensor products of the 1d spaces, so the mass matrix
is a Kronecker product of 1d masses and the stiffness matrix a Kronecker
sum.  The Robin term mu * (phi_i, phi_j) on the boundary becomes, per axis,
an endpoint indicator in that axis tensorized with the 1d masses of the
remaining axes.  Variable Robin coefficients are supported in 1d only,
where the boundary integral degenerates to the two endpoint evaluations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
import scipy.sparse as sp

__all__ = [
    "IntervalMesh",
    "SpatialDiscretization",
    "build_interval_mesh",
    "assemble_mass_1d",
    "assemble_stiffness_robin_1d",
    "tensorize",
    "interpolate",
    "assemble_boundary_load",
]

SpatialFunction = Union[float, Callable[..., np.ndarray]]


@dataclass(frozen=True)
class IntervalMesh:
    """Uniform mesh of (a, b) with n_cells cells and n_cells + 1 nodes."""

    a: float
    b: float
    n_cells: int
    h: float

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n_nodes)


@dataclass(frozen=True)
class SpatialDiscretization:
    """Assembled nodal space: mass, stiffness-plus-Robin and boundary data.

    coords has shape (n_h, dim) with the first axis varying slowest, which
    matches the Kronecker ordering of M_h and A_h.  boundary_weights holds
    the lumped quadrature weight of each node on the boundary (zero for
    interior nodes); in 1d the endpoint weights are 1 (point evaluation).
    """

    dim: int
    meshes: tuple[IntervalMesh, ...]
    n_h: int
    M_h: sp.csr_matrix
    A_h: sp.csr_matrix
    coords: np.ndarray
    boundary_weights: np.ndarray

    @property
    def boundary_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.boundary_weights)


def build_interval_mesh(a: float, b: float, n_cells: int) -> IntervalMesh:
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if n_cells < 1:
        raise ValueError(f"need at least one cell, got n_cells={n_cells}")
    return IntervalMesh(a=float(a), b=float(b), n_cells=int(n_cells),
                        h=(float(b) - float(a)) / int(n_cells))


def assemble_mass_1d(mesh: IntervalMesh) -> sp.csr_matrix:
    """Consistent P1 mass matrix, exact: h/6 * tridiag(1, 4, 1), halved rows
    at the two endpoints."""
    n, h = mesh.n_nodes, mesh.h
    main = np.full(n, 4.0 * h / 6.0)
    main[0] = main[-1] = 2.0 * h / 6.0
    off = np.full(n - 1, h / 6.0)
    return sp.diags_array([off, main, off], offsets=[-1, 0, 1]).tocsr()


def _interior_stiffness_1d(mesh: IntervalMesh) -> sp.csr_matrix:
    n, h = mesh.n_nodes, mesh.h
    main = np.full(n, 2.0 / h)
    main[0] = main[-1] = 1.0 / h
    off = np.full(n - 1, -1.0 / h)
    return sp.diags_array([off, main, off], offsets=[-1, 0, 1]).tocsr()


def _eval_at(f: SpatialFunction, *coords: float) -> float:
    if callable(f):
        return float(f(*coords))
    return float(f)


def assemble_stiffness_robin_1d(mesh: IntervalMesh, mu: SpatialFunction) -> sp.csr_matrix:
    """1/h * tridiag(-1, 2, -1) plus mu(a), mu(b) on the endpoint diagonal.

    In 1d the Robin boundary integral int_Gamma mu phi_i phi_j reduces to
    the endpoint values, so only the two corner diagonal entries change.
    """
    A = _interior_stiffness_1d(mesh).tolil()
    A[0, 0] += _eval_at(mu, mesh.a)
    A[-1, -1] += _eval_at(mu, mesh.b)
    return A.tocsr()


def _kron_chain(mats: Sequence[sp.spmatrix]) -> sp.csr_matrix:
    out = mats[0]
    for m in mats[1:]:
        out = sp.kron(out, m, format="csr")
    return out.tocsr()


def _kron_vectors(vecs: Sequence[np.ndarray]) -> np.ndarray:
    out = vecs[0]
    for v in vecs[1:]:
        out = np.kron(out, v)
    return out


def _node_coords(meshes: Sequence[IntervalMesh]) -> np.ndarray:
    axes = [m.nodes for m in meshes]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1)


def _lumped_weights_1d(mesh: IntervalMesh) -> np.ndarray:
    w = np.full(mesh.n_nodes, mesh.h)
    w[0] = w[-1] = 0.5 * mesh.h
    return w


def _boundary_weights(meshes: Sequence[IntervalMesh]) -> np.ndarray:
    """Lumped quadrature weight of each node on the domain boundary.

    Every face contributes the product of the 1d lumped weights of the
    transverse axes; corner and edge nodes accumulate the contributions of
    all faces they belong to.  In 1d the faces are the two endpoints with
    weight 1.
    """
    if len(meshes) == 1:
        w = np.zeros(meshes[0].n_nodes)
        w[0] = w[-1] = 1.0
        return w
    lumps = [_lumped_weights_1d(m) for m in meshes]
    total = np.zeros(int(np.prod([m.n_nodes for m in meshes])))
    for axis, mesh in enumerate(meshes):
        indicator = np.zeros(mesh.n_nodes)
        indicator[0] = indicator[-1] = 1.0
        factors = [indicator if b == axis else lumps[b] for b in range(len(meshes))]
        total += _kron_vectors(factors)
    return total


def tensorize(meshes: Sequence[IntervalMesh], mu: SpatialFunction) -> SpatialDiscretization:
    """Assemble the tensor-product space on 1 to 3 axis meshes.

    M_h is the Kronecker product of the axis masses.  A_h sums, per axis,
    the interior 1d stiffness tensorized with the masses of the other axes,
    plus the Robin boundary mass mu * (endpoint indicator x other masses).
    For dim >= 2 the Robin coefficient must be constant.
    """
    meshes = tuple(meshes)
    dim = len(meshes)
    if dim not in (1, 2, 3):
        raise ValueError(f"supported dimensions are 1..3, got {dim}")
    if dim >= 2 and callable(mu):
        raise ValueError("variable Robin coefficient is supported in 1d only")

    masses = [assemble_mass_1d(m) for m in meshes]
    if dim == 1:
        M_h = masses[0]
        A_h = assemble_stiffness_robin_1d(meshes[0], mu)
    else:
        M_h = _kron_chain(masses)
        A_h = sp.csr_matrix(M_h.shape)
        mu_const = float(mu)
        for axis, mesh in enumerate(meshes):
            stiff = _interior_stiffness_1d(mesh)
            indicator = sp.diags_array(
                np.eye(mesh.n_nodes)[:, [0, -1]].sum(axis=1)).tocsr()
            A_h = A_h + _kron_chain(
                [stiff if b == axis else masses[b] for b in range(dim)])
            A_h = A_h + mu_const * _kron_chain(
                [indicator if b == axis else masses[b] for b in range(dim)])
        A_h = A_h.tocsr()

    n_h = int(np.prod([m.n_nodes for m in meshes]))
    return SpatialDiscretization(
        dim=dim,
        meshes=meshes,
        n_h=n_h,
        M_h=M_h.tocsr(),
        A_h=A_h.tocsr(),
        coords=_node_coords(meshes),
        boundary_weights=_boundary_weights(meshes),
    )


def interpolate(spatial: SpatialDiscretization, f: SpatialFunction) -> np.ndarray:
    """Nodal interpolation: evaluate f at every node (constants broadcast)."""
    if callable(f):
        cols = [spatial.coords[:, d] for d in range(spatial.dim)]
        return np.asarray(f(*cols), dtype=float) * np.ones(spatial.n_h)
    return np.full(spatial.n_h, float(f))


def assemble_boundary_load(
    spatial: SpatialDiscretization,
    eta: Union[float, Callable[..., np.ndarray]],
    t0: float,
    t1: float,
) -> np.ndarray:
    """Load vector int_t0^t1 int_Gamma eta phi_j ds dt.

    Trapezoidal rule in time, lumped nodal quadrature on the boundary
    faces (exact endpoint evaluation in 1d).  eta is a constant or a
    callable eta(t, x[, y[, z]]) vectorized over the node coordinates.
    """
    if not t0 < t1:
        raise ValueError(f"need t0 < t1, got ({t0}, {t1})")
    w = spatial.boundary_weights
    idx = spatial.boundary_nodes
    out = np.zeros(spatial.n_h)
    if callable(eta):
        cols = [spatial.coords[idx, d] for d in range(spatial.dim)]
        vals0 = np.asarray(eta(t0, *cols), dtype=float) * np.ones(idx.size)
        vals1 = np.asarray(eta(t1, *cols), dtype=float) * np.ones(idx.size)
    else:
        vals0 = vals1 = np.full(idx.size, float(eta))
    out[idx] = 0.5 * (t1 - t0) * (vals0 + vals1) * w[idx]
    return out
