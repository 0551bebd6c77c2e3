import dataclasses

import numpy as np
import pytest
import scipy.sparse as sp

from stcontrol import (
    FactorizationError,
    apply,
    apply_transpose,
    assemble_operator,
    assemble_sparse_oracle,
    build_interval_mesh,
    build_temporal_grid,
    solve_forward,
    solve_transpose,
    tensorize,
)
from stcontrol.spacetime import AdjointCoeffs


def make_op(n_cells=2, K=2, mu=1.0, dim=1, T=1.0):
    grid = build_temporal_grid(T, K)
    spatial = tensorize([build_interval_mesh(0.0, 1.0, n_cells)] * dim, mu)
    return assemble_operator(grid, spatial)


def test_hand_built_4x4():
    # K = 1, n_h = 2: the full matrix is ((-M + dt/2 A | M + dt/2 A), (M | 0))
    op = make_op(n_cells=1, K=1)
    M = op.spatial.M_h.toarray()
    A = op.spatial.A_h.toarray()
    dt = op.grid.dt
    expected = np.zeros((4, 4))
    expected[:2, :2] = -M + 0.5 * dt * A
    expected[:2, 2:] = M + 0.5 * dt * A
    expected[2:, :2] = M
    np.testing.assert_allclose(assemble_sparse_oracle(op).toarray(), expected, atol=1e-14)


def test_paper_sizes():
    op = make_op(n_cells=10, K=40)
    assert op.n_delta == 451


def test_apply_zero_and_sizes():
    op = make_op()
    n_delta = op.n_delta
    np.testing.assert_allclose(apply(op, np.zeros(n_delta)), 0.0)
    with pytest.raises(ValueError):
        apply(op, np.zeros(n_delta + 1))


@pytest.mark.parametrize("n_cells,K", [(2, 2), (3, 4), (4, 3)])
def test_apply_matches_oracle(n_cells, K, rng):
    op = make_op(n_cells=n_cells, K=K)
    B = assemble_sparse_oracle(op)
    for _ in range(5):
        y = rng.standard_normal(op.n_delta)
        np.testing.assert_allclose(apply(op, y), B @ y, rtol=1e-12, atol=1e-14)
        p = rng.standard_normal(op.n_delta)
        np.testing.assert_allclose(apply_transpose(op, p), B.T @ p, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("n_cells,K", [(2, 3), (5, 6)])
def test_transpose_identity(n_cells, K, rng):
    op = make_op(n_cells=n_cells, K=K)
    for _ in range(10):
        y = rng.standard_normal(op.n_delta)
        p = rng.standard_normal(op.n_delta)
        lhs = float(apply(op, y) @ p)
        rhs = float(y @ apply_transpose(op, p))
        assert abs(lhs - rhs) <= 1e-12 * (np.linalg.norm(y) * np.linalg.norm(p) + 1)


def test_solve_forward_zero_rhs():
    op = make_op()
    y = solve_forward(op, np.zeros(op.n_delta))
    np.testing.assert_allclose(y, 0.0)


def test_solve_transpose_zero_rhs():
    op = make_op()
    p = solve_transpose(op, np.zeros(op.n_delta))
    np.testing.assert_allclose(p.p1, 0.0)
    np.testing.assert_allclose(p.p2, 0.0)


@pytest.mark.parametrize("dim,n_cells,K", [(1, 2, 2), (1, 4, 5), (2, 2, 3)])
def test_solves_match_dense(dim, n_cells, K, rng):
    op = make_op(n_cells=n_cells, K=K, dim=dim)
    B = assemble_sparse_oracle(op).toarray()
    f = rng.standard_normal(op.n_delta)
    y = solve_forward(op, f)
    y_dense = np.linalg.solve(B, f)
    assert np.linalg.norm(y.reshape(-1) - y_dense) <= 1e-10 * np.linalg.norm(y_dense)

    g = rng.standard_normal(op.n_delta)
    p = solve_transpose(op, g)
    p_dense = np.linalg.solve(B.T, g)
    assert np.linalg.norm(p.ravel() - p_dense) <= 1e-10 * np.linalg.norm(p_dense)


def test_solve_then_apply_roundtrip(rng):
    op = make_op(n_cells=5, K=7)
    f = rng.standard_normal(op.n_delta)
    y = solve_forward(op, f)
    np.testing.assert_allclose(apply(op, y), f, rtol=1e-10, atol=1e-12)


def test_adjoint_layout(rng):
    op = make_op(n_cells=3, K=4)
    g = rng.standard_normal(op.n_delta)
    p = solve_transpose(op, g)
    assert isinstance(p, AdjointCoeffs)
    assert p.p1.shape == (4, 4)
    assert p.p2.shape == (4,)
    np.testing.assert_allclose(apply_transpose(op, p.ravel()), g, rtol=1e-10, atol=1e-12)


def test_constant_state_with_zero_stiffness(rng):
    # with A = 0 the PDE block rows evaluate L y + U y = 0 for constant-in-
    # time states
    op = make_op(n_cells=3, K=3)
    zero_A = sp.csr_matrix(op.spatial.A_h.shape)
    spatial = dataclasses.replace(op.spatial, A_h=zero_A)
    op0 = assemble_operator(op.grid, spatial)
    slice_vals = rng.standard_normal(op.spatial.n_h)
    y = np.tile(slice_vals, (op.grid.K + 1, 1))
    residual = apply(op0, y).reshape(op.grid.K + 1, -1)
    np.testing.assert_allclose(residual[:op.grid.K], 0.0, atol=1e-14)


def test_oracle_cap():
    op = make_op(n_cells=30, K=50)
    with pytest.raises(ValueError):
        assemble_sparse_oracle(op, max_nnz=100)


def test_non_spd_block_raises():
    # a strongly negative Robin coefficient makes M + dt/2 A indefinite
    grid = build_temporal_grid(1.0, 2)
    spatial = tensorize([build_interval_mesh(0.0, 1.0, 2)], -40.0)
    with pytest.raises(FactorizationError):
        assemble_operator(grid, spatial)


def test_concurrent_solves_share_operator(rng):
    # one factored operator, many threads, distinct right-hand sides
    from concurrent.futures import ThreadPoolExecutor

    op = make_op(n_cells=6, K=8)
    rhs = [rng.standard_normal(op.n_delta) for _ in range(16)]
    expected = [solve_forward(op, f) for f in rhs]
    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(lambda f: solve_forward(op, f), rhs))
    for got, want in zip(results, expected):
        np.testing.assert_array_equal(got, want)
