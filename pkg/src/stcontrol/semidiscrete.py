"""Classical semi-discrete baseline: method of lines with Crank-Nicolson.

The state marches forward with the trapezoidal one-step scheme; the adjoint
PDE (homogeneous, Robin boundary, terminal condition y(T) - y_d) is
discretized separately and marched backward with the same scheme.  The
nodal-in-time adjoint then has to be transferred onto the piecewise
constant control grid, and that transfer is where this pipeline genuinely
differs from the coupled space-time system:

* ``sample_left`` takes the value at the left interval endpoint.  This is
  the classical choice; its gradient is only first-order consistent, and
  for rough terminal data the undamped high-frequency content of the
  backward sweep leaks into the gradient, which is exactly the instability
  the benchmark measures.

* ``average`` takes the interval midpoint average (p^ell + p^{ell+1}) / 2.
  One can check directly from the two recursions that this reproduces the
  transpose-system adjoint identically: averaging the terminal pair gives
  (M + dt/2 A)^{-1} M (y^K - y_d), and both averaged and transpose blocks
  then propagate with the same map (M + dt/2 A)^{-1} (M - dt/2 A).  It is
  useful as a cross-check, but makes the baseline indistinguishable from
  the space-time method.
"""

from __future__ import annotations

import numpy as np

from .problem import DiscreteProblem, build_rhs

__all__ = [
    "cn_forward",
    "cn_backward",
    "interval_average_adjoint",
    "sample_left_adjoint",
    "SemiDiscreteBackend",
]


def cn_forward(dp: DiscreteProblem, u: np.ndarray) -> np.ndarray:
    """Crank-Nicolson sweep: (M + dt/2 A) y^{l+1} = (M - dt/2 A) y^l + f_l.

    The interval load f_l = dt M u_l + (trapezoidal eta load) is shared
    with the space-time right-hand side, which is what makes the two
    forward solvers equivalent.
    """
    f = build_rhs(dp, u)
    K, n = dp.K, dp.n_h
    op = dp.op
    y = np.empty((K + 1, n))
    y[0] = dp.y0_vec.copy()
    for ell in range(K):
        # M - dt/2 A is the negated L block
        y[ell + 1] = op._U_factor.solve(f[ell] - op.L_block @ y[ell])
    return y


def cn_backward(dp: DiscreteProblem, terminal_misfit: np.ndarray) -> np.ndarray:
    """Backward Crank-Nicolson for the homogeneous adjoint PDE.

    p^K equals the nodal terminal misfit; each step solves
    (M + dt/2 A) p^k = (M - dt/2 A) p^{k+1}.
    """
    K, n = dp.K, dp.n_h
    op = dp.op
    p = np.empty((K + 1, n))
    p[K] = np.asarray(terminal_misfit, dtype=float)
    for k in range(K - 1, -1, -1):
        p[k] = op._U_factor.solve(-(op.L_block @ p[k + 1]))
    return p


def interval_average_adjoint(p_nodal: np.ndarray) -> np.ndarray:
    """Midpoint average of consecutive nodal adjoints onto control intervals."""
    return 0.5 * (p_nodal[:-1] + p_nodal[1:])


def sample_left_adjoint(p_nodal: np.ndarray) -> np.ndarray:
    """Left-endpoint sample of the nodal adjoint on each control interval."""
    return p_nodal[:-1].copy()


_TRANSFERS = {
    "sample_left": sample_left_adjoint,
    "average": interval_average_adjoint,
}


class SemiDiscreteBackend:
    """Crank-Nicolson forward/backward solves packaged for the optimizer."""

    method_name = "semi-discrete"

    def __init__(self, dp: DiscreteProblem, transfer: str = "sample_left"):
        if transfer not in _TRANSFERS:
            raise ValueError(
                f"unknown adjoint transfer {transfer!r}, expected one of "
                f"{sorted(_TRANSFERS)}")
        self.dp = dp
        self.transfer = transfer
        self._transfer_fn = _TRANSFERS[transfer]

    def solve_state(self, u: np.ndarray) -> np.ndarray:
        return cn_forward(self.dp, u)

    def solve_adjoint(self, y: np.ndarray) -> np.ndarray:
        p = cn_backward(self.dp, y[self.dp.K] - self.dp.yd_vec)
        return self._transfer_fn(p)
