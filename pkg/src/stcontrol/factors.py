"""Reusable sparse Cholesky-style factorizations of SPD blocks."""

from __future__ import annotations

import threading

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

__all__ = ["FactorizationError", "SpdFactor"]


class FactorizationError(RuntimeError):
    """A block expected to be symmetric positive definite is not."""


class SpdFactor:
    """LDL-style factorization of an SPD sparse matrix, computed once.

    Uses SuperLU in symmetric mode without pivoting, which succeeds with a
    positive U diagonal exactly when the (permuted) matrix admits a Cholesky
    factorization.  Solves are serialized with a lock so a factor can be
    shared by concurrent solves on distinct right-hand sides.
    """

    def __init__(self, mat: sp.spmatrix, name: str = "block"):
        try:
            self._lu = spla.splu(
                mat.tocsc(),
                diag_pivot_thresh=0.0,
                permc_spec="MMD_AT_PLUS_A",
                options={"SymmetricMode": True},
            )
        except RuntimeError as exc:
            raise FactorizationError(f"{name} could not be factored: {exc}") from exc
        if not np.all(self._lu.U.diagonal() > 0):
            raise FactorizationError(
                f"{name} is not positive definite (mu <= 0 on the boundary "
                "or broken assembly)")
        self._lock = threading.Lock()

    def solve(self, rhs: np.ndarray, transpose: bool = False) -> np.ndarray:
        with self._lock:
            return self._lu.solve(rhs, trans="T" if transpose else "N")
