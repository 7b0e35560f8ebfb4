"""Small dense symmetric linear algebra.

Everything here works on float64 numpy arrays. Neighborhood matrices are
tiny (tens of rows), so a hand-rolled Cholesky is fast enough and lets us
report exactly where a factorization broke down.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular


class FactorizationError(np.linalg.LinAlgError):
    """Raised when a matrix is not positive definite.

    ``pivot`` is the 0-based index of the first non-positive pivot.
    """

    def __init__(self, pivot: int, value: float):
        super().__init__(f"matrix not positive definite: pivot {pivot} = {value!r}")
        self.pivot = pivot
        self.value = value


def as_symmetric(K) -> np.ndarray:
    K = np.array(K, dtype=np.float64, ndmin=2)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {K.shape}")
    if not np.all(np.isfinite(K)):
        raise ValueError("matrix has non-finite entries")
    return K


def as_vector(b) -> np.ndarray:
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise ValueError("vector has non-finite entries")
    return b


def cholesky(A: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of a symmetric positive definite matrix."""
    A = as_symmetric(A)
    n = A.shape[0]
    L = np.zeros_like(A)
    for j in range(n):
        row = L[j, :j]
        d = A[j, j] - row @ row
        if not d > 0.0:
            raise FactorizationError(j, float(d))
        L[j, j] = np.sqrt(d)
        if j + 1 < n:
            L[j + 1:, j] = (A[j + 1:, j] - L[j + 1:, :j] @ row) / L[j, j]
    return L


class RidgeFactor:
    """Cached Cholesky factorization of ``K + lam * I``.

    SN-Train solves against the same shifted local kernel matrix at every
    sweep, so the factor is computed once and reused.
    """

    def __init__(self, K, lam: float):
        K = as_symmetric(K)
        if not lam > 0:
            raise ValueError(f"regularization must be positive, got {lam!r}")
        self.dim = K.shape[0]
        self.lam = float(lam)
        self.L = cholesky(K + self.lam * np.eye(self.dim))

    def solve(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=np.float64)
        if b.shape[0] != self.dim:
            raise ValueError(f"dimension mismatch: matrix {self.dim}, rhs {b.shape[0]}")
        w = solve_triangular(self.L, b, lower=True, check_finite=False)
        return solve_triangular(self.L, w, lower=True, trans="T", check_finite=False)


def ridge_solve(K, lam: float, b) -> np.ndarray:
    """Solve ``(K + lam I) x = b`` for PSD ``K`` and ``lam > 0``."""
    b = as_vector(b)
    K = as_symmetric(K)
    if K.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: matrix {K.shape[0]}, rhs {b.shape[0]}")
    return RidgeFactor(K, lam).solve(b)


def min_eigenvalue_lower_bound(K) -> float:
    """A value guaranteed (up to 1e-9) not to exceed the smallest eigenvalue.

    Uses a symmetric eigensolve and subtracts its backward-error bound, so
    the result is a certified lower bound rather than an estimate.
    """
    K = as_symmetric(K)
    lo = float(np.linalg.eigvalsh(K)[0])
    slack = 4 * K.shape[0] * np.finfo(np.float64).eps * float(np.abs(K).sum(axis=1).max())
    return lo - slack
