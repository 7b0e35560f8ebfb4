import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sntrain.kernels import KernelSpec, gram_matrix
from sntrain.linalg import FactorizationError, cholesky, min_eigenvalue_lower_bound, ridge_solve


def residual_ok(K, lam, b, x):
    r = (K + lam * np.eye(len(b))) @ x - b
    return np.max(np.abs(r)) <= 1e-8 * (1 + np.max(np.abs(b)))


def test_ridge_solve_scalar():
    assert ridge_solve([[1.0]], 1.0, [2.0]) == pytest.approx([1.0])


def test_ridge_solve_diagonal():
    np.testing.assert_allclose(ridge_solve(np.eye(3), 0.5, [3, 3, 3]), [2, 2, 2])


def test_ridge_solve_gaussian_gram_residual(rng):
    K = gram_matrix(KernelSpec("gaussian", 1.0), rng.uniform(-1, 1, 5))
    b = rng.normal(size=5)
    assert residual_ok(K, 0.01, b, ridge_solve(K, 0.01, b))


def test_ridge_solve_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        ridge_solve(np.eye(3), 1.0, [1.0, 2.0])


def test_ridge_solve_rejects_nonpositive_lambda():
    with pytest.raises(ValueError):
        ridge_solve(np.eye(2), 0.0, [1.0, 1.0])


@pytest.mark.parametrize("K, pivot", [(-2 * np.eye(2), 0), (np.diag([1.0, -5.0, 2.0]), 1)])
def test_factorization_error_reports_pivot(K, pivot):
    with pytest.raises(FactorizationError) as info:
        ridge_solve(K, 1.0, np.ones(K.shape[0]))
    assert info.value.pivot == pivot


def test_cholesky_reconstructs(rng):
    A = rng.normal(size=(6, 6))
    A = A @ A.T + np.eye(6)
    L = cholesky(A)
    np.testing.assert_allclose(L @ L.T, A, atol=1e-12)
    assert np.allclose(L, np.tril(L))


def test_min_eig_identity():
    v = min_eigenvalue_lower_bound(np.eye(2))
    assert 0.999 <= v <= 1.0


def test_min_eig_rank_one():
    assert abs(min_eigenvalue_lower_bound([[1.0, 1.0], [1.0, 1.0]])) <= 1e-9


def test_min_eig_against_high_precision_eigensolver(rng):
    # oracle: 50-digit symmetric eigensolve of the same matrix
    K = gram_matrix(KernelSpec("gaussian", 1.0), rng.uniform(-1, 1, 4))
    with mpmath.workdps(50):
        exact = min(mpmath.eigsy(mpmath.matrix(K.tolist()))[0])
    bound = min_eigenvalue_lower_bound(K)
    assert bound <= float(exact) + 1e-9
    assert bound >= -1e-9
    assert bound == pytest.approx(float(exact), abs=1e-12)


gram_cases = st.tuples(
    st.integers(1, 20), st.sampled_from(["linear", "affine", "gaussian"]), st.integers(0, 2**32 - 1),
    st.floats(1e-6, 10.0),
)


@settings(max_examples=60, deadline=None)
@given(gram_cases)
def test_ridge_solve_residual_property(case):
    n, kind, seed, lam = case
    r = np.random.default_rng(seed)
    K = gram_matrix(KernelSpec(kind, 1.0), r.uniform(-1, 1, (n, 2)))
    b = r.normal(size=n) * 10
    x = ridge_solve(K, lam, b)
    assert residual_ok(K, lam, b, x)
    np.testing.assert_array_equal(ridge_solve(K, lam, np.zeros(n)), np.zeros(n))


@settings(max_examples=40, deadline=None)
@given(gram_cases, st.floats(-100, 100).filter(lambda a: abs(a) > 1e-3))
def test_ridge_solve_linear_in_rhs(case, a):
    n, kind, seed, lam = case
    r = np.random.default_rng(seed)
    K = gram_matrix(KernelSpec(kind, 1.0), r.uniform(-1, 1, n))
    b = r.normal(size=n)
    x = ridge_solve(K, lam, b)
    xa = ridge_solve(K, lam, a * b)
    np.testing.assert_allclose(xa, a * x, rtol=1e-10, atol=1e-10 * np.max(np.abs(a * x)))
