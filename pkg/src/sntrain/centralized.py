"""Centralized regularized kernel least squares."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import KernelSpec, as_point, as_points, cross_kernel, gram_matrix
from .linalg import ridge_solve


@dataclass(frozen=True, eq=False)
class FieldEstimate:
    """The function ``f(x) = sum_i coeffs[i] * K(x, centers[i])``."""

    kernel: KernelSpec
    centers: np.ndarray  # (m, d)
    coeffs: np.ndarray  # (m,)

    def __post_init__(self):
        centers = as_points(self.centers)
        coeffs = np.asarray(self.coeffs, dtype=np.float64).reshape(-1)
        if centers.shape[0] != coeffs.shape[0] or coeffs.shape[0] < 1:
            raise ValueError(
                f"need matching non-empty centers/coeffs, got {centers.shape[0]} and {coeffs.shape[0]}"
            )
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "coeffs", coeffs)

    def __call__(self, X) -> np.ndarray:
        return evaluate(self, X)


def fit_centralized(positions, y, spec: KernelSpec, lam: float) -> FieldEstimate:
    """Minimize ``sum (f(x_i) - y_i)^2 + lam ||f||^2`` over the RKHS."""
    P = as_points(positions)
    y = np.asarray(y, dtype=np.float64)
    if P.shape[0] != y.shape[0]:
        raise ValueError(f"{P.shape[0]} positions but {y.shape[0]} measurements")
    c = ridge_solve(gram_matrix(spec, P), lam, y)
    return FieldEstimate(spec, P, c)


def evaluate(est: FieldEstimate, X) -> np.ndarray:
    """Vectorized ``predict`` over an ``(m, d)`` array of points."""
    return cross_kernel(est.kernel, X, est.centers) @ est.coeffs


def predict(est: FieldEstimate, x) -> float:
    x = as_point(x)
    if x.shape[0] != est.centers.shape[1]:
        raise ValueError(f"dimension mismatch: point {x.shape[0]}, centers {est.centers.shape[1]}")
    return float(evaluate(est, x[None, :])[0])


def rkhs_norm_sq(est: FieldEstimate) -> float:
    return float(est.coeffs @ gram_matrix(est.kernel, est.centers) @ est.coeffs)


def objective(est: FieldEstimate, positions, y, lam: float) -> float:
    """Penalized squared error of ``est`` on the sample."""
    r = evaluate(est, positions) - np.asarray(y, dtype=np.float64)
    return float(r @ r + lam * rkhs_norm_sq(est))
