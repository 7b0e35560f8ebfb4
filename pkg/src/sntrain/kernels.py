"""Positive semi-definite kernels over points in R^d.

Point sets are passed as arrays of shape ``(n, d)``; a 1-d array of length
``n`` is read as ``n`` points on the line.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("linear", "affine", "gaussian")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel choice. ``param`` is the bias (affine) or bandwidth (gaussian)."""

    kind: str = "gaussian"
    param: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        if not np.isfinite(self.param):
            raise ValueError("kernel parameter must be finite")
        if self.kind == "gaussian" and not self.param > 0:
            raise ValueError(f"gaussian bandwidth must be positive, got {self.param!r}")
        if self.kind == "affine" and self.param < 0:
            raise ValueError(f"affine bias must be nonnegative, got {self.param!r}")

    @classmethod
    def parse(cls, text: str) -> "KernelSpec":
        """Parse ``linear``, ``affine:<bias>`` or ``gaussian:<bandwidth>``."""
        kind, _, arg = text.strip().lower().partition(":")
        if kind == "linear":
            if arg:
                raise ValueError("linear kernel takes no parameter")
            return cls("linear", 0.0)
        default = 1.0
        try:
            param = float(arg) if arg else default
        except ValueError:
            raise ValueError(f"bad kernel parameter in {text!r}") from None
        return cls(kind, param)

    def __str__(self):
        return "linear" if self.kind == "linear" else f"{self.kind}:{self.param!r}"


LINEAR = KernelSpec("linear", 0.0)
GAUSSIAN = KernelSpec("gaussian", 1.0)


def as_points(points) -> np.ndarray:
    P = np.asarray(points, dtype=np.float64)
    if P.ndim == 1:
        P = P[:, None]
    if P.ndim != 2:
        raise ValueError(f"points must be 1-d or 2-d, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise ValueError("points have non-finite coordinates")
    return P


def as_point(x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.ndim != 1:
        raise ValueError(f"a point must be 1-d, got shape {x.shape}")
    return x


def kernel_eval(spec: KernelSpec, a, b) -> float:
    a, b = as_point(a), as_point(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    if spec.kind == "gaussian":
        d = a - b
        return float(np.exp(-(d @ d) / spec.param**2))
    dot = float(a @ b)
    return dot + spec.param if spec.kind == "affine" else dot


def cross_kernel(spec: KernelSpec, A, B) -> np.ndarray:
    """Matrix ``M[i, j] = K(A[i], B[j])``."""
    A, B = as_points(A), as_points(B)
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    if spec.kind == "gaussian":
        sq = ((A[:, None, :] - B[None, :, :]) ** 2).sum(axis=-1)
        return np.exp(-sq / spec.param**2)
    M = A @ B.T
    if spec.kind == "affine":
        M += spec.param
    return M


def gram_matrix(spec: KernelSpec, points) -> np.ndarray:
    """Kernel matrix over ``points``, exactly symmetric."""
    P = as_points(points)
    if P.shape[0] < 1:
        raise ValueError("need at least one point")
    G = cross_kernel(spec, P, P)
    upper = np.triu(G)
    return upper + np.triu(G, 1).T
