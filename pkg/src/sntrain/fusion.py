"""Fusion-center rules for combining per-sensor field estimates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .centralized import evaluate
from .kernels import as_point, as_points
from .network import SensorNetwork


@dataclass(frozen=True)
class FusionRule:
    """``single`` (param = sensor id), ``knn`` (param = k) or ``ca``."""

    kind: str
    param: int = 0

    def __post_init__(self):
        if self.kind not in ("single", "knn", "ca"):
            raise ValueError(f"unknown fusion rule {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "FusionRule":
        kind, _, arg = text.strip().lower().partition(":")
        if kind == "ca":
            if arg:
                raise ValueError("ca rule takes no parameter")
            return cls("ca")
        if kind not in ("single", "knn") or not arg:
            raise ValueError(f"bad fusion rule {text!r}; expected single:<id>, knn:<k> or ca")
        try:
            return cls(kind, int(arg))
        except ValueError:
            raise ValueError(f"bad fusion rule {text!r}") from None

    def __str__(self):
        return "ca" if self.kind == "ca" else f"{self.kind}:{self.param}"

    def validate(self, n: int):
        if self.kind == "single" and not 0 <= self.param < n:
            raise ValueError(f"sensor id {self.param} out of range for {n} sensors")
        if self.kind == "knn" and not 1 <= self.param <= n:
            raise ValueError(f"k must be in 1..{n}, got {self.param}")


def connectivity_weights(net: SensorNetwork) -> np.ndarray:
    deg = net.degrees().astype(np.float64)
    return deg / deg.sum()


def nearest_sensors(net: SensorNetwork, X, k: int) -> np.ndarray:
    """Ids of the ``k`` sensors closest to each query point, ties to lower id."""
    X = as_points(X)
    d2 = ((X[:, None, :] - net.positions[None, :, :]) ** 2).sum(axis=-1)
    return np.argsort(d2, axis=1, kind="stable")[:, :k]


def sensor_predictions(estimates, X) -> np.ndarray:
    """``(n_sensors, m)`` matrix of each sensor's prediction at each point."""
    X = as_points(X)
    return np.vstack([evaluate(est, X) for est in estimates])


def fuse(rule: FusionRule, preds: np.ndarray, net: SensorNetwork, X) -> np.ndarray:
    """Combine a ``sensor_predictions`` matrix into one value per point."""
    n = net.n
    if preds.shape[0] != n:
        raise ValueError(f"expected predictions from {n} sensors, got {preds.shape[0]}")
    rule.validate(n)
    if rule.kind == "single":
        return preds[rule.param].copy()
    if rule.kind == "ca":
        return connectivity_weights(net) @ preds
    idx = nearest_sensors(net, X, rule.param)
    cols = np.arange(preds.shape[1])[:, None]
    return preds[idx, cols].mean(axis=1)


def fuse_predict(rule: FusionRule, estimates, net: SensorNetwork, x) -> float:
    if len(estimates) != net.n:
        raise ValueError(f"expected {net.n} estimates, got {len(estimates)}")
    X = as_point(x)[None, :]
    return float(fuse(rule, sensor_predictions(estimates, X), net, X)[0])
