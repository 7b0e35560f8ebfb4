import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sntrain.centralized import FieldEstimate, predict
from sntrain.fusion import (
    FusionRule, connectivity_weights, fuse, fuse_predict, nearest_sensors, sensor_predictions,
)
from sntrain.kernels import KernelSpec
from sntrain.network import build_disk_topology

G = KernelSpec("gaussian", 1.0)


def random_estimates(rng, net):
    return [FieldEstimate(G, rng.uniform(-1, 1, (3, 1)), rng.normal(size=3)) for _ in range(net.n)]


def test_parse_rules():
    assert FusionRule.parse("single:3") == FusionRule("single", 3)
    assert FusionRule.parse("knn:2") == FusionRule("knn", 2)
    assert FusionRule.parse("ca") == FusionRule("ca")
    for bad in ("knn", "mean", "single:x", "ca:1"):
        with pytest.raises(ValueError):
            FusionRule.parse(bad)


def test_identical_estimates_give_same_value(rng):
    net = build_disk_topology(rng.uniform(-1, 1, 6), 0.5)
    g = FieldEstimate(G, [[0.1], [0.7]], [1.5, -0.5])
    for rule in ("single:2", "knn:1", "knn:4", "ca"):
        assert fuse_predict(FusionRule.parse(rule), [g] * 6, net, [0.3]) == pytest.approx(predict(g, 0.3))


def test_knn_all_is_plain_mean(rng):
    net = build_disk_topology(rng.uniform(-1, 1, 7), 0.4)
    ests = random_estimates(rng, net)
    X = rng.uniform(-1, 1, (20, 1))
    P = sensor_predictions(ests, X)
    np.testing.assert_allclose(fuse(FusionRule("knn", 7), P, net, X), P.mean(axis=0), atol=1e-12)


def test_isolated_network_ca_is_mean(rng):
    net = build_disk_topology([0.0, 1.0, 2.0, 3.0], 0.5)
    np.testing.assert_array_equal(connectivity_weights(net), [0.25] * 4)
    ests = random_estimates(rng, net)
    vals = [predict(e, 0.4) for e in ests]
    assert fuse_predict(FusionRule("ca"), ests, net, [0.4]) == pytest.approx(np.mean(vals), abs=1e-12)


def test_knn_ties_go_to_lower_id():
    net = build_disk_topology([-1.0, 1.0, 0.5], 0.1)
    np.testing.assert_array_equal(nearest_sensors(net, [[0.0]], 2), [[2, 0]])
    np.testing.assert_array_equal(nearest_sensors(net, [[0.0]], 1), [[2]])
    net = build_disk_topology([1.0, -1.0], 0.1)
    np.testing.assert_array_equal(nearest_sensors(net, [[0.0]], 1), [[0]])


def test_nn_at_sensor_position_uses_that_sensor(rng):
    x = rng.uniform(-1, 1, 8)
    net = build_disk_topology(x, 0.3)
    ests = random_estimates(rng, net)
    for s in range(8):
        assert fuse_predict(FusionRule("knn", 1), ests, net, [x[s]]) == predict(ests[s], x[s])


def test_invalid_rule_params(rng):
    net = build_disk_topology([0.0, 1.0], 0.5)
    ests = random_estimates(rng, net)
    for rule in (FusionRule("single", 2), FusionRule("knn", 0), FusionRule("knn", 3)):
        with pytest.raises(ValueError):
            fuse_predict(rule, ests, net, [0.0])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 15), st.floats(0, 2), st.integers(0, 2**32 - 1))
def test_fusion_is_convex_combination(n, r, seed):
    rng = np.random.default_rng(seed)
    net = build_disk_topology(rng.uniform(-1, 1, (n, 2)), r)
    w = connectivity_weights(net)
    assert abs(w.sum() - 1) <= 1e-12
    X = rng.uniform(-1, 1, (10, 2))
    P = rng.normal(size=(n, 10))
    lo, hi = P.min(axis=0) - 1e-12, P.max(axis=0) + 1e-12
    rules = [FusionRule("ca"), FusionRule("single", int(rng.integers(n))),
             FusionRule("knn", int(rng.integers(1, n + 1)))]
    for rule in rules:
        v = fuse(rule, P, net, X)
        assert np.all((v >= lo) & (v <= hi))
