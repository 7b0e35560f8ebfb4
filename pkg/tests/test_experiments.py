import math

import numpy as np
import pytest

from sntrain.centralized import evaluate, fit_centralized
from sntrain.experiments import (
    CASES, CSV_HEADER, ExperimentConfig, eta, evaluate_mse, lambda_vector, read_csv_rows,
    run_connectivity_study, run_convergence_study, sample_scenario, trial_rng,
)
from sntrain.network import build_disk_topology


def test_eta_values():
    assert eta("case1", 0.0) == 5.0
    assert eta("case2", 0.0) == 0.0
    assert eta("case2", 0.5) == pytest.approx(1.0)
    assert CASES["case1"].alpha == 7.0 and CASES["case2"].alpha == 1.0
    assert CASES["case2"].kernel.kind == "gaussian"


def test_sample_scenario_noiseless_and_deterministic():
    cfg = ExperimentConfig(case="case2", n=30, alpha=0.0)
    x, y = sample_scenario(cfg, trial_rng(5, 0))
    np.testing.assert_array_equal(y, np.sin(np.pi * x))
    assert np.all((x >= -1) & (x <= 1))
    x2, y2 = sample_scenario(cfg, trial_rng(5, 0))
    np.testing.assert_array_equal(x, x2)
    np.testing.assert_array_equal(y, y2)


def test_noise_is_centered():
    cfg = ExperimentConfig(case="case2", n=100_000, alpha=1.0)
    x, y = sample_scenario(cfg, trial_rng(0, 0))
    assert abs(np.mean(y - np.sin(np.pi * x))) < 0.02


def test_lambda_vector():
    net = build_disk_topology([0.0, 0.1, 5.0], 0.5)
    np.testing.assert_allclose(lambda_vector(net, 0.01), [0.0025, 0.0025, 0.01])
    with pytest.raises(ValueError):
        lambda_vector(net, 0.0)


def test_evaluate_mse():
    rng = np.random.default_rng(0)
    assert evaluate_mse(lambda x: eta("case1", x), "case1", 100, rng) == 0.0
    assert evaluate_mse(lambda x: eta("case1", x) + 1, "case1", 100, rng) == pytest.approx(1.0)
    # E[sin^2(pi X)] for X uniform on [-1, 1] is 1/2
    assert evaluate_mse(lambda x: np.zeros_like(x), "case2", 10_000, rng) == pytest.approx(0.5, abs=0.05)


def test_config_validation():
    ExperimentConfig().validate()
    bad = [dict(case="case3"), dict(n=0), dict(T=0), dict(kappa=0.0), dict(trials=0),
           dict(rules=("knn:51",)), dict(kernel="rbf"), dict(radii=(0.1, -1.0)), dict(schedule="random")]
    for kw in bad:
        with pytest.raises(ValueError):
            ExperimentConfig(**kw).validate()


def test_convergence_single_sweep_fully_connected_is_local_ridge():
    cfg = ExperimentConfig.for_study("convergence", case="case2", n=8, r=4.0, T=1, trials=1, alpha=0.0,
                                     rules=("single:0",), test_points=200)
    res = run_convergence_study(cfg)
    # oracle: redo the trial by hand with the centralized module
    rng = trial_rng(cfg.seed, 0)
    x, y = sample_scenario(cfg, rng)
    xt = rng.uniform(-1, 1, cfg.test_points)
    lam = cfg.kappa / cfg.n**2
    est = fit_centralized(x, y, cfg.kernel_spec(), lam)
    expected = float(np.mean((evaluate(est, xt) - np.sin(np.pi * xt)) ** 2))
    row = res.rows[0]
    assert row["rule"] == "single:0" and row["T"] == 1
    assert row["mean_mse"] == pytest.approx(expected, rel=1e-8)
    assert res.rows[1]["rule"] == "centralized"


def test_convergence_rows_and_stabilization():
    cfg = ExperimentConfig.for_study("convergence", T=100, trials=3, test_points=200)
    res = run_convergence_study(cfg)
    assert len(res.rows) == 100 * 4
    assert all(row["mean_mse"] >= 0 for row in res.rows)
    table = res.table()
    for rule, (_, ys) in table.items():
        assert abs(ys[99] - ys[98]) <= 1e-6 * (1 + ys[99])


def test_connectivity_rows_and_limits():
    cfg = ExperimentConfig.for_study("connectivity", case="case2", radii=(0.0, 0.5, 3.0), trials=3,
                                     T=300, test_points=200)
    res = run_connectivity_study(cfg)
    assert len(res.rows) == 3 * 3
    by = {(row["r"], row["rule"]): row for row in res.rows}
    assert by[(0.0, "sn_train")]["mean_mse"] == by[(0.0, "local_only")]["mean_mse"]
    central = {by[(r, "centralized")]["mean_mse"] for r in (0.0, 0.5, 3.0)}
    assert len(central) == 1
    assert by[(3.0, "sn_train")]["connected_fraction"] == 1.0
    assert all(row["mean_mse"] >= 0 for row in res.rows)


def test_full_connectivity_matches_centralized_case1():
    cfg = ExperimentConfig.for_study("connectivity", case="case1", radii=(4.0,), trials=5, T=200)
    res = run_connectivity_study(cfg)
    by = {row["rule"]: row["mean_mse"] for row in res.rows}
    # fully connected: lambda_i = kappa / n^2 sums to kappa / n, the centralized lambda uses kappa / n^2
    assert by["sn_train"] == pytest.approx(by["centralized"], rel=0.05)


def test_noiseless_fully_connected_sn_train_is_accurate():
    cfg = ExperimentConfig.for_study("convergence", case="case1", alpha=0.0, r=4.0, T=100, trials=2,
                                     rules=("single:0",))
    res = run_convergence_study(cfg)
    rows = {(row["T"], row["rule"]): row["mean_mse"] for row in res.rows}
    assert rows[(100, "single:0")] <= rows[(100, "centralized")] + 1e-6


def test_determinism_and_csv_round_trip():
    cfg = ExperimentConfig.for_study("connectivity", radii=(0.2, 0.4), trials=2, T=20, test_points=50)
    a, b = run_connectivity_study(cfg), run_connectivity_study(cfg)
    assert a.to_csv() == b.to_csv()
    assert a.to_csv().splitlines()[0] == ",".join(CSV_HEADER)
    assert read_csv_rows(a.to_csv()) == a.rows


def test_parallel_trials_match_serial():
    cfg = ExperimentConfig.for_study("convergence", T=5, trials=4, test_points=50)
    par = ExperimentConfig.for_study("convergence", T=5, trials=4, test_points=50, workers=2)
    assert run_convergence_study(cfg).to_csv() == run_convergence_study(par).to_csv()
