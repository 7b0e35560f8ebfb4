"""Monte Carlo harness for the convergence and connectivity studies.

Sensors sit uniformly at random on [-1, 1] and observe ``eta(x)`` plus
Gaussian noise. Test error is measured against the noiseless ``eta`` at
fresh uniform test points. Every trial draws from its own generator seeded
by ``(seed, trial)``, so results do not depend on how trials are scheduled.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Callable, Optional

import numpy as np

from .centralized import fit_centralized
from .fusion import FusionRule, fuse
from .kernels import KernelSpec, cross_kernel
from .network import SensorNetwork, build_disk_topology, is_connected
from .sn_train import Schedule, local_only_train, train


@dataclass(frozen=True)
class RegressionCase:
    name: str
    alpha: float
    kernel: KernelSpec
    radii: tuple  # default connectivity sweep

    def eta(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.name == "case1":
            return 5.0 * x + 5.0
        return np.sin(np.pi * x)


def _grid(start, step, count):
    return tuple(round(start + step * i, 10) for i in range(count))


# Case 1 uses an affine kernel: the linear kernel's RKHS only holds lines
# through the origin and cannot represent the intercept of 5x + 5.
CASES = {
    "case1": RegressionCase("case1", 7.0, KernelSpec("affine", 1.0), _grid(0.1, 0.05, 11)),
    "case2": RegressionCase("case2", 1.0, KernelSpec("gaussian", 1.0), _grid(0.1, 0.1, 21)),
}

STUDY_DEFAULTS = {
    "convergence": dict(T=100, test_points=500),
    "connectivity": dict(T=200, test_points=300),
}

CSV_HEADER = ("study", "case", "n", "r", "kappa", "T", "rule", "trials",
              "mean_mse", "stderr_mse", "connected_fraction")


def eta(case: str, x):
    return get_case(case).eta(x)


def get_case(name: str) -> RegressionCase:
    try:
        return CASES[name]
    except KeyError:
        raise ValueError(f"unknown case {name!r}; expected one of {sorted(CASES)}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    case: str = "case1"
    n: int = 50
    r: float = 0.5
    radii: Optional[tuple] = None
    kappa: float = 0.01
    T: int = 100
    trials: int = 20
    test_points: int = 500
    seed: int = 20070101
    rules: tuple = ("single:0", "knn:1", "ca")
    kernel: Optional[str] = None
    alpha: Optional[float] = None
    schedule: str = "serial"
    workers: int = 1

    @classmethod
    def for_study(cls, study: str, **overrides) -> "ExperimentConfig":
        base = dict(STUDY_DEFAULTS[study])
        base.update(overrides)
        return cls(**base)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    def validate(self) -> "ExperimentConfig":
        get_case(self.case)
        if self.n < 1 or self.T < 1 or self.trials < 1 or self.test_points < 1:
            raise ValueError("n, T, trials and test_points must all be at least 1")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa!r}")
        if not self.r >= 0 or any(not r >= 0 for r in self.sweep_radii()):
            raise ValueError("radii must be nonnegative")
        if self.alpha is not None and not self.alpha >= 0:
            raise ValueError("alpha must be nonnegative")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        for rule in self.fusion_rules():
            rule.validate(self.n)
        self.kernel_spec()
        Schedule(self.schedule, self.seed)
        return self

    def kernel_spec(self) -> KernelSpec:
        return KernelSpec.parse(self.kernel) if self.kernel else get_case(self.case).kernel

    def noise(self) -> float:
        return get_case(self.case).alpha if self.alpha is None else float(self.alpha)

    def fusion_rules(self) -> list:
        return [FusionRule.parse(r) for r in self.rules]

    def sweep_radii(self) -> tuple:
        return tuple(self.radii) if self.radii is not None else get_case(self.case).radii

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rules"] = list(self.rules)
        if self.radii is not None:
            d["radii"] = list(self.radii)
        return d


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def sample_scenario(cfg: ExperimentConfig, rng: np.random.Generator):
    """Positions uniform on [-1, 1] and noisy measurements ``eta(x) + alpha * eps``."""
    x = rng.uniform(-1.0, 1.0, cfg.n)
    eps = rng.standard_normal(cfg.n)
    return x, eta(cfg.case, x) + cfg.noise() * eps


def lambda_vector(net: SensorNetwork, kappa: float) -> np.ndarray:
    """Per-sensor regularization ``kappa / |N_i|^2``."""
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa!r}")
    return kappa / net.degrees().astype(np.float64) ** 2


def evaluate_mse(predictor: Callable, case: str, test_points: int, rng: np.random.Generator) -> float:
    """Mean squared error of a vectorized predictor against noiseless ``eta``."""
    if test_points < 1:
        raise ValueError("test_points must be at least 1")
    xt = rng.uniform(-1.0, 1.0, test_points)
    err = np.asarray(predictor(xt), dtype=np.float64) - eta(case, xt)
    return float(np.mean(err**2))


def _mse(pred, target) -> float:
    d = pred - target
    return float(d @ d) / d.shape[0]


def _predictions(cross, states) -> np.ndarray:
    return np.vstack([k @ st.coeffs for k, st in zip(cross, states)])


@dataclass
class TrialResult:
    """Test errors from one random network. ``rule_mse`` rows are indexed by T-1."""

    rule_mse: np.ndarray = None  # convergence: (T, n_rules)
    centralized_mse: float = math.nan
    local_only_mse: np.ndarray = None  # connectivity: one per radius
    sn_train_mse: np.ndarray = None  # connectivity: one per radius
    connected: np.ndarray = None  # one flag per radius
    max_deltas: list = field(default_factory=list)


def convergence_trial(cfg: ExperimentConfig, trial: int) -> TrialResult:
    rng = trial_rng(cfg.seed, trial)
    x, y = sample_scenario(cfg, rng)
    xt = rng.uniform(-1.0, 1.0, cfg.test_points)
    target = eta(cfg.case, xt)
    spec = cfg.kernel_spec()
    net = build_disk_topology(x, cfg.r)
    rules = cfg.fusion_rules()
    cross = [cross_kernel(spec, xt, x[nb]) for nb in net.neighborhoods]
    mse = np.empty((cfg.T, len(rules)))

    def record(t, states, board):
        preds = _predictions(cross, states)
        for j, rule in enumerate(rules):
            mse[t - 1, j] = _mse(fuse(rule, preds, net, xt), target)

    res = train(net, spec, y, lambda_vector(net, cfg.kappa), cfg.T,
                Schedule(cfg.schedule, cfg.seed), on_sweep=record)
    central = fit_centralized(x, y, spec, cfg.kappa / cfg.n**2)
    return TrialResult(
        rule_mse=mse,
        centralized_mse=_mse(central(xt), target),
        connected=np.array([is_connected(net)]),
        max_deltas=res.max_deltas,
    )


def connectivity_trial(cfg: ExperimentConfig, trial: int) -> TrialResult:
    """One scenario evaluated at every radius (common random numbers)."""
    rng = trial_rng(cfg.seed, trial)
    x, y = sample_scenario(cfg, rng)
    xt = rng.uniform(-1.0, 1.0, cfg.test_points)
    target = eta(cfg.case, xt)
    spec = cfg.kernel_spec()
    rule = cfg.fusion_rules()[0]
    radii = cfg.sweep_radii()
    sn, lo, conn = np.empty(len(radii)), np.empty(len(radii)), np.empty(len(radii), dtype=bool)
    for i, r in enumerate(radii):
        net = build_disk_topology(x, r)
        lam = lambda_vector(net, cfg.kappa)
        cross = [cross_kernel(spec, xt, x[nb]) for nb in net.neighborhoods]
        res = train(net, spec, y, lam, cfg.T, Schedule(cfg.schedule, cfg.seed))
        sn[i] = _mse(fuse(rule, _predictions(cross, res.states), net, xt), target)
        lo[i] = _mse(fuse(rule, _predictions(cross, local_only_train(net, spec, y, lam)), net, xt), target)
        conn[i] = is_connected(net)
    central = fit_centralized(x, y, spec, cfg.kappa / cfg.n**2)
    return TrialResult(
        centralized_mse=_mse(central(xt), target),
        local_only_mse=lo,
        sn_train_mse=sn,
        connected=conn,
    )


def _run_trials(fn, cfg: ExperimentConfig) -> list:
    ids = range(cfg.trials)
    if cfg.workers == 1:
        return [fn(cfg, i) for i in ids]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(fn, [cfg] * cfg.trials, ids))


def _summary(values) -> tuple:
    v = np.asarray(values, dtype=np.float64)
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return float(v.mean()), se


@dataclass
class StudyResult:
    rows: list  # dicts keyed by CSV_HEADER
    trials: list  # TrialResult per trial

    def table(self, key="rule", x="T") -> dict:
        """``{rule: (xs, mean_mse)}`` for plotting or inspection."""
        out = {}
        for row in self.rows:
            xs, ys = out.setdefault(row[key], ([], []))
            xs.append(row[x])
            ys.append(row["mean_mse"])
        return out

    def to_csv(self) -> str:
        return rows_to_csv(self.rows)


def run_convergence_study(cfg: ExperimentConfig) -> StudyResult:
    """Mean test error per fusion rule after each of ``T = 1..cfg.T`` sweeps.

    A ``centralized`` reference row (lambda = kappa / n^2) accompanies each T.
    """
    cfg.validate()
    results = _run_trials(convergence_trial, cfg)
    mse = np.stack([tr.rule_mse for tr in results])  # (S, T, rules)
    central = [tr.centralized_mse for tr in results]
    conn = float(np.mean([tr.connected[0] for tr in results]))
    names = [str(r) for r in cfg.fusion_rules()] + ["centralized"]
    rows = []
    for t in range(cfg.T):
        for j, name in enumerate(names):
            vals = central if name == "centralized" else mse[:, t, j]
            mean, se = _summary(vals)
            rows.append(_row("convergence", cfg, cfg.r, t + 1, name, mean, se, conn))
    return StudyResult(rows, results)


def run_connectivity_study(cfg: ExperimentConfig) -> StudyResult:
    """SN-Train, local-only and centralized error at each radius of the sweep."""
    cfg.validate()
    results = _run_trials(connectivity_trial, cfg)
    sn = np.stack([tr.sn_train_mse for tr in results])
    lo = np.stack([tr.local_only_mse for tr in results])
    conn = np.stack([tr.connected for tr in results]).mean(axis=0)
    central = [tr.centralized_mse for tr in results]
    rows = []
    for i, r in enumerate(cfg.sweep_radii()):
        for name, vals in (("sn_train", sn[:, i]), ("local_only", lo[:, i]), ("centralized", central)):
            mean, se = _summary(vals)
            rows.append(_row("connectivity", cfg, r, cfg.T, name, mean, se, float(conn[i])))
    return StudyResult(rows, results)


def _row(study, cfg, r, T, rule, mean, se, conn) -> dict:
    return dict(study=study, case=cfg.case, n=cfg.n, r=float(r), kappa=float(cfg.kappa), T=int(T),
                rule=rule, trials=cfg.trials, mean_mse=mean, stderr_mse=se, connected_fraction=conn)


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow([_fmt(row[k]) for k in CSV_HEADER])
    return buf.getvalue()


_INT_COLS = {"n", "T", "trials"}
_FLOAT_COLS = {"r", "kappa", "mean_mse", "stderr_mse", "connected_fraction"}


def read_csv_rows(text: str) -> list:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected header {reader.fieldnames}")
    out = []
    for rec in reader:
        out.append({k: int(v) if k in _INT_COLS else float(v) if k in _FLOAT_COLS else v
                    for k, v in rec.items()})
    return out


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
