"""Command line front end: ``sntrain {fit,train,convergence,connectivity}``.

Exit codes: 0 success, 2 bad configuration or input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .centralized import FieldEstimate, evaluate, fit_centralized
from .experiments import (
    ExperimentConfig, lambda_vector, run_connectivity_study, run_convergence_study,
    sample_scenario, trial_rng, with_overrides,
)
from .fusion import FusionRule, fuse, sensor_predictions
from .kernels import KernelSpec
from .network import build_disk_topology, is_connected
from .sn_train import Schedule, sensor_estimates, train

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(Exception):
    pass


def read_samples(path):
    """Read a ``x,y`` or ``x1,...,xd,y`` CSV with a header row."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ConfigError(f"cannot read samples: {exc}") from None
    with fh:
        rows = list(csv.reader(fh))
    rows = [(i, r) for i, r in enumerate(rows, start=1) if r and any(c.strip() for c in r)]
    if not rows:
        raise ConfigError(f"{path}: empty sample file")
    header = [h.strip() for h in rows[0][1]]
    if len(header) < 2 or header[-1] != "y":
        raise ConfigError(f"{path}:{rows[0][0]}: header must be x,y or x1,...,xd,y")
    data = []
    for lineno, row in rows[1:]:
        if len(row) != len(header):
            raise ConfigError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            vals = [float(v) for v in row]
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
        if not all(np.isfinite(vals)):
            raise ConfigError(f"{path}:{lineno}: non-finite value")
        data.append(vals)
    if not data:
        raise ConfigError(f"{path}: no sample rows")
    arr = np.array(data)
    return arr[:, :-1], arr[:, -1]


def estimate_to_dict(est: FieldEstimate) -> dict:
    return {"kernel": str(est.kernel), "centers": est.centers.tolist(), "coeffs": est.coeffs.tolist()}


def estimate_from_dict(d: dict) -> FieldEstimate:
    return FieldEstimate(KernelSpec.parse(d["kernel"]), np.array(d["centers"]), np.array(d["coeffs"]))


def save_estimate(est: FieldEstimate, path):
    Path(path).write_text(json.dumps(estimate_to_dict(est), indent=1) + "\n")


def load_estimate(path) -> FieldEstimate:
    return estimate_from_dict(json.loads(Path(path).read_text()))


def prediction_grid(positions: np.ndarray, size: int) -> np.ndarray:
    """Evenly spaced grid spanning the samples' bounding box."""
    lo, hi = positions.min(axis=0), positions.max(axis=0)
    flat = hi <= lo
    lo, hi = np.where(flat, lo - 1, lo), np.where(flat, hi + 1, hi)
    axes = [np.linspace(a, b, size) for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def write_predictions(path, X: np.ndarray, values: np.ndarray):
    d = X.shape[1]
    names = ["x"] if d == 1 else [f"x{i + 1}" for i in range(d)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names + ["f"])
        for row, v in zip(X, values):
            w.writerow([repr(float(c)) for c in row] + [repr(float(v))])


def load_config(args, study: str) -> ExperimentConfig:
    """Defaults, then the config file, then explicit flags."""
    values = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load config {args.config}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(raw) - set(ExperimentConfig.field_names())
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(raw)
    flags = {
        "case": args.case, "n": args.n, "r": args.r, "kappa": args.kappa, "T": args.T,
        "trials": getattr(args, "trials", None), "test_points": getattr(args, "test_points", None),
        "seed": args.seed, "kernel": args.kernel, "alpha": args.alpha, "schedule": args.schedule,
        "workers": getattr(args, "workers", None),
        "radii": tuple(args.radii) if getattr(args, "radii", None) else None,
        "rules": tuple(args.fusion) if args.fusion else None,
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    for key in ("radii", "rules"):
        if isinstance(values.get(key), list):
            values[key] = tuple(values[key])
    try:
        cfg = ExperimentConfig.for_study(study, **values)
        return cfg.validate()
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _fusion_list(text: str) -> list:
    return [part for part in text.split(",") if part]


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_fit(args) -> int:
    X, y = read_samples(args.samples)
    spec = _kernel(args.kernel or "gaussian:1")
    lam = args.lam if args.lam is not None else 0.01
    if not lam > 0:
        raise ConfigError("--lambda must be positive")
    est = fit_centralized(X, y, spec, lam)
    out = _out_dir(args)
    save_estimate(est, out / "estimate.json")
    grid = prediction_grid(X, args.grid if X.shape[1] == 1 else min(args.grid, 41))
    write_predictions(out / "predictions.csv", grid, evaluate(est, grid))
    return 0


def cmd_train(args) -> int:
    if args.samples:
        X, y = read_samples(args.samples)
        args.n = X.shape[0]
    cfg = load_config(args, "convergence")
    if args.print_config:
        print(json.dumps(cfg.to_dict(), indent=1))
        return 0
    spec = cfg.kernel_spec()
    if not args.samples:
        x, y = sample_scenario(cfg, trial_rng(cfg.seed, 0))
        X = x[:, None]
    net = build_disk_topology(X, cfg.r)
    if args.lam is not None:
        if not args.lam > 0:
            raise ConfigError("--lambda must be positive")
        lambdas = np.full(net.n, args.lam)
    else:
        lambdas = lambda_vector(net, cfg.kappa)
    rules = cfg.fusion_rules() if args.fusion else []
    for rule in rules:
        try:
            rule.validate(net.n)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    res = train(net, spec, y, lambdas, cfg.T, Schedule(cfg.schedule, cfg.seed), tol=args.tol)
    ests = sensor_estimates(res.states, net.positions, spec)

    out = _out_dir(args)
    sensors = [
        {"id": st.id, "neighbors": st.neighbor_ids.tolist(), "lambda": st.lambda_s,
         "measurement": float(y[st.id]), "message": float(res.board.z[st.id]),
         **estimate_to_dict(est)}
        for st, est in zip(res.states, ests)
    ]
    meta = {"kernel": str(spec), "radius": cfg.r, "sweeps": res.sweeps, "connected": is_connected(net),
            "positions": net.positions.tolist(), "sensors": sensors}
    (out / "estimates.json").write_text(json.dumps(meta, indent=1) + "\n")
    with open(out / "diagnostics.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sweep_index", "max_delta"])
        for t, d in enumerate(res.max_deltas, start=1):
            w.writerow([t, repr(d)])
    if rules:
        grid = prediction_grid(net.positions, args.grid if net.dim == 1 else min(args.grid, 41))
        preds = sensor_predictions(ests, grid)
        for rule in rules:
            name = str(rule).replace(":", "_")
            write_predictions(out / f"fused_{name}.csv", grid, fuse(rule, preds, net, grid))
    return 0


def _run_study(args, study: str, runner, xkey: str) -> int:
    cfg = load_config(args, study)
    if args.print_config:
        print(json.dumps(cfg.to_dict(), indent=1))
        return 0
    result = runner(cfg)
    out = _out_dir(args)
    (out / f"{study}.csv").write_text(result.to_csv())
    if args.svg:
        write_svg(out / f"{study}.svg", result.table(x=xkey), xkey,
                  f"{study}: {cfg.case}, n={cfg.n}, S={cfg.trials}")
    return 0


def cmd_convergence(args) -> int:
    return _run_study(args, "convergence", run_convergence_study, "T")


def cmd_connectivity(args) -> int:
    return _run_study(args, "connectivity", run_connectivity_study, "r")


def write_svg(path, table: dict, xlabel: str, title: str):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "sntrain"
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, (xs, ys) in table.items():
        ax.plot(xs, ys, marker="." if len(xs) < 30 else None, label=name)
    ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("mean test MSE")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _kernel(text):
    try:
        return KernelSpec.parse(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _kernel_arg(text):
    KernelSpec.parse(text)
    return text


def _fusion_arg(text):
    for part in _fusion_list(text):
        FusionRule.parse(part)
    return text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sntrain", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scenario=True):
        sp.add_argument("--out", default="results", help="output directory")
        sp.add_argument("--kernel", type=_kernel_arg, help="linear | affine:<bias> | gaussian:<bw>")
        if not scenario:
            return
        sp.add_argument("--config", help="JSON file with experiment settings")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--case", choices=["case1", "case2"])
        sp.add_argument("--n", type=int)
        sp.add_argument("--r", type=float)
        sp.add_argument("--kappa", type=float)
        sp.add_argument("--T", type=int)
        sp.add_argument("--alpha", type=float, help="noise standard deviation override")
        sp.add_argument("--schedule", choices=["serial", "permutation"])
        sp.add_argument("--fusion", type=_fusion_arg, action="append",
                        help="single:<id> | knn:<k> | ca (repeatable or comma separated)")
        sp.add_argument("--print-config", action="store_true")

    sp = sub.add_parser("fit", help="centralized kernel least squares on a sample file")
    common(sp, scenario=False)
    sp.add_argument("samples")
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.add_argument("--grid", type=int, default=101, help="number of prediction points per axis")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("train", help="run SN-Train on one network")
    common(sp)
    sp.add_argument("--samples", help="x,y CSV; otherwise a scenario is sampled")
    sp.add_argument("--lambda", dest="lam", type=float, help="same lambda for every sensor")
    sp.add_argument("--tol", type=float, help="stop once a sweep changes no message by more than TOL")
    sp.add_argument("--grid", type=int, default=101, help="number of prediction points per axis")
    sp.set_defaults(func=cmd_train)

    for name, func in (("convergence", cmd_convergence), ("connectivity", cmd_connectivity)):
        sp = sub.add_parser(name, help=f"{name} study")
        common(sp)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--test-points", type=int)
        sp.add_argument("--workers", type=int)
        sp.add_argument("--svg", action="store_true")
        if name == "connectivity":
            sp.add_argument("--radii", type=float, nargs="+")
        sp.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    if getattr(args, "fusion", None):
        args.fusion = [r for text in args.fusion for r in _fusion_list(text)]
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"sntrain: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except np.linalg.LinAlgError as exc:
        print(f"sntrain: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
