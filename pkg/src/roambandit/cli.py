"""Command-line harness.

Subcommands: run (one trajectory), batch (n_runs with aggregation),
preset <name> (the stock experiment sweeps), diagnose <check> (theory
checks). Exit codes: 0 success, 2 config error, 3 convergence/numeric
error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from . import diagnostics, io
from .estimator import ConvergenceError
from .harness import (PRESET_NAMES, BatchResult, ConfigError, RunConfig,
                      aggregate, config_from_dict, config_from_file,
                      exploration_state, preset, run_batch, run_single)
from .linalg import SingularDesignError

DIAGNOSE_CHECKS = ("kappa", "alpha", "beta", "concentration", "lambda-min",
                   "rich-history")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="roambandit",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, runs=True, parallel=True):
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--format", choices=io.FORMATS, default="csv")
        if runs:
            p.add_argument("--runs", type=int, default=None, help="n_runs override")
        if parallel:
            p.add_argument("--parallel", type=int, default=1,
                           help="worker processes for the batch")

    p_run = sub.add_parser("run", help="execute one run of one config")
    p_run.add_argument("--config", default=None, help="JSON config file")
    common(p_run, runs=False, parallel=False)

    p_batch = sub.add_parser("batch", help="execute a seeded batch of runs")
    p_batch.add_argument("--config", default=None, help="JSON config file")
    common(p_batch)

    p_preset = sub.add_parser("preset", help="execute a stock experiment sweep")
    p_preset.add_argument("name", choices=PRESET_NAMES)
    common(p_preset)

    p_diag = sub.add_parser("diagnose", help="run one theory check")
    p_diag.add_argument("check", choices=DIAGNOSE_CHECKS)
    p_diag.add_argument("--out", default=None, help="directory for the result CSV")
    p_diag.add_argument("--seed", type=int, default=0)
    p_diag.add_argument("--runs", type=int, default=100)
    p_diag.add_argument("--d", type=int, default=5)
    p_diag.add_argument("--r", type=float, default=1.0)
    p_diag.add_argument("--tau", type=int, default=50)
    p_diag.add_argument("--t", type=int, default=1000)
    p_diag.add_argument("--epsilon", type=float, default=0.5)
    p_diag.add_argument("--delta", type=float, default=0.1)
    p_diag.add_argument("--trials", type=int, default=200)
    p_diag.add_argument("--probes", type=int, default=10_000)
    p_diag.add_argument("--directions", type=int, default=1000)
    p_diag.add_argument("--sigma-samples", type=int, default=10 ** 6)
    return parser


def _load_config(args) -> RunConfig:
    if args.config is None:
        cfg = config_from_dict({})
    else:
        cfg = config_from_file(args.config)
    if args.seed is not None:
        cfg.master_seed = args.seed
    if getattr(args, "runs", None) is not None:
        cfg.n_runs = args.runs
    cfg.validate()
    return cfg


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    traj = run_single(cfg, 0)
    result = BatchResult(trajectories=[traj], aggregate=aggregate([traj]))
    paths = io.export(result, args.out, fmt=args.format)
    print(f"run complete: T={cfg.T} policy={cfg.policy}; wrote "
          + ", ".join(str(p) for p in paths))
    return 0


def _cmd_batch(args) -> int:
    cfg = _load_config(args)
    result = run_batch(cfg, n_jobs=args.parallel)
    prefix = f"{cfg.label}_" if cfg.label else ""
    paths = io.export(result, args.out, fmt=args.format, prefix=prefix)
    final = result.aggregate.metrics["cum_regret"].mean[-1]
    print(f"batch complete: n_runs={cfg.n_runs} mean final regret {final:.3f}; "
          "wrote " + ", ".join(str(p) for p in paths))
    return 0


def _cmd_preset(args) -> int:
    for cfg in preset(args.name):
        if args.seed is not None:
            cfg.master_seed = args.seed
        if args.runs is not None:
            cfg.n_runs = args.runs
        cfg.validate()
        result = run_batch(cfg, n_jobs=args.parallel)
        paths = io.export(result, args.out, fmt=args.format, prefix=f"{cfg.label}_")
        final = result.aggregate.metrics["cum_regret"].mean[-1]
        print(f"{cfg.label}: mean final regret {final:.3f}; wrote "
              + ", ".join(str(p) for p in paths))
    return 0


def _diagnose_rows(args) -> list[tuple[str, str, float]]:
    rng = np.random.default_rng(args.seed)
    check = args.check
    if check == "kappa":
        return [(check, "r", args.r), (check, "value",
                                       diagnostics.compute_kappa_sigmoid(args.r))]
    if check == "alpha":
        kappa = diagnostics.compute_kappa_sigmoid(args.r)
        value = diagnostics.compute_alpha(args.t, args.d, args.delta, kappa)
        return [(check, "t", float(args.t)), (check, "d", float(args.d)),
                (check, "delta", args.delta), (check, "kappa", kappa),
                (check, "value", value)]
    if check == "beta":
        constants = diagnostics.theory_constants(
            args.d, args.r, rng, n_sigma_samples=args.sigma_samples,
            delta=args.delta)
        return [(check, "lambda_min_sigma", constants.lambda_min_sigma),
                (check, "tau_recommended", float(constants.tau_recommended)),
                (check, "value", constants.beta)]
    if check == "concentration":
        found, rates = diagnostics.scan_concentration_tau(
            args.d, args.epsilon, args.trials, args.delta, rng)
        rows = [(check, f"rate_tau_{tau}", rate) for tau, rate in rates]
        rows.append((check, "found_tau", math.nan if found is None else float(found)))
        return rows
    if check == "lambda-min":
        cfg = config_from_dict({"d": args.d, "tau": args.tau, "r": args.r})
        cfg.master_seed = args.seed
        fraction = diagnostics.check_lambda_min_condition(cfg, args.runs)
        return [(check, "tau", float(args.tau)), (check, "fraction", fraction)]
    if check == "rich-history":
        constants = diagnostics.theory_constants(
            args.d, args.r, rng, n_sigma_samples=args.sigma_samples,
            delta=args.delta)
        cfg = config_from_dict({"d": args.d, "tau": args.tau, "r": args.r})
        cfg.master_seed = args.seed
        passed = 0
        for run_index in range(args.runs):
            history = exploration_state(cfg, run_index).history
            passed += diagnostics.check_rich_history(
                history, args.r, constants.beta, args.probes, rng)
        return [(check, "beta", constants.beta),
                (check, "fraction", passed / args.runs)]
    raise ConfigError(f"unknown check {check!r}")


def _cmd_diagnose(args) -> int:
    rows = _diagnose_rows(args)
    for check, name, value in rows:
        print(f"{check} {name} = {value}")
    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / f"{args.check}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["check", "name", "value"])
            for check, name, value in rows:
                writer.writerow([check, name,
                                 "" if math.isnan(value) else repr(float(value))])
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "batch": _cmd_batch, "preset": _cmd_preset,
                "diagnose": _cmd_diagnose}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, SingularDesignError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
