"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s`. The heavy fixtures (the
default 100-run batch and the three stock sweeps at full scale) are session
scoped and reused across criteria; expect roughly half an hour on one CPU.
"""

import time

import numpy as np
import pytest

from roambandit.cli import main as cli_main
from roambandit.choice import SIGMOID, sigmoid
from roambandit.diagnostics import (check_lambda_min_condition, compute_beta,
                                    scan_concentration_tau)
from roambandit.env import EnvConfig, estimate_sigma, sample_unit_ball
from roambandit.estimator import Dataset, MleConfig, score, solve_mle
from roambandit.harness import config_from_dict, preset, run_batch
from roambandit.io import read_aggregate_csv
from roambandit.linalg import (extreme_eigenvalues, initialize_design,
                               inverse_drift, rank_one_update)

from oracles import bisect_extreme_eigenvalues

FIG1_DIMS = (2, 4, 6, 8, 10)


def _report(num, name, ok, detail):
    print(f"[criterion {num:2d}] {name}: {'PASS' if ok else 'FAIL'} ({detail})",
          flush=True)


@pytest.fixture(scope="session")
def default_batch():
    cfg = config_from_dict({})
    start = time.perf_counter()
    result = run_batch(cfg)
    seconds = time.perf_counter() - start
    return cfg, result, seconds


@pytest.fixture(scope="session")
def lambda_min_sigma():
    sigma = estimate_sigma(EnvConfig(d=5, k=2, r=1.0), 10 ** 6,
                           np.random.default_rng(2024))
    return extreme_eigenvalues(sigma)[0]


@pytest.fixture(scope="session")
def fig1_cli_dirs(tmp_path_factory):
    first = tmp_path_factory.mktemp("fig1_first")
    second = tmp_path_factory.mktemp("fig1_second")
    assert cli_main(["preset", "fig1_dim_sweep", "--out", str(first),
                     "--parallel", "1"]) == 0
    assert cli_main(["preset", "fig1_dim_sweep", "--out", str(second),
                     "--parallel", "2"]) == 0
    return first, second


@pytest.fixture(scope="session")
def fig2_results():
    return {cfg.tau: run_batch(cfg) for cfg in preset("fig2_tau_sweep")}


@pytest.fixture(scope="session")
def fig3_results(default_batch):
    default_cfg, default_result, _ = default_batch
    results = {}
    for cfg in preset("fig3_vs_colstim"):
        if cfg.policy == "roam":
            assert cfg.to_dict() == default_cfg.to_dict()
            results[cfg.label] = default_result
        else:
            results[cfg.label] = run_batch(cfg)
    return results


def test_criterion_1_sublinear_regret(default_batch):
    cfg, result, seconds = default_batch
    mean_r = result.aggregate.metrics["cum_regret"].mean
    tau = cfg.tau
    ts = np.arange(2 * tau, cfg.T + 1)
    growth = mean_r[ts - 1] - mean_r[tau - 1]
    assert np.all(growth > 0)
    slope = float(np.polyfit(np.log(ts - tau), np.log(growth), 1)[0])
    ok = slope <= 0.8 and seconds <= 300.0
    _report(1, "sublinear regret", ok,
            f"log-log slope {slope:.3f} <= 0.8; batch took {seconds:.0f}s <= 300s")
    assert slope <= 0.8
    assert seconds <= 300.0


def test_criterion_2_roam_beats_every_colstim_config(fig3_results):
    roam = fig3_results["fig3_roam"].aggregate.metrics["cum_regret"]
    roam_mean, roam_hw = roam.mean[-1], roam.half_width[-1]
    gaps = []
    ok = True
    for label, result in sorted(fig3_results.items()):
        if label == "fig3_roam":
            continue
        band = result.aggregate.metrics["cum_regret"]
        separated = (band.mean[-1] - roam_mean) > (roam_hw + band.half_width[-1])
        ok = ok and separated
        gaps.append(f"{label.removeprefix('fig3_colstim_')}: {band.mean[-1]:.0f}")
    _report(2, "roam beats colstim", ok,
            f"roam {roam_mean:.0f} vs " + ", ".join(gaps))
    for label, result in fig3_results.items():
        if label == "fig3_roam":
            continue
        band = result.aggregate.metrics["cum_regret"]
        assert (band.mean[-1] - roam_mean) > (roam_hw + band.half_width[-1]), label


def test_criterion_3_regret_nondecreasing_in_dimension(fig1_cli_dirs):
    first, _ = fig1_cli_dirs
    finals = []
    for d in FIG1_DIMS:
        band = read_aggregate_csv(first / f"fig1_d{d}_aggregate.csv").metrics["cum_regret"]
        finals.append((band.mean[-1], band.half_width[-1]))
    ok = all(m2 >= m1 or (m1 - h1) <= (m2 + h2)
             for (m1, h1), (m2, h2) in zip(finals, finals[1:]))
    _report(3, "regret grows with dimension", ok,
            "final means " + ", ".join(f"d={d}: {m:.0f}" for d, (m, _) in zip(FIG1_DIMS, finals)))
    for (m1, h1), (m2, h2) in zip(finals, finals[1:]):
        assert m2 >= m1 or (m1 - h1) <= (m2 + h2)


def test_criterion_4_exploration_length_tradeoff(fig2_results):
    reg25 = fig2_results[25].aggregate.metrics["cum_regret"]
    reg100 = fig2_results[100].aggregate.metrics["cum_regret"]
    separated = (reg25.mean[-1] + reg25.half_width[-1]
                 < reg100.mean[-1] - reg100.half_width[-1])
    est0 = fig2_results[0].aggregate.metrics["est_error"].mean[-1]
    est50 = fig2_results[50].aggregate.metrics["est_error"].mean[-1]
    no_explore_worse = est0 >= est50
    ok = separated and no_explore_worse
    _report(4, "tau sweep shape", ok,
            f"R_T(25)={reg25.mean[-1]:.0f} < R_T(100)={reg100.mean[-1]:.0f} beyond bands;"
            f" est(tau=0)={est0:.3f} >= est(tau=50)={est50:.3f}")
    assert separated
    assert no_explore_worse


def test_criterion_5_critical_ratio_bounded(default_batch, lambda_min_sigma):
    _, result, _ = default_batch
    beta = compute_beta(1.0, lambda_min_sigma)
    within = 0
    observed_max = 0.0
    for traj in result.trajectories:
        ratios = traj.critical_ratio[~np.isnan(traj.critical_ratio)]
        assert ratios.size > 0
        observed_max = max(observed_max, float(ratios.max()))
        within += bool(np.all(ratios <= beta))
    ok = within >= 95
    _report(5, "critical ratio bound", ok,
            f"{within}/100 runs under beta={beta:.2f}; worst observed {observed_max:.2f}")
    assert within >= 95


def test_criterion_6_design_matrix_eigenvalue_condition():
    fraction = check_lambda_min_condition(config_from_dict({}), 100)
    ok = fraction >= 0.95
    _report(6, "lambda_min(V) >= 1 after exploration", ok,
            f"fraction {fraction:.2f} >= 0.95")
    assert fraction >= 0.95


def test_criterion_7_mle_consistency_within_a_second():
    rng = np.random.default_rng(7)
    theta_star = rng.standard_normal(5)
    theta_star /= np.linalg.norm(theta_star)
    z = sample_unit_ball(10 ** 4, 5, 2.0, rng)
    outcomes = (rng.random(10 ** 4) < sigmoid(z @ theta_star)).astype(float)
    data = Dataset(z=z, o=outcomes)
    start = time.perf_counter()
    theta = solve_mle(data, SIGMOID, MleConfig(tol=1e-8))
    seconds = time.perf_counter() - start
    err = float(np.linalg.norm(theta - theta_star))
    residual = float(np.linalg.norm(score(theta, data, SIGMOID, 0.0)))
    ok = err <= 0.1 and residual <= 1e-8 and seconds <= 1.0
    _report(7, "mle consistency", ok,
            f"error {err:.4f} <= 0.1, residual {residual:.1e} <= 1e-8, {seconds:.2f}s <= 1s")
    assert err <= 0.1
    assert residual <= 1e-8
    assert seconds <= 1.0


def test_criterion_8_design_numerics_and_eigen_oracle():
    rng = np.random.default_rng(8)
    state = initialize_design(np.eye(5))
    for _ in range(1000):
        state = rank_one_update(state, sample_unit_ball(1, 5, 2.0, rng)[0])
    drift = inverse_drift(state)
    worst = 0.0
    for _ in range(100):
        b = rng.standard_normal((5, 5))
        m = b.T @ b
        lo, hi = extreme_eigenvalues(m)
        o_lo, o_hi = bisect_extreme_eigenvalues(m)
        worst = max(worst, abs(lo - o_lo), abs(hi - o_hi))
    ok = drift <= 1e-8 and worst <= 1e-6
    _report(8, "numerics", ok,
            f"inverse drift {drift:.1e} <= 1e-8; eigen oracle gap {worst:.1e} <= 1e-6")
    assert drift <= 1e-8
    assert worst <= 1e-6


def test_criterion_9_concentration_scan():
    found, rates = scan_concentration_tau(5, 0.5, 200, 0.1,
                                          np.random.default_rng(99))
    monotone = True
    for (_, r1), (_, r2) in zip(rates, rates[1:]):
        noise = 4.0 * np.sqrt((r1 * (1 - r1) + r2 * (1 - r2)) / 200.0)
        monotone = monotone and (r2 <= r1 + noise)
    ok = found is not None and found <= 4096 and monotone
    _report(9, "concentration scan", ok,
            f"tau found {found} <= 4096; rates " +
            " ".join(f"{tau}:{rate:.2f}" for tau, rate in rates))
    assert found is not None and found <= 4096
    assert monotone


def test_criterion_10_preset_output_is_deterministic(fig1_cli_dirs):
    first, second = fig1_cli_dirs
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    identical = all((first / name).read_bytes() == (second / name).read_bytes()
                    for name in names)
    _report(10, "deterministic preset output", identical,
            f"{len(names)} files byte-identical across --parallel 1"
            " and --parallel 2")
    assert identical
