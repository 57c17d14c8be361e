"""Experiment orchestration: run configs, single runs, seeded batches,
per-step metrics, aggregation with confidence bands, and the figure presets.

Every run is a pure function of (config, run_index): all randomness flows
through streams derived from (master_seed, run_index, purpose tag), so
batches are reproducible regardless of execution order or parallelism.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .choice import SIGMOID, LinkFunction, UserModel, sample_comparison
from .env import EnvConfig, best_arm, sample_context_set, sample_theta_star
from .estimator import ConvergenceError, MleConfig, solve_mle
from .linalg import weighted_norm
from .policy import (ColstimParams, PolicyState, StepDecision, colstim_step,
                     greedy_index, initial_state, random_policy_step,
                     roam_explore_step, roam_exploit_step, roam_update)

POLICIES = ("roam", "colstim", "random")
METRICS = ("inst_regret", "cum_regret", "est_error", "critical_ratio")
PRESET_NAMES = ("fig1_dim_sweep", "fig2_tau_sweep", "fig3_vs_colstim")

_STREAM_TAGS = {"theta": 0, "context": 1, "outcome": 2, "policy": 3}

_CONFIG_KEYS = ("d", "k", "T", "tau", "r", "policy", "c1", "c2", "reg_lambda",
                "master_seed", "n_runs", "theta_mode")


class ConfigError(ValueError):
    """Invalid experiment configuration or config file."""


def derive_rng(master_seed: int, run_index: int, tag: str) -> np.random.Generator:
    """Independent, reproducible stream for one purpose within one run."""
    return np.random.default_rng(
        np.random.SeedSequence([master_seed, run_index, _STREAM_TAGS[tag]]))


@dataclass
class RunConfig:
    env: EnvConfig = field(default_factory=EnvConfig)
    policy: str = "roam"
    colstim: ColstimParams | None = None
    T: int = 1000
    tau: int = 50
    mle: MleConfig = field(default_factory=MleConfig)
    master_seed: int = 0
    n_runs: int = 100
    label: str = ""

    def __post_init__(self):
        if self.policy == "colstim" and self.colstim is None:
            self.colstim = ColstimParams()

    def validate(self):
        try:
            self.env.validate()
            self.mle.validate()
            if self.colstim is not None:
                self.colstim.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.policy not in POLICIES:
            raise ConfigError(f"unknown policy {self.policy!r}")
        if not 0 <= self.tau < self.T:
            raise ConfigError(f"need 0 <= tau < T, got tau={self.tau}, T={self.T}")
        if self.n_runs < 1:
            raise ConfigError("n_runs must be at least 1")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be nonnegative")
        if self.tau <= 1 and self.mle.reg_lambda <= 0:
            raise ConfigError("tau <= 1 gives no exploration records; set reg_lambda > 0")

    def to_dict(self) -> dict:
        out = {"d": self.env.d, "k": self.env.k, "T": self.T, "tau": self.tau,
               "r": self.env.r, "policy": self.policy,
               "reg_lambda": self.mle.reg_lambda, "master_seed": self.master_seed,
               "n_runs": self.n_runs, "theta_mode": self.env.theta_mode}
        if self.colstim is not None:
            out["c1"] = self.colstim.c1
            out["c2"] = self.colstim.c2
        return out


def config_from_dict(raw: dict, label: str = "") -> RunConfig:
    """Build a RunConfig from the flat config-file mapping.

    Missing keys take the defaults: d=5, k=1000, T=1000, tau=10d, r=1,
    policy=roam, n_runs=100, and reg_lambda=0.1 for tau=0 else 0.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object of key-value pairs")
    unknown = sorted(set(raw) - set(_CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    try:
        d = int(raw.get("d", 5))
        tau = int(raw.get("tau", 10 * d))
        policy = str(raw.get("policy", "roam"))
        cfg = RunConfig(
            env=EnvConfig(d=d, k=int(raw.get("k", 1000)), r=float(raw.get("r", 1.0)),
                          theta_mode=str(raw.get("theta_mode", "unit_sphere"))),
            policy=policy,
            colstim=(ColstimParams(c1=float(raw.get("c1", 10.0)),
                                   c2=float(raw.get("c2", 1.0)))
                     if policy == "colstim" else None),
            T=int(raw.get("T", 1000)),
            tau=tau,
            mle=MleConfig(reg_lambda=float(raw.get("reg_lambda",
                                                   0.1 if tau == 0 else 0.0))),
            master_seed=int(raw.get("master_seed", 0)),
            n_runs=int(raw.get("n_runs", 100)),
            label=label)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc
    cfg.validate()
    return cfg


def config_from_file(path, label: str = "") -> RunConfig:
    """Load a flat JSON config file (see config_from_dict for the keys)."""
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return config_from_dict(raw, label=label)


@dataclass
class Trajectory:
    """Per-step metrics of one run; NaN marks an absent value."""

    run_index: int
    t: np.ndarray
    inst_regret: np.ndarray
    cum_regret: np.ndarray
    est_error: np.ndarray
    critical_ratio: np.ndarray


@dataclass
class MetricBand:
    mean: np.ndarray
    std: np.ndarray
    half_width: np.ndarray


@dataclass
class AggregateStats:
    """Across-run mean, std (ddof=0), and half_width = 2 std / sqrt(n) per
    step, where n counts the runs with the value present at that step."""

    t: np.ndarray
    metrics: dict[str, MetricBand]


@dataclass
class BatchResult:
    trajectories: list[Trajectory]
    aggregate: AggregateStats


def critical_ratio(x_t, x_star, y_t, v_inv) -> float | None:
    """Weighted-norm ratio ||x - x*|| / ||x - y|| under v_inv; None when the
    denominator is below 1e-12."""
    denom = weighted_norm(np.asarray(x_t) - np.asarray(y_t), v_inv)
    if denom < 1e-12:
        return None
    return weighted_norm(np.asarray(x_t) - np.asarray(x_star), v_inv) / denom


def moving_average(series, window: int) -> np.ndarray:
    """Trailing mean over min(window, index+1) points."""
    if window < 1:
        raise ValueError("window must be at least 1")
    series = np.asarray(series, dtype=float)
    if series.size == 0:
        return series.copy()
    csum = np.cumsum(series)
    out = np.empty_like(series)
    head = min(window, series.size)
    out[:head] = csum[:head] / np.arange(1, head + 1)
    out[window:] = (csum[window:] - csum[:-window]) / window
    return out


# Warm starts above this norm sit in the saturated regime that only arises
# from separable data; restarting Newton at zero keeps the refit chain stable.
_WARM_START_CAP = 30.0


def _refit(dataset, link, fit_cfg: MleConfig, warm: np.ndarray) -> np.ndarray:
    d = warm.size
    fit_cfg.init = warm if float(np.linalg.norm(warm)) <= _WARM_START_CAP else np.zeros(d)
    try:
        return solve_mle(dataset, link, fit_cfg)
    except ConvergenceError:
        if not np.any(fit_cfg.init):
            raise
        fit_cfg.init = np.zeros(d)
        return solve_mle(dataset, link, fit_cfg)


def run_single(cfg: RunConfig, run_index: int, *, link: LinkFunction = SIGMOID,
               return_trace: bool = False):
    """Execute one full run and return its Trajectory.

    Regret accounting: roam charges the recommended item only; colstim and
    random charge the mean of both items whenever the comparison item comes
    from the current context set (during the shared exploration phase the
    comparison reuses history, so only the recommendation is charged).
    """
    cfg.validate()
    d = cfg.env.d
    rng_ctx = derive_rng(cfg.master_seed, run_index, "context")
    rng_user = derive_rng(cfg.master_seed, run_index, "outcome")
    rng_policy = derive_rng(cfg.master_seed, run_index, "policy")
    theta_star = sample_theta_star(cfg.env, derive_rng(cfg.master_seed, run_index, "theta"))
    user = UserModel(theta_star=theta_star, link=link)

    state = initial_state(d, cfg.tau, design_ridge=cfg.mle.reg_lambda)
    fit_cfg = MleConfig(reg_lambda=cfg.mle.reg_lambda, tol=cfg.mle.tol,
                        max_iter=cfg.mle.max_iter)
    theta_warm = np.zeros(d)

    inst = np.zeros(cfg.T)
    est = np.full(cfg.T, np.nan)
    ratio = np.full(cfg.T, np.nan)
    x_reg = np.zeros(cfg.T)
    y_reg = np.full(cfg.T, np.nan)

    for step in range(cfg.T):
        t = step + 1
        ctx = sample_context_set(cfg.env, rng_ctx)
        _, x_star, best_util = best_arm(ctx, theta_star)

        if t > cfg.tau:
            try:
                theta_hat = _refit(state.dataset, link, fit_cfg, theta_warm)
            except ConvergenceError as exc:
                raise ConvergenceError(
                    f"run {run_index}, step {t}: {exc}", exc.theta, exc.residual
                ) from exc
            state = replace(state, theta_hat=theta_hat)
            theta_warm = theta_hat
            est[step] = float(np.linalg.norm(theta_hat - theta_star))

        mean_rule = False
        if cfg.policy == "roam":
            if t <= cfg.tau:
                decision = roam_explore_step(state, ctx, rng_policy)
            elif state.history.shape[0] == 0:
                # tau = 0 boundary: nothing to compare against yet
                decision = StepDecision(recommend=ctx.items[greedy_index(ctx, state.theta_hat)])
            else:
                decision = roam_exploit_step(state, ctx)
        elif cfg.policy == "colstim":
            if t <= cfg.tau:
                decision = roam_explore_step(state, ctx, rng_policy)
            else:
                decision = colstim_step(state, ctx, cfg.colstim, rng_policy)
                mean_rule = True
        else:
            decision = random_policy_step(ctx, rng_policy)
            mean_rule = True

        outcome = None
        if decision.compare_with is not None:
            outcome = sample_comparison(user, decision.recommend,
                                        decision.compare_with, rng_user)
            if t > cfg.tau and state.design is not None:
                cr = critical_ratio(decision.recommend, x_star,
                                    decision.compare_with, state.design.v_inv)
                ratio[step] = np.nan if cr is None else cr

        # max(..., 0) clears float dust from recomputing the winning utility
        rx = max(best_util - float(decision.recommend @ theta_star), 0.0)
        x_reg[step] = rx
        if decision.compare_with is not None:
            y_reg[step] = max(best_util - float(decision.compare_with @ theta_star), 0.0)
        if mean_rule and decision.compare_with is not None:
            inst[step] = 0.5 * (rx + y_reg[step])
        else:
            inst[step] = rx

        state = roam_update(state, decision, outcome)

    traj = Trajectory(run_index=run_index, t=np.arange(1, cfg.T + 1),
                      inst_regret=inst, cum_regret=np.cumsum(inst),
                      est_error=est, critical_ratio=ratio)
    if return_trace:
        return traj, {"x_regret": x_reg, "y_regret": y_reg}
    return traj


def exploration_state(cfg: RunConfig, run_index: int,
                      init_design: bool = True) -> PolicyState:
    """Replay only the exploration phase of a run (identical streams) and
    return the state at round tau + 1; comparison outcomes are irrelevant to
    the history and probes, so none are sampled.

    init_design=False skips building the design inverse, which lets the
    diagnostics inspect rank-deficient exploration phases that a real run
    would reject.
    """
    cfg.validate()
    rng_ctx = derive_rng(cfg.master_seed, run_index, "context")
    rng_policy = derive_rng(cfg.master_seed, run_index, "policy")
    tau_sentinel = cfg.tau if init_design else cfg.tau + 1
    state = initial_state(cfg.env.d, tau_sentinel, design_ridge=cfg.mle.reg_lambda)
    for _ in range(cfg.tau):
        ctx = sample_context_set(cfg.env, rng_ctx)
        decision = roam_explore_step(state, ctx, rng_policy)
        outcome = 0 if decision.compare_with is not None else None
        state = roam_update(state, decision, outcome)
    if not init_design:
        state = replace(state, tau=cfg.tau)
    return state


def exploration_probes(cfg: RunConfig, run_index: int) -> np.ndarray:
    """Probe vectors accumulated during the exploration phase, one per row."""
    return exploration_state(cfg, run_index, init_design=False).dataset.z


def aggregate(trajectories: list[Trajectory]) -> AggregateStats:
    """Across-run bands per metric; steps where a metric is absent in every
    run stay NaN."""
    if not trajectories:
        raise ValueError("no trajectories to aggregate")
    t = trajectories[0].t
    for traj in trajectories[1:]:
        if not np.array_equal(traj.t, t):
            raise ValueError("trajectories disagree on the time axis")
    bands = {}
    for name in METRICS:
        data = np.stack([getattr(traj, name) for traj in trajectories])
        present = ~np.isnan(data)
        count = present.sum(axis=0)
        mask = count > 0
        mean = np.full(t.size, np.nan)
        std = np.full(t.size, np.nan)
        half = np.full(t.size, np.nan)
        total = np.where(present, data, 0.0).sum(axis=0)
        mean[mask] = total[mask] / count[mask]
        dev2 = np.where(present, (data - np.where(mask, mean, 0.0)) ** 2, 0.0).sum(axis=0)
        std[mask] = np.sqrt(dev2[mask] / count[mask])
        half[mask] = 2.0 * std[mask] / np.sqrt(count[mask])
        bands[name] = MetricBand(mean=mean, std=std, half_width=half)
    return AggregateStats(t=t.copy(), metrics=bands)


def _run_task(args):
    cfg, run_index, link = args
    return run_single(cfg, run_index, link=link)


def run_batch(cfg: RunConfig, *, link: LinkFunction = SIGMOID,
              n_jobs: int = 1) -> BatchResult:
    """Run cfg.n_runs independent runs and aggregate them.

    Results are identical for any n_jobs; a failed run aborts the batch.
    """
    cfg.validate()
    if n_jobs <= 1:
        trajectories = [run_single(cfg, i, link=link) for i in range(cfg.n_runs)]
    else:
        tasks = [(cfg, i, link) for i in range(cfg.n_runs)]
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            trajectories = list(pool.map(_run_task, tasks))
    return BatchResult(trajectories=trajectories, aggregate=aggregate(trajectories))


def _default_config(label: str, *, d: int = 5, tau: int | None = None,
                    policy: str = "roam", colstim: ColstimParams | None = None,
                    reg_lambda: float = 0.0) -> RunConfig:
    tau = 10 * d if tau is None else tau
    return RunConfig(env=EnvConfig(d=d, k=1000, r=1.0), policy=policy,
                     colstim=colstim, T=1000, tau=tau,
                     mle=MleConfig(reg_lambda=reg_lambda), master_seed=0,
                     n_runs=100, label=label)


def preset(name: str) -> list[RunConfig]:
    """Materialized configs for the three stock experiments."""
    if name == "fig1_dim_sweep":
        return [_default_config(f"fig1_d{d}", d=d) for d in (2, 4, 6, 8, 10)]
    if name == "fig2_tau_sweep":
        return [_default_config(f"fig2_tau{tau}", tau=tau,
                                reg_lambda=0.1 if tau == 0 else 0.0)
                for tau in (0, 25, 50, 75, 100)]
    if name == "fig3_vs_colstim":
        configs = [_default_config("fig3_roam")]
        for c1 in (1.0, 10.0):
            for c2 in (0.1, 1.0):
                configs.append(_default_config(
                    f"fig3_colstim_c1_{c1:g}_c2_{c2:g}", policy="colstim",
                    colstim=ColstimParams(c1=c1, c2=c2)))
        return configs
    raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
