"""Bandit policies behind a shared step-wise contract.

Three policies are provided:

* roam: a pure exploration phase of tau rounds (uniform recommendation,
  comparison against the previous item), then greedy recommendation with the
  comparison item chosen from the consumption history to maximize the
  inverse-design weighted norm of the probe.
* colstim: perturbed-utility recommendation and an explore/exploit weighted
  comparison choice, both items drawn from the current context set.
* random: both items uniform from the context set; control baseline.

All policies share the same bookkeeping (roam_update): history, comparison
dataset, and the design matrix of probe outer products.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .env import ContextSet
from .estimator import Dataset
from .linalg import (DEFAULT_REFRESH_PERIOD, DesignState, initialize_design,
                     rank_one_update, weighted_norms_rows)

# Verifies after every update that design.v equals the probe outer-product sum
# (plus the configured ridge). Quadratic in the run length, so tests only.
DEBUG_STATE_CHECKS = False

PERTURBATIONS = ("gumbel_clipped", "uniform")


@dataclass(frozen=True)
class StepDecision:
    """One round's choices: the recommended item, the optional comparison
    item, and their difference (the probe direction)."""

    recommend: np.ndarray
    compare_with: np.ndarray | None = None
    probe: np.ndarray | None = None

    def __post_init__(self):
        if self.compare_with is None:
            if self.probe is not None:
                raise ValueError("probe given without compare_with")
        elif self.probe is None:
            object.__setattr__(self, "probe", self.recommend - self.compare_with)
        elif not np.array_equal(self.probe, self.recommend - self.compare_with):
            raise ValueError("probe must equal recommend - compare_with")


@dataclass(frozen=True)
class ColstimParams:
    c1: float = 10.0
    c2: float = 1.0
    perturbation: str = "gumbel_clipped"

    def validate(self):
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError("c1 and c2 must be nonnegative")
        if self.perturbation not in PERTURBATIONS:
            raise ValueError(f"unknown perturbation {self.perturbation!r}")


@dataclass(frozen=True)
class PolicyState:
    """Everything a policy carries between rounds.

    history holds the consumed items in order (one row per round so far);
    design is None until the exploration phase ends. design_ridge is the
    identity multiple added when the design matrix is first built, tied to
    the MLE ridge so that a tau = 0 run still has an invertible design.
    """

    history: np.ndarray  # (t - 1, d)
    dataset: Dataset
    design: DesignState | None
    theta_hat: np.ndarray | None
    t: int
    tau: int
    design_ridge: float = 0.0
    refresh_period: int = DEFAULT_REFRESH_PERIOD


def initial_state(d: int, tau: int, design_ridge: float = 0.0,
                  refresh_period: int = DEFAULT_REFRESH_PERIOD) -> PolicyState:
    """Fresh state at round 1; with tau = 0 the design starts as ridge * I."""
    state = PolicyState(history=np.zeros((0, d)), dataset=Dataset.empty(d),
                        design=None, theta_hat=None, t=1, tau=tau,
                        design_ridge=design_ridge, refresh_period=refresh_period)
    if tau == 0:
        state = replace(state, design=_design_from_records(state))
    return state


def _design_from_records(state: PolicyState) -> DesignState:
    d = state.dataset.z.shape[1]
    v = state.dataset.z.T @ state.dataset.z + state.design_ridge * np.eye(d)
    return initialize_design(v, refresh_period=state.refresh_period)


def greedy_index(ctx: ContextSet, theta: np.ndarray) -> int:
    """Index of the highest estimated-utility item (ties: lowest index)."""
    return int(np.argmax(ctx.items @ theta))


def roam_explore_step(state: PolicyState, ctx: ContextSet,
                      rng: np.random.Generator) -> StepDecision:
    """Uniform recommendation; compare against the previous round's item.

    At round 1 there is no previous item, so no comparison is issued.
    """
    if len(ctx) == 0:
        raise ValueError("context set is empty")
    if state.t > state.tau:
        raise ValueError(f"explore step called at t={state.t} > tau={state.tau}")
    recommend = ctx.items[int(rng.integers(len(ctx)))]
    if state.history.shape[0] == 0:
        return StepDecision(recommend=recommend)
    return StepDecision(recommend=recommend, compare_with=state.history[-1])


def roam_exploit_step(state: PolicyState, ctx: ContextSet) -> StepDecision:
    """Greedy recommendation; comparison item from the history that
    maximizes the inverse-design weighted norm of the probe."""
    if len(ctx) == 0:
        raise ValueError("context set is empty")
    if state.t <= state.tau:
        raise ValueError(f"exploit step called at t={state.t} <= tau={state.tau}")
    if state.history.shape[0] == 0:
        raise ValueError("history is empty: exploration phase skipped illegally")
    if state.theta_hat is None or state.design is None:
        raise ValueError("exploit step needs a fitted estimate and design state")
    recommend = ctx.items[greedy_index(ctx, state.theta_hat)]
    norms = weighted_norms_rows(recommend - state.history, state.design.v_inv)
    compare_with = state.history[int(np.argmax(norms))]
    return StepDecision(recommend=recommend, compare_with=compare_with)


def colstim_step(state: PolicyState, ctx: ContextSet, params: ColstimParams,
                 rng: np.random.Generator) -> StepDecision:
    """Perturbed-utility recommendation with both items from the context set.

    The recommendation maximizes <x, theta_hat> + eps_x ||x||_{V^-1} with
    i.i.d. perturbations eps_x clipped to [-c2, c2]; the comparison item
    maximizes <y - x, theta_hat> + c1 ||x - y||_{V^-1}.
    """
    params.validate()
    if len(ctx) == 0:
        raise ValueError("context set is empty")
    if state.t <= state.tau:
        raise ValueError(f"colstim step called at t={state.t} <= tau={state.tau}")
    if state.theta_hat is None or state.design is None:
        raise ValueError("colstim step needs a fitted estimate and design state")
    if params.perturbation == "gumbel_clipped":
        eps = np.clip(rng.gumbel(size=len(ctx)), -params.c2, params.c2)
    else:
        eps = rng.uniform(-params.c2, params.c2, size=len(ctx))
    v_inv = state.design.v_inv
    utilities = ctx.items @ state.theta_hat
    x_scores = utilities + eps * weighted_norms_rows(ctx.items, v_inv)
    recommend = ctx.items[int(np.argmax(x_scores))]
    gaps = utilities - float(recommend @ state.theta_hat)
    y_scores = gaps + params.c1 * weighted_norms_rows(recommend - ctx.items, v_inv)
    compare_with = ctx.items[int(np.argmax(y_scores))]
    return StepDecision(recommend=recommend, compare_with=compare_with)


def random_policy_step(ctx: ContextSet, rng: np.random.Generator) -> StepDecision:
    """Both items uniform i.i.d. from the context set."""
    if len(ctx) == 0:
        raise ValueError("context set is empty")
    recommend = ctx.items[int(rng.integers(len(ctx)))]
    compare_with = ctx.items[int(rng.integers(len(ctx)))]
    return StepDecision(recommend=recommend, compare_with=compare_with)


def roam_update(state: PolicyState, decision: StepDecision,
                outcome: int | None) -> PolicyState:
    """Advance the state by one round.

    Appends the recommended item to the history, records the comparison when
    one was made, and maintains the design matrix: rank-one updates after the
    exploration phase, and a from-scratch initialization when the state first
    enters round tau + 1.
    """
    if (outcome is None) != (decision.compare_with is None):
        raise ValueError("outcome must be present exactly when compare_with is")
    history = np.vstack([state.history, decision.recommend[None, :]])
    dataset = state.dataset
    if decision.compare_with is not None:
        dataset = dataset.append(decision.probe, outcome)
    design = state.design
    if design is not None and decision.probe is not None and state.t > state.tau:
        design = rank_one_update(design, decision.probe)
    new_state = replace(state, history=history, dataset=dataset, design=design,
                        t=state.t + 1)
    if new_state.t == state.tau + 1 and new_state.design is None:
        new_state = replace(new_state, design=_design_from_records(new_state))
    if DEBUG_STATE_CHECKS and new_state.design is not None:
        d = history.shape[1]
        expected = (new_state.dataset.z.T @ new_state.dataset.z
                    + state.design_ridge * np.eye(d))
        assert np.allclose(new_state.design.v, expected, rtol=1e-9, atol=1e-7), \
            "design matrix diverged from the probe outer-product sum"
    return new_state
