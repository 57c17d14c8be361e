"""Empirical checks of the theory behind the simulator.

Covers the link-curvature constant kappa, the confidence-width alpha, the
rich-history constant beta = 8r / sqrt(lambda_min(Sigma)), Monte-Carlo
verification of the matrix concentration bound, the minimum-eigenvalue
condition on the post-exploration design matrix, and a sampled relaxation of
the rich-history property. Universal constants in the tau prescriptions are
not computable, so concentration is probed by an empirical doubling scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .choice import sigmoid_deriv
from .env import EnvConfig, estimate_sigma, sample_unit_ball
from .harness import RunConfig, exploration_probes
from .linalg import extreme_eigenvalues, min_eig_quadform_check


def compute_kappa_sigmoid(r: float) -> float:
    """Worst-case sigmoid slope over feasible arguments.

    The slope decreases in |u| and the argument is bounded by
    2r * (1 + ||theta*||) = 4r, so the infimum sits at the boundary.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    return float(sigmoid_deriv(4.0 * r))


def compute_alpha(t: int, d: int, delta: float, kappa: float) -> float:
    """Confidence width (1/kappa) sqrt(d/2 log(1 + 2t/d) + log(1/delta))."""
    if t < 1:
        raise ValueError("t must be at least 1")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    return math.sqrt(0.5 * d * math.log1p(2.0 * t / d) + math.log(1.0 / delta)) / kappa


def compute_beta(r: float, lambda_min_sigma: float) -> float:
    """Rich-history constant 8r / sqrt(lambda_min(Sigma))."""
    if lambda_min_sigma <= 0:
        raise ValueError("lambda_min(Sigma) must be positive (Sigma not PD)")
    return 8.0 * r / math.sqrt(lambda_min_sigma)


@dataclass(frozen=True)
class TheoryConstants:
    d: int
    r: float
    kappa: float
    lambda_min_sigma: float
    beta: float
    tau_recommended: int

    def alpha_at(self, t: int, delta: float) -> float:
        return compute_alpha(t, self.d, delta, self.kappa)


def theory_constants(d: int, r: float, rng: np.random.Generator, *,
                     n_sigma_samples: int = 10 ** 6, delta: float = 0.1,
                     scale_c: float = 1.0) -> TheoryConstants:
    """All constants for one environment, with lambda_min(Sigma) estimated by
    Monte Carlo. tau_recommended follows the (r^2 / lambda_min) log(d/delta)
    prescription up to the unknowable universal constant scale_c."""
    sigma = estimate_sigma(EnvConfig(d=d, k=2, r=r), n_sigma_samples, rng)
    lam = extreme_eigenvalues(sigma)[0]
    tau_rec = math.ceil(scale_c * (r * r / lam) * math.log(d / delta))
    return TheoryConstants(d=d, r=r, kappa=compute_kappa_sigmoid(r),
                           lambda_min_sigma=lam, beta=compute_beta(r, lam),
                           tau_recommended=tau_rec)


def _sphere_rows(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((n, d))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return g / norms


def check_concentration(d: int, r: float | None, tau: int, epsilon: float,
                        n_trials: int, rng: np.random.Generator,
                        sampler=None) -> float:
    """Fraction of trials where ||(1/tau) sum z z' - I|| exceeds epsilon.

    The built-in distribution is the uniform sphere scaled by sqrt(d), the
    isotropic sphere; its norm bound is sqrt(d) and the r argument only
    documents the bound of an injected sampler.
    """
    if tau < 1 or n_trials < 1:
        raise ValueError("tau and n_trials must be positive")
    eye = np.eye(d)
    failures = 0
    for _ in range(n_trials):
        if sampler is None:
            z = _sphere_rows(tau, d, rng) * math.sqrt(d)
        else:
            z = sampler(tau, d, rng)
            if r is not None and float(np.max(np.linalg.norm(z, axis=1))) > r + 1e-9:
                raise ValueError("sampler violates the stated norm bound r")
        deviation = z.T @ z / tau - eye
        w = np.linalg.eigvalsh(0.5 * (deviation + deviation.T))
        if max(abs(float(w[0])), abs(float(w[-1]))) > epsilon:
            failures += 1
    return failures / n_trials


def scan_concentration_tau(d: int, epsilon: float, n_trials: int,
                           rate_bound: float, rng: np.random.Generator, *,
                           tau_start: int = 16, tau_max: int = 4096,
                           r: float | None = None, sampler=None):
    """Double tau until the empirical failure rate drops to rate_bound.

    Returns (found_tau or None, [(tau, rate), ...] for every tau probed).
    """
    rates = []
    tau = tau_start
    while tau <= tau_max:
        rate = check_concentration(d, r, tau, epsilon, n_trials, rng, sampler=sampler)
        rates.append((tau, rate))
        if rate <= rate_bound:
            return tau, rates
        tau *= 2
    return None, rates


def check_good_vector(history_probes: np.ndarray, epsilon: float,
                      n_directions: int, rng: np.random.Generator) -> bool:
    """Sampled relaxation of inf_v max_t <z_t, v>^2 >= 1 - epsilon.

    The caller supplies whitened probes; directions v are sampled uniformly
    on the unit sphere and every one must have some probe with squared
    projection at least 1 - epsilon.
    """
    probes = np.asarray(history_probes, dtype=float)
    if probes.ndim != 2 or probes.shape[0] == 0:
        raise ValueError("history_probes must be a nonempty (n, d) array")
    directions = _sphere_rows(n_directions, probes.shape[1], rng)
    best = np.max((probes @ directions.T) ** 2, axis=0)
    return bool(np.all(best >= 1.0 - epsilon))


def check_lambda_min_condition(cfg: RunConfig, n_runs: int) -> float:
    """Fraction of exploration phases whose raw probe-sum design matrix has
    smallest eigenvalue at least one."""
    if cfg.tau < 2:
        raise ValueError("tau must be at least 2 to accumulate any probes")
    hits = 0
    for run_index in range(n_runs):
        z = exploration_probes(cfg, run_index)
        hits += min_eig_quadform_check(z.T @ z, 1.0)
    return hits / n_runs


def check_rich_history(history: np.ndarray, r: float, beta: float,
                       n_probes: int, rng: np.random.Generator,
                       chunk: int = 2048) -> bool:
    """Sampled relaxation of the rich-history property.

    Draws triples (x, x', A) with x, x' uniform in the r-ball and
    A = B'B + 1e-6 I from Gaussian B, and verifies
    ||x - x'||_A <= beta * max_y ||x - y||_A for every triple.
    """
    history = np.asarray(history, dtype=float)
    if history.ndim != 2 or history.shape[0] == 0:
        raise ValueError("history must be a nonempty (n, d) array")
    d = history.shape[1]
    done = 0
    while done < n_probes:
        m = min(chunk, n_probes - done)
        x = sample_unit_ball(m, d, r, rng)
        x_prime = sample_unit_ball(m, d, r, rng)
        b = rng.standard_normal((m, d, d))
        a = np.einsum("mkd,mke->mde", b, b) + 1e-6 * np.eye(d)
        gap = x - x_prime
        lhs = np.sqrt(np.clip(np.einsum("md,mde,me->m", gap, a, gap), 0.0, None))
        diffs = x[:, None, :] - history[None, :, :]
        quad = np.einsum("mnd,mde,mne->mn", diffs, a, diffs)
        rhs = beta * np.sqrt(np.clip(np.max(quad, axis=1), 0.0, None))
        if np.any(lhs > rhs * (1.0 + 1e-12)):
            return False
        done += m
    return True


def whitened_exploration_probes(cfg: RunConfig, run_index: int,
                                sigma: np.ndarray) -> np.ndarray:
    """Exploration probes mapped through Sigma^(-1/2) for check_good_vector."""
    w, vecs = np.linalg.eigh(sigma)
    if float(w[0]) <= 0:
        raise ValueError("sigma estimate is not positive definite")
    inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(w)) @ vecs.T
    return exploration_probes(cfg, run_index) @ inv_sqrt.T


__all__ = [
    "TheoryConstants", "check_concentration", "check_good_vector",
    "check_lambda_min_condition", "check_rich_history", "compute_alpha",
    "compute_beta", "compute_kappa_sigmoid", "scan_concentration_tau",
    "theory_constants", "whitened_exploration_probes",
]
