"""Synthetic environment: taste vector, context sets, best arm, and the
population probe-covariance matrix."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import symmetrize

THETA_MODES = ("unit_sphere", "unit_ball_then_normalize")


@dataclass(frozen=True)
class EnvConfig:
    d: int = 5
    k: int = 1000
    r: float = 1.0
    theta_mode: str = "unit_sphere"

    def validate(self):
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.r <= 0:
            raise ValueError("r must be positive")
        if self.theta_mode not in THETA_MODES:
            raise ValueError(f"unknown theta_mode {self.theta_mode!r}")


@dataclass(frozen=True)
class ContextSet:
    """The candidate items offered at one round, one row per item."""

    items: np.ndarray  # (k, d)

    def __len__(self) -> int:
        return self.items.shape[0]


def sample_unit_ball(n: int, d: int, r: float, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. points uniform in the d-ball of radius r.

    Gaussian direction times radius r * U^(1/d); exact and rejection-free.
    """
    g = rng.standard_normal((n, d))
    norms = np.sqrt((g * g).sum(axis=1, keepdims=True))
    norms[norms == 0.0] = 1.0
    radii = r * rng.random(n) ** (1.0 / d)
    return g / norms * radii[:, None]


def sample_theta_star(cfg: EnvConfig, rng: np.random.Generator) -> np.ndarray:
    """Unit-norm taste vector; both modes are uniform on the sphere."""
    if cfg.theta_mode == "unit_sphere":
        g = rng.standard_normal(cfg.d)
    else:
        g = sample_unit_ball(1, cfg.d, 1.0, rng)[0]
    norm = float(np.linalg.norm(g))
    while norm == 0.0:  # probability zero, but keep the contract airtight
        g = rng.standard_normal(cfg.d)
        norm = float(np.linalg.norm(g))
    return g / norm


def sample_context_set(cfg: EnvConfig, rng: np.random.Generator,
                       sampler: Callable | None = None) -> ContextSet:
    """k i.i.d. items from the context distribution (uniform ball by default).

    A custom sampler(n, d, r, rng) -> (n, d) array may be injected; its draws
    must respect the norm bound r.
    """
    draw = sampler if sampler is not None else sample_unit_ball
    return ContextSet(items=draw(cfg.k, cfg.d, cfg.r, rng))


def best_arm(ctx: ContextSet, theta_star: np.ndarray) -> tuple[int, np.ndarray, float]:
    """Index, item, and utility of the highest-utility item (ties: lowest index)."""
    if len(ctx) == 0:
        raise ValueError("context set is empty")
    utilities = ctx.items @ theta_star
    idx = int(np.argmax(utilities))
    return idx, ctx.items[idx], float(utilities[idx])


def estimate_sigma(cfg: EnvConfig, n_samples: int, rng: np.random.Generator,
                   chunk: int = 100_000) -> np.ndarray:
    """Monte-Carlo estimate of E[(x - y)(x - y)'] over i.i.d. context pairs."""
    if n_samples < 10_000:
        raise ValueError("n_samples must be at least 10^4")
    acc = np.zeros((cfg.d, cfg.d))
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        z = sample_unit_ball(m, cfg.d, cfg.r, rng) - sample_unit_ball(m, cfg.d, cfg.r, rng)
        acc += z.T @ z
        done += m
    return symmetrize(acc / n_samples)
