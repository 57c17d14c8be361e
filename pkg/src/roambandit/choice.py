"""Link functions and the simulated user.

Comparison outcomes follow the linear stochastic transitivity model: the
probability of preferring x over y is a strictly increasing function of the
utility gap <x - y, theta*>.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


def sigmoid(u):
    """Logistic function 1 / (1 + exp(-u)), stable for |u| up to ~700."""
    u = np.asarray(u, dtype=float)
    # exp only sees nonpositive arguments, so large gaps cannot overflow
    e = np.exp(-np.abs(u))
    out = np.where(u >= 0.0, 1.0 / (1.0 + e), e / (1.0 + e))
    return float(out) if out.ndim == 0 else out


def sigmoid_deriv(u):
    s = sigmoid(u)
    return s * (1.0 - s)


@dataclass(frozen=True)
class LinkFunction:
    """A win-probability link: eval maps utility gaps to (0, 1).

    Custom links must be strictly increasing, satisfy eval(u) + eval(-u) = 1,
    and provide the exact derivative in deriv; validate_link checks this.
    """

    kind: str
    eval: Callable
    deriv: Callable


SIGMOID = LinkFunction(kind="sigmoid", eval=sigmoid, deriv=sigmoid_deriv)


def validate_link(link: LinkFunction, lo: float = -10.0, hi: float = 10.0,
                  n_grid: int = 2001) -> None:
    """Check the link invariants on a grid; raises ValueError on failure."""
    u = np.linspace(lo, hi, n_grid)
    f = np.asarray(link.eval(u), dtype=float)
    if np.any(f <= 0.0) or np.any(f >= 1.0):
        raise ValueError(f"link {link.kind!r} leaves (0, 1) on the grid")
    if np.any(np.diff(f) <= 0.0):
        raise ValueError(f"link {link.kind!r} is not strictly increasing")
    sym = np.abs(f + np.asarray(link.eval(-u)) - 1.0)
    if np.any(sym > 1e-12):
        raise ValueError(f"link {link.kind!r} violates eval(u) + eval(-u) = 1")
    h = 1e-6
    fd = (np.asarray(link.eval(u + h)) - np.asarray(link.eval(u - h))) / (2.0 * h)
    dv = np.asarray(link.deriv(u), dtype=float)
    if np.any(dv <= 0.0):
        raise ValueError(f"link {link.kind!r} deriv is not positive")
    if np.any(np.abs(fd - dv) > 1e-6 * np.maximum(1.0, np.abs(dv))):
        raise ValueError(f"link {link.kind!r} deriv does not match eval")


@dataclass(frozen=True)
class UserModel:
    """A simulated user with unit-norm taste vector and a link function."""

    theta_star: np.ndarray
    link: LinkFunction = SIGMOID

    def __post_init__(self):
        theta = np.asarray(self.theta_star, dtype=float)
        if abs(float(np.linalg.norm(theta)) - 1.0) > 1e-10:
            raise ValueError("theta_star must have unit norm")
        object.__setattr__(self, "theta_star", theta)


def win_probability(user: UserModel, x, y) -> float:
    """Probability that the user prefers x over y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size != user.theta_star.size:
        raise ValueError("dimension mismatch between items and theta_star")
    return float(user.link.eval(float((x - y) @ user.theta_star)))


def sample_comparison(user: UserModel, x, y, rng: np.random.Generator) -> int:
    """Draw a comparison outcome: 1 means x preferred over y."""
    return int(rng.random() < win_probability(user, x, y))
