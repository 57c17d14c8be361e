"""Maximum-likelihood estimation of the taste vector from comparison data.

The estimate solves sum_i (F(<z_i, theta>) - o_i) z_i + lambda * theta = 0
by damped Newton iterations. With the sigmoid link and lambda = 0 this is
exactly unpenalized logistic regression on the probe directions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .choice import LinkFunction

# Enables the per-iteration Hessian PSD assertion; costs an eigendecomposition
# per Newton step, so batches leave it off and the unit tests switch it on.
DEBUG_CHECKS = False

_FALLBACK_RIDGE = 1e-8
_MAX_HALVINGS = 30


class ConvergenceError(RuntimeError):
    """Newton failed to reach the score tolerance within max_iter."""

    def __init__(self, message: str, theta: np.ndarray, residual: float):
        super().__init__(message)
        self.theta = theta
        self.residual = residual


@dataclass(frozen=True)
class Dataset:
    """Ordered comparison records: probe directions z with outcomes o."""

    z: np.ndarray  # (n, d)
    o: np.ndarray  # (n,), values in {0, 1}

    @staticmethod
    def empty(d: int) -> "Dataset":
        return Dataset(z=np.zeros((0, d)), o=np.zeros(0))

    def append(self, z, o) -> "Dataset":
        z = np.asarray(z, dtype=float)
        return Dataset(z=np.vstack([self.z, z[None, :]]),
                       o=np.append(self.o, float(o)))

    def __len__(self) -> int:
        return self.z.shape[0]


@dataclass
class MleConfig:
    reg_lambda: float = 0.0
    tol: float = 1e-8
    max_iter: int = 100
    init: np.ndarray | None = None

    def validate(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.reg_lambda < 0:
            raise ValueError("reg_lambda must be nonnegative")


def score(theta, data: Dataset, link: LinkFunction, reg_lambda: float = 0.0) -> np.ndarray:
    """Estimating-equation residual sum_i (F(<z_i, theta>) - o_i) z_i + lambda theta."""
    theta = np.asarray(theta, dtype=float)
    if len(data) == 0 and reg_lambda == 0.0:
        raise ValueError("empty dataset with reg_lambda = 0: system is underdetermined")
    if len(data) and data.z.shape[1] != theta.size:
        raise ValueError("dimension mismatch between theta and dataset")
    resid = np.asarray(link.eval(data.z @ theta)) - data.o
    return data.z.T @ resid + reg_lambda * theta


def _hessian(theta, data: Dataset, link: LinkFunction, reg_lambda: float) -> np.ndarray:
    w = np.asarray(link.deriv(data.z @ theta))
    h = data.z.T @ (w[:, None] * data.z) + reg_lambda * np.eye(theta.size)
    if DEBUG_CHECKS:
        assert float(np.linalg.eigvalsh(h)[0]) >= -1e-10, "Newton system is not PSD"
    return h


def solve_mle(data: Dataset, link: LinkFunction, cfg: MleConfig) -> np.ndarray:
    """Damped Newton solve of the score equation.

    Returns theta with ||score(theta)|| <= cfg.tol, warm-started from
    cfg.init (zeros by default). Raises ConvergenceError (carrying the last
    iterate and residual) when max_iter is exhausted. A singular Newton
    system with reg_lambda = 0 falls back to a 1e-8 ridge for that step and
    emits a warning.
    """
    cfg.validate()
    if len(data) == 0 and cfg.reg_lambda == 0.0:
        raise ValueError("empty dataset with reg_lambda = 0: system is underdetermined")
    if cfg.init is not None:
        theta = np.array(cfg.init, dtype=float)
    elif len(data):
        theta = np.zeros(data.z.shape[1])
    else:
        raise ValueError("empty dataset and no init: dimension unknown")

    g = score(theta, data, link, cfg.reg_lambda)
    g_norm = math.sqrt(float(g @ g))
    for _ in range(cfg.max_iter):
        if g_norm <= cfg.tol:
            return theta
        h = _hessian(theta, data, link, cfg.reg_lambda)
        try:
            step = np.linalg.solve(h, -g)
        except np.linalg.LinAlgError:
            if cfg.reg_lambda > 0:
                raise
            warnings.warn("singular Newton system; using a 1e-8 ridge for this step",
                          RuntimeWarning, stacklevel=2)
            step = np.linalg.solve(h + _FALLBACK_RIDGE * np.eye(theta.size), -g)
        scale = 1.0
        for _ in range(_MAX_HALVINGS):
            candidate = theta + scale * step
            g_new = score(candidate, data, link, cfg.reg_lambda)
            g_new_norm = math.sqrt(float(g_new @ g_new))
            if g_new_norm < g_norm:
                break
            scale *= 0.5
        theta, g, g_norm = candidate, g_new, g_new_norm
    if g_norm <= cfg.tol:
        return theta
    raise ConvergenceError(
        f"Newton did not converge in {cfg.max_iter} iterations "
        f"(score residual {g_norm:.3e} > tol {cfg.tol:.1e})",
        theta=theta, residual=g_norm)
