"""Small dense symmetric-matrix toolkit for design-matrix bookkeeping.

Everything here is sized for the simulator's regime (d up to a few tens):
weighted norms, rank-one design updates with an incrementally maintained
inverse, and extreme eigenvalues for the diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_REFRESH_PERIOD = 256

_SYM_TOL = 1e-12
_QUADFORM_FLOOR = -1e-12


class SingularDesignError(RuntimeError):
    """Raised when a design matrix has no usable inverse.

    Typically means the exploration phase produced fewer independent probes
    than dimensions; increase tau or set a positive reg_lambda.
    """


def symmetrize(m: np.ndarray) -> np.ndarray:
    """Average m with its transpose to suppress float drift."""
    return 0.5 * (m + m.T)


def check_symmetric(m, name: str = "matrix") -> np.ndarray:
    """Validate squareness and symmetry, returning the array as float64."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    tol = _SYM_TOL * np.maximum(1.0, np.abs(m))
    if np.any(np.abs(m - m.T) > tol):
        raise ValueError(f"{name} is not symmetric")
    return m


def weighted_norm(z, m) -> float:
    """Norm sqrt(z' M z) induced by a symmetric PSD matrix M."""
    z = np.asarray(z, dtype=float)
    m = np.asarray(m, dtype=float)
    if m.shape != (z.size, z.size):
        raise ValueError(f"dimension mismatch: vector {z.size}, matrix {m.shape}")
    q = float(z @ m @ z)
    if q < _QUADFORM_FLOOR:
        raise ArithmeticError(f"quadratic form {q:.3e} is negative; matrix is not PSD")
    return math.sqrt(max(q, 0.0))


def weighted_norms_rows(rows: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Vectorized weighted_norm over the rows of a (n, d) array."""
    q = ((rows @ m) * rows).sum(axis=1)
    return np.sqrt(np.clip(q, 0.0, None))


def extreme_eigenvalues(m) -> tuple[float, float]:
    """Smallest and largest eigenvalue of a symmetric matrix."""
    m = check_symmetric(m)
    w = np.linalg.eigvalsh(m)
    return float(w[0]), float(w[-1])


def min_eig_quadform_check(m, threshold: float) -> bool:
    """True iff the smallest eigenvalue of m is at least threshold."""
    return extreme_eigenvalues(m)[0] >= threshold


@dataclass(frozen=True)
class DesignState:
    """A design matrix V together with its maintained inverse.

    The inverse is updated by the rank-one identity and recomputed from
    scratch every refresh_period updates to bound float drift.
    """

    v: np.ndarray
    v_inv: np.ndarray
    update_count: int = 0
    refresh_period: int = DEFAULT_REFRESH_PERIOD


def _direct_inverse(v: np.ndarray) -> np.ndarray:
    try:
        v_inv = np.linalg.solve(v, np.eye(v.shape[0]))
    except np.linalg.LinAlgError as exc:
        raise SingularDesignError(
            "design matrix is singular; increase tau or use reg_lambda > 0"
        ) from exc
    if not np.all(np.isfinite(v_inv)):
        raise SingularDesignError("design matrix inverse is not finite")
    return symmetrize(v_inv)


def initialize_design(v, refresh_period: int = DEFAULT_REFRESH_PERIOD) -> DesignState:
    """Build a DesignState from a symmetric positive definite matrix."""
    v = check_symmetric(v, "design matrix")
    return DesignState(v=v, v_inv=_direct_inverse(v), update_count=0,
                       refresh_period=refresh_period)


def rank_one_update(state: DesignState, z) -> DesignState:
    """Add the probe outer product z z' to V and update the inverse.

    Uses v_inv - (v_inv z z' v_inv) / (1 + z' v_inv z); a zero probe leaves
    the state untouched.
    """
    z = np.asarray(z, dtype=float)
    if z.size != state.v.shape[0]:
        raise ValueError(f"dimension mismatch: probe {z.size}, design {state.v.shape}")
    if not np.any(z):
        return state
    v = symmetrize(state.v + np.outer(z, z))
    w = state.v_inv @ z
    v_inv = symmetrize(state.v_inv - np.outer(w, w) / (1.0 + float(z @ w)))
    count = state.update_count + 1
    if count % state.refresh_period == 0:
        v_inv = _direct_inverse(v)
    return DesignState(v=v, v_inv=v_inv, update_count=count,
                       refresh_period=state.refresh_period)


def inverse_drift(state: DesignState) -> float:
    """Max-norm of V V^-1 - I; the maintained-inverse quality metric."""
    resid = state.v @ state.v_inv - np.eye(state.v.shape[0])
    return float(np.max(np.abs(resid)))
