import math

import numpy as np
import pytest

from roambandit.linalg import (DesignState, SingularDesignError,
                               extreme_eigenvalues, initialize_design,
                               inverse_drift, min_eig_quadform_check,
                               rank_one_update, weighted_norm,
                               weighted_norms_rows)

from oracles import bisect_extreme_eigenvalues


def test_weighted_norm_examples():
    assert weighted_norm([1, 1], np.diag([2.0, 3.0])) == pytest.approx(math.sqrt(5), abs=1e-12)
    assert weighted_norm(np.zeros(4), np.eye(4)) == 0.0
    assert weighted_norm([1, 0], np.eye(2)) == 1.0


def test_weighted_norm_errors():
    with pytest.raises(ValueError):
        weighted_norm([1, 2, 3], np.eye(2))
    with pytest.raises(ArithmeticError):
        weighted_norm([1.0], np.array([[-1.0]]))


def test_weighted_norm_positive_for_pd():
    rng = np.random.default_rng(7)
    for _ in range(50):
        b = rng.standard_normal((4, 4))
        m = b.T @ b + 0.1 * np.eye(4)
        z = rng.standard_normal(4)
        assert weighted_norm(z, m) > 0.0


def test_weighted_norms_rows_matches_scalar():
    rng = np.random.default_rng(3)
    b = rng.standard_normal((3, 3))
    m = b.T @ b
    rows = rng.standard_normal((20, 3))
    batched = weighted_norms_rows(rows, m)
    for i in range(20):
        assert batched[i] == pytest.approx(weighted_norm(rows[i], m), rel=1e-12)


def test_rank_one_update_diagonal_case():
    state = initialize_design(np.eye(2))
    new = rank_one_update(state, np.array([1.0, 0.0]))
    assert np.array_equal(new.v, np.diag([2.0, 1.0]))
    assert np.array_equal(new.v_inv, np.diag([0.5, 1.0]))
    assert new.update_count == 1


def test_rank_one_update_zero_probe_is_noop():
    state = initialize_design(np.eye(3))
    assert rank_one_update(state, np.zeros(3)) is state


def test_rank_one_update_matches_direct_inverse():
    # oracle: direct matrix inverse of I + z z'
    z = np.ones(3)
    expected = np.linalg.inv(np.eye(3) + np.outer(z, z))
    assert np.allclose(expected, np.eye(3) - 0.25 * np.ones((3, 3)), atol=1e-12)
    state = rank_one_update(initialize_design(np.eye(3)), z)
    assert np.allclose(state.v_inv, expected, atol=1e-12)


def test_rank_one_update_dimension_mismatch():
    state = initialize_design(np.eye(2))
    with pytest.raises(ValueError):
        rank_one_update(state, np.ones(3))


def test_inverse_drift_stays_small_over_many_updates():
    rng = np.random.default_rng(11)
    state = initialize_design(np.eye(5))
    for _ in range(10_000):
        g = rng.standard_normal(5)
        z = g / np.linalg.norm(g) * 2.0 * rng.random() ** 0.2
        state = rank_one_update(state, z)
        assert inverse_drift(state) <= 1e-8
    assert state.update_count == 10_000


def test_refresh_period_triggers_direct_solve():
    state = DesignState(v=np.eye(2), v_inv=np.eye(2), update_count=0, refresh_period=4)
    rng = np.random.default_rng(0)
    for _ in range(8):
        state = rank_one_update(state, rng.standard_normal(2))
    assert state.update_count == 8
    assert inverse_drift(state) <= 1e-12


def test_initialize_design_rejects_singular():
    with pytest.raises(SingularDesignError):
        initialize_design(np.zeros((3, 3)))


def test_extreme_eigenvalues_examples():
    assert extreme_eigenvalues(np.diag([2.0, 5.0])) == pytest.approx((2.0, 5.0), rel=1e-9)
    lo, hi = extreme_eigenvalues(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert lo == pytest.approx(1.0, rel=1e-9)
    assert hi == pytest.approx(3.0, rel=1e-9)


def test_extreme_eigenvalues_rejects_asymmetric():
    with pytest.raises(ValueError):
        extreme_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_extreme_eigenvalues_against_bisection_oracle():
    rng = np.random.default_rng(5)
    for _ in range(10):
        b = rng.standard_normal((5, 5))
        m = b.T @ b
        lo, hi = extreme_eigenvalues(m)
        o_lo, o_hi = bisect_extreme_eigenvalues(m)
        assert lo == pytest.approx(o_lo, abs=1e-6)
        assert hi == pytest.approx(o_hi, abs=1e-6)


def test_rayleigh_quotient_sandwich():
    rng = np.random.default_rng(9)
    m = rng.standard_normal((6, 6))
    m = 0.5 * (m + m.T)
    lo, hi = extreme_eigenvalues(m)
    for _ in range(100):
        z = rng.standard_normal(6)
        z /= np.linalg.norm(z)
        q = float(z @ m @ z)
        assert lo - 1e-12 <= q <= hi + 1e-12


def test_congruence_eigenvalue_bounds():
    rng = np.random.default_rng(13)
    for _ in range(100):
        a = rng.standard_normal((4, 4))
        a = a.T @ a + 0.05 * np.eye(4)
        s = rng.standard_normal((4, 4))
        s = s.T @ s + 0.05 * np.eye(4)
        w, vecs = np.linalg.eigh(s)
        s_half = vecs @ np.diag(np.sqrt(w)) @ vecs.T
        b = s_half @ a @ s_half
        b = 0.5 * (b + b.T)
        b_lo, b_hi = extreme_eigenvalues(b)
        a_lo, a_hi = extreme_eigenvalues(a)
        s_lo, _ = extreme_eigenvalues(s)
        assert b_hi >= s_lo * a_hi * (1 - 1e-10)
        assert b_lo >= s_lo * a_lo * (1 - 1e-10)


def test_min_eig_quadform_check():
    assert min_eig_quadform_check(np.eye(5), 1.0)
    assert not min_eig_quadform_check(np.diag([0.5, 2.0]), 1.0)
