import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dissipation_lab import doubling as db
from dissipation_lab.errors import NonPositiveDeformation, ValidationError


def basis(d, i, j):
    v = np.zeros(d * d)
    v[i * d + j] = 1.0
    return v


def test_mode_ladder():
    mode = db.TruncatedMode(6)
    c = mode.a @ mode.a_dag - mode.a_dag @ mode.a
    np.testing.assert_array_almost_equal(c[:-1, :-1], np.eye(5), decimal=14)
    assert np.array_equal(mode.a_dag, mode.a.T)
    with pytest.raises(ValidationError):
        db.TruncatedMode(1)


def test_q_one_is_hopf():
    ad = db.TruncatedMode(4).a_dag
    assert np.array_equal(db.coproduct(ad, 1.0).matrix, db.hopf_coproduct(ad))


def test_q_four_element():
    d = 4
    M = db.coproduct(db.TruncatedMode(d).a_dag, 4.0).matrix
    assert basis(d, 1, 0) @ M @ basis(d, 0, 0) == 2.0
    assert basis(d, 0, 1) @ M @ basis(d, 0, 0) == 0.5


@given(st.floats(-5, 5), st.floats(0.01, 100))
def test_linearity(alpha, q):
    ad = db.TruncatedMode(3).a_dag
    np.testing.assert_allclose(db.coproduct(alpha * ad, q).matrix,
                               alpha * db.coproduct(ad, q).matrix, rtol=1e-15, atol=0)


@given(st.floats(0.01, 100))
def test_swap_exchanges_q(q):
    d = 4
    ad = db.TruncatedMode(d).a_dag
    S = db.swap_operator(d)
    lhs = db.coproduct(ad, q).matrix
    rhs = S @ db.coproduct(ad, 1 / q).matrix @ S
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_swap_is_involution():
    S = db.swap_operator(3)
    assert np.array_equal(S @ S, np.eye(9))


@pytest.mark.parametrize("q", [0.0, -1.0])
def test_nonpositive_q(q):
    with pytest.raises(NonPositiveDeformation):
        db.coproduct(np.eye(2), q)


def test_overlap_examples():
    for n in (1, 5, 50):
        assert db.theta_vacuum_overlap(0.0, n) == 1.0
    assert db.theta_vacuum_overlap(math.pi / 4, 10) == pytest.approx(0.03125, rel=1e-14)
    with pytest.raises(ValidationError):
        db.theta_vacuum_overlap(0.3, 0)


def test_overlap_decreases_to_zero():
    vals = [db.theta_vacuum_overlap(0.7, n) for n in range(1, 200)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-15


@given(st.floats(-10, 10), st.integers(1, 60))
def test_overlap_bounds(theta, n):
    assert 0.0 <= db.theta_vacuum_overlap(theta, n) <= 1.0


@pytest.mark.parametrize("n", range(1, 7))
def test_explicit_matches_closed_form(n):
    for theta in (0.0, 0.3, math.pi / 4, 1.2, 2.5):
        assert abs(db.theta_vacuum_explicit(theta, n) - db.theta_vacuum_overlap(theta, n)) < 1e-12


def test_fermion_anticommutators():
    ops = db.fermion_operators(3)
    eye = np.eye(8)
    for i, a in enumerate(ops):
        for j, b in enumerate(ops):
            ab = (a @ b.T + b.T @ a).toarray()
            np.testing.assert_array_equal(ab, eye if i == j else 0 * eye)
            np.testing.assert_array_equal((a @ b + b @ a).toarray(), 0 * eye)


def test_overlap_table():
    rows = db.overlap_table([0.0, math.pi / 4], [1, 2])
    assert rows[0] == (0.0, 1, 1.0)
    assert rows[-1][2] == pytest.approx(0.5)
    assert len(rows) == 4
