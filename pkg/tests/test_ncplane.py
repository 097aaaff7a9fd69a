import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dissipation_lab import ncplane as nc
from dissipation_lab.errors import (
    DimensionTooSmall,
    OpenPath,
    TruncationTailTooLarge,
    ValidationError,
    ZeroDamping,
)
from dissipation_lab.model import OscillatorParams

SQUARE = [[0, 0], [1, 0], [1, 1], [0, 1]]


def test_subblock_commutator():
    pair = nc.build_nc_pair(5.0, 64)
    assert pair.subblock_residual() < 1e-10


def test_self_commutator_is_zero():
    pair = nc.build_nc_pair(5.0, 16)
    assert np.array_equal(nc.commutator(pair.X, pair.X), np.zeros((16, 16)))


@pytest.mark.parametrize("N,L2", [(4, 1.0), (16, 0.3), (64, 5.0)])
def test_defect_on_last_entry(N, L2):
    D = nc.build_nc_pair(L2, N).defect()
    mags = np.abs(D)
    assert mags[-1, -1] == pytest.approx(N * L2, rel=1e-12)
    mags[-1, -1] = 0
    assert mags.max() < 1e-10


def test_px_is_canonical():
    pair = nc.build_nc_pair(0.5, 32, hbar=2.0)
    block = nc.commutator(pair.X, pair.PX)[:-1, :-1]
    assert np.max(np.abs(block - 2j * np.eye(31))) < 1e-10


def test_build_errors():
    with pytest.raises(DimensionTooSmall):
        nc.build_nc_pair(1.0, 3)
    with pytest.raises(ValidationError):
        nc.build_nc_pair(0.0, 8)
    with pytest.raises(ValidationError):
        nc.TruncatedOperator(np.array([[0, 1], [0, 0]]), hermitian=True)


def test_velocity_scale_examples():
    assert nc.velocity_commutator_scale(OscillatorParams(1, 1, 1)) == (1.0, 1.0)
    assert nc.velocity_commutator_scale(OscillatorParams(1, 2, 1)) == (2.0, 0.5)
    with pytest.raises(ZeroDamping):
        nc.velocity_commutator_scale(OscillatorParams(1, 0, 1))


@given(st.floats(0.1, 5), st.floats(0.01, 1), st.floats(0.1, 3))
def test_velocity_scale_identity(m, gamma, hbar):
    scale, L2 = nc.velocity_commutator_scale(OscillatorParams(m, gamma, 1, hbar=hbar))
    assert m**2 * scale * L2 / hbar**2 == pytest.approx(1.0, rel=1e-14)


def test_phase_examples():
    sq = nc.PathPolygon(SQUARE)
    assert nc.interference_phase(sq, 1.0) == 1.0
    assert nc.interference_phase(sq.reversed(), 1.0) == -1.0
    assert nc.interference_phase(nc.PathPolygon([[0, 0], [1, 1], [2, 2]]), 1.0) == 0.0
    assert nc.phase_report(sq, 2.0) == {"area": 1.0, "L2": 2.0, "theta": 0.5}


def test_phase_errors():
    with pytest.raises(OpenPath):
        nc.interference_phase(nc.PathPolygon(SQUARE, closed=False), 1.0)
    with pytest.raises(ValidationError):
        nc.PathPolygon([[0, 0], [1, 1]])


def test_phase_additivity():
    left = nc.PathPolygon([[0, 0], [1, 0], [1, 1], [0, 1]])
    right = nc.PathPolygon([[1, 0], [3, 0], [3, 1], [1, 1]])
    union = nc.PathPolygon([[0, 0], [3, 0], [3, 1], [0, 1]])
    assert nc.interference_phase(union, 0.7) == pytest.approx(
        nc.interference_phase(left, 0.7) + nc.interference_phase(right, 0.7), rel=1e-15)


@given(st.floats(0.1, 10))
def test_scale_covariance(lam):
    tri = np.array([[0.0, 0.0], [2.0, 0.3], [0.5, 1.7]])
    base = nc.interference_phase(nc.PathPolygon(tri), 1.0)
    assert nc.interference_phase(nc.PathPolygon(lam * tri), 1.0) == pytest.approx(lam**2 * base, rel=1e-12)


def test_dissipative_identification():
    p = OscillatorParams(1, 0.25, 1, hbar=0.5)
    _, L2 = nc.velocity_commutator_scale(p)
    path = nc.PathPolygon([[0, 0], [2, 0], [2, 3]])
    A = nc.signed_area(path)
    assert nc.interference_phase(path, L2) == A * p.gamma / p.hbar


def test_uncertainty_ground_and_excited():
    pair = nc.build_nc_pair(2.5, 32)
    e = np.eye(32)
    *_, prod0 = nc.uncertainty_product(e[0], pair)
    *_, prod1 = nc.uncertainty_product(e[1], pair)
    assert prod0 == pytest.approx(pair.L2 / 2, abs=1e-8)
    assert prod1 == pytest.approx(3 * pair.L2 / 2, abs=1e-8)
    # saturating product equals half the subblock commutator magnitude
    assert prod0 == pytest.approx(0.5 * abs(nc.commutator(pair.X, pair.Y)[0, 0]), abs=1e-12)


def test_uncertainty_random_states(rng):
    pair = nc.build_nc_pair(1.3, 40)
    for _ in range(50):
        psi = np.zeros(40, complex)
        psi[:20] = rng.normal(size=20) + 1j * rng.normal(size=20)
        psi /= np.linalg.norm(psi)
        *_, prod = nc.uncertainty_product(psi, pair)
        assert prod >= pair.L2 / 2 - 1e-8


def test_uncertainty_tail_and_norm():
    pair = nc.build_nc_pair(1.0, 8)
    psi = np.full(8, 1 / math.sqrt(8))
    with pytest.raises(TruncationTailTooLarge):
        nc.uncertainty_product(psi, pair)
    with pytest.raises(ValidationError):
        nc.uncertainty_product(np.ones(8), pair)
