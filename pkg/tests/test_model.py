import math

import pytest
from hypothesis import given, strategies as st

from dissipation_lab.errors import NonPositiveParameter, UnderdampedViolation
from dissipation_lab.model import OscillatorParams, derive_params


def test_undamped_limit():
    d = derive_params(OscillatorParams(m=1, gamma=0, k=1))
    assert d.Gamma == 0
    assert d.Omega == 1
    assert d.tau == 2 * math.pi
    assert d.K == 1
    assert d.L2 is None


def test_weak_damping_values():
    d = derive_params(OscillatorParams(m=1, gamma=0.2, k=1))
    assert d.Gamma == pytest.approx(0.1, abs=1e-15)
    assert d.Omega == pytest.approx(0.994987437106620, abs=1e-12)
    assert d.tau == pytest.approx(6.31483883399655, abs=1e-10)
    assert d.L2 == pytest.approx(5.0, abs=1e-14)
    assert d.B == pytest.approx(0.2)
    assert d.K == pytest.approx(0.99)


def test_overdamped_rejected():
    with pytest.raises(UnderdampedViolation):
        derive_params(OscillatorParams(m=1, gamma=0.2, k=0.009))


def test_critical_rejected():
    with pytest.raises(UnderdampedViolation):
        derive_params(OscillatorParams(m=1, gamma=2.0, k=1.0))


@pytest.mark.parametrize("field", ["m", "k", "hbar"])
def test_non_positive_rejected(field):
    kwargs = dict(m=1.0, gamma=0.1, k=1.0, hbar=1.0)
    kwargs[field] = 0.0
    with pytest.raises(NonPositiveParameter):
        OscillatorParams(**kwargs)


def test_negative_damping_rejected():
    with pytest.raises(NonPositiveParameter):
        OscillatorParams(m=1, gamma=-0.1, k=1)


def test_deterministic():
    p = OscillatorParams(m=1.3, gamma=0.37, k=2.1)
    assert derive_params(p) == derive_params(p)


@given(st.floats(0.1, 3), st.floats(0.1, 3), st.floats(0, 1), st.floats(1e-3, 0.5))
def test_omega_decreases_with_gamma(m, k, g, dg):
    hi = g + dg
    if k <= hi**2 / (4 * m):
        return
    lo_d = derive_params(OscillatorParams(m=m, gamma=g, k=k))
    hi_d = derive_params(OscillatorParams(m=m, gamma=hi, k=k))
    assert hi_d.Omega < lo_d.Omega


def test_omega_vanishes_at_critical_boundary():
    m, gamma = 1.0, 0.5
    kc = gamma**2 / (4 * m)
    omegas = [derive_params(OscillatorParams(m, gamma, kc + eps)).Omega for eps in (1e-2, 1e-4, 1e-6, 1e-8)]
    assert all(a > b > 0 for a, b in zip(omegas, omegas[1:]))
    assert omegas[-1] < 1e-3


def test_omega_tends_to_natural_frequency():
    for g in (1e-2, 1e-4, 1e-6):
        d = derive_params(OscillatorParams(m=2.0, gamma=g, k=3.0))
        assert d.Omega == pytest.approx(math.sqrt(1.5), abs=g)
