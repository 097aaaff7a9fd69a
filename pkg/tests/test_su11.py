import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from dissipation_lab import dynamics as dy, su11
from dissipation_lab.errors import NegativeIndex, NonPositiveCasimir, UnderdampedViolation
from dissipation_lab.model import OscillatorParams, derive_params

OMEGA_WEAK = math.sqrt(0.99)


def test_casimir_j2_undamped(undamped):
    s = dy.PhaseStateRot(1, 0, 0, 0)
    assert su11.casimir(s, undamped) == pytest.approx(0.25, abs=1e-15)
    assert su11.j2(s, undamped) == 0


def test_casimir_j2_weak_damping(weak_damping):
    s = dy.PhaseStateRot(1, 0, 0, 0)
    assert su11.casimir(s, weak_damping) == pytest.approx(0.98 / (4 * OMEGA_WEAK), abs=1e-14)
    assert su11.casimir(s, weak_damping) == pytest.approx(0.246234, abs=1e-6)
    assert su11.j2(s, weak_damping) == pytest.approx(-0.05, abs=1e-15)


def test_zero_state(weak_damping):
    z = dy.PhaseStateRot(0, 0, 0, 0)
    assert su11.casimir(z, weak_damping) == 0
    assert su11.j2(z, weak_damping) == 0


def test_underdamped_required():
    p = OscillatorParams(m=1, gamma=3, k=1)
    with pytest.raises(UnderdampedViolation):
        su11.casimir(dy.PhaseStateRot(1, 0, 0, 0), p)


def test_hooft_examples():
    d0 = derive_params(OscillatorParams(1, 0, 1))
    split = su11.hooft_hamiltonian(su11.SU11Observables(0.25, 0.0), d0)
    assert (split.H, split.HI, split.HII) == (0.5, 0.5, 0.0)

    d = derive_params(OscillatorParams(1, 0.2, 1))
    obs = su11.SU11Observables(0.98 / (4 * d.Omega), -0.05)
    split = su11.hooft_hamiltonian(obs, d)
    assert split.H == pytest.approx(0.5, abs=1e-15)

    obs = su11.SU11Observables(0.731, 0.0)
    split = su11.hooft_hamiltonian(obs, d)
    assert split.H == pytest.approx(2 * d.Omega * 0.731, rel=1e-15)
    assert split.HI == pytest.approx(2 * d.Omega * 0.731, rel=1e-15)
    assert split.HII == 0


def test_split_needs_positive_casimir(weak_damping):
    d = derive_params(weak_damping)
    with pytest.raises(NonPositiveCasimir):
        su11.hooft_hamiltonian(su11.SU11Observables(0.0, 0.1), d)
    assert su11.hooft_total(su11.SU11Observables(-1.0, 0.1), d) == pytest.approx(-2 * d.Omega - 0.02)


@given(st.floats(1e-3, 10), st.floats(-10, 10), st.floats(0.05, 3), st.floats(0, 1))
def test_split_identity(C, J2, omega, gamma):
    d = su11.DerivedParams(Gamma=gamma, Omega=omega, tau=0, K=0, B=0, L2=None)
    split = su11.hooft_hamiltonian(su11.SU11Observables(C, J2), d)
    scale = max(abs(split.HI), abs(split.HII), abs(split.H), 1e-300)
    assert abs(split.HI - split.HII - split.H) <= 1e-14 * scale * 4
    assert split.HII >= 0


def test_spectrum_levels():
    d = derive_params(OscillatorParams(1, 0, 1))
    assert su11.spectrum_level(0, 2, d).E == 1
    assert su11.spectrum_level(3, 2, d).E == 4
    for n in range(6):
        assert su11.spectrum_level(n, 0, d).E == n
    assert su11.zero_point_energy(2, d) == 1
    with pytest.raises(NegativeIndex):
        su11.spectrum_level(-1, 2, d)


def test_spectrum_linear_in_n(weak_damping):
    d = derive_params(weak_damping)
    E = [su11.spectrum_level(n, 1.3, d, hbar=0.7).E for n in range(10)]
    np.testing.assert_allclose(np.diff(E), 0.7 * d.Omega, rtol=1e-13)


def test_thermo_examples(weak_damping):
    d = derive_params(weak_damping)
    th = su11.thermo(su11.SU11Observables(0.49 / (2 * d.Omega), -0.05), d)
    assert th.T == pytest.approx(0.1)
    assert th.S == pytest.approx(-0.1)
    assert th.U == pytest.approx(0.49)
    assert th.F == pytest.approx(0.5)
    th0 = su11.thermo(su11.SU11Observables(0.3, 0.0), d)
    assert th0.S == 0 and th0.F == th0.U


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 3), st.floats(0.01, 2))
def test_free_energy_is_hamiltonian(C, J2, hbar, gamma):
    p = OscillatorParams(m=1.0, gamma=gamma, k=2.0, hbar=hbar)
    d = derive_params(p)
    obs = su11.SU11Observables(C, J2)
    th = su11.thermo(obs, d, hbar)
    assert th.F == pytest.approx(th.U - th.T * th.S, abs=1e-12)
    assert th.F == pytest.approx(su11.hooft_total(obs, d), abs=1e-12)


def test_cross_identity_worked_state(weak_damping):
    s = dy.PhaseStateRot(1, 0, 0, 0)
    d = derive_params(weak_damping)
    assert su11.hooft_total(su11.observables(s, weak_damping), d) == pytest.approx(0.5, abs=1e-12)
    assert dy.hamiltonian_xy(dy.from_rotated(s), weak_damping) == pytest.approx(0.5, abs=1e-12)


def test_cross_identity_random(rng):
    for _ in range(10):
        m, k = rng.uniform(0.3, 3, 2)
        p = OscillatorParams(m, rng.uniform(0, 1.9 * math.sqrt(m * k)), k)
        d = derive_params(p)
        states = rng.normal(size=(4, 1000))
        rot = dy.to_rotated(states)
        lhs = dy.hamiltonian_xy(states, p)
        rhs = su11.hooft_total(su11.SU11Observables(su11.casimir(rot, p, d), su11.j2(rot, p, d)), d)
        assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_poisson_brackets_vanish():
    """{C, H} = {J2, H} = 0 in the canonical variables (x1, x2, p1, p2)."""
    m, g, k = sp.symbols("m gamma k", positive=True)
    x1, x2, p1, p2 = sp.symbols("x1 x2 p1 p2")
    Gam = g / (2 * m)
    Om = sp.sqrt((k - g**2 / (4 * m)) / m)
    v1 = (p1 - g / 2 * x2) / m
    v2 = -(p2 + g / 2 * x1) / m
    C = ((p1**2 - p2**2) + m**2 * Om**2 * (x1**2 - x2**2)) / (4 * Om * m)
    J2 = m / 2 * ((v1 * x2 - v2 * x1) - Gam * (x1**2 - x2**2))
    H = 2 * Om * C - 2 * Gam * J2

    def pb(f, h):
        return sum(f.diff(q) * h.diff(p) - f.diff(p) * h.diff(q) for q, p in ((x1, p1), (x2, p2)))

    assert sp.simplify(pb(C, H)) == 0
    assert sp.simplify(pb(J2, H)) == 0
    assert sp.simplify(pb(C, J2)) == 0
    # Hamilton's equations from H reproduce the rotated-chart dynamics
    assert sp.simplify(H.diff(p1) - v1) == 0
    assert sp.simplify(H.diff(p2) - v2) == 0


def _trajectory(p, s0, periods=10):
    d = derive_params(p)
    return dy.integrate(dy.eom_xy, s0, p, 1e-3 * d.tau, periods * d.tau)


def test_conservation_along_trajectory(rng):
    p = OscillatorParams(m=0.9, gamma=0.12, k=1.3)
    traj = _trajectory(p, rng.normal(size=4))
    trace = su11.observable_trace(traj, p)
    for col in (1, 2, 3):
        assert su11.relative_drift(trace[:, col]) < 1e-8


def test_constraint_surface_closure(weak_damping):
    # x1 = 1 with v2 chosen so that J2 = 0: v1 x2 - v2 x1 = Gamma r^2
    d = derive_params(weak_damping)
    s0 = dy.from_rotated(np.array([1.0, 0.0, 0.3, -d.Gamma]))
    rot = _trajectory(weak_damping, s0).in_chart("rot").columns
    J2 = su11.j2(rot, weak_damping)
    assert abs(J2[0]) < 1e-15
    assert np.max(np.abs(J2)) < 1e-9


def test_trace_columns_and_nan_split(weak_damping):
    traj = _trajectory(weak_damping, np.array([1.0, 0.0, 0.0, 0.0]), periods=1)
    trace = su11.observable_trace(traj, weak_damping)
    assert trace.shape == (len(traj), len(su11.TRACE_COLUMNS))
    assert np.all(np.isnan(trace[:, 4]))  # C = 0 on this state
    np.testing.assert_allclose(trace[:, 8], trace[:, 3], atol=1e-14)
