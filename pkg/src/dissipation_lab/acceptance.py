"""End-to-end acceptance checks, shared by the test suite and the CLI.

Each ``criterion_*`` function runs one check at its fixed tolerance and
returns a ``CriterionResult``. Nothing here is tuned after the fact: the
tolerances below are the contract.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import doubling, dynamics, langevin, ncplane, quantum, spectral, su11
from .model import OscillatorParams, derive_params


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    checks: dict = field(default_factory=dict)
    runtime_s: float = 0.0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] criterion {self.number:2d} {self.name} ({self.runtime_s:.2f} s)"

    def as_dict(self) -> dict:
        # runtimes stay out of the report so reruns are byte-identical
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "checks": self.checks}


def _timed(number: int, name: str, budget_s: float | None = None):
    def wrap(fn: Callable[[], dict]):
        def run(*args, **kwargs) -> CriterionResult:
            start = time.perf_counter()
            checks = fn(*args, **kwargs)
            elapsed = time.perf_counter() - start
            if budget_s is not None:
                checks["runtime_within_budget"] = elapsed < budget_s
                checks["runtime_budget_s"] = budget_s
            passed = all(v for k, v in checks.items() if isinstance(v, (bool, np.bool_)))
            return CriterionResult(number, name, bool(passed), checks, elapsed)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


# 1 -------------------------------------------------------------------------

def random_underdamped_params(rng: np.random.Generator) -> OscillatorParams:
    """m, k in [0.5, 2] and Gamma/Omega below about 0.1."""
    m, k = rng.uniform(0.5, 2.0, size=2)
    gamma = rng.uniform(0.01, 0.2) * math.sqrt(m * k)
    return OscillatorParams(m=float(m), gamma=float(gamma), k=float(k))


def _nondegenerate_state(rng, p, d, floor=0.05):
    while True:
        s = rng.normal(size=4)
        rot = dynamics.to_rotated(s)
        values = (su11.casimir(rot, p, d), su11.j2(rot, p, d), dynamics.hamiltonian_xy(s, p))
        if min(abs(v) for v in values) > floor:
            return s


@_timed(1, "conservation of C, J2 and H along RK4 trajectories", budget_s=10.0)
def criterion_1(seed: int = 20240601, n_sets: int = 20, tol: float = 1e-8) -> dict:
    rng = np.random.default_rng(seed)
    worst = {"C": 0.0, "J2": 0.0, "H": 0.0}
    for _ in range(n_sets):
        p = random_underdamped_params(rng)
        d = derive_params(p)
        s0 = _nondegenerate_state(rng, p, d)
        traj = dynamics.integrate(dynamics.eom_xy, s0, p, 1e-3 * d.tau, 10 * d.tau)
        rot = traj.in_chart("rot").columns
        drifts = {
            "C": su11.relative_drift(su11.casimir(rot, p, d)),
            "J2": su11.relative_drift(su11.j2(rot, p, d)),
            "H": su11.relative_drift(dynamics.hamiltonian_xy(traj.columns, p)),
        }
        for key, val in drifts.items():
            worst[key] = max(worst[key], val)
    return {
        "max_drift_C": worst["C"], "max_drift_J2": worst["J2"], "max_drift_H": worst["H"],
        "tolerance": tol,
        "drifts_below_tolerance": max(worst.values()) < tol,
    }


# 2 -------------------------------------------------------------------------

@_timed(2, "H_xy = 2 Omega C - 2 Gamma J2 on random states")
def criterion_2(seed: int = 7, n_states: int = 10_000) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        p = random_underdamped_params(rng)
        d = derive_params(p)
        states = rng.normal(size=(4, n_states // 20))
        rot = dynamics.to_rotated(states)
        obs = su11.SU11Observables(su11.casimir(rot, p, d), su11.j2(rot, p, d))
        diff = dynamics.hamiltonian_xy(states, p) - su11.hooft_total(obs, d)
        worst = max(worst, float(np.max(np.abs(diff))))
    p = OscillatorParams(m=1.0, gamma=0.2, k=1.0)
    d = derive_params(p)
    worked = dynamics.PhaseStateRot(1.0, 0.0, 0.0, 0.0)
    h_xy = float(dynamics.hamiltonian_xy(dynamics.from_rotated(worked), p))
    h_su = float(su11.hooft_total(su11.observables(worked, p, d), d))
    return {
        "max_abs_difference": worst,
        "random_states_within_1e-10": worst < 1e-10,
        "worked_state_H_xy": h_xy,
        "worked_state_H_su11": h_su,
        "worked_state_equals_half": abs(h_xy - 0.5) < 1e-12 and abs(h_su - 0.5) < 1e-12,
    }


# 3 -------------------------------------------------------------------------

@_timed(3, "radial spectrum {1, 3, 5} and effective levels", budget_s=5.0)
def criterion_3() -> dict:
    d = derive_params(OscillatorParams(m=1.0, gamma=0.0, k=1.0))
    levels = quantum.radial_spectrum(d, m=1.0, hbar=1.0, n_grid=2000, r_max=12.0, n_levels=3)
    expected = np.array([1.0, 3.0, 5.0])
    # the n_r-th l = 0 radial level sits at effective index n = 2 n_r
    effective = np.array([su11.spectrum_level(2 * nr, 2.0, d, 1.0).E for nr in range(3)])
    ground = su11.spectrum_level(0, 2.0, d, 1.0).E
    return {
        "levels": levels,
        "max_error": float(np.max(np.abs(levels - expected))),
        "levels_within_1e-4": bool(np.all(np.abs(levels - expected) < 1e-4)),
        "matches_spectrum_level": bool(np.all(np.abs(levels - effective) < 1e-4)),
        "ground_equals_zero_point_level": abs(levels[0] - ground) < 1e-4,
    }


# 4 -------------------------------------------------------------------------

def two_level_run(n_grid=256, half_width=8.0, dt=0.01, t_end=200.0, omega=1.0):
    grid = quantum.Grid1D(-half_width, half_width, n_grid)
    V = quantum.harmonic_potential(grid, 1.0, omega)
    _, states = quantum.eigenstates(grid, V, 1.0, 1.0, 2)
    rho0 = quantum.density_from_wavefunction(quantum.superposition(states, [1.0, 1.0]))
    entry = (n_grid // 2, n_grid // 2 + 12)
    ev = quantum.evolve_doubled(rho0, V, 1.0, 1.0, dt, t_end, track=[entry])
    return ev, entry


@_timed(4, "Bohr frequency of a two-level superposition")
def criterion_4(omega: float = 1.0) -> dict:
    ev, entry = two_level_run(omega=omega)
    series = ev.tracked[entry]
    peaks = quantum.bohr_frequencies(series, ev.dt)
    resolution = quantum.frequency_resolution(series.size, ev.dt)
    dominant = peaks[0][0] if peaks else float("nan")
    return {
        "peaks": peaks,
        "resolution": resolution,
        "single_peak": len(peaks) == 1,
        "peak_at_Omega": bool(peaks) and abs(dominant - omega) <= resolution,
        "trace_drift": float(np.max(np.abs(ev.trace - 1.0))),
        "trace_preserved": float(np.max(np.abs(ev.trace - 1.0))) < 1e-8,
    }


# 5 -------------------------------------------------------------------------

@_timed(5, "Wigner function of the Gaussian ground state")
def criterion_5() -> dict:
    grid = quantum.Grid1D(-10.0, 10.0, 512)
    x = grid.x
    wf = quantum.WaveFunction(grid, np.pi ** -0.25 * np.exp(-0.5 * x**2)).normalized()
    W = quantum.wigner_transform(quantum.density_from_wavefunction(wf), 1.0)
    X, P = np.meshgrid(W.x, W.p, indexing="ij")
    sup = float(np.max(np.abs(W.W - np.exp(-X**2 - P**2) / np.pi)))
    x_marg = float(np.max(np.abs(W.x_marginal() - np.abs(wf.psi) ** 2)))
    p_marg = float(np.max(np.abs(W.p_marginal() - quantum.momentum_density(wf, W.p, 1.0))))
    return {
        "sup_error": sup, "sup_within_1e-6": sup < 1e-6,
        "x_marginal_error": x_marg, "p_marginal_error": p_marg,
        "marginals_within_1e-8": max(x_marg, p_marg) < 1e-8,
        "imag_residue_below_1e-12": W.imag_residue < 1e-12,
    }


# 6 -------------------------------------------------------------------------

@_timed(6, "fluctuation-dissipation <v^2> = kBT/m", budget_s=30.0)
def criterion_6(seed: int = 12345, n_paths: int = 10_000, dt: float = 1e-3,
                t_end: float = 10.0) -> dict:
    p = OscillatorParams(m=1.0, gamma=1.0, k=1.0)
    ens = langevin.simulate_langevin(p, 1.0, dt, t_end, n_paths, seed, record_every=1000)
    summary = ens.summary()
    replay = langevin.simulate_langevin(p, 1.0, dt, t_end, 200, seed, record_every=1000)
    same = all(np.array_equal(a.v, b.v) and np.array_equal(a.x, b.x)
               for a, b in zip(replay.paths, ens.paths[:200]))
    z = abs(summary["mean_v2"] - 1.0) / summary["stderr_v2"]
    return {
        "mean_v2": summary["mean_v2"], "stderr_v2": summary["stderr_v2"], "z_score": z,
        "within_3_stderr": z <= 3.0,
        "replay_bit_identical": same,
    }


# 7 -------------------------------------------------------------------------

@_timed(7, "imaginary action: white-noise reduction and scaling")
def criterion_7(seed: int = 3) -> dict:
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 2.0, 801)
    coeffs = rng.normal(size=5)
    y = sum(c * np.sin((j + 1) * np.pi * t / 2.0) for j, c in enumerate(coeffs))
    N0, hbar = 1.7, 0.8
    kernel = langevin.WhiteNoise(N0)
    double = langevin.imaginary_action(t, y, kernel, hbar)
    single = langevin.white_noise_action(t, y, N0, hbar)
    base = langevin.imaginary_action(t, y, kernel, hbar)
    scaled2 = langevin.imaginary_action(t, 2.0 * y, kernel, hbar)
    scaled3 = langevin.imaginary_action(t, 3.0 * y, kernel, hbar)
    zero = langevin.imaginary_action(t, np.zeros_like(t), kernel, hbar)
    return {
        "double_quadrature": double, "reduction": single,
        "reduction_within_1e-8": abs(double - single) < 1e-8,
        "lambda_2_exact": scaled2 == 4.0 * base,
        "lambda_3_relative_error": abs(scaled3 - 9.0 * base) / abs(9.0 * base),
        "lambda_3_to_rounding": abs(scaled3 - 9.0 * base) <= 1e-14 * abs(9.0 * base),
        "zero_path_zero": zero == 0.0,
    }


# 8 -------------------------------------------------------------------------

@_timed(8, "noncommutative plane: commutator, phase, uncertainty")
def criterion_8(seed: int = 11) -> dict:
    gamma, hbar = 0.2, 1.0
    p = OscillatorParams(m=1.0, gamma=gamma, k=1.0, hbar=hbar)
    _, L2 = ncplane.velocity_commutator_scale(p)
    pair = ncplane.build_nc_pair(L2, 64, hbar)
    square = ncplane.PathPolygon(np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float))
    theta = ncplane.interference_phase(square, L2)
    ground = np.zeros(64, dtype=complex)
    ground[0] = 1.0
    product0 = ncplane.uncertainty_product(ground, pair)[2]
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(200):
        psi = np.zeros(64, dtype=complex)
        psi[:20] = rng.normal(size=20) + 1j * rng.normal(size=20)
        psi /= np.linalg.norm(psi)
        worst = min(worst, ncplane.uncertainty_product(psi, pair)[2])
    return {
        "subblock_residual": pair.subblock_residual(),
        "subblock_within_1e-10": pair.subblock_residual() < 1e-10,
        "theta_unit_square": theta,
        "theta_equals_gamma_area_over_hbar": theta == gamma * 1.0 / hbar,
        "ground_product": product0,
        "ground_saturates": abs(product0 - L2 / 2) < 1e-8,
        "min_random_product": worst,
        "random_states_above_bound": worst >= L2 / 2 - 1e-8,
    }


# 9 -------------------------------------------------------------------------

@_timed(9, "spectral action momenta and Lambda scaling")
def criterion_9() -> dict:
    f = spectral.CutoffFunction("gaussian")
    quad = spectral.cutoff_momenta(f)
    exact = spectral.closed_form_momenta(f)
    err = max(abs(quad.f0 - exact.f0), abs(quad.f2 - exact.f2), abs(quad.f4 - exact.f4))
    t1 = spectral.assemble_action(quad, 0.7, 1.3, 2.1, 1.5)
    t2 = spectral.assemble_action(quad, 0.7, 1.3, 2.1, 3.0)
    return {
        "momenta": [quad.f0, quad.f2, quad.f4],
        "max_error": err,
        "momenta_within_1e-9": err < 1e-9,
        "cosmological_x16": t2.cosmological == 16.0 * t1.cosmological,
        "einstein_hilbert_x4": t2.einstein_hilbert == 4.0 * t1.einstein_hilbert,
        "yang_mills_invariant": t2.yang_mills == t1.yang_mills,
    }


# 10 ------------------------------------------------------------------------

@_timed(10, "theta-vacuum overlap and undeformed coproduct")
def criterion_10() -> dict:
    worst = 0.0
    for n_modes in range(1, 7):
        for theta in (0.0, 0.2, math.pi / 4, 1.1, 1.5):
            diff = abs(doubling.theta_vacuum_explicit(theta, n_modes) - math.cos(theta) ** n_modes)
            worst = max(worst, diff)
    mode = doubling.TruncatedMode(6)
    q1 = doubling.coproduct(mode.a_dag, 1.0).matrix
    return {
        "max_overlap_error": worst,
        "overlap_within_1e-12": worst < 1e-12,
        "q1_equals_hopf": bool(np.array_equal(q1, doubling.hopf_coproduct(mode.a_dag))),
        "theta_pi4_N10": doubling.theta_vacuum_overlap(math.pi / 4, 10),
    }


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def run_all(echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    results = []
    for crit in CRITERIA:
        res = crit()
        if echo:
            echo(res.line())
        results.append(res)
    return results


def report(results: list[CriterionResult]) -> dict:
    return {
        "all_passed": all(r.passed for r in results),
        "criteria": [r.as_dict() for r in results],
    }
