"""SU(1,1) observables of the doubled oscillator and the 't Hooft picture.

The Casimir C and the generator J2 are conserved by the doubled dynamics;
the Hamiltonian is H = 2 Omega C - 2 Gamma J2. Splitting H = HI - HII and
imposing J2 = 0 leaves the radial oscillator HI = 2 Omega C, whose
effective levels are hbar Omega (n + alpha/2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import State, Trajectory, _vec, canonical_momenta
from .errors import NegativeIndex, NonPositiveCasimir
from .model import DerivedParams, OscillatorParams, derive_params

DEFAULT_ALPHA = 2.0


@dataclass(frozen=True)
class SU11Observables:
    C: float
    J2: float


@dataclass(frozen=True)
class HooftSplit:
    H: float
    HI: float
    HII: float


@dataclass(frozen=True)
class ThermoState:
    T: float
    S: float
    U: float
    F: float


@dataclass(frozen=True)
class SpectrumLevel:
    n: int
    alpha: float
    E: float


def casimir(s: State, p: OscillatorParams, d: DerivedParams | None = None):
    """Casimir of the rotated-chart state ``s``.

    C = [(p1^2 - p2^2) + m^2 Omega^2 (x1^2 - x2^2)] / (4 Omega m)
    """
    d = d or derive_params(p)
    x1, x2, _, _ = _vec(s)
    p1, p2 = canonical_momenta(s, p)
    return ((p1**2 - p2**2) + (p.m * d.Omega) ** 2 * (x1**2 - x2**2)) / (4.0 * d.Omega * p.m)


def j2(s: State, p: OscillatorParams, d: DerivedParams | None = None):
    """Second SU(1,1) generator of the rotated-chart state ``s``.

    The radius uses the pseudo-Euclidean metric r^2 = x1^2 - x2^2; only
    with that signature is J2 conserved and H = 2 Omega C - 2 Gamma J2.
    """
    d = d or derive_params(p)
    x1, x2, v1, v2 = _vec(s)
    r2 = x1**2 - x2**2
    return 0.5 * p.m * ((v1 * x2 - v2 * x1) - d.Gamma * r2)


def observables(s: State, p: OscillatorParams, d: DerivedParams | None = None) -> SU11Observables:
    d = d or derive_params(p)
    return SU11Observables(C=casimir(s, p, d), J2=j2(s, p, d))


def hooft_total(obs: SU11Observables, d: DerivedParams):
    return 2.0 * d.Omega * obs.C - 2.0 * d.Gamma * obs.J2


def hooft_hamiltonian(obs: SU11Observables, d: DerivedParams) -> HooftSplit:
    """Split H into HI - HII; requires a positive Casimir."""
    C, J2 = np.asarray(obs.C), np.asarray(obs.J2)
    if np.any(C <= 0):
        raise NonPositiveCasimir(f"the HI/HII split needs C > 0, got C={obs.C!r}")
    two_omega_c = 2.0 * d.Omega * C
    HI = (two_omega_c - d.Gamma * J2) ** 2 / two_omega_c
    HII = d.Gamma**2 * J2**2 / two_omega_c
    return HooftSplit(H=hooft_total(obs, d), HI=HI[()], HII=HII[()])


def spectrum_level(n: int, alpha: float, d: DerivedParams, hbar: float = 1.0) -> SpectrumLevel:
    if int(n) != n or n < 0:
        raise NegativeIndex(f"level index must be a non-negative integer, got {n!r}")
    return SpectrumLevel(n=int(n), alpha=alpha, E=hbar * d.Omega * (n + 0.5 * alpha))


def zero_point_energy(alpha: float, d: DerivedParams, hbar: float = 1.0) -> float:
    return 0.5 * hbar * d.Omega * alpha


def thermo(obs: SU11Observables, d: DerivedParams, hbar: float = 1.0) -> ThermoState:
    """Thermodynamic reading of H: temperature hbar Gamma, entropy 2 J2 / hbar.

    With U = 2 Omega C the free energy F = U - T S coincides with H.
    """
    T = hbar * d.Gamma
    S = 2.0 * obs.J2 / hbar
    U = 2.0 * d.Omega * obs.C
    return ThermoState(T=T, S=S, U=U, F=U - T * S)


TRACE_COLUMNS = ("t", "C", "J2", "H", "HI", "HII", "T", "S", "F")


def observable_trace(traj: Trajectory, p: OscillatorParams, hbar: float | None = None) -> np.ndarray:
    """Columns ``TRACE_COLUMNS`` evaluated along a trajectory (either chart).

    HI and HII are NaN when C <= 0, where the split does not exist.
    """
    hbar = p.hbar if hbar is None else hbar
    d = derive_params(p)
    cols = traj.in_chart("rot").columns
    obs = SU11Observables(C=casimir(cols, p, d), J2=j2(cols, p, d))
    n = len(traj.t)
    H = hooft_total(obs, d)
    if np.all(obs.C > 0):
        split = hooft_hamiltonian(obs, d)
        HI, HII = split.HI, split.HII
    else:
        # the split is undefined off the C > 0 sector
        HI = HII = np.full(n, np.nan)
    th = thermo(obs, d, hbar)
    return np.column_stack([traj.t, obs.C, obs.J2, H, HI, HII, np.full(n, th.T), th.S, th.F])


def relative_drift(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=float)
    ref = abs(values[0])
    if ref == 0:
        return float(np.max(np.abs(values - values[0])))
    return float(np.max(np.abs(values - values[0])) / ref)
