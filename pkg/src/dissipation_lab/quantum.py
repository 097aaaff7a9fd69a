"""Density matrices in doubled coordinates on a 1-d grid.

rho[i, j] samples <x+ = x_i | rho | x- = x_j>. The forward coordinate x+
and the backward coordinate x- each evolve under their own Schroedinger
equation, so i hbar d(rho)/dt = H+ rho - rho H-. The time dependence of
any entry therefore oscillates at the Bohr frequencies (E_n - E_m)/hbar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import linalg
from scipy.signal import find_peaks

from .errors import (
    CFLViolation,
    GridTooCoarse,
    InsufficientSamples,
    UnnormalizedInput,
    ValidationError,
)
from .model import DerivedParams


class QuantumError(ValidationError):
    module = "quantum"


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 16:
            raise QuantumError(f"grid needs at least 16 points, got {self.n}")
        if not self.x_max > self.x_min:
            raise QuantumError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)


@dataclass(frozen=True)
class WaveFunction:
    grid: Grid1D
    psi: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=complex)
        if psi.shape != (self.grid.n,) or not np.all(np.isfinite(psi)):
            raise QuantumError("psi must be a finite vector matching the grid")
        object.__setattr__(self, "psi", psi)

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.grid.dx)

    def normalized(self) -> "WaveFunction":
        return WaveFunction(self.grid, self.psi / math.sqrt(self.norm))


@dataclass(frozen=True)
class DensityMatrix:
    grid: Grid1D
    rho: np.ndarray
    psi: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (self.grid.n, self.grid.n):
            raise QuantumError(f"rho shape {rho.shape} does not match grid size {self.grid.n}")
        object.__setattr__(self, "rho", rho)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)) * self.grid.dx)

    @property
    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    @property
    def purity(self) -> float:
        dx = self.grid.dx
        return float(np.real(np.sum(self.rho * self.rho.T)) * dx * dx)

    @property
    def is_pure(self) -> bool:
        return self.psi is not None

    def position_density(self) -> np.ndarray:
        return np.real(np.diag(self.rho))


@dataclass(frozen=True)
class WignerFunction:
    x: np.ndarray
    p: np.ndarray
    W: np.ndarray
    imag_residue: float

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def dp(self) -> float:
        return float(self.p[1] - self.p[0])

    @property
    def normalization(self) -> float:
        return float(self.W.sum() * self.dx * self.dp)

    def x_marginal(self) -> np.ndarray:
        return self.W.sum(axis=1) * self.dp

    def p_marginal(self) -> np.ndarray:
        return self.W.sum(axis=0) * self.dx


def density_from_wavefunction(wf: WaveFunction, tol: float = 1e-8) -> DensityMatrix:
    """Pure-state density rho[i, j] = psi[i] conj(psi[j])."""
    if abs(wf.norm - 1.0) > tol:
        raise UnnormalizedInput(f"wavefunction norm {wf.norm!r} differs from 1 by more than {tol}")
    return DensityMatrix(wf.grid, np.outer(wf.psi, wf.psi.conj()), psi=wf.psi.copy())


def mixed_density(states: Sequence[WaveFunction], weights: Sequence[float]) -> DensityMatrix:
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or not math.isclose(weights.sum(), 1.0, rel_tol=1e-12):
        raise QuantumError("mixture weights must be non-negative and sum to 1")
    grid = states[0].grid
    rho = sum(w * np.outer(s.psi, s.psi.conj()) for w, s in zip(weights, states))
    return DensityMatrix(grid, rho)


# -- Hamiltonians ----------------------------------------------------------

def harmonic_potential(grid: Grid1D, m: float, omega: float) -> np.ndarray:
    return 0.5 * m * omega**2 * grid.x**2


def hamiltonian_bands(grid: Grid1D, potential, m: float, hbar: float):
    """Diagonal and off-diagonal of -(hbar^2/2m) d^2/dx^2 + V with hard walls."""
    potential = np.asarray(potential, dtype=float)
    if potential.shape != (grid.n,):
        raise QuantumError("potential must be sampled on the grid")
    kin = hbar**2 / (2.0 * m * grid.dx**2)
    return 2.0 * kin + potential, np.full(grid.n - 1, -kin)


def hamiltonian_matrix(grid: Grid1D, potential, m: float, hbar: float) -> np.ndarray:
    diag, off = hamiltonian_bands(grid, potential, m, hbar)
    return np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)


def eigenstates(grid: Grid1D, potential, m: float, hbar: float, n_states: int):
    """Lowest discrete eigenpairs; wavefunctions normalized with the grid measure."""
    diag, off = hamiltonian_bands(grid, potential, m, hbar)
    energies, vecs = linalg.eigh_tridiagonal(diag, off, select="i", select_range=(0, n_states - 1))
    states = [WaveFunction(grid, vecs[:, i] / math.sqrt(grid.dx)) for i in range(n_states)]
    return energies, states


def superposition(states: Sequence[WaveFunction], coeffs: Sequence[complex]) -> WaveFunction:
    psi = sum(c * s.psi for c, s in zip(coeffs, states))
    return WaveFunction(states[0].grid, psi).normalized()


# -- doubled evolution -----------------------------------------------------

@dataclass
class DensityEvolution:
    """Result of ``evolve_doubled``.

    ``snapshots`` holds full density matrices at ``snapshot_times``;
    ``tracked`` maps each requested (i, j) to its value at every step, and
    ``trace`` / ``hermiticity`` are monitored at every snapshot.
    """

    grid: Grid1D
    dt: float
    times: np.ndarray
    snapshot_times: np.ndarray
    snapshots: list
    tracked: dict
    trace: np.ndarray
    hermiticity: np.ndarray

    def __iter__(self):
        return iter(self.snapshots)


def _cayley(H: np.ndarray, dt: float, hbar: float) -> np.ndarray:
    n = H.shape[0]
    a = 0.5j * dt / hbar * H
    eye = np.eye(n)
    return linalg.solve(eye + a, eye - a)


def _rk4_propagator(H: np.ndarray, dt: float, hbar: float) -> np.ndarray:
    z = -1j * dt / hbar * H
    z2 = z @ z
    return np.eye(H.shape[0]) + z + z2 / 2 + z2 @ z / 6 + z2 @ z2 / 24


# RK4 is stable on the imaginary axis for |dt * E / hbar| <= 2 sqrt(2)
RK4_IMAG_BOUND = 2.0 * math.sqrt(2.0)


def evolve_doubled(
    rho0: DensityMatrix,
    potential,
    m: float,
    hbar: float,
    dt: float,
    t_end: float,
    scheme: str = "cn",
    record_every: int = 0,
    track: Sequence[tuple] = (),
    force_matrix: bool = False,
) -> DensityEvolution:
    """Advance rho under H+ acting on x+ and H- acting on x-.

    The default Crank-Nicolson step U = (1 + i H dt/2hbar)^-1 (1 - i H dt/2hbar)
    is unitary, so rho -> U rho U^dagger preserves trace and Hermiticity
    for any dt. Pure states are evolved through their psi factor unless
    ``force_matrix`` is set. ``scheme="rk4"`` selects an explicit step and
    raises ``CFLViolation`` outside its stability bound.
    ``record_every=0`` keeps only the first and last snapshots.
    """
    if not dt > 0 or not t_end > 0:
        raise QuantumError(f"need dt > 0 and t_end > 0, got dt={dt!r}, t_end={t_end!r}")
    grid = rho0.grid
    H = hamiltonian_matrix(grid, potential, m, hbar)
    if scheme == "cn":
        U = _cayley(H, dt, hbar)
    elif scheme == "rk4":
        diag, off = hamiltonian_bands(grid, potential, m, hbar)
        e_max = float(np.max(np.abs(diag)) + 2.0 * np.max(np.abs(off)))
        if dt * e_max / hbar > RK4_IMAG_BOUND:
            raise CFLViolation(
                f"explicit RK4 needs dt <= {RK4_IMAG_BOUND * hbar / e_max:.3e}, got {dt:.3e}")
        U = _rk4_propagator(H, dt, hbar)
    else:
        raise QuantumError(f"unknown scheme {scheme!r}")

    n_steps = int(math.floor(t_end / dt + 1e-9))
    times = dt * np.arange(n_steps + 1)
    every = record_every if record_every > 0 else n_steps
    snap_idx = set(range(0, n_steps + 1, every)) | {n_steps}
    track = [tuple(ij) for ij in track]
    tracked = {ij: np.empty(n_steps + 1, dtype=complex) for ij in track}
    rows = np.array([ij[0] for ij in track], dtype=int)
    cols = np.array([ij[1] for ij in track], dtype=int)
    snapshots, snap_times, traces, herm = [], [], [], []

    pure = rho0.is_pure and not force_matrix
    psi = rho0.psi.astype(complex) if pure else None
    rho = None if pure else rho0.rho.copy()
    Udag = U.conj().T
    for step in range(n_steps + 1):
        if step > 0:
            if pure:
                psi = U @ psi
            else:
                rho = U @ rho @ Udag
        if track:
            vals = psi[rows] * psi[cols].conj() if pure else rho[rows, cols]
            for ij, v in zip(track, vals):
                tracked[ij][step] = v
        if step in snap_idx:
            current = np.outer(psi, psi.conj()) if pure else rho.copy()
            dm = DensityMatrix(grid, current, psi=psi.copy() if pure else None)
            snapshots.append(dm)
            snap_times.append(times[step])
            traces.append(dm.trace)
            herm.append(dm.hermiticity_error)
    return DensityEvolution(grid, dt, times, np.array(snap_times), snapshots, tracked,
                            np.array(traces), np.array(herm))


# -- spectral analysis -----------------------------------------------------

def bohr_frequencies(series, dt: float, rel_floor: float = 1e-3,
                     min_samples: int = 256) -> list[tuple[float, float]]:
    """Angular frequencies present in a sampled density-matrix entry.

    Returns ``(omega, amplitude)`` pairs for spectral peaks of the
    mean-removed, Hann-windowed series, sorted by frequency. Power from
    +omega and -omega is folded together; peak positions are refined by
    parabolic interpolation of the log power. Peaks weaker than
    ``rel_floor`` times the series' peak-to-peak scale are dropped.
    The frequency resolution is 2 pi / (n dt).
    """
    z = np.asarray(series, dtype=complex)
    n = z.size
    if n < min_samples:
        raise InsufficientSamples(f"need at least {min_samples} samples, got {n}")
    if not dt > 0:
        raise QuantumError("dt must be positive")
    window = np.hanning(n)
    scale = window.sum()
    centered = z - z.mean()
    re = np.fft.rfft(centered.real * window)
    im = np.fft.rfft(centered.imag * window)
    # amplitude of a +-omega pair folded onto omega >= 0
    amp = np.sqrt(np.abs(re) ** 2 + np.abs(im) ** 2) * 2.0 / scale
    omega = 2.0 * np.pi * np.fft.rfftfreq(n, dt)
    span = float(np.max(np.abs(centered))) if n else 0.0
    floor = max(rel_floor * span, 1e-12)
    peaks, _ = find_peaks(amp, height=floor)
    out = []
    for k in peaks:
        if k < 2 or k >= amp.size - 1:
            continue
        a, b, c = np.log(amp[k - 1:k + 2])
        denom = a - 2 * b + c
        shift = 0.5 * (a - c) / denom if denom != 0 else 0.0
        out.append((float(omega[k] + shift * (omega[1] - omega[0])), float(amp[k])))
    return sorted(out)


def frequency_resolution(n_samples: int, dt: float) -> float:
    return 2.0 * np.pi / (n_samples * dt)


# -- Wigner transform ------------------------------------------------------

def wigner_transform(rho: DensityMatrix, hbar: float = 1.0) -> WignerFunction:
    """W(x, p) = (1/2 pi hbar) int rho(x + y/2, x - y/2) exp(-i p y / hbar) dy.

    The relative coordinate y = 2 j dx stays on grid points; the integral
    becomes an FFT over j, giving p_k = pi hbar k / (n dx). Entries with
    x +- y/2 outside the grid are zero.
    """
    grid = rho.grid
    n, dx = grid.n, grid.dx
    j = np.arange(-(n // 2), n - n // 2)
    i = np.arange(n)[:, None]
    plus, minus = i + j[None, :], i - j[None, :]
    inside = (plus >= 0) & (plus < n) & (minus >= 0) & (minus < n)
    band = np.where(inside, rho.rho[np.clip(plus, 0, n - 1), np.clip(minus, 0, n - 1)], 0.0)
    spectrum = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(band, axes=1), axis=1), axes=1)
    W = spectrum * dx / (np.pi * hbar)
    p = np.pi * hbar * j / (n * dx)
    return WignerFunction(grid.x, p, W.real.copy(), float(np.max(np.abs(W.imag))))


def momentum_density(wf: WaveFunction, p, hbar: float = 1.0) -> np.ndarray:
    """|phi(p)|^2 with phi(p) = (2 pi hbar)^(-1/2) sum psi(x) exp(-i p x/hbar) dx."""
    phase = np.exp(-1j * np.outer(np.asarray(p), wf.grid.x) / hbar)
    phi = phase @ wf.psi * wf.grid.dx / math.sqrt(2.0 * np.pi * hbar)
    return np.abs(phi) ** 2


# -- radial oscillator -----------------------------------------------------

def _radial_levels(K: float, m: float, hbar: float, n_grid: int, r_max: float, n_levels: int):
    # Cell-centred grid r_i = (i + 1/2) h with u = sqrt(r) R; fluxes r dR/dr
    # at the cell faces absorb the 1/(4 r^2) term of the u equation.
    h = r_max / n_grid
    rc = h * (np.arange(n_grid) + 0.5)
    rp, rm = rc + 0.5 * h, rc - 0.5 * h
    c = hbar**2 / (2.0 * m * h * h)
    diag = c * (rp + rm) / rc + 0.5 * K * rc**2
    off = -c * rp[:-1] / np.sqrt(rc[:-1] * rc[1:])
    return linalg.eigh_tridiagonal(diag, off, select="i", select_range=(0, n_levels - 1),
                                   eigvals_only=True)


def radial_spectrum(d: DerivedParams, m: float, hbar: float = 1.0, n_grid: int = 2000,
                    r_max: float = 12.0, n_levels: int = 3, rtol: float = 1e-3) -> np.ndarray:
    """Lowest l = 0 levels of p_r^2/2m + K r^2/2 in two dimensions.

    Exact values are hbar Omega (2 n_r + 1). Convergence is checked by
    re-solving on half the grid; ``GridTooCoarse`` is raised when the two
    disagree by more than ``rtol`` or the box is less than six oscillator
    lengths beyond the highest turning point.
    """
    if n_levels < 1 or n_grid < 16:
        raise QuantumError("need n_levels >= 1 and n_grid >= 16")
    K = m * d.Omega**2
    levels = _radial_levels(K, m, hbar, n_grid, r_max, n_levels)
    osc_len = math.sqrt(hbar / (m * d.Omega))
    turning = math.sqrt(2.0 * levels[-1] / K)
    if r_max < turning + 6.0 * osc_len:
        raise GridTooCoarse(
            f"r_max={r_max} leaves less than 6 oscillator lengths past r={turning:.3g}")
    coarse = _radial_levels(K, m, hbar, n_grid // 2, r_max, n_levels)
    change = np.max(np.abs(coarse - levels) / np.abs(levels))
    if change > rtol:
        raise GridTooCoarse(f"levels moved by {change:.2e} (relative) on grid halving")
    return levels
