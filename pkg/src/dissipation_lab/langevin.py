"""Brownian sector: Euler-Maruyama Langevin paths and the imaginary action.

The open x-system m x'' + gamma x' = f(t) is driven by Gaussian white
noise with <f(t) f(s)> = 2 gamma kBT delta(t - s). Its closing partner y
obeys the anti-damped equation m y'' - gamma y' = 0, and nonzero y paths
are weighted by the imaginary part of the doubled action.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import trapezoid

from .dynamics import Trajectory
from .errors import IncompatibleGrids, ValidationError
from .model import OscillatorParams


class LangevinError(ValidationError):
    module = "langevin"


# -- noise kernels --------------------------------------------------------

@dataclass(frozen=True)
class WhiteNoise:
    N0: float

    def __post_init__(self):
        if not self.N0 >= 0:
            raise LangevinError(f"white-noise strength must be >= 0, got {self.N0!r}")


@dataclass(frozen=True)
class SampledKernel:
    """N(tau) tabulated at lags ``0, dt, 2 dt, ...``; N(-tau) = N(tau) is implied."""

    lags: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        lags = np.asarray(self.lags, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if lags.shape != values.shape or lags.ndim != 1 or lags.size < 2:
            raise LangevinError("kernel lags and values must be matching 1-d arrays")
        if lags[0] != 0 or np.any(np.diff(lags) <= 0):
            raise LangevinError("kernel lags must start at 0 and increase")
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, func, dt: float, n: int) -> "SampledKernel":
        lags = dt * np.arange(n)
        return cls(lags, np.asarray(func(lags), dtype=float))


NoiseKernel = WhiteNoise | SampledKernel


# -- Langevin ensemble ----------------------------------------------------

@dataclass(frozen=True)
class StochasticPath:
    times: np.ndarray
    x: np.ndarray
    v: np.ndarray
    seed: tuple

    def __post_init__(self):
        if not (len(self.times) == len(self.x) == len(self.v)):
            raise LangevinError("times, x and v must have equal length")


@dataclass(frozen=True)
class Ensemble:
    paths: Sequence[StochasticPath]
    params: OscillatorParams
    kBT: float
    seed: int
    spring: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return self.paths[0].times

    def final_velocities(self) -> np.ndarray:
        return np.array([path.v[-1] for path in self.paths])

    def velocity_matrix(self) -> np.ndarray:
        return np.vstack([path.v for path in self.paths])

    def summary(self) -> dict:
        """Stationary <v^2> estimate from the final time slice."""
        v2 = self.final_velocities() ** 2
        n = len(v2)
        stderr = float(np.std(v2, ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
        return {
            "n_paths": n,
            "kBT": self.kBT,
            "mean_v2": float(np.mean(v2)),
            "stderr_v2": stderr,
            "seed": self.seed,
        }


def path_seeds(seed: int, n_paths: int) -> list[np.random.SeedSequence]:
    """One independent child stream per path, derived from ``seed``."""
    return np.random.SeedSequence(seed).spawn(n_paths)


def force_samples(p: OscillatorParams, kBT: float, dt: float, n_steps: int,
                  seed_seq: np.random.SeedSequence) -> np.ndarray:
    """Discrete random force f_i with <f_i f_j> = (2 gamma kBT / dt) delta_ij."""
    xi = np.random.default_rng(seed_seq).standard_normal(n_steps)
    return math.sqrt(2.0 * p.gamma * kBT / dt) * xi


def simulate_langevin(
    p: OscillatorParams,
    kBT: float,
    dt: float,
    t_end: float,
    n_paths: int,
    seed: int,
    x0: float = 0.0,
    v0: float = 0.0,
    spring: bool = False,
    record_every: int = 1,
    chunk: int = 1000,
) -> Ensemble:
    """Euler-Maruyama integration of ``n_paths`` independent Brownian paths.

    m dv = (-gamma v - [k x]) dt + sqrt(2 gamma kBT dt) xi. The spring
    term is off by default. Path ``i`` draws its noise from child ``i`` of
    ``SeedSequence(seed)``, so any path replays exactly regardless of
    ``chunk``. Only every ``record_every``-th step is stored.
    """
    if not dt > 0 or not t_end > 0:
        raise LangevinError(f"need dt > 0 and t_end > 0, got dt={dt!r}, t_end={t_end!r}")
    if n_paths < 1:
        raise LangevinError(f"n_paths must be >= 1, got {n_paths!r}")
    if not kBT >= 0:
        raise LangevinError(f"kBT must be >= 0, got {kBT!r}")
    if record_every < 1:
        raise LangevinError("record_every must be >= 1")
    n_steps = int(math.floor(t_end / dt + 1e-9))
    keep = np.arange(0, n_steps + 1, record_every)
    if keep[-1] != n_steps:
        keep = np.append(keep, n_steps)
    times = dt * keep
    seeds = path_seeds(seed, n_paths)
    k_over_m = p.k / p.m if spring else 0.0
    damp = p.gamma / p.m * dt
    paths = []
    for start in range(0, n_paths, chunk):
        block = seeds[start:start + chunk]
        forces = np.vstack([force_samples(p, kBT, dt, n_steps, s) for s in block])
        kick = forces * (dt / p.m)
        x = np.full(len(block), float(x0))
        v = np.full(len(block), float(v0))
        xs = np.empty((len(block), keep.size))
        vs = np.empty_like(xs)
        xs[:, 0], vs[:, 0] = x, v
        slot = 1
        for i in range(n_steps):
            x, v = x + v * dt, v - damp * v - k_over_m * x * dt + kick[:, i]
            if slot < keep.size and keep[slot] == i + 1:
                xs[:, slot], vs[:, slot] = x, v
                slot += 1
        for j, s in enumerate(block):
            paths.append(StochasticPath(times, xs[j], vs[j], tuple(s.spawn_key)))
    return Ensemble(paths, p, kBT, seed, spring)


def y_system_check(p: OscillatorParams, y0: float, dt: float, t_end: float,
                   vy0: float = 0.0) -> Trajectory:
    """Integrate the closing equation m y'' - gamma y' = 0 with RK4.

    Returned in the (x, y) chart with x and vx identically zero.
    """
    from .dynamics import integrate

    def eom(s, params):
        _, _, _, vy = s
        return np.array([0.0 * vy, vy, 0.0 * vy, params.gamma * vy / params.m])

    return integrate(eom, np.array([0.0, y0, 0.0, vy0]), p, dt, t_end, chart="xy")


def y_system_closed_form(p: OscillatorParams, y0: float, vy0: float, t):
    t = np.asarray(t, dtype=float)
    if p.gamma == 0:
        return y0 + vy0 * t, np.full_like(t, vy0)
    rate = p.gamma / p.m
    return y0 + vy0 * np.expm1(rate * t) / rate, vy0 * np.exp(rate * t)


# -- imaginary action -----------------------------------------------------

def _uniform_step(times: np.ndarray) -> float:
    steps = np.diff(times)
    if steps.size == 0 or np.any(steps <= 0):
        raise IncompatibleGrids("path times must be strictly increasing with >= 2 points")
    dt = steps.mean()
    if np.max(np.abs(steps - dt)) > 1e-9 * dt:
        raise IncompatibleGrids("path times must be uniformly spaced")
    return float(dt)


def trapezoid_weights(n: int, dt: float) -> np.ndarray:
    w = np.full(n, dt)
    w[0] = w[-1] = 0.5 * dt
    return w


def kernel_matrix(kernel: NoiseKernel, times: np.ndarray) -> np.ndarray:
    """N(t_i - t_j) on the path grid.

    The white-noise delta becomes ``N0 / w_i`` on the diagonal, with w_i
    the trapezoid weight (N0/dt in the interior), so the double quadrature
    collapses onto the single trapezoid integral.
    """
    times = np.asarray(times, dtype=float)
    dt = _uniform_step(times)
    n = times.size
    if isinstance(kernel, WhiteNoise):
        return np.diag(kernel.N0 / trapezoid_weights(n, dt))
    kdt = kernel.lags[1] - kernel.lags[0]
    if abs(kdt - dt) > 1e-9 * dt or np.max(np.abs(np.diff(kernel.lags) - kdt)) > 1e-9 * kdt:
        raise IncompatibleGrids(f"kernel lag spacing {kdt!r} differs from path spacing {dt!r}")
    if kernel.lags.size < n:
        raise IncompatibleGrids(
            f"kernel covers {kernel.lags.size} lags but the path needs {n}")
    idx = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    return kernel.values[idx]


def imaginary_action(times, y, kernel: NoiseKernel, hbar: float = 1.0) -> float:
    """Im S = (1 / 2 hbar) double integral of N(t - s) y(t) y(s), trapezoid rule."""
    times = np.asarray(times, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.shape != times.shape:
        raise IncompatibleGrids(f"path values {y.shape} do not match times {times.shape}")
    if not hbar > 0:
        raise LangevinError(f"hbar must be > 0, got {hbar!r}")
    w = trapezoid_weights(times.size, _uniform_step(times))
    wy = w * y
    return float(wy @ kernel_matrix(kernel, times) @ wy / (2.0 * hbar))


def white_noise_action(times, y, N0: float, hbar: float = 1.0) -> float:
    """Closed reduction (N0 / 2 hbar) * integral of y^2 for a delta kernel."""
    return float(N0 / (2.0 * hbar) * trapezoid(np.asarray(y) ** 2, np.asarray(times)))
