"""Classical doubled oscillator: equations of motion in both charts.

The damped x-oscillator and its time-reversed (amplified) y-copy form a
closed Hamiltonian system. States live either in the (x, y) chart or in
the rotated chart x1 = (x + y)/sqrt(2), x2 = (x - y)/sqrt(2).

State vectors are ordered ``(x, y, vx, vy)`` or ``(x1, x2, v1, v2)``.
Every function that takes a state also accepts a plain array whose first
axis has length 4, so whole trajectories can be evaluated at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Literal, NamedTuple, Union

import numpy as np
from scipy.integrate import solve_ivp

from .errors import StepUnderflow, ValidationError, ZeroCharge
from .model import OscillatorParams

SQRT2 = math.sqrt(2.0)


class DynamicsError(ValidationError):
    module = "dynamics"


@dataclass(frozen=True)
class PhaseStateXY:
    x: float
    y: float
    vx: float
    vy: float
    t: float = 0.0

    def __post_init__(self):
        _check_finite(self.as_array(), self.t)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.vx, self.vy], dtype=float)


@dataclass(frozen=True)
class PhaseStateRot:
    x1: float
    x2: float
    v1: float
    v2: float
    t: float = 0.0

    def __post_init__(self):
        _check_finite(self.as_array(), self.t)

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.v1, self.v2], dtype=float)


State = Union[PhaseStateXY, PhaseStateRot, np.ndarray]
Chart = Literal["xy", "rot"]

CSV_COLUMNS = {"xy": ("t", "x", "y", "vx", "vy"), "rot": ("t", "x1", "x2", "v1", "v2")}


def _check_finite(values, t):
    if not (np.all(np.isfinite(values)) and math.isfinite(t)):
        raise DynamicsError(f"non-finite state entries {values!r} at t={t!r}")


def _vec(s: State) -> np.ndarray:
    if isinstance(s, (PhaseStateXY, PhaseStateRot)):
        return s.as_array()
    arr = np.asarray(s, dtype=float)
    if arr.shape[0] != 4:
        raise DynamicsError(f"state arrays need a leading axis of length 4, got {arr.shape}")
    return arr


def _state_like(template: State, values: np.ndarray, cls):
    if isinstance(template, (PhaseStateXY, PhaseStateRot)):
        return cls(*(float(v) for v in values), t=template.t)
    return values


# -- charts ---------------------------------------------------------------

def to_rotated(s: State) -> State:
    """Map an (x, y) state onto the rotated chart.

    Positions and velocities transform with the same orthogonal matrix.
    """
    x, y, vx, vy = _vec(s)
    out = np.array([(x + y) / SQRT2, (x - y) / SQRT2, (vx + vy) / SQRT2, (vx - vy) / SQRT2])
    return _state_like(s, out, PhaseStateRot)


def from_rotated(s: State) -> State:
    x1, x2, v1, v2 = _vec(s)
    out = np.array([(x1 + x2) / SQRT2, (x1 - x2) / SQRT2, (v1 + v2) / SQRT2, (v1 - v2) / SQRT2])
    return _state_like(s, out, PhaseStateXY)


# -- equations of motion -------------------------------------------------

def eom_xy(s: State, p: OscillatorParams) -> np.ndarray:
    """Time derivative of ``(x, y, vx, vy)``.

    x obeys m x'' + gamma x' + k x = 0 and y the amplified copy
    m y'' - gamma y' + k y = 0.
    """
    x, y, vx, vy = _vec(s)
    return np.array([vx, vy, (-p.gamma * vx - p.k * x) / p.m, (p.gamma * vy - p.k * y) / p.m])


def eom_rot(s: State, p: OscillatorParams) -> np.ndarray:
    """Time derivative of ``(x1, x2, v1, v2)``; damping couples the two."""
    x1, x2, v1, v2 = _vec(s)
    return np.array([v1, v2, -(p.gamma * v2 + p.k * x1) / p.m, -(p.gamma * v1 + p.k * x2) / p.m])


_CHART_OF = {eom_xy: "xy", eom_rot: "rot"}


# -- trajectories ---------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    """Time series of states sampled on the lattice ``t = i * dt``.

    ``data`` has shape ``(n_samples, 4)`` in the column order of ``chart``.
    """

    chart: Chart
    t: np.ndarray
    data: np.ndarray
    dt: float

    def __post_init__(self):
        if self.data.shape != (len(self.t), 4):
            raise DynamicsError(f"data shape {self.data.shape} does not match {len(self.t)} times")
        if len(self.t) > 1 and np.any(np.diff(self.t) <= 0):
            raise DynamicsError("trajectory times must be strictly increasing")

    def __len__(self):
        return len(self.t)

    @property
    def columns(self) -> np.ndarray:
        """State components with shape ``(4, n_samples)``."""
        return self.data.T

    def states(self) -> Iterator[Union[PhaseStateXY, PhaseStateRot]]:
        cls = PhaseStateXY if self.chart == "xy" else PhaseStateRot
        for ti, row in zip(self.t, self.data):
            yield cls(*(float(v) for v in row), t=float(ti))

    def in_chart(self, chart: Chart) -> "Trajectory":
        if chart == self.chart:
            return self
        convert = to_rotated if chart == "rot" else from_rotated
        return Trajectory(chart, self.t, np.asarray(convert(self.columns)).T.copy(), self.dt)

    def csv_header(self) -> tuple:
        return CSV_COLUMNS[self.chart]


def _rk4(f, y0, dt, n_steps):
    out = np.empty((n_steps + 1, y0.size))
    out[0] = y = y0
    half = 0.5 * dt
    sixth = dt / 6.0
    for i in range(n_steps):
        k1 = f(y)
        k2 = f(y + half * k1)
        k3 = f(y + half * k2)
        k4 = f(y + dt * k3)
        y = y + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = y
    return out


def integrate(
    eom: Callable[[State, OscillatorParams], np.ndarray],
    s0: State,
    p: OscillatorParams,
    dt: float,
    t_end: float,
    method: Literal["rk4", "adaptive"] = "rk4",
    rtol: float = 1e-10,
    atol: float = 1e-13,
    min_step: float = 1e-14,
    chart: Chart | None = None,
) -> Trajectory:
    """Integrate ``eom`` from ``s0`` and sample on the ``dt`` lattice.

    ``rk4`` takes fixed steps of size ``dt``. ``adaptive`` uses an
    embedded 8(5,3) Dormand-Prince pair with the given tolerances and
    resamples its dense output onto the lattice; a step collapsing below
    ``min_step`` raises ``StepUnderflow``.
    """
    if not dt > 0 or not t_end > 0:
        raise DynamicsError(f"need dt > 0 and t_end > 0, got dt={dt!r}, t_end={t_end!r}")
    if chart is None:
        chart = _CHART_OF.get(eom)
        if chart is None:
            chart = "rot" if isinstance(s0, PhaseStateRot) else "xy"
    y0 = _vec(s0).astype(float)
    t0 = s0.t if isinstance(s0, (PhaseStateXY, PhaseStateRot)) else 0.0
    n_steps = int(math.floor(t_end / dt + 1e-9))
    if n_steps < 1:
        raise DynamicsError(f"t_end={t_end!r} shorter than one step dt={dt!r}")
    times = t0 + dt * np.arange(n_steps + 1)

    def f(y):
        return eom(y, p)

    if method == "rk4":
        data = _rk4(f, y0, dt, n_steps)
    elif method == "adaptive":
        sol = solve_ivp(
            lambda _t, y: f(y), (times[0], times[-1]), y0, method="DOP853",
            t_eval=times, rtol=rtol, atol=atol, first_step=min(dt, times[-1] - times[0]),
        )
        if sol.status != 0:
            raise StepUnderflow(f"adaptive integration failed: {sol.message}")
        steps = np.diff(sol.t)
        if steps.size and steps.min() < min_step:
            raise StepUnderflow(f"step collapsed to {steps.min():.3e} < floor {min_step:.1e}")
        data = sol.y.T
    else:
        raise DynamicsError(f"unknown integration method {method!r}")
    return Trajectory(chart, times, np.ascontiguousarray(data), dt)


# -- canonical structure ----------------------------------------------------

def canonical_momenta(s: State, p: OscillatorParams):
    """Momenta conjugate to x1 and x2: ``(m v1 + gamma x2/2, -m v2 - gamma x1/2)``."""
    x1, x2, v1, v2 = _vec(s)
    return p.m * v1 + 0.5 * p.gamma * x2, -p.m * v2 - 0.5 * p.gamma * x1


class GaugeData(NamedTuple):
    A1: float
    A2: float
    B: float
    Phi: float


# Levi-Civita symbol with eps_12 = -eps_21 = 1
EPSILON = np.array([[0.0, 1.0], [-1.0, 0.0]])


def gauge_data(s: State, p: OscillatorParams) -> GaugeData:
    """Vector potential ``A_i = (B/2) eps_ij x_j`` and the oscillator potential.

    B = gamma c / e; Phi = k (x1^2 - x2^2) / (2 e) describes two opposite
    charges, hence the relative minus sign.
    """
    if p.charge_e == 0:
        raise ZeroCharge("gauge potentials need a nonzero charge_e")
    x1, x2, _, _ = _vec(s)
    B = p.gamma * p.light_c / p.charge_e
    A1 = 0.5 * B * (EPSILON[0, 0] * x1 + EPSILON[0, 1] * x2)
    A2 = 0.5 * B * (EPSILON[1, 0] * x1 + EPSILON[1, 1] * x2)
    Phi = p.k * (x1**2 - x2**2) / (2.0 * p.charge_e)
    return GaugeData(A1, A2, B, Phi)


def gauge_curl(p: OscillatorParams) -> float:
    """dA2/dx1 - dA1/dx2 of the linear potential, which is exactly -B."""
    if p.charge_e == 0:
        raise ZeroCharge("gauge potentials need a nonzero charge_e")
    B = p.gamma * p.light_c / p.charge_e
    return 0.5 * B * (EPSILON[1, 0] - EPSILON[0, 1])


def lagrangian_xy(s: State, p: OscillatorParams):
    # forcing taken as f = -k x so the Euler-Lagrange equations are the
    # damped/amplified pair with the correct sign
    x, y, vx, vy = _vec(s)
    return p.m * vx * vy + 0.5 * p.gamma * (x * vy - y * vx) - p.k * x * y


def hamiltonian_xy(s: State, p: OscillatorParams):
    """Legendre transform of ``lagrangian_xy``.

    With p_x = m vy - gamma y / 2 and p_y = m vx + gamma x / 2 the gauge
    terms cancel and H = m vx vy + k x y.
    """
    x, y, vx, vy = _vec(s)
    return p.m * vx * vy + p.k * x * y


def conjugate_momenta_xy(s: State, p: OscillatorParams):
    x, y, vx, vy = _vec(s)
    return p.m * vy - 0.5 * p.gamma * y, p.m * vx + 0.5 * p.gamma * x
