"""Noncommutative (X, Y) plane of the doubled coordinates.

[X, Y] = i L^2 with L^2 = hbar / gamma in the dissipative case. A closed
loop enclosing area A picks up the interference phase A / L^2.

Canonical commutators cannot hold on a finite space: truncated ladder
matrices satisfy [a, a^dagger] = 1 except in the last basis state, which
carries a defect of -(N - 1). Every commutator statement here is scoped to
the leading (N - 1) block and the defect is reported explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionTooSmall, OpenPath, TruncationTailTooLarge, ValidationError, ZeroDamping
from .model import OscillatorParams


class NCPlaneError(ValidationError):
    module = "ncplane"


@dataclass(frozen=True)
class TruncatedOperator:
    entries: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or not np.all(np.isfinite(a)):
            raise NCPlaneError("operator entries must be a finite square matrix")
        if self.hermitian and np.max(np.abs(a - a.conj().T), initial=0.0) > 1e-12:
            raise NCPlaneError("operator flagged Hermitian is not")
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other):
        return self.entries @ (other.entries if isinstance(other, TruncatedOperator) else other)


def annihilation(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1)


def commutator(a, b) -> np.ndarray:
    a = a.entries if isinstance(a, TruncatedOperator) else np.asarray(a)
    b = b.entries if isinstance(b, TruncatedOperator) else np.asarray(b)
    return a @ b - b @ a


@dataclass(frozen=True)
class NCPair:
    X: TruncatedOperator
    Y: TruncatedOperator
    L2: float
    hbar: float = 1.0

    @property
    def dim(self) -> int:
        return self.X.dim

    @property
    def PX(self) -> TruncatedOperator:
        """Momentum conjugate to X: P_X = hbar Y / L^2."""
        return TruncatedOperator(self.hbar * self.Y.entries / self.L2, hermitian=True)

    def subblock_residual(self) -> float:
        """Largest deviation of [X, Y] from i L^2 on the leading (N-1) block."""
        block = commutator(self.X, self.Y)[:-1, :-1]
        return float(np.max(np.abs(block - 1j * self.L2 * np.eye(self.dim - 1))))

    def defect(self) -> np.ndarray:
        """Full [X, Y] minus i L^2 times the identity."""
        return commutator(self.X, self.Y) - 1j * self.L2 * np.eye(self.dim)


def build_nc_pair(L2: float, N: int, hbar: float = 1.0) -> NCPair:
    """X = L (a + a^dag)/sqrt 2 and Y = L (a - a^dag)/(i sqrt 2) on N levels.

    In wavevector language (m v = hbar K) these are the rescaled
    xi_+ = -L^2 K_- and xi_- = +L^2 K_+.
    """
    if N < 4:
        raise DimensionTooSmall(f"truncation needs N >= 4, got {N}")
    if not L2 > 0:
        raise NCPlaneError(f"L2 must be positive, got {L2!r}")
    a = annihilation(N)
    L = math.sqrt(L2)
    X = L * (a + a.T) / math.sqrt(2.0)
    Y = L * (a - a.T) / (1j * math.sqrt(2.0))
    return NCPair(TruncatedOperator(X, hermitian=True), TruncatedOperator(Y, hermitian=True), L2, hbar)


def velocity_commutator_scale(p: OscillatorParams) -> tuple[float, float]:
    """Return ``(hbar gamma / m^2, hbar / gamma)``: [v+, v-]/i and L^2."""
    if p.gamma <= 0:
        raise ZeroDamping("the doubled velocities commute without dissipation")
    return p.hbar * p.gamma / p.m**2, p.hbar / p.gamma


@dataclass(frozen=True)
class PathPolygon:
    vertices: np.ndarray
    closed: bool = True

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise NCPlaneError("vertices must be an (n, 2) array")
        if self.closed and v.shape[0] < 3:
            raise NCPlaneError("a closed path needs at least 3 vertices")
        object.__setattr__(self, "vertices", v)

    def reversed(self) -> "PathPolygon":
        return PathPolygon(self.vertices[::-1], self.closed)


def signed_area(path: PathPolygon) -> float:
    """Shoelace area; positive for counter-clockwise loops."""
    x, y = path.vertices[:, 0], path.vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def interference_phase(path: PathPolygon, L2: float) -> float:
    if not path.closed:
        raise OpenPath("the interference phase needs a closed loop")
    if not L2 > 0:
        raise NCPlaneError(f"L2 must be positive, got {L2!r}")
    return signed_area(path) / L2


def phase_report(path: PathPolygon, L2: float) -> dict:
    return {"area": signed_area(path), "L2": L2, "theta": interference_phase(path, L2)}


def uncertainty_product(state, pair: NCPair, tail_levels: int = 2, tail_tol: float = 1e-8):
    """(dX, dY, dX * dY) of a normalized state in the truncated basis.

    Raises ``TruncationTailTooLarge`` when the top ``tail_levels`` levels
    carry more than ``tail_tol`` of the probability.
    """
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (pair.dim,):
        raise NCPlaneError(f"state length {psi.shape} does not match dimension {pair.dim}")
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.0) > 1e-10:
        raise NCPlaneError(f"state norm {norm!r} is not 1")
    tail = float(np.sum(np.abs(psi[-tail_levels:]) ** 2))
    if tail > tail_tol:
        raise TruncationTailTooLarge(f"top-level weight {tail:.2e} exceeds {tail_tol:.0e}")

    def spread(op):
        v = op.entries @ psi
        mean = np.vdot(psi, v).real
        return math.sqrt(max(np.vdot(v, v).real - mean**2, 0.0))

    dX, dY = spread(pair.X), spread(pair.Y)
    return dX, dY, dX * dY
