"""Physical parameters of the damped/amplified oscillator pair."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import NonPositiveParameter, UnderdampedViolation


@dataclass(frozen=True)
class OscillatorParams:
    """Mass, damping and spring constant of the x-oscillator.

    Units are natural simulation units; ``hbar``, ``charge_e`` and
    ``light_c`` default to 1.
    """

    m: float
    gamma: float
    k: float
    hbar: float = 1.0
    charge_e: float = 1.0
    light_c: float = 1.0

    def __post_init__(self):
        for name in ("m", "gamma", "k", "hbar", "charge_e", "light_c"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise NonPositiveParameter(f"{name}={value!r} is not finite")
        for name in ("m", "k", "hbar"):
            if getattr(self, name) <= 0:
                raise NonPositiveParameter(f"{name} must be > 0, got {getattr(self, name)!r}")
        if self.gamma < 0:
            raise NonPositiveParameter(f"gamma must be >= 0, got {self.gamma!r}")

    @property
    def critical_k(self) -> float:
        return self.gamma**2 / (4.0 * self.m)

    @property
    def is_underdamped(self) -> bool:
        return self.k > self.critical_k


@dataclass(frozen=True)
class DerivedParams:
    Gamma: float
    Omega: float
    tau: float
    K: float
    B: float
    L2: Optional[float]


def require_underdamped(p: OscillatorParams) -> None:
    if not p.is_underdamped:
        raise UnderdampedViolation(
            f"k={p.k!r} must exceed gamma^2/(4m)={p.critical_k!r}"
        )


def derive_params(p: OscillatorParams) -> DerivedParams:
    """Decay rate, reduced frequency and the scales built from them.

    Raises ``UnderdampedViolation`` unless ``k > gamma**2 / (4 m)``.
    ``L2`` (the noncommutative length squared, hbar/gamma) is ``None`` for
    an undamped oscillator.
    """
    require_underdamped(p)
    Gamma = p.gamma / (2.0 * p.m)
    Omega = math.sqrt((p.k - p.critical_k) / p.m)
    return DerivedParams(
        Gamma=Gamma,
        Omega=Omega,
        tau=2.0 * math.pi / Omega,
        K=p.m * Omega**2,
        B=p.gamma * p.light_c / p.charge_e if p.charge_e != 0 else math.inf,
        L2=p.hbar / p.gamma if p.gamma > 0 else None,
    )
