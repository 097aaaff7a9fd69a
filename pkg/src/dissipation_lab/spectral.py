"""Truncated spectral action from the momenta of a cutoff function.

Tr f(D/Lambda) ~ 2 Lambda^4 f4 a0 + 2 Lambda^2 f2 a2 + f0 a4, with
f0 = f(0) and f_k = int_0^inf f(u) u^(k-1) du. The negative-order momenta
f_{-2k} are derivatives of f at zero; they vanish for the cutoffs used
here and are not computed. The Seeley-deWitt coefficients a0, a2, a4 are
inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy import integrate, interpolate

from .errors import NonConvergentTail, ValidationError


class SpectralError(ValidationError):
    module = "spectral"


@dataclass(frozen=True)
class CutoffFunction:
    """A non-negative cutoff profile f(u) on u >= 0.

    ``kind`` is one of ``gaussian`` (exp(-u^2)), ``exponential`` (exp(-u)),
    ``sharp`` (indicator of [0, u_max]) or ``sampled`` (tabulated values on
    ``grid``, interpolated by a cubic spline and zero beyond the table).
    """

    kind: str
    u_max: float = 1.0
    grid: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    tail_tol: float = 1e-10

    def __post_init__(self):
        if self.kind not in ("gaussian", "exponential", "sharp", "sampled"):
            raise SpectralError(f"unknown cutoff kind {self.kind!r}")
        if self.kind == "sharp" and not self.u_max > 0:
            raise SpectralError("sharp cutoff needs u_max > 0")
        if self.kind == "sampled":
            if self.grid is None or self.values is None:
                raise SpectralError("sampled cutoff needs grid and values")
            grid = np.asarray(self.grid, dtype=float)
            values = np.asarray(self.values, dtype=float)
            if grid.shape != values.shape or grid.size < 4 or grid[0] != 0:
                raise SpectralError("sampled cutoff needs >= 4 points starting at u = 0")
            if np.any(np.diff(grid) <= 0):
                raise SpectralError("sampled grid must increase")
            if np.any(values < 0):
                raise SpectralError("cutoff values must be non-negative")
            object.__setattr__(self, "grid", grid)
            object.__setattr__(self, "values", values)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-u**2)
        if self.kind == "exponential":
            return np.exp(-u)
        if self.kind == "sharp":
            return np.where(u <= self.u_max, 1.0, 0.0)
        return np.where(u <= self.grid[-1], self._spline(np.clip(u, 0, self.grid[-1])), 0.0)

    @cached_property
    def _spline(self):
        return interpolate.CubicSpline(self.grid, self.values)

    @property
    def f0(self) -> float:
        return float(self(0.0))


@dataclass(frozen=True)
class Momenta:
    f0: float
    f2: float
    f4: float


@dataclass(frozen=True)
class ActionTerms:
    cosmological: float
    einstein_hilbert: float
    yang_mills: float

    @property
    def total(self) -> float:
        return self.cosmological + self.einstein_hilbert + self.yang_mills


def closed_form_momenta(f: CutoffFunction) -> Momenta:
    """Exact momenta of the built-in cutoffs (Gamma-function integrals)."""
    if f.kind == "gaussian":
        return Momenta(1.0, 0.5, 0.5)
    if f.kind == "exponential":
        return Momenta(1.0, 1.0, 6.0)
    if f.kind == "sharp":
        return Momenta(1.0, f.u_max**2 / 2.0, f.u_max**4 / 4.0)
    raise SpectralError("sampled cutoffs have no closed form")


def _moment(f: CutoffFunction, k: int, epsabs: float) -> float:
    def integrand(u):
        return float(f(u)) * u ** (k - 1)

    if f.kind == "sharp":
        val, _ = integrate.quad(integrand, 0.0, f.u_max, epsabs=epsabs, epsrel=1e-12)
    elif f.kind == "sampled":
        # spline times u^(k-1) is a polynomial on each interval: integrate exactly
        P = np.polynomial.Polynomial
        val = 0.0
        for i, (a, b) in enumerate(zip(f.grid[:-1], f.grid[1:])):
            piece = P(f._spline.c[::-1, i]) * P([a, 1.0]) ** (k - 1)
            anti = piece.integ()
            val += anti(b - a) - anti(0.0)
    else:
        val, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=epsabs, epsrel=1e-12, limit=200)
    return float(val)


def cutoff_momenta(f: CutoffFunction, epsabs: float = 1e-9) -> Momenta:
    """f0 = f(0), f2 and f4 by adaptive quadrature.

    For sampled profiles the tail must already have decayed: the last
    tabulated value, weighted by u^3, must stay below ``tail_tol``.
    """
    if f.kind == "sampled":
        edge = f.values[-1] * f.grid[-1] ** 3
        if edge > f.tail_tol:
            raise NonConvergentTail(
                f"sampled cutoff still has weight {edge:.2e} at u={f.grid[-1]}")
    return Momenta(f.f0, _moment(f, 2, epsabs), _moment(f, 4, epsabs))


def assemble_action(m: Momenta, a0: float, a2: float, a4: float, Lambda: float) -> ActionTerms:
    if not Lambda >= 0:
        raise SpectralError(f"Lambda must be >= 0, got {Lambda!r}")
    return ActionTerms(
        cosmological=2.0 * Lambda**4 * m.f4 * a0,
        einstein_hilbert=2.0 * Lambda**2 * m.f2 * a2,
        yang_mills=m.f0 * a4,
    )


def action_report(f: CutoffFunction, a0: float, a2: float, a4: float, Lambda: float) -> dict:
    mom = cutoff_momenta(f)
    terms = assemble_action(mom, a0, a2, a4, Lambda)
    return {
        "f0": mom.f0,
        "f2": mom.f2,
        "f4": mom.f4,
        "terms": {
            "cosmological": terms.cosmological,
            "einstein_hilbert": terms.einstein_hilbert,
            "yang_mills": terms.yang_mills,
        },
        "total": terms.total,
    }
