"""Algebra doubling on truncated mode spaces.

The Hopf coproduct a^dag -> a^dag (x) 1 + 1 (x) a^dag duplicates a mode;
its q-deformed version weights the two copies by q^(1/2) and q^(-1/2).
A Bogoliubov rotation by theta of N doubled fermion pairs moves the
vacuum to |0(theta)>, whose overlap with |0> is cos(theta)^N and vanishes
as N grows: the finite-N trace of unitarily inequivalent vacua.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import expm_multiply

from .errors import NonPositiveDeformation, ValidationError


class DoublingError(ValidationError):
    module = "doubling"


@dataclass(frozen=True)
class TruncatedMode:
    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise DoublingError(f"mode truncation needs dim >= 2, got {self.dim}")

    @property
    def a(self) -> np.ndarray:
        return np.diag(np.sqrt(np.arange(1, self.dim, dtype=float)), 1)

    @property
    def a_dag(self) -> np.ndarray:
        return self.a.conj().T


@dataclass(frozen=True)
class CoproductResult:
    matrix: np.ndarray
    q: float


def coproduct(op: np.ndarray, q: float = 1.0) -> CoproductResult:
    """Delta(op) = op (x) q^(1/2) + q^(-1/2) (x) op with scalar q factors."""
    if not q > 0:
        raise NonPositiveDeformation(f"deformation q must be > 0, got {q!r}")
    op = np.asarray(op)
    eye = np.eye(op.shape[0])
    return CoproductResult(math.sqrt(q) * np.kron(op, eye) + np.kron(eye, op) / math.sqrt(q), q)


def hopf_coproduct(op: np.ndarray) -> np.ndarray:
    op = np.asarray(op)
    eye = np.eye(op.shape[0])
    return np.kron(op, eye) + np.kron(eye, op)


def swap_operator(d: int) -> np.ndarray:
    """Permutation matrix exchanging the two factors of C^d (x) C^d."""
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


def theta_vacuum_overlap(theta: float, n_modes: int) -> float:
    """|<0|0(theta)>| for ``n_modes`` independent doubled pairs."""
    if n_modes < 1:
        raise DoublingError(f"n_modes must be >= 1, got {n_modes}")
    return abs(math.cos(theta)) ** n_modes


def fermion_operators(n_fermions: int) -> list[sparse.csr_matrix]:
    """Jordan-Wigner annihilators on the 2^n_fermions dimensional Fock space."""
    lower = sparse.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    parity = sparse.csr_matrix(np.diag([1.0, -1.0]))
    eye = sparse.identity(2, format="csr")
    ops = []
    for j in range(n_fermions):
        factors = [parity] * j + [lower] + [eye] * (n_fermions - j - 1)
        op = factors[0]
        for f in factors[1:]:
            op = sparse.kron(op, f, format="csr")
        ops.append(op)
    return ops


def theta_vacuum_explicit(theta: float, n_modes: int) -> float:
    """Overlap computed on the full 4^N space.

    |0(theta)> = exp(theta * sum_k (a_k^dag at_k^dag - at_k a_k)) |0>, with
    a_k and its tilde partner at_k as 2N Jordan-Wigner fermions.
    """
    if n_modes < 1:
        raise DoublingError(f"n_modes must be >= 1, got {n_modes}")
    ops = fermion_operators(2 * n_modes)
    dim = 2 ** (2 * n_modes)
    gen = sparse.csr_matrix((dim, dim))
    for k in range(n_modes):
        a, at = ops[2 * k], ops[2 * k + 1]
        pair = a.T @ at.T
        gen = gen + pair - pair.T
    vac = np.zeros(dim)
    vac[0] = 1.0
    rotated = expm_multiply(theta * gen.tocsc(), vac)
    return float(abs(np.vdot(vac, rotated)))


def overlap_table(thetas, mode_counts) -> list[tuple[float, int, float]]:
    return [(float(t), int(n), theta_vacuum_overlap(t, n)) for t in thetas for n in mode_counts]
