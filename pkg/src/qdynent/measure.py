"""Normalized rank-1 POVMs and the outcome Markov chain they induce.

A measurement with ``k`` outcomes on ``C^d`` is stored as ``k`` unit vectors
``phi_j``; its effects are ``(d/k) |phi_j><phi_j|``. Outcome labels in
:func:`wigner_string_probability` are 1-based, matching the usual
``(i_1, ..., i_n)`` notation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConstructionError, DimensionError, DomainError
from .matcore import (
    DEFAULT_TOL,
    adjoint,
    as_matrix,
    as_matrix_stack,
    require_unitary,
    unitarity_deviation,
)

RESOLUTION_TOL = 1e-8
NORM_TOL = 1e-9
STATE_TOL = 1e-9


def _dephase(vectors: np.ndarray) -> np.ndarray:
    """Rotate each row so its first non-negligible component is real and >= 0."""
    out = vectors.copy()
    for row in out:
        nz = np.flatnonzero(np.abs(row) > 1e-12)
        if nz.size:
            a = row[nz[0]]
            row *= np.conj(a) / abs(a)
    return out


@dataclass(frozen=True, eq=False)
class RankOnePOVM:
    """Validated rank-1 POVM; ``vectors`` has shape ``(k, d)``.

    Build instances with :func:`validate_povm`, :func:`pvm_from_unitary` or
    :func:`sic_povm` rather than directly.
    """

    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def n_outcomes(self) -> int:
        return self.vectors.shape[0]

    @property
    def weight(self) -> Fraction:
        return Fraction(self.dim, self.n_outcomes)

    @property
    def is_pvm(self) -> bool:
        return self.n_outcomes == self.dim

    @property
    def columns(self) -> np.ndarray:
        """``d x k`` matrix whose columns are the measurement vectors."""
        return self.vectors.T

    def effects(self) -> np.ndarray:
        w = self.dim / self.n_outcomes
        return w * np.einsum("ki,kj->kij", self.vectors, self.vectors.conj())


def validate_povm(vectors, dim: int | None = None) -> RankOnePOVM:
    """Check and package ``k`` vectors in ``C^d`` as a normalized rank-1 POVM."""
    V = np.asarray(vectors, dtype=complex)
    if V.ndim != 2:
        raise DimensionError("vectors must be a (k, d) array")
    k, d = V.shape
    if dim is not None and d != dim:
        raise DimensionError(f"dimension mismatch: vectors have length {d}, expected {dim}")
    if d == 0 or k < d:
        raise ConstructionError(f"need k >= d outcomes, got k={k}, d={d}")
    if not np.all(np.isfinite(V)):
        raise ConstructionError("vectors have non-finite entries")
    norms = np.linalg.norm(V, axis=1)
    worst_norm = float(np.abs(norms - 1).max())
    if worst_norm > NORM_TOL:
        raise ConstructionError(f"vectors must be unit: worst | |phi| - 1 | = {worst_norm:.3e}")
    frame = V.T @ V.conj()
    dev = float(np.abs(frame - (k / d) * np.eye(d)).max())
    if dev > RESOLUTION_TOL:
        raise ConstructionError(
            f"resolution of identity violated: worst entry deviation {dev:.3e} "
            f"(sum |phi_j><phi_j| must equal (k/d) I)"
        )
    if k == d:
        gram = V.conj() @ V.T
        off = float(np.abs(gram - np.eye(d)).max())
        if off > NORM_TOL:
            raise ConstructionError(f"PVM vectors not orthonormal: deviation {off:.3e}")
    V = V / norms[:, None]
    return RankOnePOVM(_dephase(V))


def pvm_from_unitary(V, tol: float = DEFAULT_TOL) -> RankOnePOVM:
    """PVM whose j-th vector is column j of the unitary ``V``."""
    V = require_unitary(V, tol, "V")
    return validate_povm(V.T)


def computational_pvm(d: int) -> RankOnePOVM:
    return RankOnePOVM(np.eye(d, dtype=complex))


def validate_state(rho, tol: float = STATE_TOL) -> np.ndarray:
    rho = as_matrix(rho, "rho")
    if float(np.abs(rho - rho.conj().T).max()) > tol:
        raise DomainError("state is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise DomainError("state must have unit trace")
    if float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()) < -tol:
        raise DomainError("state is not positive semidefinite")
    return rho


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex) / d


def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def _check_dims(povm: RankOnePOVM, d: int):
    if povm.dim != d:
        raise DimensionError(f"dimension mismatch: POVM on C^{povm.dim}, operator on C^{d}")


def born_probabilities(povm: RankOnePOVM, rho) -> np.ndarray:
    rho = validate_state(rho)
    _check_dims(povm, rho.shape[0])
    V = povm.vectors
    p = np.einsum("ki,ij,kj->k", V.conj(), rho, V).real
    return (povm.dim / povm.n_outcomes) * p


def transition_matrix(U, povm: RankOnePOVM, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Row-stochastic ``p_jl = (d/k) |<phi_j|U|phi_l>|^2``.

    ``U`` may be a ``(..., d, d)`` stack; the result then has shape ``(..., k, k)``.
    """
    U = as_matrix_stack(U, "U")
    _check_dims(povm, U.shape[-1])
    if U.ndim == 2:
        require_unitary(U, tol)
    else:
        dev = unitarity_deviation(U)
        if np.any(dev > tol):
            raise DomainError(f"U is not unitary: max |U*U - I| = {dev.max():.3e}")
    Phi = povm.columns
    amp = adjoint(Phi) @ U @ Phi
    return (povm.dim / povm.n_outcomes) * np.abs(amp) ** 2


def wigner_string_probability(U, povm: RankOnePOVM, rho, symbols) -> float:
    """Probability of the outcome string ``symbols`` (1-based labels)."""
    symbols = [int(s) for s in symbols]
    if not symbols:
        raise ValueError("outcome string must be non-empty")
    k = povm.n_outcomes
    if min(symbols) < 1 or max(symbols) > k:
        raise ValueError(f"outcome labels must lie in [1, {k}]")
    p0 = born_probabilities(povm, rho)
    P = transition_matrix(U, povm)
    prob = p0[symbols[0] - 1]
    for a, b in zip(symbols, symbols[1:]):
        prob *= P[a - 1, b - 1]
    return float(prob)


def weyl_heisenberg_orbit(fiducial) -> np.ndarray:
    """All ``d^2`` vectors ``X^a Z^b |fiducial>`` (shift and clock powers)."""
    psi = np.asarray(fiducial, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    d = psi.size
    omega = np.exp(2j * np.pi / d)
    X = np.roll(np.eye(d), 1, axis=0)
    Z = np.diag(omega ** np.arange(d))
    out = []
    for a in range(d):
        for b in range(d):
            out.append(np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b) @ psi)
    return np.array(out)


def _tetrahedral_vectors() -> np.ndarray:
    # regular tetrahedron with a vertex at the south pole, so |0> is
    # antipodal to a SIC vector and attains the minimal entropy ln 3
    polar = np.array([np.pi, np.arccos(1 / 3), np.arccos(1 / 3), np.arccos(1 / 3)])
    azim = np.array([0.0, 0.0, 2 * np.pi / 3, 4 * np.pi / 3])
    return np.stack([np.cos(polar / 2), np.exp(1j * azim) * np.sin(polar / 2)], axis=1)


def sic_overlaps(vectors) -> np.ndarray:
    V = np.asarray(vectors, dtype=complex)
    return np.abs(V.conj() @ V.T) ** 2


def sic_povm(dim: int) -> RankOnePOVM:
    """SIC-POVM for ``d = 2`` (tetrahedral) or ``d = 3`` (Weyl-Heisenberg orbit)."""
    if dim == 2:
        V = _tetrahedral_vectors()
    elif dim == 3:
        V = weyl_heisenberg_orbit(np.array([0, 1, -1]) / np.sqrt(2))
    else:
        raise DimensionError(f"SIC-POVM available for d in (2, 3), got {dim}")
    G = sic_overlaps(V)
    off = G[~np.eye(dim * dim, dtype=bool)]
    if np.abs(off - 1 / (dim + 1)).max() > 1e-12:
        raise ConstructionError("SIC overlap self-check failed")
    return validate_povm(V, dim)
