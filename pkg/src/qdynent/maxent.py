"""PVM-dynamical entropy: maximum of the entropy rate over orthonormal bases.

For qubits the maximum has a closed form in the eigenphase gap ``theta``;
in general dimension it is approximated by multistart steepest ascent on
the unitary group, ``V <- V exp(tA)`` with ``A`` anti-Hermitian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .entropy import shannon_eta
from .errors import SizeError
from .haar import HaarSampler
from .matcore import DEFAULT_TOL, AntiHermitianFlow, poly_roots, require_unitary

LN2 = math.log(2.0)
MAX_OPT_DIM = 8
CERTIFICATION_TOL = 1e-6
FD_STEP = 1e-5
ARMIJO = 1e-4
MAX_HALVINGS = 40


class Dim2Spectrum(NamedTuple):
    theta: float
    c: float
    eigenvalues: tuple


def dim2_spectrum(U) -> Dim2Spectrum:
    """Eigenphase separation ``theta`` in ``[0, pi]`` and ``c = sin^2(theta/2)``."""
    U = require_unitary(U)
    if U.shape != (2, 2):
        raise SizeError("dim2_spectrum needs a 2x2 unitary")
    tr = U[0, 0] + U[1, 1]
    dt = U[0, 0] * U[1, 1] - U[0, 1] * U[1, 0]
    lam1, lam2 = poly_roots([1.0, -tr, dt])
    # |tr|^2 = 2 + 2 cos(theta) is well conditioned where the (near double)
    # roots are only good to ~sqrt(eps)
    c = min(max(1.0 - abs(tr) ** 2 / (4.0 * abs(dt)), 0.0), 1.0)
    theta = 2.0 * math.asin(math.sqrt(c))
    return Dim2Spectrum(theta=theta, c=c, eigenvalues=(lam1, lam2))


def hdyn_from_theta(theta):
    """Closed-form qubit PVM-dynamical entropy as a function of the gap ``theta``."""
    th = np.asarray(theta, dtype=float)
    c = np.sin(th / 2) ** 2
    low = shannon_eta(np.clip(1 - c, 0, 1)) + shannon_eta(np.clip(c, 0, 1))
    out = np.where(th >= np.pi / 2, LN2, low)
    return float(out) if out.ndim == 0 else out


def hdyn_closed_form_d2(U) -> float:
    return hdyn_from_theta(dim2_spectrum(U).theta)


def _eigvec_2x2(U, lam):
    a = np.array([U[0, 1], lam - U[0, 0]])
    b = np.array([lam - U[1, 1], U[1, 0]])
    v = a if np.linalg.norm(a) >= np.linalg.norm(b) else b
    return v / np.linalg.norm(v)


def maximizing_basis_d2(U, tau: float = 0.0, branch: int = 1) -> np.ndarray:
    """Orthonormal basis (as columns) attaining the qubit maximum.

    The first vector is ``sqrt(r)|0> + e^{i tau} sqrt(1-r)|1>`` written in an
    eigenbasis of ``U``; ``branch`` picks the sign in ``r`` when
    ``theta > pi/2``.
    """
    U = require_unitary(U)
    sp = dim2_spectrum(U)
    if sp.c <= 0.5:
        r = 0.5
    else:
        r = 0.5 * (1 + (1 if branch >= 0 else -1) * math.sqrt(1 - 1 / (2 * sp.c)))
    lam1, lam2 = sp.eigenvalues
    if abs(lam1 - lam2) < 1e-12:
        E = np.eye(2, dtype=complex)
    else:
        e0 = _eigvec_2x2(U, lam1)
        e1 = _eigvec_2x2(U, lam2)
        e1 = e1 - (e0.conj() @ e1) * e0
        E = np.stack([e0, e1 / np.linalg.norm(e1)], axis=1)
    ph = np.exp(1j * tau)
    x = math.sqrt(r) * E[:, 0] + ph * math.sqrt(1 - r) * E[:, 1]
    xp = math.sqrt(1 - r) * E[:, 0] - ph * math.sqrt(r) * E[:, 1]
    return np.stack([x, xp], axis=1)


def _eta_moduli(M):
    # eta(|m|^2) without shannon_eta's argument checks; squared moduli are >= 0
    x = M.real**2 + M.imag**2
    return -x * np.log(np.where(x > 1e-300, x, 1.0))


def objective(U, V) -> float:
    """``(1/d) sum_jl eta(|(V* U V)_jl|^2)``, the entropy rate in basis ``V``."""
    M = np.conj(V).T @ U @ V
    return float(_eta_moduli(M).sum()) / U.shape[0]


def _batched_objective(M_stack, d):
    return _eta_moduli(M_stack).sum(axis=(-2, -1)) / d


def tangent_basis(d: int) -> np.ndarray:
    """``d^2`` anti-Hermitian generators: real and imaginary off-diagonal pairs, then diagonals."""
    gens = []
    for j in range(d):
        for l in range(j + 1, d):
            E = np.zeros((d, d), dtype=complex)
            E[j, l], E[l, j] = 1, -1
            gens.append(E)
            E = np.zeros((d, d), dtype=complex)
            E[j, l] = E[l, j] = 1j
            gens.append(E)
    for j in range(d):
        E = np.zeros((d, d), dtype=complex)
        E[j, j] = 1j
        gens.append(E)
    return np.array(gens)


def generator_exponentials(d: int, h: float) -> np.ndarray:
    """Closed-form ``exp(h E)`` for every generator of :func:`tangent_basis`."""
    out = []
    c, s = math.cos(h), math.sin(h)
    for j in range(d):
        for l in range(j + 1, d):
            G = np.eye(d, dtype=complex)
            G[j, j] = G[l, l] = c
            G[j, l], G[l, j] = s, -s
            out.append(G)
            G = np.eye(d, dtype=complex)
            G[j, j] = G[l, l] = c
            G[j, l] = G[l, j] = 1j * s
            out.append(G)
    for j in range(d):
        G = np.eye(d, dtype=complex)
        G[j, j] = complex(c, s)
        out.append(G)
    return np.array(out)


class _FDGradient:
    def __init__(self, d, h=FD_STEP):
        self.d = d
        self.h = h
        self.gens = tangent_basis(d)
        plus = generator_exponentials(d, h)
        minus = generator_exponentials(d, -h)
        self.G = np.concatenate([plus, minus])
        self.GH = np.conj(np.swapaxes(self.G, -1, -2))
        self.n = len(plus)

    def __call__(self, U, V):
        M = np.conj(V).T @ U @ V
        f = self.GH @ M @ self.G
        vals = _batched_objective(f, self.d)
        return (vals[: self.n] - vals[self.n:]) / (2 * self.h)

    def direction(self, g):
        return np.tensordot(g, self.gens, axes=1)


@dataclass
class AscentRun:
    value: float
    basis: np.ndarray
    converged: bool
    iterations: int
    history: list = field(default_factory=list)


def ascend(U, V0, tol: float = 1e-10, max_iters: int = 2000, grad=None) -> AscentRun:
    """Steepest ascent from ``V0`` with Armijo backtracking (step halving).

    Stops when the squared gradient norm (the first-order gain of a unit
    step) drops below ``tol``, when backtracking is exhausted, or after
    ``max_iters`` accepted steps. ``history`` holds the accepted objective
    values, which are strictly increasing.
    """
    d = U.shape[0]
    grad = grad or _FDGradient(d)
    V = np.array(V0, dtype=complex)
    f = objective(U, V)
    history = [f]
    t = 1.0
    for it in range(max_iters):
        g = grad(U, V)
        gn2 = float(g @ g)
        if gn2 < tol:
            return AscentRun(f, V, True, it, history)
        flow = AntiHermitianFlow(grad.direction(g))
        t = min(t, math.pi / math.sqrt(gn2))
        for _ in range(MAX_HALVINGS + 1):
            Vn = V @ flow(t)
            fn = objective(U, Vn)
            if fn >= f + ARMIJO * t * gn2:
                break
            t *= 0.5
        else:
            return AscentRun(f, V, True, it, history)
        V, f = Vn, fn
        history.append(f)
        t *= 2.0
    return AscentRun(f, V, False, max_iters, history)


@dataclass
class MaxEntResult:
    value: float
    basis: np.ndarray
    certified_chaotic: bool
    starts_used: int
    converged_starts: int


def start_bases(d: int, starts: int, seed: int):
    """Identity first, then Haar bases; start ``i`` is seeded with ``seed + i``."""
    yield np.eye(d, dtype=complex)
    for i in range(1, starts):
        yield HaarSampler(d, seed + i).sample()


def pvm_dynamical_entropy(
    U,
    starts: int = 32,
    tol: float = 1e-10,
    seed: int = 0,
    max_iters: int = 2000,
    stop_when_certified: bool = True,
    certification_tol: float = CERTIFICATION_TOL,
) -> MaxEntResult:
    """Best entropy rate over a multistart ascent on the unitary group.

    The value is a lower bound on the PVM-dynamical entropy. Since ``ln d``
    is the global maximum, the remaining starts are skipped once one start
    certifies it (``stop_when_certified``).
    """
    U = require_unitary(U, DEFAULT_TOL)
    d = U.shape[0]
    if d > MAX_OPT_DIM:
        raise SizeError(f"optimizer supports d <= {MAX_OPT_DIM}, got {d}")
    if starts < 1:
        raise ValueError("starts must be >= 1")
    target = math.log(d) - certification_tol
    grad = _FDGradient(d)
    best = None
    used = converged = 0
    for V0 in start_bases(d, starts, seed):
        run = ascend(U, V0, tol=tol, max_iters=max_iters, grad=grad)
        used += 1
        converged += run.converged
        if best is None or run.value > best.value:
            best = run
        if stop_when_certified and best.value >= target:
            break
    value = min(best.value, math.log(d)) if d > 1 else 0.0
    return MaxEntResult(
        value=value,
        basis=best.basis,
        certified_chaotic=best.value >= target,
        starts_used=used,
        converged_starts=converged,
    )
