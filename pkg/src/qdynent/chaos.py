"""Chaoticity tests for unitaries.

A unitary is chaotic when its PVM-dynamical entropy reaches ``ln d``, i.e.
when ``sqrt(d) U`` is a complex Hadamard matrix in some orthonormal basis.
Exact decisions exist for ``d = 2`` (trace modulus) and ``d = 3`` (trace
over a cube root of the determinant lies in one of two rotated, shrunken
deltoids); ``d = 5`` has a necessary condition of the same shape; anything
else falls back to the trace bound and the optimizer certificate.
"""

from __future__ import annotations

import cmath
import enum
import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, NumericalError, SizeError
from .matcore import (
    DEFAULT_TOL,
    _residual_ok,
    det,
    durand_kerner,
    fourier_matrix,
    require_unitary,
)
from .maxent import MAX_OPT_DIM, pvm_dynamical_entropy

TRACE_TOL = 1e-9
POLYLINE_TOL = 1e-7
POLYLINE_SAMPLES = 4096
# roots closer than this are merged before the unimodularity test; a triple
# root is only resolved to ~eps**(1/3) by the root finder
ROOT_CLUSTER_TOL = 1e-4
ALPHA_DEDUP_TOL = 1e-9


class Membership(str, enum.Enum):
    INSIDE = "Inside"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


_CODES = {0: Membership.OUTSIDE, 1: Membership.BOUNDARY, 2: Membership.INSIDE}


class Status(str, enum.Enum):
    CHAOTIC = "Chaotic"
    NOT_CHAOTIC = "NotChaotic"
    UNDETERMINED = "Undetermined"


class Method(str, enum.Enum):
    EXACT_D2 = "ExactD2"
    EXACT_D3 = "ExactD3"
    TRACE_NECESSARY = "TraceNecessary"
    NECESSARY_D5 = "NecessaryD5"
    OPTIMIZER = "OptimizerCertificate"


@dataclass(frozen=True)
class ChaosVerdict:
    status: Status
    method: Method
    detail: float
    boundary: bool = False

    def as_dict(self):
        return {
            "status": self.status.value,
            "method": self.method.value,
            "detail": self.detail,
            "boundary": self.boundary,
        }


# -- hypocycloids ----------------------------------------------------------


def hypocycloid_point(d: int, t):
    """Point of the d-hypocycloid with cusps at ``d * (d-th roots of unity)``."""
    if d < 2:
        raise ValueError("hypocycloid needs d >= 2")
    t = np.asarray(t, dtype=float)
    z = (d - 1) * np.exp(1j * t) + np.exp(-1j * (d - 1) * t)
    return complex(z) if z.ndim == 0 else z


def t3_radicand(tau):
    """``(27 + 8 Re(tau^3) - 18|tau|^2 - |tau|^4) / 27``; non-negative exactly on T_3."""
    tau = np.asarray(tau, dtype=complex)
    r2 = np.abs(tau) ** 2
    return (27 + 8 * (tau**3).real - 18 * r2 - r2**2) / 27


def _t3_codes(tau, tol):
    tau = np.atleast_1d(np.asarray(tau, dtype=complex)).ravel()
    coeffs = np.stack(
        [np.ones_like(tau), -tau, np.conj(tau), -np.ones_like(tau)], axis=1
    )
    z, conv = durand_kerner(coeffs)
    if not np.all(conv):
        bad = ~conv
        ok = _residual_ok(coeffs[bad], z[bad])
        if not np.all(ok):
            raise NumericalError("root finder failed in the T3 test", best=z[bad][~ok])
    radius = max(tol, ROOT_CLUSTER_TOL)
    close = np.stack(
        [np.abs(z[:, 0] - z[:, 1]), np.abs(z[:, 0] - z[:, 2]), np.abs(z[:, 1] - z[:, 2])], axis=1
    ) <= radius
    # a cluster of m roots is a simple root of the (m-1)-th derivative,
    # so refine its centroid there instead of trusting the raw iterates
    merged = z.copy()
    n_close = close.sum(axis=1)
    triple = n_close >= 2
    merged[triple] = (tau[triple] / 3)[:, None]
    for (a, b), col in zip([(0, 1), (0, 2), (1, 2)], range(3)):
        pair = (n_close == 1) & close[:, col]
        c = 0.5 * (z[pair, a] + z[pair, b])
        t = tau[pair]
        for _ in range(4):
            c = c - (3 * c * c - 2 * t * c + np.conj(t)) / np.where(6 * c - 2 * t == 0, 1, 6 * c - 2 * t)
        merged[pair, a] = c
        merged[pair, b] = c
    delta = np.abs(np.abs(merged) - 1).max(axis=1)
    codes = np.where(delta > tol, 0, np.where(n_close > 0, 1, 2))
    return codes


def in_T3(tau, tol: float = TRACE_TOL):
    """Membership of ``tau`` in the trace region of SU(3).

    ``tau`` is inside iff ``x^3 - tau x^2 + conj(tau) x - 1`` has only
    unimodular roots; colliding roots mark the boundary. Arrays give an array
    of :class:`Membership` values.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    scalar = np.ndim(tau) == 0
    codes = _t3_codes(tau, tol)
    if scalar:
        return _CODES[int(codes[0])]
    return np.array([_CODES[int(c)] for c in codes], dtype=object).reshape(np.shape(tau))


@dataclass(frozen=True, eq=False)
class TraceRegion:
    """``rotation * scale * T_d`` with its sampled boundary (closed polyline)."""

    d: int
    scale: float
    rotation: complex
    boundary: np.ndarray

    @classmethod
    def build(cls, d: int, scale: float = 1.0, rotation: complex = 1.0,
              samples: int = POLYLINE_SAMPLES) -> "TraceRegion":
        if samples < 64:
            raise ValueError("need at least 64 boundary samples")
        rotation = complex(rotation) / abs(rotation)
        t = 2 * np.pi * np.arange(samples + 1) / samples
        pts = rotation * scale * hypocycloid_point(d, t)
        pts[-1] = pts[0]
        return cls(d=d, scale=float(scale), rotation=rotation, boundary=pts)

    @property
    def samples(self) -> int:
        return self.boundary.size - 1

    def parameters(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.samples + 1) / self.samples

    def sag_bound(self) -> float:
        """Upper bound on the chord-to-curve gap of the polyline."""
        h = 2 * np.pi / self.samples
        return self.scale * self.d * (self.d - 1) * h * h / 8


def _segment_distance(w, a, b):
    ab = b - a
    L2 = np.abs(ab) ** 2
    L2 = np.where(L2 == 0, 1.0, L2)
    s = np.clip(((w[:, None] - a) * np.conj(ab)).real / L2, 0, 1)
    return np.abs(w[:, None] - (a + s * ab)).min(axis=1)


def _region_codes(region: TraceRegion, tau, tol, chunk=512):
    tau = np.atleast_1d(np.asarray(tau, dtype=complex)).ravel()
    # work in unit-scale coordinates of T_d
    unit = region.boundary / (region.rotation * region.scale)
    a, b = unit[:-1], unit[1:]
    out = np.empty(tau.size, dtype=int)
    for lo in range(0, tau.size, chunk):
        w = tau[lo:lo + chunk] / (region.rotation * region.scale)
        dist = _segment_distance(w, a, b) * region.scale
        if region.d == 2:
            on = dist <= tol
            cusp = np.abs(np.abs(w) - 2) * region.scale <= tol
            out[lo:lo + chunk] = np.where(on, np.where(cusp, 1, 2), 0)
            continue
        va = a[None, :] - w[:, None]
        vb = b[None, :] - w[:, None]
        winding = np.angle(vb / np.where(va == 0, 1e-300, va)).sum(axis=1) / (2 * np.pi)
        inside = np.abs(winding) > 0.5
        out[lo:lo + chunk] = np.where(dist <= tol, 1, np.where(inside, 2, 0))
    return out


def in_trace_region(region: TraceRegion, tau, tol: float = POLYLINE_TOL):
    """Winding-number membership of ``tau`` against the region's polyline."""
    scalar = np.ndim(tau) == 0
    codes = _region_codes(region, tau, tol)
    if scalar:
        return _CODES[int(codes[0])]
    return np.array([_CODES[int(c)] for c in codes], dtype=object).reshape(np.shape(tau))


# -- benchmark Hadamard matrices and spiral-similarity factors -------------


def benchmark_hadamard(label: str, phi: float = 0.0) -> np.ndarray:
    """Unnormalized benchmark Hadamard matrix ``F3``, ``F4`` (one-parameter family) or ``F5``."""
    key = label.upper().replace("_", "").replace("(1)", "")
    if key == "F3":
        return fourier_matrix(3)
    if key == "F5":
        return fourier_matrix(5)
    if key in ("F4", "F41"):
        u = 1j * cmath.exp(1j * phi)
        return np.array(
            [[1, 1, 1, 1], [1, u, -1, -u], [1, -1, 1, -1], [1, -u, -1, u]], dtype=complex
        )
    raise ValueError(f"unsupported benchmark {label!r}; expected F3, F4 or F5")


def permutation_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class AlphaFactor:
    hadamard_id: str
    sigma: tuple  # 1-based images sigma(1), ..., sigma(d)
    value: complex

    @property
    def power(self) -> complex:
        return self.value ** len(self.sigma)


def principal_root(z: complex, n: int) -> complex:
    """``|z|^(1/n) exp(i arg(z) / n)`` with ``arg`` in ``(-pi, pi]``."""
    return abs(z) ** (1.0 / n) * cmath.exp(1j * cmath.phase(z) / n)


def alpha_factors(benchmark: str, phi: float = 0.0) -> list[AlphaFactor]:
    """Principal d-th roots of ``sgn(sigma) prod_j F[j, sigma(j)] / det F`` over all sigma."""
    F = benchmark_hadamard(benchmark, phi)
    d = F.shape[0]
    dF = det(F)
    out = []
    for perm in itertools.permutations(range(d)):
        prod = complex(np.prod(F[np.arange(d), perm]))
        z = permutation_sign(perm) * prod / dF
        out.append(AlphaFactor(benchmark.upper(), tuple(p + 1 for p in perm), principal_root(z, d)))
    return out


def distinct_alpha_powers(factors, tol: float = ALPHA_DEDUP_TOL) -> list[complex]:
    vals: list[complex] = []
    for f in factors:
        p = f.power
        if all(abs(p - v) > tol for v in vals):
            vals.append(p)
    return vals


def _real_axis_root(p: complex, d: int) -> complex:
    # T_d is invariant under d-th roots of unity, so any root of p gives the
    # same region; pick the unit root nearest the real axis (then Re > 0)
    base = principal_root(p, d)
    base /= abs(base)
    roots = [base * cmath.exp(2j * math.pi * k / d) for k in range(d)]
    return min(roots, key=lambda r: (round(abs(r.imag), 12), -r.real))


def _lobe_order(rot: complex):
    a = cmath.phase(rot)
    return (round(abs(a), 12), -a)


def ct_region(d: int, samples: int = POLYLINE_SAMPLES) -> list[TraceRegion]:
    """The rotated copies of ``T_d / sqrt(d)`` whose union is the chaotic trace set."""
    if d == 3:
        label = "F3"
    elif d == 5:
        label = "F5"
    else:
        raise DimensionError(f"chaotic trace regions are tabulated for d in (3, 5), got {d}")
    powers = distinct_alpha_powers(alpha_factors(label))
    rots = sorted((_real_axis_root(p, d) for p in powers), key=_lobe_order)
    return [TraceRegion.build(d, 1 / math.sqrt(d), r, samples) for r in rots]


# -- exact tests -----------------------------------------------------------


def _lobe_rotations(d):
    return [r.rotation for r in ct_region(d, samples=64)]


def exact_d3_codes(tr, dt, branch: int = 0, tol: float = TRACE_TOL):
    """Membership codes (0 out, 1 boundary, 2 in) of ``tr / beta`` in the chaotic trace set.

    ``beta`` is the principal cube root of ``dt`` times ``w_3^branch``.
    """
    tr = np.atleast_1d(np.asarray(tr, dtype=complex))
    dt = np.atleast_1d(np.asarray(dt, dtype=complex))
    beta = np.abs(dt) ** (1 / 3) * np.exp(1j * np.angle(dt) / 3) * np.exp(2j * np.pi * branch / 3)
    tau = tr / beta
    best = np.zeros(tau.shape, dtype=int)
    for rot in _lobe_rotations(3):
        codes = _t3_codes(math.sqrt(3) * np.conj(rot) * tau, tol)
        best = np.maximum(best, codes)
    return best


def exact_chaotic_batch(U_stack, tol: float = TRACE_TOL) -> np.ndarray:
    """Vectorized exact verdicts for a stack of 2x2 or 3x3 unitaries (True = chaotic)."""
    U = np.asarray(U_stack, dtype=complex)
    d = U.shape[-1]
    tr = np.trace(U, axis1=-2, axis2=-1)
    if d == 2:
        return np.abs(tr) <= math.sqrt(2) + tol
    if d == 3:
        return exact_d3_codes(tr, det(U), tol=tol) > 0
    raise DimensionError("exact chaoticity tests exist for d = 2 and d = 3 only")


def _outside_ct5(U, tol):
    beta = principal_root(det(U), 5)
    tau = complex(np.trace(U)) / beta
    return all(in_trace_region(r, tau, tol) is Membership.OUTSIDE for r in ct_region(5))


def classify(
    U,
    starts: int = 32,
    seed: int = 0,
    tol: float = 1e-10,
    max_iters: int = 2000,
    trace_tol: float = TRACE_TOL,
    polyline_tol: float = POLYLINE_TOL,
) -> ChaosVerdict:
    """Decide whether ``U`` is chaotic, reporting which test settled it."""
    U = require_unitary(U, DEFAULT_TOL)
    d = U.shape[0]
    if d > MAX_OPT_DIM:
        raise SizeError(f"classify supports d <= {MAX_OPT_DIM}, got {d}")
    tr = complex(np.trace(U))
    if d == 2:
        chaotic = abs(tr) <= math.sqrt(2) + trace_tol
        status = Status.CHAOTIC if chaotic else Status.NOT_CHAOTIC
        return ChaosVerdict(status, Method.EXACT_D2, abs(tr))
    if d == 3:
        code = int(exact_d3_codes(tr, det(U), tol=trace_tol)[0])
        status = Status.CHAOTIC if code > 0 else Status.NOT_CHAOTIC
        return ChaosVerdict(status, Method.EXACT_D3, abs(tr), boundary=code == 1)
    if d == 5 and _outside_ct5(U, polyline_tol):
        return ChaosVerdict(Status.NOT_CHAOTIC, Method.NECESSARY_D5, abs(tr))
    if abs(tr) > math.sqrt(d) + trace_tol:
        return ChaosVerdict(Status.NOT_CHAOTIC, Method.TRACE_NECESSARY, abs(tr))
    res = pvm_dynamical_entropy(U, starts=starts, tol=tol, seed=seed, max_iters=max_iters)
    status = Status.CHAOTIC if res.certified_chaotic else Status.UNDETERMINED
    return ChaosVerdict(status, Method.OPTIMIZER, res.value)


class HadamardDefect(NamedTuple):
    max_deviation: float
    sum_gap: float


def hadamard_defect(U, basis) -> HadamardDefect:
    """How far ``U`` written in ``basis`` is from a rescaled complex Hadamard matrix.

    ``max_deviation`` is ``max_jl | |<e_j|U|e_l>| - 1/sqrt(d) |``; ``sum_gap`` is
    ``d sqrt(d) - sum_jl |<e_j|U|e_l>|`` (non-negative, zero exactly at Hadamard).
    """
    U = require_unitary(U)
    B = require_unitary(basis, name="basis")
    if U.shape != B.shape:
        raise DimensionError(f"dimension mismatch: {U.shape} vs {B.shape}")
    d = U.shape[0]
    A = np.abs(B.conj().T @ U @ B)
    return HadamardDefect(
        max_deviation=float(np.abs(A - 1 / math.sqrt(d)).max()),
        sum_gap=float(d * math.sqrt(d) - A.sum()),
    )
