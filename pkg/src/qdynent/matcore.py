"""Dense complex matrix kernels.

Everything here works on plain ``numpy`` arrays of dtype ``complex128``.
The eigensolver (cyclic Jacobi), the anti-Hermitian exponential built on it,
the pivoted determinant and the Durand-Kerner root finder are implemented
directly so their numerical contracts are explicit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, NumericalError

DEFAULT_TOL = 1e-9
MAX_DIM = 16

_DK_MAX_ITERS = 500
_DK_STEP_TOL = 1e-13
# rotating the initial roots of unity keeps real polynomials from trapping
# iterates on the real axis
_DK_START_ANGLE = 0.4


@dataclass(frozen=True)
class UnitaryCheck:
    max_deviation: float
    passed: bool
    tol: float

    def __bool__(self):
        return self.passed


def as_matrix(M, name="matrix") -> np.ndarray:
    """Coerce ``M`` to a finite square complex array."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {A.shape}")
    if A.shape[0] == 0:
        raise DimensionError(f"{name} must be non-empty")
    if not np.all(np.isfinite(A)):
        raise DomainError(f"{name} has non-finite entries")
    return A


def as_matrix_stack(M, name="matrix") -> np.ndarray:
    """Like :func:`as_matrix` but accepts ``(..., d, d)`` stacks."""
    A = np.asarray(M, dtype=complex)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise DimensionError(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError(f"{name} has non-finite entries")
    return A


def identity(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


def adjoint(M) -> np.ndarray:
    return np.conj(np.swapaxes(M, -1, -2))


def unitarity_deviation(M) -> np.ndarray:
    """Largest entry modulus of ``M* M - I``, per matrix of a stack."""
    A = as_matrix_stack(M)
    G = adjoint(A) @ A
    G = G - np.eye(A.shape[-1])
    return np.abs(G).max(axis=(-2, -1))


def is_unitary(M, tol: float = DEFAULT_TOL) -> UnitaryCheck:
    if not tol > 0:
        raise ValueError("tol must be positive")
    dev = float(unitarity_deviation(as_matrix(M)))
    return UnitaryCheck(max_deviation=dev, passed=dev <= tol, tol=tol)


def require_unitary(M, tol: float = DEFAULT_TOL, name="U") -> np.ndarray:
    """Return ``M`` as an array or raise :class:`DomainError`."""
    A = as_matrix(M, name)
    check = is_unitary(A, tol)
    if not check.passed:
        raise DomainError(
            f"{name} is not unitary: max |U*U - I| = {check.max_deviation:.3e} > {tol:g}"
        )
    return A


def trace(M) -> complex:
    return complex(np.trace(as_matrix(M)))


def det(M):
    """Determinant by Gaussian elimination with partial pivoting.

    Accepts a single matrix or a ``(..., d, d)`` stack; singular matrices give 0.
    """
    A = as_matrix_stack(M).copy()
    d = A.shape[-1]
    if d > MAX_DIM:
        raise DimensionError(f"det supports d <= {MAX_DIM}, got {d}")
    batch_shape = A.shape[:-2]
    A = A.reshape(-1, d, d)
    m = A.shape[0]
    rows = np.arange(m)
    sign = np.ones(m)
    for k in range(d):
        piv = k + np.argmax(np.abs(A[:, k:, k]), axis=1)
        swap = piv != k
        if np.any(swap):
            r = rows[swap]
            tmp = A[r, k, :].copy()
            A[r, k, :] = A[r, piv[swap], :]
            A[r, piv[swap], :] = tmp
            sign[swap] = -sign[swap]
        pivot = A[:, k, k]
        if k + 1 < d:
            nz = pivot != 0
            factors = np.zeros((m, d - k - 1), dtype=complex)
            factors[nz] = A[nz, k + 1:, k] / pivot[nz, None]
            A[:, k + 1:, k:] -= factors[:, :, None] * A[:, None, k, k:]
    out = sign * np.prod(np.diagonal(A, axis1=1, axis2=2), axis=1)
    if batch_shape == ():
        return complex(out[0])
    return out.reshape(batch_shape)


def _require_hermitian(H, tol, name):
    H = as_matrix(H, name)
    dev = float(np.abs(H - H.conj().T).max())
    if dev > tol:
        raise DomainError(f"{name} is not Hermitian: max |H - H*| = {dev:.3e} > {tol:g}")
    return 0.5 * (H + H.conj().T)


def hermitian_eig(H, tol: float = DEFAULT_TOL, max_sweeps: int = 100):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, V)`` with eigenvalues ascending and the
    corresponding orthonormal eigenvectors as the columns of ``V``.
    """
    H = _require_hermitian(H, tol, "H")
    d = H.shape[0]
    # plain complex lists: at d <= 16 numpy call overhead dominates row updates
    A = [[complex(x) for x in row] for row in H]
    V = [[complex(i == j) for j in range(d)] for i in range(d)]
    scale = max(float(np.linalg.norm(H)), 1e-300)
    target = 1e-15 * scale
    skip = target / d  # pivots this small cannot keep the off-norm above target
    for _ in range(max_sweeps):
        off = math.sqrt(sum(abs(A[p][q]) ** 2 for p in range(d) for q in range(p + 1, d)))
        if off <= target:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p][q]
                b = abs(apq)
                if b <= 1e-300 or b <= skip:
                    continue
                # phase-align the pivot, then a real Givens rotation zeroes it
                ph = (apq / b).conjugate()
                theta = 0.5 * math.atan2(2.0 * b, (A[q][q] - A[p][p]).real)
                c, s = math.cos(theta), math.sin(theta)
                sph, cph = s * ph, c * ph
                for row in A:
                    x, y = row[p], row[q]
                    row[p] = c * x - sph * y
                    row[q] = s * x + cph * y
                Ap, Aq = A[p], A[q]
                sc, cc = sph.conjugate(), cph.conjugate()
                for k in range(d):
                    x, y = Ap[k], Aq[k]
                    Ap[k] = c * x - sc * y
                    Aq[k] = s * x + cc * y
                Ap[q] = Aq[p] = 0j
                for row in V:
                    x, y = row[p], row[q]
                    row[p] = c * x - sph * y
                    row[q] = s * x + cph * y
    else:
        best = (np.array([A[i][i].real for i in range(d)]), np.array(V))
        raise NumericalError("Jacobi sweeps did not converge", best=best)
    w = np.array([A[i][i].real for i in range(d)])
    order = np.argsort(w, kind="stable")
    return w[order], np.array(V, dtype=complex)[:, order]


def expm_antihermitian(A, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``exp(A)`` for anti-Hermitian ``A`` via the spectral decomposition of ``-iA``."""
    A = as_matrix(A, "A")
    dev = float(np.abs(A + A.conj().T).max())
    if dev > tol:
        raise DomainError(f"A is not anti-Hermitian: max |A + A*| = {dev:.3e} > {tol:g}")
    lam, V = hermitian_eig(-1j * A, tol=max(tol, 2 * dev))
    return (V * np.exp(1j * lam)) @ V.conj().T


class AntiHermitianFlow:
    """Precomputed ``t -> exp(tA)`` for one anti-Hermitian ``A``.

    One Jacobi decomposition serves every step length a line search tries.
    """

    def __init__(self, A, tol: float = DEFAULT_TOL):
        A = as_matrix(A, "A")
        dev = float(np.abs(A + A.conj().T).max())
        if dev > tol:
            raise DomainError(f"A is not anti-Hermitian: max |A + A*| = {dev:.3e}")
        self.eigenvalues, self.vectors = hermitian_eig(-1j * A, tol=max(tol, 2 * dev))
        self._vh = self.vectors.conj().T

    def __call__(self, t: float) -> np.ndarray:
        return (self.vectors * np.exp(1j * t * self.eigenvalues)) @ self._vh


def polyval(coeffs, z):
    """Horner evaluation; ``coeffs`` highest degree first, broadcasting over rows."""
    c = np.asarray(coeffs, dtype=complex)
    z = np.asarray(z, dtype=complex)
    out = np.zeros(np.broadcast_shapes(c.shape[:-1] + (1,), z.shape), dtype=complex)
    for j in range(c.shape[-1]):
        out = out * z + c[..., j:j + 1]
    return out


def durand_kerner(coeffs, max_iters: int = _DK_MAX_ITERS, step_tol: float = _DK_STEP_TOL):
    """Simultaneous Weierstrass iteration over a batch of polynomials.

    ``coeffs`` has shape ``(m, n+1)``, highest degree first, with nonzero
    leading coefficients. Returns ``(roots, converged)`` where ``roots`` has
    shape ``(m, n)`` and ``converged`` flags rows whose final step fell
    below ``step_tol``. No exception is raised here; see :func:`poly_roots`.
    """
    c = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    lead = c[:, :1]
    if np.any(lead == 0):
        raise DomainError("leading coefficient must be nonzero")
    c = c / lead
    m, n1 = c.shape
    n = n1 - 1
    if n == 0:
        return np.zeros((m, 0), dtype=complex), np.ones(m, dtype=bool)
    radius = 1.0 + np.abs(c[:, 1:]).max(axis=1)
    start = np.exp(1j * (2 * np.pi * np.arange(n) / n + _DK_START_ANGLE))
    z = radius[:, None] * start[None, :]
    active = np.ones(m, dtype=bool)
    eye = np.eye(n, dtype=bool)
    for _ in range(max_iters):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        za = z[idx]
        diff = za[:, :, None] - za[:, None, :]
        diff[:, eye] = 1.0
        denom = np.prod(diff, axis=2)
        denom[denom == 0] = 1e-300
        step = polyval(c[idx], za) / denom
        z[idx] = za - step
        done = np.abs(step).max(axis=1) < step_tol
        active[idx[done]] = False
    return z, ~active


def _residual_ok(coeffs, roots):
    c = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    c = c / c[:, :1]
    n = c.shape[1] - 1
    res = np.abs(polyval(c, roots))
    return np.all(res <= 1e-10 * (1.0 + np.abs(roots)) ** n, axis=1)


def poly_roots(coeffs) -> list[complex]:
    """All roots of a polynomial (coefficients highest degree first).

    Durand-Kerner iteration; a run that exhausts the iteration cap is still
    accepted when every root meets the residual bound
    ``|p(z)| <= 1e-10 (1 + |z|)^n`` (multiple roots converge only linearly).
    """
    c = np.asarray(coeffs, dtype=complex).ravel()
    if not np.all(np.isfinite(c)):
        raise DomainError("coefficients must be finite")
    if c.size == 0 or c[0] == 0:
        raise DomainError("leading coefficient must be nonzero")
    if c.size - 1 > 8:
        raise DimensionError("poly_roots supports degree <= 8")
    z, conv = durand_kerner(c[None, :])
    if not (conv[0] or _residual_ok(c[None, :], z)[0]):
        raise NumericalError("Durand-Kerner did not converge", best=list(z[0]))
    return [complex(r) for r in z[0]]


def fourier_matrix(d: int) -> np.ndarray:
    """Unnormalized Fourier matrix ``(w^(jl))`` with ``w = exp(2 pi i / d)``."""
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d)
