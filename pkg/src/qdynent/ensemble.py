"""Haar averages: Weyl-formula quadrature and seeded Monte Carlo.

Monte Carlo work is split into ``workers`` chunks; chunk ``w`` draws from
the substream ``(seed, w)`` so a run is reproducible for a fixed
``(seed, workers)`` pair regardless of scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chaos import _t3_codes, exact_chaotic_batch
from .entropy import entropy_rate
from .errors import DimensionError, SizeError
from .haar import HaarSampler
from .maxent import LN2, MAX_OPT_DIM, hdyn_from_theta, pvm_dynamical_entropy
from .measure import computational_pvm

CATALAN = 0.915965594177219015
EULER_GAMMA = 0.577215664901532861
MIN_MC_SAMPLES = 10**4
BATCH = 50_000

M_C2 = 0.5 + 1 / math.pi
MEAN_HDYN_D2 = 1.5 * LN2 + (2 * CATALAN - math.pi - 1) / (2 * math.pi)
M_C3_REPORTED = 0.592


def harmonic_mean_entropy(d: int) -> float:
    """Haar mean of the entropy rate for any PVM: ``sum_{k=2}^d 1/k``."""
    return sum(1.0 / k for k in range(2, d + 1))


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    samples: int
    seed: int
    worker_count: int
    lower_bound: bool = False  # optimizer values only bound the true mean from below

    def as_dict(self):
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "samples": self.samples,
            "seed": self.seed,
            "worker_count": self.worker_count,
            "lower_bound": self.lower_bound,
        }


# -- quadrature ------------------------------------------------------------


def weyl_average_d2(f, quad_points: int = 2048) -> float:
    """``(1/4pi) int_0^{2pi} f(phi) |e^{i phi} - 1|^2 dphi`` by the midpoint rule.

    ``f`` takes an array of eigenphase gaps ``phi`` and returns an array.
    """
    if quad_points < 1:
        raise ValueError("quad_points must be positive")
    h = 2 * math.pi / quad_points
    phi = (np.arange(quad_points) + 0.5) * h
    w = np.abs(np.exp(1j * phi) - 1) ** 2
    vals = np.asarray(f(phi), dtype=float) * np.ones_like(phi)
    return float((vals * w).sum() * h / (4 * math.pi))


def gap_to_theta(phi):
    """Fold an eigenphase difference into ``theta`` in ``[0, pi]``."""
    phi = np.mod(np.asarray(phi, dtype=float), 2 * math.pi)
    return np.minimum(phi, 2 * math.pi - phi)


def weyl_volume_d2(quad_points: int = 2048) -> float:
    return weyl_average_d2(lambda phi: gap_to_theta(phi) >= math.pi / 2, quad_points)


def weyl_mean_hdyn_d2(quad_points: int = 2048) -> float:
    return weyl_average_d2(lambda phi: hdyn_from_theta(gap_to_theta(phi)), quad_points)


def t3_radicand_polar(r, theta):
    r = np.asarray(r, dtype=float)
    return 4 + (2 * r / 3) ** 3 * np.cos(3 * theta) - 3 * (1 + r**2 / 9) ** 2


def trace_density_d3(tau):
    """Density of ``tr U`` for Haar ``U`` in SU(3) w.r.t. area; zero outside T_3."""
    tau = np.asarray(tau, dtype=complex)
    rad = t3_radicand_polar(np.abs(tau), np.angle(tau))
    out = 3 * math.sqrt(3) / (2 * math.pi**2) * np.sqrt(np.clip(rad, 0, None))
    return float(out) if out.ndim == 0 else out


def _polar_grid(r_points, theta_points, r_max):
    if r_points < 256 or theta_points < 256:
        raise ValueError("grid sizes must be >= 256 each")
    hr = r_max / r_points
    ht = 2 * math.pi / theta_points
    r = (np.arange(r_points) + 0.5) * hr
    t = (np.arange(theta_points) + 0.5) * ht
    R, T = np.meshgrid(r, t, indexing="ij")
    return R, T, R * hr * ht


def trace_normalization_d3(r_points: int = 1024, theta_points: int = 2048) -> float:
    R, T, dA = _polar_grid(r_points, theta_points, 3.0)
    return float((trace_density_d3(R * np.exp(1j * T)) * dA).sum())


def m_c3_quadrature(r_points: int = 1024, theta_points: int = 2048, lobes=(0, 1),
                    tol: float = 1e-9) -> float:
    """Haar volume of chaotic unitaries in U(3): density integrated over CT_3.

    ``lobes`` selects which of the two rotated copies to include (both by
    default); the copies only touch on a null set.
    """
    R, T, dA = _polar_grid(r_points, theta_points, 3.0)
    tau = R * np.exp(1j * T)
    dens = trace_density_d3(tau) * dA
    # the lobes have radius sqrt(3); only evaluate the root test where it matters
    live = (R <= math.sqrt(3) + 1e-12) & (dens > 0)
    hit = np.zeros(R.shape, dtype=bool)
    rots = [np.exp(1j * math.pi / 18), np.exp(-1j * math.pi / 18)]
    for i in lobes:
        w = math.sqrt(3) * np.conj(rots[i]) * tau[live]
        codes = _t3_codes(w, tol)
        hit[live] |= codes > 0
    return float(dens[hit].sum())


# -- Monte Carlo -----------------------------------------------------------


def _chunk_sizes(samples, workers):
    base, extra = divmod(samples, workers)
    return [base + (w < extra) for w in range(workers)]


def _run_chunks(d, samples, seed, workers, stat):
    """Apply ``stat`` (stack -> values) batch by batch on each worker's substream."""
    if workers < 1:
        raise ValueError("workers must be >= 1")

    def work(w, n):
        sampler = HaarSampler(d, seed, stream=w)
        out = []
        while n > 0:
            m = min(n, BATCH)
            out.append(np.asarray(stat(sampler.sample(m)), dtype=float))
            n -= m
        return np.concatenate(out) if out else np.empty(0)

    sizes = _chunk_sizes(samples, workers)
    if workers == 1:
        parts = [work(0, samples)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, range(workers), sizes))
    return np.concatenate(parts)


def _estimate(values, seed, workers, lower_bound=False) -> McEstimate:
    n = values.size
    sd = float(values.std(ddof=1)) if n > 1 else 0.0
    return McEstimate(float(values.mean()), sd / math.sqrt(n), n, seed, workers, lower_bound)


def _check_samples(samples, minimum=MIN_MC_SAMPLES):
    if samples < minimum:
        raise ValueError(f"need at least {minimum} samples, got {samples}")


def mc_chaotic_volume(d: int, samples: int, seed: int = 0, workers: int = 1,
                      min_samples: int = MIN_MC_SAMPLES) -> McEstimate:
    """Fraction of Haar unitaries the exact d=2 / d=3 tests call chaotic."""
    if d not in (2, 3):
        raise DimensionError("chaotic volume is decidable for d = 2 and d = 3 only")
    _check_samples(samples, min_samples)
    vals = _run_chunks(d, samples, seed, workers, exact_chaotic_batch)
    return _estimate(vals, seed, workers)


def _hdyn_d2_batch(U):
    tr = np.trace(U, axis1=-2, axis2=-1)
    c = np.clip(1 - np.abs(tr) ** 2 / 4, 0, 1)
    theta = 2 * np.arcsin(np.sqrt(c))
    return hdyn_from_theta(theta)


def mc_mean_hdyn_d2(samples: int, seed: int = 0, workers: int = 1,
                    min_samples: int = MIN_MC_SAMPLES) -> McEstimate:
    _check_samples(samples, min_samples)
    return _estimate(_run_chunks(2, samples, seed, workers, _hdyn_d2_batch), seed, workers)


def mc_mean_fixed_pvm(d: int, samples: int, seed: int = 0, workers: int = 1,
                      min_samples: int = 1) -> McEstimate:
    """Haar mean of the entropy rate for the computational PVM."""
    if d > MAX_OPT_DIM:
        raise SizeError(f"d <= {MAX_OPT_DIM} required")
    _check_samples(samples, min_samples)
    pvm = computational_pvm(d)
    vals = _run_chunks(d, samples, seed, workers, lambda U: entropy_rate(U, pvm))
    return _estimate(vals, seed, workers)


def mc_mean_maxent(d: int, samples: int, seed: int = 0, workers: int = 1,
                   starts: int = 32, tol: float = 1e-10, max_iters: int = 2000) -> McEstimate:
    """Haar mean of the optimizer's PVM-dynamical entropy (closed form at d=2).

    For ``d >= 3`` the optimizer gives lower bounds, so the estimate is
    flagged as a lower bound unless every sample was certified at ``ln d``.
    """
    if d > MAX_OPT_DIM:
        raise SizeError(f"d <= {MAX_OPT_DIM} required")
    _check_samples(samples, 1)
    uncertified = []

    def stat(U):
        out = []
        for u in U:
            res = pvm_dynamical_entropy(u, starts=starts, tol=tol, seed=seed, max_iters=max_iters)
            out.append(res.value)
            uncertified.append(not res.certified_chaotic)
        return out

    vals = _run_chunks(d, samples, seed, workers, stat)
    return _estimate(vals, seed, workers, lower_bound=d > 2 and any(uncertified))
