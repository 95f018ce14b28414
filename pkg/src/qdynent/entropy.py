"""Shannon-type entropies of the outcome process (natural logarithms)."""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SizeError
from .matcore import as_matrix
from .measure import (
    RankOnePOVM,
    born_probabilities,
    maximally_mixed,
    pure_state,
    transition_matrix,
    wigner_string_probability,
)

ETA_FLOOR = 1e-300
MAX_BLOCK_STRINGS = 10**7


def shannon_eta(x):
    """``-x ln x`` with ``eta(0) = 0``; arrays are handled elementwise."""
    a = np.asarray(x, dtype=float)
    if np.any(a < 0):
        raise DomainError("shannon_eta is defined for x >= 0 only")
    safe = np.where(a < ETA_FLOOR, 1.0, a)
    out = np.where(a < ETA_FLOOR, 0.0, -safe * np.log(safe))
    if out.ndim == 0:
        return float(out)
    return out


def _eta_sum(p, axis=None):
    # tiny negative round-off from |.|^2 arithmetic is clipped, not rejected
    return shannon_eta(np.clip(p, 0.0, None)).sum(axis=axis)


@dataclass(frozen=True)
class EntropyReport:
    rate: float
    measurement: float
    dynamical: float

    def as_dict(self):
        return {"rate": self.rate, "measurement": self.measurement, "dynamical": self.dynamical}


@dataclass(frozen=True)
class BlockEntropySeries:
    values: np.ndarray
    differences: np.ndarray


def entropy_rate(U, povm: RankOnePOVM):
    """``H(U, Pi) = (1/k) sum_jl eta(p_jl)``; vectorized over stacks of ``U``."""
    P = transition_matrix(U, povm)
    rate = _eta_sum(P, axis=(-2, -1)) / povm.n_outcomes
    return float(rate) if P.ndim == 2 else rate


def entropy_rate_overlap_form(U, povm: RankOnePOVM) -> float:
    """Same rate written as ``ln(k/d) + (d/k^2) sum eta(|<phi_j|U|phi_l>|^2)``."""
    U = as_matrix(U, "U")
    k, d = povm.n_outcomes, povm.dim
    amp = povm.columns.conj().T @ U @ povm.columns
    return math.log(k / d) + d / k**2 * float(_eta_sum(np.abs(amp) ** 2))


def measurement_entropy(povm: RankOnePOVM) -> float:
    return entropy_rate(np.eye(povm.dim), povm)


def dynamical_entropy(U, povm: RankOnePOVM) -> EntropyReport:
    rate = entropy_rate(U, povm)
    meas = measurement_entropy(povm)
    return EntropyReport(rate=rate, measurement=meas, dynamical=rate - meas)


def state_entropy(rho, povm: RankOnePOVM) -> float:
    return float(_eta_sum(born_probabilities(povm, rho)))


def entropy_rate_as_mean(U, povm: RankOnePOVM) -> float:
    """Average of the measurement entropy over the states ``U|phi_j>``."""
    U = as_matrix(U, "U")
    outputs = (U @ povm.columns).T
    return float(np.mean([state_entropy(pure_state(v), povm) for v in outputs]))


def block_entropies(U, povm: RankOnePOVM, n_max: int) -> BlockEntropySeries:
    """Exhaustive ``H_1 .. H_n_max`` over all outcome strings from ``I/d``."""
    k = povm.n_outcomes
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if k**n_max > MAX_BLOCK_STRINGS:
        raise SizeError(f"{k}^{n_max} strings exceed the enumeration guard {MAX_BLOCK_STRINGS}")
    P = transition_matrix(U, povm)
    probs = born_probabilities(povm, maximally_mixed(povm.dim))
    values = [float(_eta_sum(probs))]
    # probs[..., last symbol]; extend by one symbol per step
    for _ in range(n_max - 1):
        probs = probs[..., None] * P
        values.append(float(_eta_sum(probs)))
    values = np.array(values)
    return BlockEntropySeries(values=values, differences=np.diff(values))


def string_probabilities(U, povm: RankOnePOVM, n: int) -> dict:
    """Map every outcome string of length ``n`` (1-based) to its probability."""
    rho = maximally_mixed(povm.dim)
    return {
        s: wigner_string_probability(U, povm, rho, s)
        for s in itertools.product(range(1, povm.n_outcomes + 1), repeat=n)
    }


def simulate_outcomes(U, povm: RankOnePOVM, steps: int, seed: int) -> np.ndarray:
    """Sample a 0-based outcome trajectory started from the uniform distribution."""
    P = transition_matrix(U, povm)
    k = povm.n_outcomes
    rng = np.random.Generator(np.random.Philox(seed))
    u = rng.random(steps)
    cum = [list(np.cumsum(row)) for row in P]
    out = np.empty(steps, dtype=np.int64)
    s = min(int(u[0] * k), k - 1)
    out[0] = s
    last = k - 1
    for i in range(1, steps):
        s = bisect.bisect_right(cum[s], u[i])
        if s > last:
            s = last
        out[i] = s
    return out


def empirical_entropy_rate(U, povm: RankOnePOVM, steps: int, seed: int) -> float:
    """Plug-in conditional entropy of consecutive outcome pairs."""
    if steps < 10**4:
        raise ValueError("empirical_entropy_rate needs steps >= 10^4")
    k = povm.n_outcomes
    path = simulate_outcomes(U, povm, steps, seed)
    counts = np.bincount(path[:-1] * k + path[1:], minlength=k * k).reshape(k, k).astype(float)
    total = counts.sum()
    row = counts.sum(axis=1, keepdims=True)
    mask = counts > 0
    cond = np.where(mask, counts / np.where(row > 0, row, 1), 1.0)
    return float(-(counts[mask] / total * np.log(cond[mask])).sum()) + 0.0  # no -0.0
