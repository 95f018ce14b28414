"""Seeded Haar-random unitaries.

Uniforms come from numpy's Philox4x64 counter-based generator
(``Generator.random`` maps the top 53 bits of each 64-bit output to
``[0, 1)``); Gaussians are produced from those uniforms by Box-Muller so the
whole stream is fixed by the seed. Independent substreams for parallel
workers are keyed by ``(seed, worker_index)``.
"""

from __future__ import annotations

import numpy as np


def _generator(seed: int, stream: int | None = None) -> np.random.Generator:
    if stream is None:
        ss = np.random.SeedSequence(seed)
    else:
        ss = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(ss))


def complex_gaussians(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex normals (``E|z|^2 = 1``) by Box-Muller."""
    u1 = 1.0 - rng.random(shape)  # (0, 1], keeps the log finite
    u2 = rng.random(shape)
    return np.sqrt(-np.log(u1)) * np.exp(2j * np.pi * u2)


def haar_from_ginibre(Z) -> np.ndarray:
    """QR of Ginibre matrices with R's diagonal phases moved into Q."""
    Q, R = np.linalg.qr(Z)
    diag = np.diagonal(R, axis1=-2, axis2=-1)
    ph = diag / np.abs(diag)
    return Q * ph[..., None, :]


class HaarSampler:
    """Stream of Haar-distributed unitaries on ``U(dim)``.

    Two samplers built with the same ``(dim, seed, stream)`` emit identical
    matrices.
    """

    def __init__(self, dim: int, seed: int = 0, stream: int | None = None):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = int(dim)
        self.seed = int(seed)
        self.stream = stream
        self._rng = _generator(self.seed, stream)

    def __repr__(self):
        return f"HaarSampler(dim={self.dim}, seed={self.seed}, stream={self.stream})"

    def sample(self, n: int | None = None) -> np.ndarray:
        """One ``(d, d)`` unitary, or a ``(n, d, d)`` stack when ``n`` is given."""
        shape = (1 if n is None else n, self.dim, self.dim)
        U = haar_from_ginibre(complex_gaussians(self._rng, shape))
        return U[0] if n is None else U


def haar_unitary(sampler: HaarSampler) -> np.ndarray:
    return sampler.sample()
