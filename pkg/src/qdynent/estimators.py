"""scikit-learn style wrappers over the functional API.

Inputs are stacks of unitaries shaped ``(n, d, d)``; a single ``(d, d)``
matrix is treated as a stack of one. The estimators hold no learned state
beyond the dimension seen in ``fit``, so they mainly serve pipelines and
parameter grids (``get_params`` / ``set_params``).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .chaos import Status, classify
from .entropy import dynamical_entropy
from .errors import DimensionError, DomainError
from .matcore import DEFAULT_TOL, unitarity_deviation
from .maxent import pvm_dynamical_entropy
from .measure import computational_pvm, pvm_from_unitary


def check_unitaries(X, tol: float = DEFAULT_TOL, dim: int | None = None) -> np.ndarray:
    """Validate ``X`` as a ``(n, d, d)`` stack of unitaries and return it as complex."""
    X = np.asarray(X, dtype=complex)
    if X.ndim == 2:
        X = X[None]
    if X.ndim != 3 or X.shape[1] != X.shape[2] or X.shape[0] == 0:
        raise DimensionError(f"expected a (n, d, d) stack of square matrices, got shape {X.shape}")
    if dim is not None and X.shape[1] != dim:
        raise DimensionError(f"dimension mismatch: fitted on d={dim}, got d={X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise DomainError("input contains non-finite entries")
    dev = unitarity_deviation(X)
    if np.any(dev > tol):
        worst = int(np.argmax(dev))
        raise DomainError(f"sample {worst} is not unitary: max |U*U - I| = {dev[worst]:.3e}")
    return X


class _UnitaryEstimator(BaseEstimator):
    def fit(self, X, y=None):
        X = check_unitaries(X)
        self.dim_ = X.shape[1]
        self.n_features_in_ = self.dim_ * self.dim_
        return self

    def _check(self, X):
        check_is_fitted(self, "dim_")
        return check_unitaries(X, dim=self.dim_)


class PVMEntropyTransformer(TransformerMixin, _UnitaryEstimator):
    """Columns ``rate, measurement, dynamical`` for a fixed measurement.

    ``basis`` is a unitary whose columns define the PVM (computational basis
    when omitted); ``povm`` overrides it with any :class:`RankOnePOVM`.
    """

    def __init__(self, basis=None, povm=None):
        self.basis = basis
        self.povm = povm

    def fit(self, X, y=None):
        super().fit(X)
        if self.povm is not None:
            self.povm_ = self.povm
        elif self.basis is not None:
            self.povm_ = pvm_from_unitary(self.basis)
        else:
            self.povm_ = computational_pvm(self.dim_)
        if self.povm_.dim != self.dim_:
            raise DimensionError(f"dimension mismatch: POVM on C^{self.povm_.dim}, data on C^{self.dim_}")
        return self

    def transform(self, X):
        X = self._check(X)
        reps = [dynamical_entropy(U, self.povm_) for U in X]
        return np.array([[r.rate, r.measurement, r.dynamical] for r in reps])


class DynamicalEntropyEstimator(TransformerMixin, _UnitaryEstimator):
    """PVM-dynamical entropy per sample; ``predict`` reports certified chaoticity."""

    def __init__(self, starts=32, seed=0, tol=1e-10, max_iters=2000):
        self.starts = starts
        self.seed = seed
        self.tol = tol
        self.max_iters = max_iters

    def _run(self, X):
        X = self._check(X)
        return [
            pvm_dynamical_entropy(U, starts=self.starts, tol=self.tol, seed=self.seed,
                                  max_iters=self.max_iters)
            for U in X
        ]

    def transform(self, X):
        return np.array([[r.value] for r in self._run(X)])

    def predict(self, X):
        return np.array([r.certified_chaotic for r in self._run(X)])


class ChaosClassifier(_UnitaryEstimator):
    """Labels each unitary ``Chaotic``, ``NotChaotic`` or ``Undetermined``."""

    def __init__(self, starts=32, seed=0):
        self.starts = starts
        self.seed = seed

    def fit(self, X, y=None):
        super().fit(X)
        self.classes_ = np.array([s.value for s in Status])
        return self

    def verdicts(self, X):
        X = self._check(X)
        return [classify(U, starts=self.starts, seed=self.seed) for U in X]

    def predict(self, X):
        return np.array([v.status.value for v in self.verdicts(X)])
