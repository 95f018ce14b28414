import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from qdynent.errors import DimensionError, DomainError
from qdynent.estimators import (ChaosClassifier, DynamicalEntropyEstimator,
                                PVMEntropyTransformer, check_unitaries)
from qdynent.maxent import hdyn_closed_form_d2
from qdynent.measure import sic_povm

from conftest import fourier_unitary, haar


def test_check_unitaries_shapes_and_errors():
    assert check_unitaries(np.eye(2)).shape == (1, 2, 2)
    assert check_unitaries(haar(3, 0, n=4)).shape == (4, 3, 3)
    with pytest.raises(DimensionError):
        check_unitaries(np.ones((2, 3)))
    with pytest.raises(DimensionError, match="dimension mismatch"):
        check_unitaries(np.eye(3), dim=2)
    with pytest.raises(DomainError, match="sample 1"):
        check_unitaries(np.stack([np.eye(2), 2 * np.eye(2)]))
    with pytest.raises(DomainError):
        check_unitaries(np.full((2, 2), np.nan))


def test_transformer_columns():
    X = haar(2, 3, n=5)
    cols = PVMEntropyTransformer().fit_transform(X)
    assert cols.shape == (5, 3)
    assert np.allclose(cols[:, 1], 0) and np.allclose(cols[:, 0], cols[:, 2])
    sic = PVMEntropyTransformer(povm=sic_povm(2)).fit(X).transform(X)
    assert np.allclose(sic[:, 1], 1.242453, atol=1e-6)
    F = fourier_unitary(2)
    rot = PVMEntropyTransformer(basis=F).fit_transform(np.eye(2))
    assert rot[0, 0] == pytest.approx(0, abs=1e-12)


def test_transformer_dimension_guard():
    est = PVMEntropyTransformer(povm=sic_povm(3))
    with pytest.raises(DimensionError):
        est.fit(haar(2, 0, n=2))
    est = PVMEntropyTransformer().fit(haar(2, 0, n=2))
    with pytest.raises(DimensionError):
        est.transform(haar(3, 0, n=2))


def test_not_fitted():
    with pytest.raises(NotFittedError):
        ChaosClassifier().predict(np.eye(2))


def test_params_and_clone():
    est = DynamicalEntropyEstimator(starts=4, seed=9)
    assert est.get_params() == {"starts": 4, "seed": 9, "tol": 1e-10, "max_iters": 2000}
    twin = clone(est).set_params(starts=2)
    assert twin.starts == 2 and est.starts == 4


def test_dynamical_estimator_matches_closed_form():
    X = haar(2, 11, n=6)
    est = DynamicalEntropyEstimator(starts=4).fit(X)
    vals = est.transform(X)[:, 0]
    assert np.allclose(vals, [hdyn_closed_form_d2(u) for u in X], atol=1e-6)
    assert list(est.predict(X)) == [v >= math.log(2) - 1e-6 for v in vals]


def test_classifier_in_pipeline():
    X = np.stack([np.eye(2), fourier_unitary(2), np.diag([1, 1j])])
    pipe = make_pipeline(FunctionTransformer(), ChaosClassifier()).fit(X)
    assert list(pipe.predict(X)) == ["NotChaotic", "Chaotic", "Chaotic"]
    assert set(pipe[-1].classes_) == {"Chaotic", "NotChaotic", "Undetermined"}
