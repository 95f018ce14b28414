"""Quantum dynamical entropy of finite-dimensional unitaries.

Entropy rates of repeated rank-1 measurements, PVM-dynamical entropy and its
maximizing bases, chaoticity tests for unitaries, and Haar-ensemble
estimators (Monte Carlo and Weyl-formula quadrature).
"""

from .errors import (
    ConstructionError,
    DimensionError,
    DomainError,
    NumericalError,
    SizeError,
)

from .chaos import ChaosVerdict, classify, ct_region, in_T3, in_trace_region
from .entropy import dynamical_entropy, entropy_rate, measurement_entropy
from .haar import HaarSampler
from .maxent import hdyn_closed_form_d2, pvm_dynamical_entropy
from .measure import computational_pvm, pvm_from_unitary, sic_povm, validate_povm

__version__ = "0.1.0"

__all__ = [
    "ChaosVerdict",
    "HaarSampler",
    "classify",
    "computational_pvm",
    "ct_region",
    "dynamical_entropy",
    "entropy_rate",
    "hdyn_closed_form_d2",
    "in_T3",
    "in_trace_region",
    "measurement_entropy",
    "pvm_dynamical_entropy",
    "pvm_from_unitary",
    "sic_povm",
    "validate_povm",
    "ConstructionError",
    "DimensionError",
    "DomainError",
    "NumericalError",
    "SizeError",
]
