"""Named quantum gates and their chaoticity verdicts."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chaos import ChaosVerdict, Status, classify
from .errors import DomainError, SizeError
from .matcore import fourier_matrix, is_unitary, require_unitary

_S2 = 1 / math.sqrt(2)
_W8 = complex(_S2, _S2)  # e^{i pi/4}


def _perm_matrix(images):
    n = len(images)
    M = np.zeros((n, n), dtype=complex)
    M[images, np.arange(n)] = 1
    return M


def controlled(u, controls: int = 1) -> np.ndarray:
    """Apply ``u`` to the last qubit(s) when all ``controls`` leading qubits are 1."""
    u = np.asarray(u, dtype=complex)
    n = u.shape[0] * 2**controls
    M = np.eye(n, dtype=complex)
    M[n - u.shape[0]:, n - u.shape[0]:] = u
    return M


def deutsch(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return controlled(np.array([[1j * c, s], [s, 1j * c]]), controls=2)


_FIXED = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _S2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
    "S": np.diag([1, 1j]).astype(complex),
    "T": np.diag([1, _W8]).astype(complex),
    "SQRT_NOT": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]),
    "SWAP": _perm_matrix([0, 2, 1, 3]),
    "ISWAP": np.array([[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex),
    "SQRT_SWAP": np.array(
        [[1, 0, 0, 0], [0, (1 + 1j) / 2, (1 - 1j) / 2, 0], [0, (1 - 1j) / 2, (1 + 1j) / 2, 0], [0, 0, 0, 1]]
    ),
    "TOFFOLI": _perm_matrix([0, 1, 2, 3, 4, 5, 7, 6]),
    "FREDKIN": _perm_matrix([0, 1, 2, 3, 4, 6, 5, 7]),
}
_FIXED["CNOT"] = controlled(_FIXED["X"])
_FIXED["CSIGN"] = controlled(_FIXED["Z"])
_FIXED["SQRT_CNOT"] = controlled(_FIXED["SQRT_NOT"])

# chaotic / not chaotic as stated for the standard gate list
STATED_CLAIMS = {
    "H": Status.CHAOTIC, "X": Status.CHAOTIC, "Y": Status.CHAOTIC, "Z": Status.CHAOTIC,
    "S": Status.CHAOTIC, "SQRT_NOT": Status.CHAOTIC, "CNOT": Status.CHAOTIC,
    "CSIGN": Status.CHAOTIC, "SWAP": Status.CHAOTIC, "ISWAP": Status.CHAOTIC,
    "FOURIER": Status.CHAOTIC,
    "T": Status.NOT_CHAOTIC, "SQRT_CNOT": Status.NOT_CHAOTIC, "SQRT_SWAP": Status.NOT_CHAOTIC,
    "TOFFOLI": Status.NOT_CHAOTIC, "FREDKIN": Status.NOT_CHAOTIC, "DEUTSCH": Status.NOT_CHAOTIC,
}

GATE_NAMES = tuple(_FIXED) + ("DEUTSCH", "CONTROLLED_U", "FOURIER")

_ALIASES = {"HADAMARD": "H", "NOT": "X", "PAULI_X": "X", "PAULI_Y": "Y", "PAULI_Z": "Z",
            "CZ": "CSIGN", "CPHASE": "CSIGN", "CCNOT": "TOFFOLI", "CSWAP": "FREDKIN"}


@dataclass(frozen=True, eq=False)
class GateEntry:
    name: str
    dim: int
    matrix: np.ndarray
    paper_claim: Status | None


def gate(name: str, *params) -> GateEntry:
    """Look up a gate by name; ``DEUTSCH`` takes theta, ``CONTROLLED_U`` a 2x2 unitary, ``FOURIER`` d."""
    key = name.strip().upper().replace("-", "_")
    key = _ALIASES.get(key, key)
    claim = STATED_CLAIMS.get(key)
    if key in _FIXED:
        if params:
            raise ValueError(f"gate {key} takes no parameters")
        M = _FIXED[key].copy()
        label = key
    elif key == "DEUTSCH":
        if len(params) != 1:
            raise ValueError("DEUTSCH needs one angle theta")
        M = deutsch(float(params[0]))
        label = f"DEUTSCH({float(params[0]):.6g})"
    elif key == "CONTROLLED_U":
        if len(params) != 1:
            raise ValueError("CONTROLLED_U needs one 2x2 unitary")
        u = require_unitary(params[0], 1e-12, "u2")
        if u.shape != (2, 2):
            raise SizeError("CONTROLLED_U needs a 2x2 unitary")
        M = controlled(u)
        label = "CONTROLLED_U"
    elif key == "FOURIER":
        if len(params) != 1 or int(params[0]) < 1:
            raise ValueError("FOURIER needs a dimension d >= 1")
        d = int(params[0])
        M = fourier_matrix(d) / math.sqrt(d)
        label = f"FOURIER({d})"
    else:
        raise ValueError(f"unknown gate {name!r}; known: {', '.join(GATE_NAMES)}")
    if not is_unitary(M, 1e-12).passed:
        raise DomainError(f"gate {label} failed its unitarity check")
    return GateEntry(label, M.shape[0], M, claim)


CATALOGUE = (
    ("H",), ("X",), ("Y",), ("Z",), ("S",), ("T",), ("SQRT_NOT",),
    ("CNOT",), ("CSIGN",), ("SWAP",), ("ISWAP",), ("SQRT_CNOT",), ("SQRT_SWAP",),
    ("TOFFOLI",), ("FREDKIN",), ("DEUTSCH", math.pi / 4), ("DEUTSCH", math.pi / 2),
    ("FOURIER", 3), ("FOURIER", 4),
)


def catalogue() -> list[GateEntry]:
    return [gate(*spec) for spec in CATALOGUE]


def classify_catalogue(starts: int = 32, seed: int = 0) -> list[tuple[GateEntry, ChaosVerdict]]:
    return [(g, classify(g.matrix, starts=starts, seed=seed)) for g in catalogue()]


def disagreements(rows) -> list[str]:
    return [g.name for g, v in rows if g.paper_claim is not None and v.status is not g.paper_claim]


def not_equivalent_phase_gap(u2, tol: float = 1e-9) -> bool:
    """True when the two eigenphases of ``u2`` differ by pi (NOT up to conjugation and phase)."""
    u = require_unitary(u2)
    # eigenvalues l1, l2 with l1 = -l2 exactly when the trace vanishes
    return abs(np.trace(u)) <= tol


def controlled_u_chaotic_test(u2, starts: int = 32, seed: int = 0) -> ChaosVerdict:
    """Verdict for the 4x4 controlled-``u2``."""
    return classify(gate("CONTROLLED_U", u2).matrix, starts=starts, seed=seed)
