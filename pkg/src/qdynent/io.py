"""JSON/CSV file formats.

Matrices: ``{"dim": d, "rows": [[[re, im], ...], ...]}``.
POVMs: ``{"dim": d, "vectors": [[[re, im], ...], ...]}`` (one vector per
entry); a file in the matrix format is read as the PVM of its columns.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .errors import DimensionError
from .measure import RankOnePOVM, pvm_from_unitary, validate_povm

JSON_DIGITS = 12
CSV_DIGITS = 9


def _pairs_to_array(rows, what):
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{what}: entries must be [re, im] number pairs") from exc
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValueError(f"{what}: expected a nested list of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def matrix_from_json(obj) -> np.ndarray:
    if "rows" not in obj or "dim" not in obj:
        raise ValueError("matrix JSON needs 'dim' and 'rows'")
    M = _pairs_to_array(obj["rows"], "matrix")
    d = int(obj["dim"])
    if M.shape != (d, d):
        raise DimensionError(f"dimension mismatch: dim={d} but rows have shape {M.shape}")
    return M


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"dim": M.shape[0], "rows": [[[z.real, z.imag] for z in row] for row in M]}


def povm_from_json(obj) -> RankOnePOVM:
    if "vectors" in obj:
        V = _pairs_to_array(obj["vectors"], "povm")
        return validate_povm(V, int(obj["dim"]) if "dim" in obj else None)
    return pvm_from_unitary(matrix_from_json(obj))


def povm_to_json(povm: RankOnePOVM) -> dict:
    return {"dim": povm.dim, "vectors": [[[z.real, z.imag] for z in v] for v in povm.vectors]}


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


def read_matrix(path) -> np.ndarray:
    return matrix_from_json(load_json(path))


def read_povm(path) -> RankOnePOVM:
    return povm_from_json(load_json(path))


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj) + "\n")


def _round_sig(x, digits):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x) or x == 0:
            return x
        return float(f"{x:.{digits}g}")
    if isinstance(x, dict):
        return {k: _round_sig(v, digits) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round_sig(v, digits) for v in x]
    if isinstance(x, np.ndarray):
        return _round_sig(x.tolist(), digits)
    return x


def dumps(obj, digits: int = JSON_DIGITS) -> str:
    """JSON with every float cut to ``digits`` significant digits."""
    return json.dumps(_round_sig(obj, digits))


def csv_text(header, rows, digits: int = CSV_DIGITS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.{digits}g}" if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()
