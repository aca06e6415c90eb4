"""JSON interchange for hermitian matrices.

Format: ``{"dims": [n1, ..., ns], "re": [[...]], "im": [[...]]}``. Floats are
written with Python's shortest round-trip representation, so a matrix
written and read back is bit-identical.
"""

import json
from pathlib import Path

import numpy as np

from .errors import DomainError
from .linalg import as_hermitian, check_dims

#: Largest entrywise departure from hermiticity accepted on load.
HERMITIAN_ATOL = 1e-12


def matrix_to_dict(m, dims):
    m = np.asarray(m, dtype=complex)
    dims = check_dims(dims, m.shape[0])
    return {"dims": list(dims), "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_dict(obj, hermitian=True):
    """Parse and validate a matrix record; returns ``(matrix, dims)``.

    Raises
    ------
    DomainError
        On missing keys, ragged or non-square arrays, a ``dims`` mismatch, or
        hermiticity violated beyond :data:`HERMITIAN_ATOL`.
    """
    if not isinstance(obj, dict):
        raise DomainError("matrix JSON must be an object with keys dims, re, im")
    missing = [k for k in ("dims", "re", "im") if k not in obj]
    if missing:
        raise DomainError(f"matrix JSON is missing keys: {', '.join(missing)}")
    try:
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj["im"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"matrix JSON entries are not numeric arrays: {exc}") from exc
    if re.ndim != 2 or re.shape[0] != re.shape[1]:
        raise DomainError(f"'re' must be a square 2-D array, got shape {re.shape}")
    if im.shape != re.shape:
        raise DomainError(f"'re' and 'im' shapes differ: {re.shape} vs {im.shape}")
    dims = check_dims(obj["dims"], re.shape[0])
    m = re + 1j * im
    if hermitian:
        m = as_hermitian(m, HERMITIAN_ATOL)
    return m, dims


def save_matrix(path, m, dims):
    Path(path).write_text(json.dumps(matrix_to_dict(m, dims)))


def load_matrix(path, hermitian=True):
    """Read a matrix file; returns ``(matrix, dims)``."""
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: malformed JSON ({exc})") from exc
    try:
        return matrix_from_dict(obj, hermitian)
    except DomainError as exc:
        raise DomainError(f"{path}: {exc}") from exc


def save_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2))


def load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: malformed JSON ({exc})") from exc
