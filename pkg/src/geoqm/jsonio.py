"""JSON encodings of matrices, vectors and affine observables.

Matrices are ``{"n": int, "re": [[...]], "im": [[...]]}`` in row-major
order; vectors use the same keys with flat lists.  ``im`` may be omitted
for real data.
"""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .observables import AffineObservable, QuantParams


def _real_grid(obj, key, depth):
    data = obj.get(key)
    if data is None:
        return None
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"'{key}' is not a numeric array: {exc}") from None
    if arr.ndim != depth:
        raise SchemaError(f"'{key}' must be nested {depth} level(s) deep, got {arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise SchemaError(f"'{key}' contains NaN or infinite values")
    return arr


def _complex_payload(obj, depth: int) -> np.ndarray:
    if not isinstance(obj, dict):
        raise SchemaError("expected a JSON object with 're' (and optionally 'im', 'n')")
    re = _real_grid(obj, "re", depth)
    if re is None:
        raise SchemaError("missing 're'")
    im = _real_grid(obj, "im", depth)
    if im is not None and im.shape != re.shape:
        raise SchemaError(f"'re' has shape {re.shape} but 'im' has shape {im.shape}")
    out = re + 1j * im if im is not None else re.astype(np.complex128)
    if "n" in obj:
        n = obj["n"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise SchemaError("'n' must be an integer")
        if out.shape[0] != n:
            raise SchemaError(f"'n' is {n} but the payload has {out.shape[0]} rows")
    return out


def matrix_from_json(obj) -> np.ndarray:
    m = _complex_payload(obj, 2)
    if m.shape[0] != m.shape[1]:
        raise SchemaError(f"matrix is not square: {m.shape}")
    if m.shape[0] < 2:
        raise SchemaError("matrix dimension must be at least 2")
    return m


def vector_from_json(obj) -> np.ndarray:
    v = _complex_payload(obj, 1)
    if v.shape[0] < 2:
        raise SchemaError("vector length must be at least 2")
    return v


def state_from_json(obj) -> np.ndarray:
    """A state given either as a vector or as a density matrix."""
    if isinstance(obj, dict) and isinstance(obj.get("re"), list) and obj["re"] \
            and not isinstance(obj["re"][0], list):
        return vector_from_json(obj)
    return matrix_from_json(obj)


def _clean(x: float) -> float:
    x = float(x)
    return 0.0 if x == 0.0 else x  # drop negative zero


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=np.complex128)
    return {
        "n": int(a.shape[0]),
        "re": [[_clean(x) for x in row] for row in a.real],
        "im": [[_clean(x) for x in row] for row in a.imag],
    }


def vector_to_json(v) -> dict:
    v = np.asarray(v, dtype=np.complex128)
    return {"n": int(v.shape[0]), "re": [_clean(x) for x in v.real], "im": [_clean(x) for x in v.imag]}


def complex_to_json(z) -> dict:
    z = complex(z)
    return {"re": _clean(z.real), "im": _clean(z.imag)}


def observable_to_json(f: AffineObservable) -> dict:
    return {
        "n": f.n,
        "kappa": f.params.kappa,
        "kernel": matrix_to_json(f.kernel),
        "offset": complex_to_json(f.offset),
    }


def observable_from_json(obj) -> AffineObservable:
    try:
        kappa = float(obj["kappa"])
        kernel = matrix_from_json(obj["kernel"])
        off = obj["offset"]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed observable: missing {exc}") from None
    if isinstance(off, dict):
        offset = complex(float(off.get("re", 0.0)), float(off.get("im", 0.0)))
    else:
        offset = complex(float(off))
    if not (math.isfinite(kappa) and kappa > 0):
        raise SchemaError("kappa must be positive and finite")
    return AffineObservable(kernel, offset, QuantParams(kernel.shape[0], kappa))


def load_json(path) -> object:
    """Read JSON from ``path``; raises ``FileNotFoundError`` or :class:`SchemaError`."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None


def file_digest(*paths) -> str:
    """SHA-256 over the bytes of the given files, in order."""
    h = hashlib.sha256()
    for p in paths:
        if p is None:
            continue
        h.update(Path(p).read_bytes())
    return h.hexdigest()


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"
