"""JSON interchange for matrices and vectors.

Both use ``{"n": <int>, "data": [[re, im], ...]}``; matrices hold ``n*n``
entries in row-major order. The canonical form written by
:func:`emit_matrix` / :func:`emit_vector` has sorted keys and floats with 17
significant digits, so parse followed by emit reproduces a canonical file
byte for byte.
"""

import json
import math
from pathlib import Path

import numpy as np

from .errors import ParseError
from .exact import GaussianRational
from .linalg import as_matrix, as_vector, to_float

__all__ = ["parse_matrix", "parse_vector", "load_matrix", "load_vector",
           "emit_matrix", "emit_vector", "matrix_to_json", "to_jsonable"]


def _reject_constant(name):
    raise ParseError(f"non-finite literal {name} is not allowed")


def _load(source):
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {source}: {exc}") from exc
    else:
        text = str(source)
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def _entries(doc, count_of_n):
    if not isinstance(doc, dict) or "n" not in doc or "data" not in doc:
        raise ParseError('expected an object with keys "n" and "data"')
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParseError(f'"n" must be a positive integer, got {n!r}')
    data = doc["data"]
    if not isinstance(data, list) or len(data) != count_of_n(n):
        got = len(data) if isinstance(data, list) else type(data).__name__
        raise ParseError(f'"data" must hold {count_of_n(n)} entries, got {got}')
    out = []
    for i, pair in enumerate(data):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ParseError(f"entry {i} is not a [re, im] pair")
        for x in pair:
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ParseError(f"entry {i} has a non-numeric part {x!r}")
            if not math.isfinite(x):
                raise ParseError(f"entry {i} is not finite")
        out.append(pair)
    return n, out


def _values(pairs, exact):
    if exact:
        return [GaussianRational(re, im) for re, im in pairs]
    return [complex(re, im) for re, im in pairs]


def parse_matrix(source, exact=False) -> np.ndarray:
    """Parse a matrix document (a path or JSON text).

    With ``exact=True`` each float converts to its exact binary value.
    """
    n, pairs = _entries(_load(source), lambda n: n * n)
    vals = _values(pairs, exact)
    return as_matrix([vals[i * n:(i + 1) * n] for i in range(n)], exact=exact)


def parse_vector(source, exact=False) -> np.ndarray:
    n, pairs = _entries(_load(source), lambda n: n)
    return as_vector(_values(pairs, exact), exact=exact)


load_matrix = parse_matrix
load_vector = parse_vector


def _fmt(x: float) -> str:
    if x == 0:
        x = 0.0  # drop the sign of negative zero
    return format(x, ".17g")


def _emit(n, flat):
    pairs = ", ".join(f"[{_fmt(z.real)}, {_fmt(z.imag)}]" for z in flat)
    return f'{{"data": [{pairs}], "n": {n}}}\n'


def emit_matrix(m) -> str:
    m = to_float(m)
    return _emit(m.shape[0], m.ravel())


def emit_vector(v) -> str:
    v = to_float(v)
    return _emit(v.shape[0], v)


def matrix_to_json(m) -> dict:
    m = to_float(m)
    return {"n": int(m.shape[0]), "data": [[float(z.real), float(z.imag)] for z in m.ravel()]}


def to_jsonable(obj):
    """Recursively convert numpy arrays, complex numbers and Fractions."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2 and obj.shape[0] == obj.shape[1]:
            return matrix_to_json(obj)
        if obj.ndim == 1:
            return {"n": int(obj.shape[0]),
                    "data": [[float(z.real), float(z.imag)] for z in to_float(obj)]}
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    try:
        return float(obj)
    except TypeError:
        z = complex(obj)
        return [z.real, z.imag]
