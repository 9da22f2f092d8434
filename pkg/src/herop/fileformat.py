"""Tuple files: a JSON document holding ``d`` commuting ``n x n`` matrices.

Layout (format_version 1)::

    {
      "format_version": 1,
      "d": 2,
      "n": 2,
      "metadata": {"name": "..."},
      "A": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],      (optional, identity if absent)
      "operators": [ <matrix>, ... ]
    }

A matrix is a list of rows and a row is a list of ``[re, im]`` pairs. Any
other top-level key is kept verbatim as an extra section. The writer is
canonical (fixed key order, one matrix row per line, shortest round-trip
floats), so writing a parsed file reproduces it byte for byte.
"""
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import TupleFileError
from .tuples import CommutingTuple

FORMAT_VERSION = 1
_CORE_KEYS = ("format_version", "d", "n", "metadata", "A", "operators")


@dataclass
class TupleFile:
    d: int
    n: int
    operators: list
    A: np.ndarray = None
    metadata: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    @classmethod
    def from_tuple(cls, T, A=None, metadata=None, extras=None):
        return cls(
            d=T.d,
            n=T.n,
            operators=[np.array(t) for t in T.operators],
            A=None if A is None else np.asarray(A, dtype=np.complex128),
            metadata=dict(metadata or {}),
            extras=dict(extras or {}),
        )

    def to_tuple(self, commutation_tol=None):
        if commutation_tol is None:
            return CommutingTuple(self.operators)
        return CommutingTuple(self.operators, commutation_tol=commutation_tol)

    def A_or_identity(self):
        return np.eye(self.n, dtype=np.complex128) if self.A is None else self.A

    def __eq__(self, other):
        if not isinstance(other, TupleFile):
            return NotImplemented
        same_a = (self.A is None and other.A is None) or (
            self.A is not None and other.A is not None and np.array_equal(self.A, other.A)
        )
        return (
            (self.format_version, self.d, self.n, self.metadata, self.extras)
            == (other.format_version, other.d, other.n, other.metadata, other.extras)
            and same_a
            and len(self.operators) == len(other.operators)
            and all(np.array_equal(a, b) for a, b in zip(self.operators, other.operators))
        )


# writing

def format_number(x):
    """Shortest text that parses back to the same float; integral values print as ints."""
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        raise TupleFileError(f"non-finite value {x!r} cannot be written")
    if x == 0.0:
        return "-0.0" if math.copysign(1.0, x) < 0 else "0"
    if x.is_integer() and abs(x) < 2.0 ** 53:
        return str(int(x))
    return repr(x)


def matrix_to_json(m):
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _depth(v):
    if isinstance(v, dict):
        return 3
    if isinstance(v, (list, tuple)):
        return 1 + max((_depth(x) for x in v), default=0)
    return 0


def _dump(v, level):
    pad = "  " * (level + 1)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_dump(x, level + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * level + "}"
    if isinstance(v, (list, tuple)):
        v = list(v)
        if _depth(v) <= 2:
            return "[" + ", ".join(_dump(x, level + 1) for x in v) + "]"
        return "[\n" + ",\n".join(pad + _dump(x, level + 1) for x in v) + "\n" + "  " * level + "]"
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return format_number(v)


def dumps_canonical(doc):
    """Canonical text for a JSON-like document (no trailing spaces, final newline)."""
    return _dump(doc, 0) + "\n"


def to_document(tf):
    doc = {"format_version": tf.format_version, "d": tf.d, "n": tf.n}
    if tf.metadata:
        doc["metadata"] = dict(tf.metadata)
    if tf.A is not None:
        doc["A"] = matrix_to_json(tf.A)
    doc["operators"] = [matrix_to_json(t) for t in tf.operators]
    for k in sorted(tf.extras):
        doc[k] = tf.extras[k]
    return doc


def serialize_tuple_file(tf):
    return dumps_canonical(to_document(tf)).encode("utf-8")


# parsing

def _reject_constant(name):
    raise ValueError(f"{name} is not allowed")


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ValueError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _int_field(doc, key, minimum=1):
    if key not in doc:
        raise TupleFileError(f"missing field '{key}'", key)
    v = doc[key]
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise TupleFileError(f"'{key}' must be an integer >= {minimum}, got {v!r}", key)
    return v


def matrix_from_json(v, n, locus):
    if not isinstance(v, list) or len(v) != n:
        rows = len(v) if isinstance(v, list) else type(v).__name__
        raise TupleFileError(f"expected {n} rows, got {rows}", locus)
    out = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(v):
        if not isinstance(row, list) or len(row) != n:
            cols = len(row) if isinstance(row, list) else type(row).__name__
            raise TupleFileError(f"expected {n}x{n}, row {i} has {cols} entries", locus)
        for j, z in enumerate(row):
            where = f"{locus}[{i}][{j}]"
            if not (isinstance(z, list) and len(z) == 2 and all(_is_number(c) for c in z)):
                raise TupleFileError(f"entry must be a [re, im] number pair, got {z!r}", where)
            re_, im_ = float(z[0]), float(z[1])
            if not (math.isfinite(re_) and math.isfinite(im_)):
                raise TupleFileError("entry is not finite", where)
            out[i, j] = complex(re_, im_)
    return out


def parse_tuple_file(data):
    """Validate and decode a tuple file given as bytes (or text)."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TupleFileError(f"not UTF-8: {exc.reason}", f"byte {exc.start}") from None
    else:
        text = data
    try:
        doc = json.loads(text, object_pairs_hook=_no_duplicates, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise TupleFileError(
            f"malformed document: {exc.msg} (column {exc.colno})",
            f"line {exc.lineno}",
        ) from None
    except ValueError as exc:
        raise TupleFileError(f"malformed document: {exc}") from None
    if not isinstance(doc, dict):
        raise TupleFileError("top level must be an object")

    version = _int_field(doc, "format_version")
    if version != FORMAT_VERSION:
        raise TupleFileError(f"unsupported format_version {version}", "format_version")
    d = _int_field(doc, "d")
    n = _int_field(doc, "n")

    meta = doc.get("metadata", {})
    if not isinstance(meta, dict) or not all(isinstance(v, str) for v in meta.values()):
        raise TupleFileError("metadata must map text keys to text values", "metadata")

    A = None
    if "A" in doc:
        A = matrix_from_json(doc["A"], n, "A")

    ops = doc.get("operators")
    if not isinstance(ops, list):
        raise TupleFileError("missing or malformed 'operators' list", "operators")
    if len(ops) != d:
        raise TupleFileError(f"'operators' has {len(ops)} matrices but d = {d}", "operators")
    operators = [matrix_from_json(m, n, f"operators[{j}]") for j, m in enumerate(ops)]

    extras = {k: v for k, v in doc.items() if k not in _CORE_KEYS}
    return TupleFile(d=d, n=n, operators=operators, A=A, metadata=meta, extras=extras,
                     format_version=version)


def read_tuple_file(path):
    with open(path, "rb") as fh:
        return parse_tuple_file(fh.read())


def write_tuple_file(path, tf):
    data = serialize_tuple_file(tf)
    with open(path, "wb") as fh:
        fh.write(data)
    return data
