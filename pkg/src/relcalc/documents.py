"""JSON relation documents and deterministic report serialization.

A relation document is a JSON object::

    {
      "field": "real" | "complex",
      "dim_H": 2, "dim_K": 2,
      "generators": [[h..., k...], ...]            # or
      "graph_of": [[row], ...]                     # dim_K x dim_H matrix, or
      "parts": {"domain_basis": [[...], ...],      # vectors in F^dim_H
                "operator": [[...], ...],          # their images in F^dim_K
                "mul_generators": [[...], ...]},   # vectors in F^dim_K
      "tol": 1e-10,                                # optional
      "metadata": {...}                            # optional, free-form
    }

Exactly one of ``generators``, ``graph_of`` and ``parts`` must be given.
Complex entries are written ``[re, im]``; plain numbers are accepted in
complex documents too.  Serialization always uses ``generators`` with the
orthonormal graph basis, and floats are written with ``repr`` precision so
a document parses back to the same relation.
"""
from __future__ import annotations

import hashlib
import json
import math
from numbers import Real

import numpy as np

from .relation import FIELDS, LinearRelation, from_stacked

FORMS = ("generators", "graph_of", "parts")


class DocumentError(ValueError):
    """Malformed relation or family document; ``where`` locates the problem."""

    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def load_json(text: str, source: str = "<document>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{source}:{exc.lineno}:{exc.colno}", exc.msg) from None


# ----------------------------------------------------------------- parsing


def _scalar(value, where: str, field: str):
    if isinstance(value, bool):
        raise DocumentError(where, "expected a number, got a boolean")
    if isinstance(value, Real):
        x = float(value)
        if not math.isfinite(x):
            raise DocumentError(where, "number is not finite")
        return x
    if isinstance(value, list) and len(value) == 2 and all(isinstance(v, Real) and not isinstance(v, bool) for v in value):
        if field != "complex":
            raise DocumentError(where, "[re, im] pair in a real document")
        z = complex(float(value[0]), float(value[1]))
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise DocumentError(where, "number is not finite")
        return z
    raise DocumentError(where, f"expected a number or [re, im], got {json.dumps(value)[:40]}")


def _vector(value, length: int, where: str, field: str) -> np.ndarray:
    if not isinstance(value, list):
        raise DocumentError(where, "expected a list of numbers")
    if len(value) != length:
        raise DocumentError(where, f"vector has length {len(value)}, expected {length}")
    entries = [_scalar(v, f"{where}[{i}]", field) for i, v in enumerate(value)]
    return np.array(entries, dtype=complex if field == "complex" else float)


def _vectors(value, length: int, where: str, field: str) -> np.ndarray:
    if not isinstance(value, list):
        raise DocumentError(where, "expected a list of vectors")
    cols = [_vector(v, length, f"{where}[{i}]", field) for i, v in enumerate(value)]
    dtype = complex if field == "complex" else float
    return np.column_stack(cols).astype(dtype) if cols else np.zeros((length, 0), dtype)


def _dim(doc: dict, key: str) -> int:
    if key not in doc:
        raise DocumentError(key, "missing")
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise DocumentError(key, f"must be a positive integer, got {json.dumps(v)}")
    return v


def parse_document(doc, tol: float | None = None) -> LinearRelation:
    """Build a relation from a parsed document (a dict).

    ``tol`` overrides the document's own ``tol``.
    """
    if not isinstance(doc, dict):
        raise DocumentError("$", "document must be a JSON object")
    field = doc.get("field", "real")
    if field not in FIELDS:
        raise DocumentError("field", f"must be one of {FIELDS}, got {json.dumps(field)}")
    n, m = _dim(doc, "dim_H"), _dim(doc, "dim_K")
    if tol is None and "tol" in doc:
        t = doc["tol"]
        if isinstance(t, bool) or not isinstance(t, Real) or not (0 <= t < 1):
            raise DocumentError("tol", f"must be a number in [0, 1), got {json.dumps(t)}")
        tol = float(t)
    given = [k for k in FORMS if k in doc]
    if len(given) != 1:
        raise DocumentError("$", f"exactly one of {FORMS} is required, found {given or 'none'}")
    form = given[0]
    if form == "generators":
        G = _vectors(doc["generators"], n + m, "generators", field)
    elif form == "graph_of":
        rows = doc["graph_of"]
        if not isinstance(rows, list):
            raise DocumentError("graph_of", "expected a list of rows")
        if len(rows) != m:
            raise DocumentError("graph_of", f"matrix has {len(rows)} rows, expected dim_K = {m}")
        A = _vectors(rows, n, "graph_of", field).T
        G = np.vstack([np.eye(n, dtype=A.dtype), A])
    else:
        parts = doc["parts"]
        if not isinstance(parts, dict):
            raise DocumentError("parts", "expected an object")
        unknown = sorted(set(parts) - {"domain_basis", "operator", "mul_generators"})
        if unknown:
            raise DocumentError("parts", f"unknown keys {unknown}")
        for key in ("domain_basis", "operator"):
            if key not in parts:
                raise DocumentError(f"parts.{key}", "missing")
        Dom = _vectors(parts["domain_basis"], n, "parts.domain_basis", field)
        A = _vectors(parts["operator"], m, "parts.operator", field)
        if A.shape[1] != Dom.shape[1]:
            raise DocumentError(
                "parts.operator", f"{A.shape[1]} images for {Dom.shape[1]} domain basis vectors"
            )
        Mg = _vectors(parts.get("mul_generators", []), m, "parts.mul_generators", field)
        dtype = np.result_type(Dom, A, Mg)
        G = np.hstack([np.vstack([Dom, A]), np.vstack([np.zeros((n, Mg.shape[1])), Mg])]).astype(dtype)
    if G.shape[1] == 0:
        G = np.zeros((n + m, 0), dtype=complex if field == "complex" else float)
    return from_stacked(G, n, tol=tol, field=field)


def read_document(path, tol: float | None = None) -> tuple[LinearRelation, dict, bytes]:
    """Parse the file at ``path``; returns ``(relation, raw document, raw bytes)``."""
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DocumentError(str(path), f"not UTF-8 text ({exc.reason})") from None
    doc = load_json(text, str(path))
    return parse_document(doc, tol=tol), doc, data


# ---------------------------------------------------------- serialization


def _encode_scalar(x, field: str):
    if field == "complex":
        z = complex(x)
        return [float(z.real), float(z.imag)]
    return float(np.real(x))


def relation_to_document(T: LinearRelation, metadata: dict | None = None) -> dict:
    """Document holding the orthonormal graph basis of ``T`` as generators."""
    doc = {
        "field": T.field,
        "dim_H": T.dim_H,
        "dim_K": T.dim_K,
        "tol": float(T.tol),
        "generators": [[_encode_scalar(x, T.field) for x in col] for col in T.graph.basis.T],
    }
    if metadata:
        doc["metadata"] = metadata
    return doc


def dumps_document(doc: dict) -> str:
    # json writes floats with repr, which round-trips exactly
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def write_document(path, T: LinearRelation, metadata: dict | None = None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_document(relation_to_document(T, metadata)))


# ----------------------------------------------------------------- reports


def _report_value(x):
    """Recursively convert to JSON types with every float as a ``%.12e`` string."""
    if isinstance(x, dict):
        return {str(k): _report_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_report_value(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_report_value(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return "%.12e" % float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return ["%.12e" % x.real, "%.12e" % x.imag]
    return x


def format_machine(report: dict) -> str:
    return json.dumps(_report_value(report), sort_keys=True, indent=2) + "\n"


def _flatten(prefix: str, x, out: list):
    if isinstance(x, dict):
        for k in sorted(x):
            _flatten(f"{prefix}.{k}" if prefix else str(k), x[k], out)
    elif isinstance(x, list) and any(isinstance(v, (dict, list)) for v in x) and not _is_pair(x):
        for i, v in enumerate(x):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append(f"{prefix} = {json.dumps(x)}")


def _is_pair(x) -> bool:
    return len(x) == 2 and all(isinstance(v, str) for v in x)


def format_text(report: dict) -> str:
    lines: list[str] = []
    _flatten("", _report_value(report), lines)
    return "\n".join(lines) + "\n"
