"""JSON file formats.

Four documents share one canonical writer:

``problem``
    ``{version, kind, n, dims {k, l, m}, blocks, c, d, b, p, A, B, H, K,
    provenance?}`` with ``kind`` one of ``gauge``, ``pho``, ``convex``.
    Every block is ``{indices, gauge: {family, params}}`` or
    ``{indices, convex: {family, params}}``; indices are 1-based.
``point``
    ``{x}``, ``{u, v}`` or ``{u, v, lambda, mu, x_bar_blocks?}``; a file may
    hold ``x`` together with ``u, v``.
``dual``
    the dual of a problem file: the polar blocks, the affine maps giving
    ``alpha`` and ``beta``, and the primal it came from.
``epigraph``
    the dual of a dual file, i.e. the lifted ``G(x) <= y`` form.

Numbers are written with 17 significant digits, keys sorted, so parsing
and re-emitting a canonical file reproduces it byte for byte.
"""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .dual import DualPoint, build_double_dual, dualize
from .errors import DimensionMismatch, SchemaError
from .gauges import GaugeSpec, gauge_from_dict
from .model import BlockPartition, Problem, VectorGauge
from .perspective import ConvexSpec, convex_from_dict

VERSION = 1
KINDS = ("gauge", "pho", "convex")


# ------------------------------------------------------------ canonical text

def _num(v) -> str:
    v = float(v)
    if math.isnan(v):
        raise SchemaError("NaN cannot be written")
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    s = format(v, ".17g")
    return "0" if s == "-0" else s


def _is_flat(seq) -> bool:
    return all(not isinstance(a, (list, tuple, dict)) for a in seq)


def _emit(obj, indent: int) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {_emit(obj[k], indent + 1)}' for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if _is_flat(obj):
            return "[" + ", ".join(_emit(a, indent + 1) for a in obj) + "]"
        items = [pad + "  " + _emit(a, indent + 1) for a in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot emit {type(obj).__name__}")


def dumps(obj) -> str:
    """Canonical text: sorted keys, flat numeric lists on one line."""
    return _emit(obj, 0) + "\n"


def write(path, obj) -> str:
    text = dumps(obj)
    Path(path).write_text(text)
    return text


def read(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: top level must be an object")
    return doc


def file_hash(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def text_hash(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode()).hexdigest()


# ------------------------------------------------------------ helpers

def _f(v) -> float:
    if isinstance(v, str):
        t = v.strip().lower()
        if t in ("inf", "+inf", "infinity"):
            return math.inf
        if t in ("-inf", "-infinity"):
            return -math.inf
        raise SchemaError(f"bad number {v!r}")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"bad number {v!r}")
    return float(v)


def _vector(doc, key, size, required=True) -> np.ndarray:
    if key not in doc or doc[key] is None:
        if required and size:
            raise SchemaError(f"missing field {key!r}")
        return np.zeros(size)
    raw = doc[key]
    if not isinstance(raw, list):
        raise SchemaError(f"{key} must be a list")
    out = np.array([_f(a) for a in raw], dtype=float)
    if out.size != size:
        raise SchemaError(f"{key} has length {out.size}, expected {size}")
    return out


def _matrix(doc, key, rows, cols, required=True) -> np.ndarray:
    if key not in doc or doc[key] is None:
        if required and rows and cols:
            raise SchemaError(f"missing field {key!r}")
        return np.zeros((rows, cols))
    raw = doc[key]
    if not isinstance(raw, list) or len(raw) != rows:
        raise SchemaError(f"{key} must be a list of {rows} rows")
    M = np.zeros((rows, cols))
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != cols:
            raise SchemaError(f"{key} row {i + 1} must have {cols} entries")
        M[i] = [_f(a) for a in row]
    return M


def _int(doc, key) -> int:
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise SchemaError(f"{key} must be a nonnegative integer")
    return v


# ------------------------------------------------------------ problem files

def problem_to_dict(prob: Problem, provenance: dict | None = None) -> dict:
    blocks = []
    for spec, blk in zip(prob.specs, prob.partition.blocks):
        key = "convex" if isinstance(spec, ConvexSpec) else "gauge"
        blocks.append({"indices": [int(i) + 1 for i in blk], key: spec.to_dict()})
    doc = {
        "version": VERSION, "kind": prob.kind, "n": prob.n,
        "dims": {"k": prob.k, "l": prob.l, "m": prob.m},
        "blocks": blocks,
        "c": prob.c, "d": prob.d, "b": prob.b, "p": prob.p,
        "A": prob.A, "B": prob.B, "H": prob.H, "K": prob.K,
    }
    if provenance:
        doc["provenance"] = provenance
    return doc


def _spec_from_block(entry, i):
    if not isinstance(entry, dict) or "indices" not in entry:
        raise SchemaError(f"block {i + 1} needs 'indices'")
    has_g, has_c = "gauge" in entry, "convex" in entry
    if has_g == has_c:
        raise SchemaError(f"block {i + 1} needs exactly one of 'gauge' or 'convex'")
    try:
        if has_g:
            return gauge_from_dict(entry["gauge"])
        return convex_from_dict(entry["convex"])
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"block {i + 1}: {exc}") from exc


def problem_from_dict(doc: dict) -> Problem:
    """Parse and validate a problem document (raises :class:`SchemaError`)."""
    if doc.get("version") != VERSION:
        raise SchemaError(f"unsupported version {doc.get('version')!r}")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise SchemaError(f"kind must be one of {KINDS}, got {kind!r}")
    n = _int(doc, "n")
    dims = doc.get("dims")
    if not isinstance(dims, dict):
        raise SchemaError("missing dims")
    k, ell, m = _int(dims, "k"), _int(dims, "l"), _int(dims, "m")
    raw_blocks = doc.get("blocks")
    if not isinstance(raw_blocks, list) or len(raw_blocks) != m:
        raise SchemaError(f"blocks must be a list of {m} entries")

    idx, specs = [], []
    for i, entry in enumerate(raw_blocks):
        spec = _spec_from_block(entry, i)
        ind = entry["indices"]
        if not isinstance(ind, list) or not all(isinstance(j, int) and not isinstance(j, bool) for j in ind):
            raise SchemaError(f"block {i + 1}: indices must be integers")
        if any(j < 1 or j > n for j in ind):
            raise SchemaError(f"block {i + 1}: indices must lie in 1..{n}")
        idx.append([j - 1 for j in ind])
        specs.append(spec)
        if kind != "convex" and isinstance(spec, ConvexSpec):
            raise SchemaError(f"block {i + 1}: convex blocks need kind 'convex'")
    try:
        part = BlockPartition(tuple(idx))
        if part.n != n:
            raise SchemaError(f"blocks cover {part.n} coordinates, n = {n}")
        gauge = VectorGauge(part, tuple(specs))
    except (ValueError, DimensionMismatch) as exc:
        raise SchemaError(f"blocks: {exc}") from exc

    c = _vector(doc, "c", n, required=False)
    d = _vector(doc, "d", m, required=False)
    b = _vector(doc, "b", k)
    p = _vector(doc, "p", ell)
    A = _matrix(doc, "A", k, n)
    B = _matrix(doc, "B", k, m, required=False)
    H = _matrix(doc, "H", ell, n)
    K = _matrix(doc, "K", ell, m, required=False)
    if kind == "gauge" and np.any(B):
        raise SchemaError("kind 'gauge' requires B omitted or all zero")
    for name, arr in (("c", c), ("d", d), ("b", b), ("p", p), ("A", A), ("B", B), ("H", H), ("K", K)):
        if not np.all(np.isfinite(arr)):
            raise SchemaError(f"{name} must be finite")
    return Problem(c=c, d=d, b=b, p=p, A=A, B=B, H=H, K=K, gauge=gauge, kind=kind)


def load_problem(path) -> Problem:
    doc = read(path)
    if doc.get("kind") in ("dual", "epigraph"):
        raise SchemaError(f"{path} holds a {doc['kind']} document, not a problem")
    return problem_from_dict(doc)


# ------------------------------------------------------------ point files

def point_to_dict(x=None, dp: DualPoint | None = None, lam=None, mu=None, x_bar_blocks=None) -> dict:
    doc = {}
    if x is not None:
        doc["x"] = np.asarray(x, dtype=float)
    if dp is not None:
        doc["u"], doc["v"] = dp.u, dp.v
    if lam is not None:
        doc["lambda"], doc["mu"] = np.asarray(lam, dtype=float), np.asarray(mu, dtype=float)
    if x_bar_blocks is not None:
        doc["x_bar_blocks"] = [np.asarray(a, dtype=float) for a in x_bar_blocks]
    return doc


def _list(doc, key, size=None) -> np.ndarray:
    raw = doc[key]
    if not isinstance(raw, list):
        raise SchemaError(f"{key} must be a list")
    out = np.array([_f(a) for a in raw], dtype=float)
    if size is not None and out.size != size:
        raise SchemaError(f"{key} has length {out.size}, expected {size}")
    return out


def point_from_dict(doc: dict, prob: Problem | None = None) -> dict:
    """Parsed fields of a point document; sizes are checked against ``prob``.

    Returns a dict with any of ``x``, ``dual`` (:class:`DualPoint`),
    ``lambda``, ``mu``, ``x_bar_blocks``.
    """
    out = {}
    n = prob.n if prob is not None else None
    k = prob.k if prob is not None else None
    ell = prob.l if prob is not None else None
    m = prob.m if prob is not None else None
    if "x" in doc:
        out["x"] = _list(doc, "x", n)
    if ("u" in doc) != ("v" in doc):
        raise SchemaError("u and v must appear together")
    if "u" in doc:
        out["dual"] = DualPoint(_list(doc, "u", k), _list(doc, "v", ell))
    if ("lambda" in doc) != ("mu" in doc):
        raise SchemaError("lambda and mu must appear together")
    if "lambda" in doc:
        if "dual" not in out:
            raise SchemaError("lambda and mu need u and v")
        out["lambda"] = _list(doc, "lambda", m)
        out["mu"] = _list(doc, "mu", ell)
    if "x_bar_blocks" in doc:
        raw = doc["x_bar_blocks"]
        if not isinstance(raw, list):
            raise SchemaError("x_bar_blocks must be a list")
        if prob is not None and len(raw) != prob.m:
            raise SchemaError(f"x_bar_blocks needs {prob.m} entries")
        sizes = prob.partition.sizes if prob is not None else [None] * len(raw)
        out["x_bar_blocks"] = [_list({"b": r}, "b", s) for r, s in zip(raw, sizes)]
    if not out:
        raise SchemaError("point file holds none of x, u/v")
    return out


def load_point(path, prob: Problem | None = None) -> dict:
    return point_from_dict(read(path), prob)


# ------------------------------------------------------------ dual and epigraph

def dual_to_dict(prob: Problem, provenance: dict | None = None) -> dict:
    """The dual ``max b@u - p@v`` s.t. ``polar_i(alpha_i) <= beta_i, v >= 0``
    with ``alpha = A^T u - H^T v - c`` and ``beta = d - B^T u + K^T v``."""
    dp = dualize(prob)
    blocks = [{"indices": [int(i) + 1 for i in blk], "gauge": spec.to_dict()}
              for spec, blk in zip(dp.polar.specs, prob.partition.blocks)]
    doc = {
        "version": VERSION, "kind": "dual",
        "dims": {"k": prob.k, "l": prob.l, "m": prob.m, "n": prob.n},
        "objective": {"sense": "max", "b": prob.b, "p": prob.p},
        "alpha": {"At": prob.A.T, "Ht": prob.H.T, "c": prob.c},
        "beta": {"d": prob.d, "Bt": prob.B.T, "Kt": prob.K.T},
        "polar_blocks": blocks,
        "primal": problem_to_dict(prob),
    }
    if provenance:
        doc["provenance"] = provenance
    return doc


def dual_from_dict(doc: dict) -> Problem:
    """The primal a dual document was built from."""
    if doc.get("kind") != "dual" or not isinstance(doc.get("primal"), dict):
        raise SchemaError("not a dual document")
    return problem_from_dict(doc["primal"])


def epigraph_to_dict(prob: Problem, provenance: dict | None = None) -> dict:
    """``min c@x + d@y`` s.t. ``A x + B y = b``, ``H x + K y <= p`` and
    ``g_i(x_i) <= y_i``, where ``g_i`` is the polar of the dual's polar block."""
    ep = build_double_dual(dualize(prob))
    base = ep.base
    doc = problem_to_dict(base)
    doc["kind"] = "epigraph"
    doc["base_kind"] = base.kind
    doc["epigraph"] = "G(x) <= y"
    if provenance:
        doc["provenance"] = provenance
    return doc


def epigraph_from_dict(doc: dict):
    if doc.get("kind") != "epigraph":
        raise SchemaError("not an epigraph document")
    inner = dict(doc)
    inner["kind"] = doc.get("base_kind", "gauge")
    for key in ("base_kind", "epigraph", "provenance"):
        inner.pop(key, None)
    return build_double_dual(problem_from_dict(inner))


__all__ = ["VERSION", "dumps", "write", "read", "file_hash", "text_hash",
           "problem_to_dict", "problem_from_dict", "load_problem",
           "point_to_dict", "point_from_dict", "load_point",
           "dual_to_dict", "dual_from_dict", "epigraph_to_dict", "epigraph_from_dict"]
