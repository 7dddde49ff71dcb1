"""JSON file formats.

Complex scalars are ``[re, im]`` (plain reals are accepted on input),
matrices are row-major nested lists. Loaders raise :class:`SchemaError`
naming the offending key path.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from fredholm_lab.errors import FredholmLabError, SchemaError
from fredholm_lab.extension import NestedPair, OperatorPair, make_nested, make_operator_pair
from fredholm_lab.family import SampledLoop
from fredholm_lab.grassmann import Subspace
from fredholm_lab.numeric import Tolerance, orthonormalize, resolve_tol
from fredholm_lab.symplectic import SymplecticSpace, standard_symplectic


def _round(x: float, digits: int) -> float:
    r = round(float(x), digits)
    return 0.0 if r == 0 else r  # no "-0.0" in reports


def complex_to_json(z, digits: int = 15) -> list:
    z = complex(z)
    return [_round(z.real, digits), _round(z.imag, digits)]


def complex_from_json(v, field: str) -> complex:
    if isinstance(v, bool):
        raise SchemaError(field, "expected a number or [re, im]")
    if isinstance(v, (int, float)):
        z = complex(v)
    elif isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        z = complex(v[0], v[1])
    else:
        raise SchemaError(field, "expected a number or [re, im]")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise SchemaError(field, "non-finite entry")
    return z


def matrix_to_json(m, digits: int = 15) -> list:
    return [[complex_to_json(z, digits) for z in row] for row in np.asarray(m)]


def matrix_from_json(data, field: str, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    if not isinstance(data, list):
        raise SchemaError(field, "expected a list of rows")
    if rows is not None and len(data) != rows:
        raise SchemaError(field, f"expected {rows} rows, got {len(data)}")
    out = []
    for i, row in enumerate(data):
        if not isinstance(row, list):
            raise SchemaError(f"{field}[{i}]", "expected a row list")
        out.append([complex_from_json(v, f"{field}[{i}][{j}]") for j, v in enumerate(row)])
    width = {len(r) for r in out}
    if len(width) > 1:
        raise SchemaError(field, "rows have different lengths")
    k = width.pop() if width else (cols or 0)
    if cols is not None and k != cols:
        raise SchemaError(field, f"expected {cols} columns, got {k}")
    return np.array(out, dtype=complex).reshape(len(out), k)


def _require(obj, key: str, field: str):
    if not isinstance(obj, dict):
        raise SchemaError(field, "expected an object")
    if key not in obj:
        raise SchemaError(f"{field}.{key}" if field else key, "missing")
    return obj[key]


def _int(v, field: str, minimum: int = 0) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise SchemaError(field, f"expected an integer >= {minimum}")
    return v


def subspace_to_json(s: Subspace, digits: int = 15) -> dict:
    return {"ambient": s.ambient_dim, "dim": s.dim, "frame": matrix_to_json(s.frame, digits)}


def subspace_from_json(obj, field: str = "subspace", tol: Tolerance | None = None) -> Subspace:
    """Columns of ``frame`` (``n x k``) are generators; they are orthonormalized."""
    tol = resolve_tol(tol)
    n = _int(_require(obj, "ambient", field), f"{field}.ambient")
    frame = _require(obj, "frame", field)
    if frame == []:
        g = np.zeros((n, 0), dtype=complex)
    else:
        g = matrix_from_json(frame, f"{field}.frame", rows=n)
    basis = orthonormalize(g, tol)
    if "dim" in obj:
        declared = _int(obj["dim"], f"{field}.dim")
        if declared != basis.shape[1]:
            raise SchemaError(f"{field}.dim", f"declared {declared} but the frame has numerical rank {basis.shape[1]}")
    return Subspace(basis)


def operator_pair_to_json(op: OperatorPair, digits: int = 15) -> dict:
    return {"n": op.space_dim, "action": matrix_to_json(op.action, digits),
            "dom_max": subspace_to_json(op.dom_max, digits), "dom_min": subspace_to_json(op.dom_min, digits)}


def _wrap(fn, field):
    try:
        return fn()
    except SchemaError:
        raise
    except FredholmLabError as exc:
        raise SchemaError(field, str(exc)) from exc


def operator_pair_from_json(obj, field: str = "operator", tol: Tolerance | None = None) -> OperatorPair:
    n = _int(_require(obj, "n", field), f"{field}.n", 1)
    action = matrix_from_json(_require(obj, "action", field), f"{field}.action", rows=n, cols=n)
    dom_max = subspace_from_json(obj["dom_max"], f"{field}.dom_max", tol) if "dom_max" in obj else None
    dom_min = subspace_from_json(obj["dom_min"], f"{field}.dom_min", tol) if "dom_min" in obj else None
    return _wrap(lambda: make_operator_pair(action, dom_max, dom_min, tol), field)


def nested_pair_to_json(p: NestedPair, digits: int = 15) -> dict:
    return {"ambient": p.ambient_dim, "gamma_min": subspace_to_json(p.gamma_min, digits),
            "gamma_max": subspace_to_json(p.gamma_max, digits)}


def nested_pair_from_json(obj, field: str = "nested", tol: Tolerance | None = None) -> NestedPair:
    n = _int(_require(obj, "ambient", field), f"{field}.ambient", 1)
    g_min = subspace_from_json(_require(obj, "gamma_min", field), f"{field}.gamma_min", tol)
    g_max = subspace_from_json(_require(obj, "gamma_max", field), f"{field}.gamma_max", tol)
    if g_min.ambient_dim != n or g_max.ambient_dim != n:
        raise SchemaError(field, f"subspaces must live in C^{n}")
    return _wrap(lambda: make_nested(g_min, g_max, tol), field)


def symplectic_to_json(sp: SymplecticSpace, digits: int = 15) -> dict:
    if sp.standard_n is not None:
        return {"standard": sp.standard_n}
    return {"ambient": sp.ambient_dim, "j": matrix_to_json(sp.j, digits)}


def symplectic_from_json(obj, field: str = "symplectic", tol: Tolerance | None = None) -> SymplecticSpace:
    if isinstance(obj, dict) and "standard" in obj:
        return standard_symplectic(_int(obj["standard"], f"{field}.standard", 1), tol)
    n = _int(_require(obj, "ambient", field), f"{field}.ambient", 1)
    j = matrix_from_json(_require(obj, "j", field), f"{field}.j", rows=n, cols=n)
    return _wrap(lambda: SymplecticSpace(j, tol), field)


def loop_to_json(fam: SampledLoop, digits: int = 15) -> dict:
    if fam.kind == "subspace":
        samples = [subspace_to_json(s, digits) for s in fam.samples]
    else:
        samples = [matrix_to_json(u, digits) for u in fam.samples]
    return {"params": [_round(t, digits) for t in fam.params], "samples": samples, "closed": fam.closed}


def loop_from_json(obj, field: str = "loop", tol: Tolerance | None = None) -> SampledLoop:
    """Samples are all subspace objects or all square matrices."""
    params = _require(obj, "params", field)
    samples = _require(obj, "samples", field)
    closed = obj.get("closed", True)
    if not isinstance(closed, bool):
        raise SchemaError(f"{field}.closed", "expected a boolean")
    if not isinstance(params, list) or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in params):
        raise SchemaError(f"{field}.params", "expected a list of numbers")
    if not isinstance(samples, list) or len(samples) != len(params):
        raise SchemaError(f"{field}.samples", "expected one sample per parameter")
    if len(samples) < 2:
        raise SchemaError(f"{field}.samples", "need at least two samples")
    if np.any(np.diff(np.asarray(params, dtype=float)) <= 0):
        raise SchemaError(f"{field}.params", "must be strictly increasing")
    if all(isinstance(s, dict) for s in samples):
        parsed = [subspace_from_json(s, f"{field}.samples[{i}]", tol) for i, s in enumerate(samples)]
        if len({(s.ambient_dim, s.dim) for s in parsed}) > 1:
            raise SchemaError(f"{field}.samples", "samples differ in ambient or dimension")
    else:
        parsed = [matrix_from_json(s, f"{field}.samples[{i}]") for i, s in enumerate(samples)]
        if len({m.shape for m in parsed}) > 1 or parsed[0].shape[0] != parsed[0].shape[1]:
            raise SchemaError(f"{field}.samples", "samples must be square matrices of one size")
    return SampledLoop(tuple(parsed), np.asarray(params, dtype=float), closed)


def to_plain(obj, digits: int = 12):
    """Recursively convert numpy scalars/arrays to JSON types, rounding floats."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist(), digits)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(obj, digits)
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_json(obj, digits)
    return obj


def load_json(path) -> object:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError("file", f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("file", f"invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def dumps(obj) -> str:
    """Canonical report text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"
