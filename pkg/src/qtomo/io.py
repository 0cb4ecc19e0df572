"""JSON and CSV serialization.

Every JSON document carries ``"schema": "qtomo/1"`` and a ``"type"`` tag.
Complex numbers are ``[re, im]`` pairs, grids are ``{min, max, count}`` and
matrices are nested row-major lists. Floats go through ``repr``, so round
trips are bit-exact.
"""

from __future__ import annotations

import csv
import io as _io
import json

import jsonschema
import numpy as np

from .classify import DomainVerdict
from .numerics import QtomoError, Samples, UniformGrid
from .phase_space import WignerFunction
from .states import DensityMatrixGrid, FockDensityMatrix, WaveFunction, validate_density
from .tomography import OpticalTomogram, SymplecticTomogram

SCHEMA_TAG = "qtomo/1"


class SchemaError(QtomoError):
    """Document does not match the qtomo/1 schema."""


# --- JSON schemas -------------------------------------------------------------------

_NUM = {"type": "number"}
_COMPLEX = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}
_GRID = {
    "type": "object",
    "properties": {"min": _NUM, "max": _NUM, "count": {"type": "integer", "minimum": 2}},
    "required": ["min", "max", "count"],
}
_REAL_VEC = {"type": "array", "items": _NUM}
_REAL_MAT = {"type": "array", "items": _REAL_VEC}
_COMPLEX_VEC = {"type": "array", "items": _COMPLEX}
_COMPLEX_MAT = {"type": "array", "items": _COMPLEX_VEC}
_PAIR = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}


def _doc(kind: str, props: dict, required: list) -> dict:
    return {
        "type": "object",
        "properties": {"schema": {"const": SCHEMA_TAG}, "type": {"const": kind}, **props},
        "required": ["schema", "type", *required],
    }


SCHEMAS = {
    "wavefunction": _doc("wavefunction", {"grid": _GRID, "values": _COMPLEX_VEC}, ["grid", "values"]),
    "grid_density": _doc("grid_density", {"grid": _GRID, "matrix": _COMPLEX_MAT}, ["grid", "matrix"]),
    "fock_density": _doc("fock_density", {"matrix": _COMPLEX_MAT}, ["matrix"]),
    "qudit_density": _doc("qudit_density", {"matrix": _COMPLEX_MAT}, ["matrix"]),
    "symplectic_tomogram": _doc(
        "symplectic_tomogram",
        {"X_grid": _GRID, "params": {"type": "array", "items": _PAIR}, "values": _REAL_MAT},
        ["X_grid", "params", "values"],
    ),
    "optical_tomogram": _doc(
        "optical_tomogram",
        {"X_grid": _GRID, "theta_grid": _GRID, "values": _REAL_MAT},
        ["X_grid", "theta_grid", "values"],
    ),
    "wigner": _doc("wigner", {"q_grid": _GRID, "p_grid": _GRID, "values": _REAL_MAT},
                   ["q_grid", "p_grid", "values"]),
    "verdict": _doc(
        "verdict",
        {"quantum": {"type": "boolean"}, "classical": {"type": "boolean"}, "label": {"type": "string"},
         "min_eigenvalue": _NUM, "min_density": _NUM, "tol_q": _NUM, "tol_c": _NUM},
        ["quantum", "classical", "min_eigenvalue", "min_density", "tol_q", "tol_c"],
    ),
    "spin_tomogram": _doc(
        "spin_tomogram",
        {"points": {"type": "array", "items": {
            "type": "object",
            "properties": {"theta": _NUM, "phi": _NUM, "probs": _REAL_VEC},
            "required": ["theta", "phi", "probs"],
        }}},
        ["points"],
    ),
}

_ANY = {
    "type": "object",
    "properties": {"schema": {"const": SCHEMA_TAG}, "type": {"type": "string"}},
    "required": ["schema", "type"],
}


def format_path(path) -> str:
    """JSON path as ``params[3][1]`` or ``points[0].theta``."""
    out = ""
    for part in path:
        if isinstance(part, int):
            out += f"[{part}]"
        else:
            out += f".{part}" if out else str(part)
    return out or "<root>"


def validate(doc, kind: str | None = None) -> str:
    """Check ``doc`` against its schema; returns the document type."""
    for schema in (_ANY, SCHEMAS.get(kind or (doc.get("type") if isinstance(doc, dict) else None))):
        if schema is None:
            raise SchemaError(f"type: unknown document type {doc.get('type')!r}")
        err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(schema).iter_errors(doc))
        if err is not None:
            raise SchemaError(f"{format_path(err.absolute_path)}: {err.message}")
    if kind is not None and doc["type"] != kind:
        raise SchemaError(f"type: expected {kind!r}, got {doc['type']!r}")
    return doc["type"]


# --- encoding helpers ------------------------------------------------------------------

def _grid(g: UniformGrid) -> dict:
    return {"min": float(g.min), "max": float(g.max), "count": int(g.count)}


def _ungrid(d: dict) -> UniformGrid:
    return UniformGrid(float(d["min"]), float(d["max"]), int(d["count"]))


def _cvec(v) -> list:
    v = np.asarray(v, dtype=complex)
    return np.stack([v.real, v.imag], axis=-1).tolist()


def _uncvec(data) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    return a[..., 0] + 1j * a[..., 1]


def _shape_check(values: np.ndarray, shape: tuple, field: str) -> None:
    if values.shape != shape:
        raise SchemaError(f"{field}: expected shape {shape}, got {values.shape}")


# --- to/from documents -------------------------------------------------------------------

def to_document(obj, kind: str | None = None) -> dict:
    """Encode a library object as a qtomo/1 document."""
    head = {"schema": SCHEMA_TAG}
    if isinstance(obj, WaveFunction):
        return {**head, "type": "wavefunction", "grid": _grid(obj.grid), "values": _cvec(obj.values)}
    if isinstance(obj, DensityMatrixGrid):
        return {**head, "type": "grid_density", "grid": _grid(obj.grid), "matrix": _cvec(obj.entries)}
    if isinstance(obj, FockDensityMatrix):
        return {**head, "type": "fock_density", "matrix": _cvec(obj.entries)}
    if isinstance(obj, SymplecticTomogram):
        return {**head, "type": "symplectic_tomogram", "X_grid": _grid(obj.X_grid),
                "params": obj.params.tolist(), "values": obj.values.tolist()}
    if isinstance(obj, OpticalTomogram):
        return {**head, "type": "optical_tomogram", "X_grid": _grid(obj.X_grid),
                "theta_grid": _grid(obj.theta_grid), "values": obj.values.tolist()}
    if isinstance(obj, WignerFunction):
        return {**head, "type": "wigner", "q_grid": _grid(obj.q_grid), "p_grid": _grid(obj.p_grid),
                "values": np.asarray(obj.values, dtype=float).tolist()}
    if isinstance(obj, DomainVerdict):
        return {**head, "type": "verdict", **obj.to_dict()}
    if isinstance(obj, np.ndarray) and obj.ndim == 2 and kind in (None, "qudit_density"):
        return {**head, "type": "qudit_density", "matrix": _cvec(obj)}
    raise QtomoError(f"cannot serialize {type(obj).__name__}")


def from_document(doc: dict, norm_tol: float | None = None):
    """Decode a qtomo/1 document into a library object.

    ``norm_tol`` bounds |row integral - 1| for tomograms; None skips the check.
    """
    kind = validate(doc)
    try:
        return _decode(kind, doc, norm_tol)
    except ValueError as exc:
        if isinstance(exc, QtomoError):
            raise
        raise SchemaError(f"{kind}: ragged or malformed array ({exc})") from None


def _decode(kind: str, doc: dict, norm_tol: float | None):
    if kind == "wavefunction":
        g = _ungrid(doc["grid"])
        values = _uncvec(doc["values"])
        _shape_check(values, (g.count,), "values")
        return WaveFunction(g, values)
    if kind == "grid_density":
        g = _ungrid(doc["grid"])
        m = _uncvec(doc["matrix"])
        _shape_check(m, (g.count, g.count), "matrix")
        return DensityMatrixGrid(g, m)
    if kind == "fock_density":
        return FockDensityMatrix(_uncvec(doc["matrix"]))
    if kind == "qudit_density":
        return validate_density(_uncvec(doc["matrix"]))
    if kind == "symplectic_tomogram":
        g = _ungrid(doc["X_grid"])
        return SymplecticTomogram(g, np.asarray(doc["params"], dtype=float),
                                  np.asarray(doc["values"], dtype=float), norm_tol=norm_tol)
    if kind == "optical_tomogram":
        return OpticalTomogram(_ungrid(doc["X_grid"]), _ungrid(doc["theta_grid"]),
                               np.asarray(doc["values"], dtype=float), norm_tol=norm_tol)
    if kind == "wigner":
        return WignerFunction(_ungrid(doc["q_grid"]), _ungrid(doc["p_grid"]),
                              np.asarray(doc["values"], dtype=float))
    if kind == "verdict":
        return DomainVerdict(doc["quantum"], doc["classical"], doc["min_eigenvalue"], doc["min_density"],
                             doc["tol_q"], doc["tol_c"], doc.get("phi_min"))
    return doc


def dumps(obj) -> str:
    doc = obj if isinstance(obj, dict) else to_document(obj)
    return json.dumps(doc, separators=(",", ":"), allow_nan=False)


def loads(text: str, norm_tol: float | None = None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return from_document(doc, norm_tol)


def serialize(obj) -> bytes:
    return dumps(obj).encode()


def deserialize(data: bytes | str):
    return loads(data.decode() if isinstance(data, bytes) else data)


# --- CSV -----------------------------------------------------------------------------

def to_csv(obj) -> str:
    """Plot-ready long-format CSV: one row per sample."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(obj, OpticalTomogram):
        w.writerow(["X", "theta", "value"])
        for theta, row in zip(obj.thetas, obj.values):
            w.writerows([repr(float(x)), repr(float(theta)), repr(float(v))] for x, v in zip(obj.X_grid.points, row))
    elif isinstance(obj, SymplecticTomogram):
        w.writerow(["X", "mu", "nu", "value"])
        for (mu, nu), row in zip(obj.params, obj.values):
            w.writerows([repr(float(x)), repr(float(mu)), repr(float(nu)), repr(float(v))]
                        for x, v in zip(obj.X_grid.points, row))
    elif isinstance(obj, WignerFunction):
        w.writerow(["q", "p", "value"])
        q, p = obj.mesh
        w.writerows([repr(float(a)), repr(float(b)), repr(float(v))]
                    for a, b, v in zip(q.ravel(), p.ravel(), np.real(obj.values).ravel()))
    elif isinstance(obj, Samples):
        w.writerow(["x", "value"])
        w.writerows([repr(float(x)), repr(float(v))] for x, v in zip(obj.grid.points, np.real(obj.values)))
    else:
        raise QtomoError(f"no CSV layout for {type(obj).__name__}")
    return buf.getvalue()


# --- CLI literals --------------------------------------------------------------------

def parse_complex(text: str) -> complex:
    """Parse literals such as ``1.0+0.5i``, ``-2i``, ``3`` or ``0.5-1e-3i``."""
    s = text.strip().replace(" ", "")
    if s.endswith("i"):
        s = s[:-1] + "j"
    try:
        if "i" in s or "(" in s or s.count("j") > 1 or (s.count("j") == 1 and not s.endswith("j")):
            raise ValueError
        z = complex(s)
    except ValueError:
        raise QtomoError(f"not a complex literal: {text!r} (expected e.g. 1.0+0.5i)") from None
    if not np.isfinite(z):
        raise QtomoError(f"complex literal must be finite: {text!r}")
    return z


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"
