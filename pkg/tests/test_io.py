import json

import numpy as np
import pytest
from hypothesis import given, strategies as hst

from qtomo.classify import DomainVerdict
from qtomo.io import (
    SCHEMA_TAG,
    SchemaError,
    deserialize,
    dumps,
    format_complex,
    format_path,
    from_document,
    loads,
    parse_complex,
    serialize,
    to_csv,
    to_document,
    validate,
)
from qtomo.numerics import QtomoError, Samples, UniformGrid
from qtomo.phase_space import WignerFunction
from qtomo.states import FockDensityMatrix, make_coherent
from qtomo.tomography import FockLevelTomogram

X = UniformGrid(-6, 6, 61)


def test_wavefunction_round_trip_is_bitwise():
    psi = make_coherent(0.3 - 1.1j)
    back = loads(dumps(psi))
    assert back.grid == psi.grid
    assert np.array_equal(back.values, psi.values)


def test_tomogram_round_trips():
    st = FockLevelTomogram(1).sample([(1, 0), (0.3, 0.7)], X)
    back = deserialize(serialize(st))
    assert np.array_equal(back.values, st.values) and np.array_equal(back.params, st.params)
    opt = FockLevelTomogram(1).optical(8, X)
    back = loads(dumps(opt))
    assert np.array_equal(back.values, opt.values) and back.theta_grid == opt.theta_grid


def test_density_and_wigner_round_trips():
    rho = FockDensityMatrix.coherent(0.5j, 12)
    assert np.array_equal(loads(dumps(rho)).entries, rho.entries)
    grid_rho = make_coherent(0.2, UniformGrid(-6, 6, 48)).density()
    assert np.array_equal(loads(dumps(grid_rho)).entries, grid_rho.entries)
    w = WignerFunction.from_function(lambda q, p: 2 * np.exp(-q * q - p * p), UniformGrid(-3, 3, 7))
    assert np.array_equal(loads(dumps(w)).values, w.values)
    qubit = np.array([[0.75, 0.25j], [-0.25j, 0.25]])
    assert np.array_equal(loads(dumps(qubit)), qubit)


def test_verdict_round_trip():
    v = DomainVerdict(True, False, 1e-4, -0.3, phi_min=0.0)
    back = loads(dumps(v))
    assert back.label == "Quantum only" and back.min_phase_density == -0.3


def test_serialization_is_deterministic():
    st = FockLevelTomogram(2).sample([(1, 0), (0, 1)], X)
    assert serialize(st) == serialize(st)
    doc = json.loads(dumps(st))
    assert doc["schema"] == SCHEMA_TAG and doc["type"] == "symplectic_tomogram"


def test_error_points_at_offending_entry():
    doc = to_document(FockLevelTomogram(1).sample([(1, 0)] * 5, X))
    doc["params"][3][1] = "oops"
    with pytest.raises(SchemaError, match=r"^params\[3\]\[1\]: "):
        from_document(doc)


def test_schema_errors():
    with pytest.raises(SchemaError, match="unknown document type"):
        validate({"schema": SCHEMA_TAG, "type": "teapot"})
    with pytest.raises(SchemaError, match="schema"):
        validate({"schema": "other/2", "type": "wavefunction"})
    with pytest.raises(SchemaError, match="invalid JSON at line 1"):
        loads("{")
    with pytest.raises(SchemaError, match="'q_grid' is a required property"):
        validate(to_document(make_coherent(0)), "wigner")
    doc = to_document(FockLevelTomogram(1).sample([(1, 0), (0, 1)], X))
    doc["values"][1] = doc["values"][1][:-1]
    with pytest.raises(SchemaError, match="ragged"):
        from_document(doc)


def test_invalid_state_is_rejected_after_parsing():
    with pytest.raises(QtomoError):
        loads(dumps(np.diag([1.2, -0.2])))
    doc = to_document(FockLevelTomogram(1).sample([(1, 0)], X))
    doc["values"][0] = [0.5 * v for v in doc["values"][0]]
    with pytest.raises(QtomoError, match="integrates"):
        from_document(doc, norm_tol=1e-6)


def test_format_path():
    assert format_path(["params", 3, 1]) == "params[3][1]"
    assert format_path(["points", 0, "theta"]) == "points[0].theta"
    assert format_path([]) == "<root>"


def test_csv_layouts():
    opt = FockLevelTomogram(0).optical(4, X)
    lines = to_csv(opt).splitlines()
    assert lines[0] == "X,theta,value" and len(lines) == 1 + 4 * X.count
    st = FockLevelTomogram(0).sample([(1, 0)], X)
    assert to_csv(st).splitlines()[0] == "X,mu,nu,value"
    w = WignerFunction.from_function(lambda q, p: np.zeros_like(q), UniformGrid(-1, 1, 3))
    assert to_csv(w).splitlines()[:2] == ["q,p,value", "-1.0,-1.0,0.0"]
    assert to_csv(Samples(X, np.zeros(X.count))).splitlines()[0] == "x,value"
    with pytest.raises(QtomoError):
        to_csv(object())


def test_csv_values_round_trip_exactly():
    st = FockLevelTomogram(3).sample([(0.3, 1.7)], X, norm_tol=None)
    rows = [line.split(",") for line in to_csv(st).splitlines()[1:]]
    assert np.array_equal([float(r[3]) for r in rows], st.values[0])


@pytest.mark.parametrize("text,z", [("1.0+0.5i", 1 + 0.5j), ("-2i", -2j), ("3", 3), (".5i", 0.5j),
                                    ("0.5-1e-3i", 0.5 - 1e-3j), (" 1 + 2i ", 1 + 2j), ("i", 1j)])
def test_parse_complex(text, z):
    assert parse_complex(text) == z


@pytest.mark.parametrize("text", ["", "1+", "1+2j+3i", "nan", "inf+1i", "(1+2i)", "1i2"])
def test_parse_complex_rejects(text):
    with pytest.raises(QtomoError):
        parse_complex(text)


@given(hst.complex_numbers(allow_nan=False, allow_infinity=False))
def test_complex_literal_round_trip(z):
    assert parse_complex(format_complex(z)) == z
