import numpy as np
import pytest
from hypothesis import given, strategies as hst

from qtomo.numerics import QtomoError
from qtomo.spin import (
    SIGMA,
    EulerUnitary,
    bistochastic_tomogram,
    dual_G,
    frame_identity,
    orthostochastic,
    projector_P,
    qubit_tomogram,
    reconstruct_qubit,
    spin_tomogram_point,
    spin_uncertainty_matrix,
    su2_matrix,
)

angles = hst.tuples(hst.floats(0, np.pi), hst.floats(-np.pi, np.pi), hst.floats(-np.pi, np.pi))


@hst.composite
def qubit_states(draw):
    r = draw(hst.floats(0, 1))
    theta, phi = draw(hst.floats(0, np.pi)), draw(hst.floats(0, 2 * np.pi))
    n = r * np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    return 0.5 * (np.eye(2) + np.einsum("k,kij->ij", n, SIGMA))


@given(angles)
def test_su2_matrix_is_special_unitary(a):
    u = su2_matrix(*a)
    assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12)
    assert np.linalg.det(u) == pytest.approx(1.0, abs=1e-12)


@given(alpha=hst.floats(0, 1), a=angles)
def test_diagonal_state_tomogram(alpha, a):
    rho = np.diag([alpha, 1 - alpha])
    theta = a[0]
    up = alpha * np.cos(theta / 2) ** 2 + (1 - alpha) * np.sin(theta / 2) ** 2
    assert np.allclose(qubit_tomogram(rho, EulerUnitary(*a)), [up, 1 - up], atol=1e-12)


@given(rho=qubit_states(), a=angles)
def test_bistochastic_route_agrees(rho, a):
    u = su2_matrix(*a)
    assert np.allclose(bistochastic_tomogram(rho, u), qubit_tomogram(rho, u), atol=1e-10)


@given(a=angles)
def test_orthostochastic_matrix_is_bistochastic(a):
    m = orthostochastic(su2_matrix(*a))
    assert np.all(m >= 0)
    assert np.allclose(m.sum(axis=0), 1) and np.allclose(m.sum(axis=1), 1)


def test_frame_identity():
    assert np.max(np.abs(frame_identity() - np.eye(2))) < 1e-12


@given(rho=qubit_states())
def test_dual_frame_reconstructs_state(rho):
    rec = reconstruct_qubit(lambda t, p: np.real(np.trace(projector_P(t, p) @ rho)), 8, 16)
    assert np.max(np.abs(rec - rho)) < 1e-12


def test_tomogram_points_are_projector_expectations():
    rho = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    for theta, phi in [(0.3, 1.1), (2.0, -0.4), (np.pi, 0.0)]:
        pt = spin_tomogram_point(rho, theta, phi)
        assert pt.probs.sum() == pytest.approx(1.0)
        assert pt.probs[0] == pytest.approx(np.real(np.trace(projector_P(theta, phi) @ rho)), abs=1e-12)
        assert pt.to_dict()["theta"] == theta


def test_dual_frame_is_hermitian_with_unit_trace_weight():
    g = dual_G(0.7, 1.9)
    assert np.allclose(g, g.conj().T)
    assert np.trace(g).real == pytest.approx(1 / (2 * np.pi))


@given(rho=qubit_states())
def test_uncertainty_matrix_of_states_is_nonnegative(rho):
    res = spin_uncertainty_matrix(rho)
    assert np.allclose(res.S, res.S.conj().T)
    assert res.nonnegative(1e-12)
    assert np.min(np.linalg.eigvalsh(res.S)) > -1e-12


def test_pure_state_uncertainty_matrix():
    res = spin_uncertainty_matrix(np.diag([1.0, 0.0]))
    # Var Jx = Var Jy = 1/4, <Jz> = 1/2 gives the i/4 off-diagonal
    assert np.allclose(res.S, [[0.25, 0.25j, 0], [-0.25j, 0.25, 0], [0, 0, 0]])
    assert res.determinant == pytest.approx(0.0, abs=1e-15)


def test_non_state_has_negative_minor():
    res = spin_uncertainty_matrix(np.diag([1.2, -0.2]))
    assert not res.nonnegative()
    assert min(res.first_minors.min(), res.second_minors.min(), res.determinant) < 0


def test_input_validation():
    with pytest.raises(QtomoError, match="unitary"):
        qubit_tomogram(np.eye(2) / 2, [[1, 1], [0, 1]])
    with pytest.raises(QtomoError, match="2x2"):
        qubit_tomogram(np.eye(3) / 3, np.eye(3))
    with pytest.raises(QtomoError, match="Hermitian"):
        spin_uncertainty_matrix([[0.5, 1], [0, 0.5]])
    with pytest.raises(QtomoError):
        qubit_tomogram(np.diag([1.2, -0.2]), np.eye(2))
