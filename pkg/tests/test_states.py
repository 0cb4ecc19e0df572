import numpy as np
import pytest
from hypothesis import given, strategies as hst

from qtomo.numerics import QtomoError, UniformGrid
from qtomo.states import (
    DensityMatrixGrid,
    FockDensityMatrix,
    WaveFunction,
    coherent_vector,
    eigen_decompose,
    fidelity,
    fiducial_projector,
    make_coherent,
    make_fock,
    make_squeezed_gaussian,
    marginals,
    superpose_projectors,
    superpose_wavefunctions,
    trace_distance,
    validate_density,
)


def test_wavefunction_requires_unit_norm():
    g = UniformGrid(-5, 5, 101)
    with pytest.raises(QtomoError):
        WaveFunction(g, np.ones(101))
    with pytest.raises(QtomoError):
        WaveFunction.normalized(g, np.zeros(101))


@pytest.mark.parametrize("n", [0, 1, 4, 9])
def test_fock_states_orthonormal_and_mean_energy(n):
    psi = make_fock(n)
    assert psi.norm_squared() == pytest.approx(1, abs=1e-12)
    assert abs(psi.inner(make_fock(n + 1))) < 1e-12
    c = psi.fock_coefficients(16)
    assert abs(c[n]) == pytest.approx(1, abs=1e-10)


def test_coherent_state_photon_statistics_are_poisson():
    alpha = 1.2 - 0.4j
    c = make_coherent(alpha).fock_coefficients(30)
    n = np.arange(30)
    mean = np.sum(n * np.abs(c) ** 2)
    assert mean == pytest.approx(abs(alpha) ** 2, abs=1e-10)
    assert np.allclose(c, coherent_vector(alpha, 30), atol=1e-10)


@given(a=hst.floats(0.2, 3), b=hst.floats(-3, 3))
def test_conjugate_squeezed_pair_fidelity(a, b):
    # |<psi_alpha|psi_alpha*>|^2 = Re(alpha)/|alpha|, marginals identical
    alpha = complex(a, b)
    g = UniformGrid(-12, 12, 1024)
    p1, p2 = make_squeezed_gaussian(alpha, 0.0, g), make_squeezed_gaussian(alpha.conjugate(), 0.0, g)
    assert fidelity(p1, p2) == pytest.approx(a / abs(alpha), abs=1e-8)
    (q1, m1), (q2, m2) = marginals(p1), marginals(p2)
    assert np.allclose(q1.values, q2.values, atol=1e-12)
    assert np.allclose(m1.values, m2.values, atol=1e-8)


def test_marginals_integrate_to_one():
    q, p = marginals(make_squeezed_gaussian(0.7 + 0.2j, 0.5))
    assert np.trapezoid(q.values, q.points) == pytest.approx(1, abs=1e-6)
    assert np.trapezoid(p.values, p.points) == pytest.approx(1, abs=1e-6)


def test_superposition_mean_position():
    psi = superpose_wavefunctions(make_fock(0), make_fock(1), 0.5, 0.5)
    q = psi.grid.points
    mean = np.trapezoid(q * np.abs(psi.values) ** 2, q)
    assert mean == pytest.approx(1 / np.sqrt(2), abs=1e-4)


def test_superposition_phase_pi_flips_interference():
    a, b = make_fock(0), make_fock(1)
    plus = np.abs(superpose_wavefunctions(a, b, 0.5, 0.5, 0.0).values) ** 2
    minus = np.abs(superpose_wavefunctions(a, b, 0.5, 0.5, np.pi).values) ** 2
    interference = np.real(np.conj(a.values) * b.values)
    assert np.allclose(plus - minus, 2 * interference, atol=1e-12)
    assert superpose_wavefunctions(a, b, 1.0, 0.0).inner(a) == pytest.approx(1)
    with pytest.raises(QtomoError):
        superpose_wavefunctions(a, b, 0.7, 0.7)


def test_projector_superposition_qubit_example():
    e0, e1 = np.eye(2)
    plus = np.full((2, 2), 0.5)
    rho = superpose_projectors(np.outer(e0, e0), np.outer(e1, e1), plus, 0.5, 0.5)
    assert np.allclose(rho, 0.5, atol=1e-10)


def test_projector_superposition_fixed_point_and_orthogonality_error():
    P0 = fiducial_projector([1, 0, 0], [0, 1, 0], 0.4)
    assert np.allclose(superpose_projectors(P0, P0, P0, 0.3, 0.7), P0, atol=1e-12)
    e2 = np.zeros((3, 3))
    e2[2, 2] = 1
    with pytest.raises(QtomoError, match="orthogonal to fiducial"):
        superpose_projectors(e2, P0, P0, 0.5, 0.5)
    with pytest.raises(QtomoError, match="rank-one"):
        superpose_projectors(np.eye(3) / 3, P0, P0, 0.5, 0.5)


@given(p1=hst.floats(0.01, 0.99), phase=hst.floats(-3, 3))
def test_projector_superposition_is_pure(p1, phase):
    f0, f1 = FockDensityMatrix.fock(0, 8), FockDensityMatrix.fock(1, 8)
    P0 = fiducial_projector(np.eye(8)[0], np.eye(8)[1], phase)
    rho = superpose_projectors(f0, f1, P0, p1, 1 - p1).entries
    assert np.max(np.abs(rho @ rho - rho)) < 1e-10
    v = np.zeros(8, dtype=complex)
    v[0], v[1] = np.sqrt(p1), np.exp(1j * phase) * np.sqrt(1 - p1)
    assert trace_distance(rho, np.outer(v, v.conj())) < 1e-10


def test_density_matrix_grid_validation():
    psi = make_fock(1, UniformGrid(-8, 8, 201))
    rho = psi.density()
    assert np.allclose(rho.eigenvalues()[:2], [1, 0], atol=1e-10)
    with pytest.raises(QtomoError):
        DensityMatrixGrid(psi.grid, 2 * rho.entries)
    mix = DensityMatrixGrid.mixture([0.25, 0.75], [make_fock(0, psi.grid), psi])
    assert np.allclose(np.sort(mix.eigenvalues())[-2:], [0.25, 0.75], atol=1e-10)
    f = mix.fock(6).entries
    assert np.allclose(np.diag(f).real[:2], [0.25, 0.75], atol=1e-8)


def test_validate_density_errors():
    with pytest.raises(QtomoError):
        validate_density(np.diag([1.2, -0.2]))
    with pytest.raises(QtomoError):
        validate_density(np.array([[0.5, 0.1], [0.3, 0.5]]))
    with pytest.raises(QtomoError):
        validate_density(np.eye(2))
    with pytest.raises(QtomoError):
        FockDensityMatrix(np.diag([1.5, -0.5]))


def test_eigen_decompose_ordering_and_gauge(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m = a @ a.conj().T
    m /= np.trace(m)
    vals, vecs = eigen_decompose(m)
    assert np.all(np.diff(vals) <= 0)
    assert np.allclose(vecs @ np.diag(vals) @ vecs.conj().T, m, atol=1e-10)
    for j in range(4):
        first = vecs[np.flatnonzero(np.abs(vecs[:, j]) > 1e-12)[0], j]
        assert abs(first.imag) < 1e-12 and first.real > 0


def test_trace_distance_of_orthogonal_pure_states():
    assert trace_distance(np.diag([1, 0]), np.diag([0, 1])) == pytest.approx(1)
