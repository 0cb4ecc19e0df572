import numpy as np
import pytest
from hypothesis import given, strategies as hst

from qtomo.classify import moments
from qtomo.dynamics import (
    EvolvedTomogram,
    QuadraticHamiltonian,
    evolve_classical,
    evolve_tomogram,
    evolve_wavefunction,
    evolve_wigner,
    fock_wigner,
    stationary_moyal_residual,
)
from qtomo.numerics import GridLeakageWarning, QtomoError, UniformGrid
from qtomo.phase_space import WignerFunction
from qtomo.states import make_coherent, make_fock
from qtomo.tomography import FockLevelTomogram, WavefunctionTomogram, WignerTomogram

X = UniformGrid(-8, 8, 321)
hamiltonians = hst.one_of(hst.just(QuadraticHamiltonian("free")),
                          hst.floats(0.2, 3).map(lambda w: QuadraticHamiltonian("harmonic", w)))


def coherent_wigner(alpha, grid):
    q0, p0 = np.sqrt(2) * alpha.real, np.sqrt(2) * alpha.imag
    return WignerFunction.from_function(lambda q, p: 2 * np.exp(-(q - q0) ** 2 - (p - p0) ** 2), grid)


@given(H=hamiltonians, t=hst.floats(-5, 5))
def test_flow_is_symplectic(H, t):
    S = H.flow_matrix(t)
    assert np.linalg.det(S) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(H.flow_matrix(-t) @ S, np.eye(2), atol=1e-12)


@pytest.mark.parametrize("H", ["free", QuadraticHamiltonian("harmonic", 1.3)])
@pytest.mark.parametrize("t", [0.4, 1.7])
def test_tomogram_and_schroedinger_routes_commute(H, t):
    # the free route is periodic on the grid, so leave room for the spreading packet
    psi = make_coherent(0.6 + 0.3j, UniformGrid(-20, 20, 2048))
    direct = WavefunctionTomogram(evolve_wavefunction(psi, H, t))
    flowed = evolve_tomogram(WavefunctionTomogram(psi), H, t)
    for mu, nu in [(1, 0), (0, 1), (0.7, -0.4)]:
        assert np.max(np.abs(direct(X, mu, nu) - flowed(X, mu, nu))) < 1e-8


def test_tomographic_oscillator_equation():
    # (d_t - mu d_nu) T = -nu d_mu T, checked by central differences
    T0 = WavefunctionTomogram(make_coherent(0.8 - 0.4j))
    x, mu, nu, t, h = np.linspace(-3, 3, 25), 0.7, 0.4, 0.6, 1e-4

    def T(t_, mu_, nu_):
        return evolve_tomogram(T0, "harmonic", t_)(x, mu_, nu_)

    dt = (T(t + h, mu, nu) - T(t - h, mu, nu)) / (2 * h)
    dmu = (T(t, mu + h, nu) - T(t, mu - h, nu)) / (2 * h)
    dnu = (T(t, mu, nu + h) - T(t, mu, nu - h)) / (2 * h)
    assert np.max(np.abs(dt - mu * dnu + nu * dmu)) < 1e-6
    assert np.max(np.abs(dt + mu * dnu - nu * dmu)) > 1e-2


@given(t=hst.floats(0, 3))
def test_free_spreading(t):
    var = moments(evolve_tomogram(FockLevelTomogram(0), "free", t)).variance
    assert var == pytest.approx(0.5 + 0.5 * t * t, abs=1e-9)


def test_levels_are_stationary():
    T = EvolvedTomogram(FockLevelTomogram(2), "harmonic", 0.9)
    assert np.allclose(T(X, 0.3, 1.1), FockLevelTomogram(2)(X, 0.3, 1.1), atol=1e-14)
    assert T.characteristic(0.5, 0.5) == pytest.approx(FockLevelTomogram(2).characteristic(0.5, 0.5))
    assert T.characteristic(0, 0) == 1


def test_wigner_rotates_with_the_oscillator():
    g = UniformGrid(-6, 6, 121)
    alpha, t = 1.0 + 0.5j, 0.8
    w = evolve_wigner(coherent_wigner(alpha, g), "harmonic", t)
    ref = coherent_wigner(alpha * np.exp(-1j * t), g)
    assert np.max(np.abs(w.values - ref.values)) < 1e-3


def test_evolved_wigner_matches_wavefunction_route():
    g = UniformGrid(-6, 6, 121)
    w = evolve_wigner(fock_wigner(1, g), "free", 0.5)
    T = WavefunctionTomogram(evolve_wavefunction(make_fock(1), "free", 0.5))
    x = np.linspace(-3, 3, 13)
    assert np.max(np.abs(WignerTomogram(w)(x, 1, 0) - T(x, 1, 0))) < 1e-3


def test_classical_callable_flow():
    f0 = lambda q, p: np.exp(-((q - 1) ** 2 + p * p))  # noqa: E731
    f = evolve_classical(f0, "harmonic", np.pi / 2)
    # a quarter turn takes (1, 0) to (0, -1)
    assert f(0.0, -1.0) == pytest.approx(1.0)
    assert f(1.0, 0.0) == pytest.approx(np.exp(-2))


def test_grid_density_flow_is_wigner_flow():
    g = UniformGrid(-6, 6, 61)
    f = coherent_wigner(0.3 + 0.2j, g)
    assert np.array_equal(evolve_classical(f, "free", 0.3).values, evolve_wigner(f, "free", 0.3).values)


@pytest.mark.parametrize("n", range(5))
def test_stationary_moyal_equation(n):
    assert stationary_moyal_residual(n, n + 0.5) < 1e-10
    assert stationary_moyal_residual(n, n + 1.5) > 0.1


def test_leakage_warning_when_flow_leaves_grid():
    g = UniformGrid(-3, 3, 61)
    with pytest.warns(GridLeakageWarning):
        evolve_wigner(coherent_wigner(1.5 + 0j, g), "free", 2.0)


def test_wide_state_warns_in_oscillator_basis():
    with pytest.warns(GridLeakageWarning):
        evolve_wavefunction(make_coherent(6.0 + 0j), "harmonic", 1.0, nmax=20)


def test_errors():
    with pytest.raises(QtomoError, match="quadratic"):
        QuadraticHamiltonian("quartic")
    with pytest.raises(QtomoError, match="omega"):
        QuadraticHamiltonian("harmonic", -1.0)
    with pytest.raises(QtomoError):
        evolve_tomogram(FockLevelTomogram(0), 3.0, 1.0)
    with pytest.raises(QtomoError):
        stationary_moyal_residual(11, 11.5)
