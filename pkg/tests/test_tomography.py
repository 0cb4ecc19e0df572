import numpy as np
import pytest
from hypothesis import given, strategies as hst
from scipy.stats import poisson

from qtomo.dynamics import fock_wigner
from qtomo.numerics import QtomoError, UniformGrid, integrate
from qtomo.phase_space import WignerFunction
from qtomo.states import FockDensityMatrix, make_coherent, make_fock
from qtomo.tomography import (
    ClassicalLineTomogram,
    DensityTomogram,
    FockLevelTomogram,
    FunctionTomogram,
    OpticalTomogram,
    ScaledTomogram,
    SymplecticTomogram,
    Tomogram,
    WavefunctionTomogram,
    WignerTomogram,
    angle_grid,
    classical_tomogram,
    husimi_tomogram,
    ho_level_tomogram,
    photon_number_tomogram,
    reconstruct_density,
    reconstruct_wigner,
    reconstruct_wigner_direct,
    reconstruction_params,
)

X = UniformGrid(-8, 8, 321)
angle = hst.floats(-np.pi, np.pi)
scale = hst.floats(0.3, 3.0)


def coherent_closed(alpha):
    q0, p0 = np.sqrt(2) * alpha.real, np.sqrt(2) * alpha.imag

    def fn(x, mu, nu):
        s2 = mu * mu + nu * nu
        return np.exp(-(x - mu * q0 - nu * p0) ** 2 / s2) / np.sqrt(np.pi * s2)

    return FunctionTomogram(fn)


@given(n=hst.integers(0, 3), theta=angle, s=scale)
def test_wavefunction_route_matches_closed_form(n, theta, s):
    mu, nu = s * np.cos(theta), s * np.sin(theta)
    numeric = WavefunctionTomogram(make_fock(n))(X, mu, nu)
    assert np.max(np.abs(numeric - ho_level_tomogram(n, mu, nu, X))) < 1e-9


@given(theta=angle, s=scale, lam=scale, flip=hst.booleans())
def test_homogeneity(theta, s, lam, flip):
    lam = -lam if flip else lam
    T = WavefunctionTomogram(make_coherent(0.7 - 0.4j))
    mu, nu = s * np.cos(theta), s * np.sin(theta)
    x = np.linspace(-4, 4, 41)
    assert np.allclose(T(lam * x, lam * mu, lam * nu), T(x, mu, nu) / abs(lam), atol=1e-9)


def test_coherent_state_tomogram_is_shifted_gaussian():
    alpha = 1.1 + 0.5j
    T = WavefunctionTomogram(make_coherent(alpha))
    ref = coherent_closed(alpha)
    for mu, nu in [(1, 0), (0, 1), (0.6, -1.3), (2.0, 0.1)]:
        assert np.max(np.abs(T(X, mu, nu) - ref(X, mu, nu))) < 1e-9


def test_rows_are_normalized():
    T = WavefunctionTomogram(make_fock(2))
    wide = UniformGrid(-20, 20, 801)
    for mu, nu in [(1, 0), (0.3, 0.4), (-1.5, 2.0)]:
        assert integrate(T.row(mu, nu, wide)) == pytest.approx(1.0, abs=1e-9)


def test_direct_and_fast_chirp_agree():
    psi = make_coherent(0.4 + 0.9j)
    fast, direct = WavefunctionTomogram(psi), WavefunctionTomogram(psi, method="direct")
    for mu, nu in [(1, 0.2), (0.2, 1)]:
        x = np.linspace(-3, 3, 13)
        assert np.allclose(fast(x, mu, nu), direct(x, mu, nu), atol=1e-10)


def test_density_route_matches_closed_form():
    g = UniformGrid(-7, 7, 141)
    rho = make_fock(1, g).density()
    T = DensityTomogram(rho)
    x = np.linspace(-4, 4, 33)
    for mu, nu in [(1, 0), (0.5, 0.8), (0, 1.2)]:
        assert np.max(np.abs(T(x, mu, nu) - ho_level_tomogram(1, mu, nu, x))) < 1e-6


def test_wigner_route_matches_closed_form():
    w = fock_wigner(1, UniformGrid(-7, 7, 141))
    T = WignerTomogram(w)
    x = np.linspace(-4, 4, 33)
    for mu, nu in [(1, 0), (0.6, 0.8), (-1, 2)]:
        assert np.max(np.abs(T(x, mu, nu) - ho_level_tomogram(1, mu, nu, x))) < 1e-4


def test_numeric_characteristic_matches_closed_form():
    T = FockLevelTomogram(2)
    for mu, nu in [(0.3, 0.0), (1.0, -1.0), (2.5, 0.7)]:
        numeric = Tomogram.characteristic(T, mu, nu)
        assert abs(numeric - T.characteristic(mu, nu)) < 1e-10


def test_characteristic_reports_truncated_window():
    T = coherent_closed(6.0 + 0j)
    with pytest.raises(QtomoError, match="widen y_grid"):
        Tomogram.characteristic(T, 1.0, 0.0, UniformGrid(-3, 3, 61))


def test_symplectic_tomogram_uses_homogeneity():
    st = FockLevelTomogram(1).sample([(1, 0), (0, 1), (1, 1)], X)
    x = np.linspace(-3, 3, 25)
    for mu, nu in [(2, 0), (-1, 0), (0, -0.5), (1.5, 1.5)]:
        assert np.allclose(st(x, mu, nu), ho_level_tomogram(1, mu, nu, x), atol=1e-5)
    assert abs(st.characteristic(2, 2) - FockLevelTomogram(1).characteristic(2, 2)) < 1e-8
    with pytest.raises(QtomoError, match="no stored row"):
        st(x, 1, 2)


def test_symplectic_tomogram_validation():
    with pytest.raises(QtomoError, match="shape"):
        SymplecticTomogram(X, [(1, 0)], np.zeros((2, X.count)))
    with pytest.raises(QtomoError, match="integrates"):
        SymplecticTomogram(X, [(1, 0)], np.full((1, X.count), 0.5))
    bad = ho_level_tomogram(0, 1, 0, X)[None].copy()
    bad[0, 5] = -1e-3
    with pytest.raises(QtomoError, match="negative"):
        SymplecticTomogram(X, [(1, 0)], bad, norm_tol=None)


def test_zero_observable_rejected():
    with pytest.raises(QtomoError):
        FockLevelTomogram(0)(X, 0.0, 0.0)


def test_reconstruction_params_are_unique_unit_vectors():
    params = reconstruction_params(UniformGrid(-1, 1, 5), UniformGrid(-2, 2, 5))
    assert np.allclose(np.hypot(params[:, 0], params[:, 1]), 1)
    assert len(np.unique(np.round(params, 9), axis=0)) == len(params)


def test_optical_angle_interpolation():
    T = coherent_closed(0.8 + 0.3j)
    opt = T.optical(90, X)
    for theta in [0.0123, 1.0, 2.9]:
        row = opt.angle_row(theta)
        assert np.max(np.abs(row - T(X, np.cos(theta), np.sin(theta)))) < 1e-8
    x = np.linspace(-3, 3, 17)
    assert np.allclose(opt(x, 2 * np.cos(1.0), 2 * np.sin(1.0)), T(x, 2 * np.cos(1.0), 2 * np.sin(1.0)),
                       atol=1e-6)


def test_optical_rejects_bad_angle_grid():
    with pytest.raises(QtomoError, match="theta grid"):
        OpticalTomogram(X, UniformGrid(0, 1, 10), np.zeros((10, X.count)), norm_tol=None)
    assert angle_grid(4).spacing == pytest.approx(np.pi / 4)
    assert angle_grid(4, full_circle=True).spacing == pytest.approx(np.pi / 2)


def test_back_projection_recovers_wigner():
    opt = FockLevelTomogram(1).optical(180, X)
    g = UniformGrid(-4, 4, 41)
    w = reconstruct_wigner(opt, g)
    exact = fock_wigner(1, g)
    assert np.max(np.abs(w.values - exact.values)) < 1e-2


def test_direct_inversion_oracle():
    g = UniformGrid(-2, 2, 9)
    w = reconstruct_wigner_direct(FockLevelTomogram(0), g)
    q, p = w.mesh
    assert np.max(np.abs(w.values - 2 * np.exp(-q * q - p * p))) < 1e-6


def test_back_projection_agrees_with_direct_inversion():
    g = UniformGrid(-2, 2, 9)
    T = coherent_closed(0.5 + 0.2j)
    fbp = reconstruct_wigner(T.optical(180, X), g)
    direct = reconstruct_wigner_direct(T, g)
    assert np.max(np.abs(fbp.values - direct.values)) < 1e-2


def test_density_reconstruction_of_ground_state():
    q_grid = UniformGrid(-4, 4, 33)
    rho = reconstruct_density(FockLevelTomogram(0), q_grid)
    psi = np.pi**-0.25 * np.exp(-q_grid.points**2 / 2)
    assert np.max(np.abs(rho.entries - np.outer(psi, psi))) < 1e-3


def test_density_reconstruction_from_samples():
    q_grid = UniformGrid(-4, 4, 17)
    mu_grid = UniformGrid(-10, 10, 101)
    params = reconstruction_params(q_grid, mu_grid)
    wide = UniformGrid(-12, 12, 961)
    st = WavefunctionTomogram(make_fock(1)).sample(params, wide)
    rho = reconstruct_density(st, q_grid, mu_grid)
    ref = reconstruct_density(FockLevelTomogram(1), q_grid, mu_grid)
    assert np.max(np.abs(rho.entries - ref.entries)) < 1e-6


def test_scaled_tomogram():
    T = ScaledTomogram(FockLevelTomogram(1), 2.0)
    assert np.allclose(T(X, 1, 0), ho_level_tomogram(1, 2, 0, X))
    with pytest.raises(QtomoError):
        ScaledTomogram(FockLevelTomogram(1), 0.0)


@pytest.mark.parametrize("kind", ["uniform", "laplace"])
def test_line_tomogram_matches_radon_of_line_density(kind):
    T = ClassicalLineTomogram(kind)
    for mu, nu in [(1, 0.5), (-0.3, 2), (1, 0)]:
        ref = classical_tomogram(T.line_density(), mu, nu, X)
        x = X.points
        # the uniform density jumps; compare away from its edges
        keep = np.ones(x.size, bool) if kind == "laplace" else (np.abs(x) > 0.05) & (np.abs(x - mu - nu) > 0.05)
        assert np.allclose(T(X, mu, nu)[keep], ref.values[keep])


@pytest.mark.parametrize("kind", ["uniform", "laplace"])
def test_line_tomogram_characteristic(kind):
    sur = ClassicalLineTomogram(kind).surrogate(0.05)
    for mu, nu in [(1.0, 0.5), (0.4, -1.0), (1.0, -1.0)]:
        numeric = Tomogram.characteristic(sur, mu, nu, UniformGrid(-60, 60, 12001))
        assert abs(numeric - sur.characteristic(mu, nu)) < 1e-5


def test_line_tomogram_is_a_delta_on_the_null_direction():
    with pytest.raises(QtomoError, match="delta"):
        ClassicalLineTomogram("uniform")(X, 1, -1)
    with pytest.raises(QtomoError, match="delta"):
        classical_tomogram(ClassicalLineTomogram("laplace").line_density(), 1, -1, X)
    sur = ClassicalLineTomogram("uniform").surrogate(0.1)
    assert integrate(sur.row(1, -1, X)) == pytest.approx(1.0, abs=1e-9)


def test_classical_grid_density_radon():
    f = WignerFunction.from_function(lambda q, p: np.exp(-(q * q + p * p) / 2) / (2 * np.pi),
                                     UniformGrid(-8, 8, 161))
    row = classical_tomogram(f, 0.6, 0.8, X)
    ref = np.exp(-X.points**2 / 2) / np.sqrt(2 * np.pi)
    # bilinear sampling along the line
    assert np.max(np.abs(row.values - ref)) < 1e-3


def test_photon_number_tomogram_of_coherent_state():
    alpha = 0.9 + 0.4j
    probs = photon_number_tomogram(FockDensityMatrix.fock(0, 32), -alpha)
    n = np.arange(32)

    assert np.allclose(probs, poisson.pmf(n, abs(alpha) ** 2), atol=1e-10)


def test_husimi_tomogram():
    alpha = 0.7 - 0.6j
    h, rest = husimi_tomogram(FockDensityMatrix.coherent(alpha, 64), alpha)
    assert h == pytest.approx(1.0, abs=1e-10) and rest == pytest.approx(0.0, abs=1e-10)
    z = 1.1 + 0.2j
    h, _ = husimi_tomogram(FockDensityMatrix.fock(0, 32), z)
    assert h == pytest.approx(np.exp(-abs(z) ** 2), abs=1e-10)
