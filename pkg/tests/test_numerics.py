import numpy as np
import pytest
from hypothesis import given, strategies as hst

from qtomo.numerics import (
    GridLeakageWarning,
    QtomoError,
    Samples,
    UniformGrid,
    chirp_overlap,
    chirp_transform,
    check_leakage,
    fourier_sum,
    fourier_sum_direct,
    hermite_eigenfunction,
    hermite_functions,
    integrate,
    parallel_map,
    resolve_threads,
    trapezoid_weights,
)


def test_grid_validation():
    with pytest.raises(QtomoError):
        UniformGrid(0.0, 1.0, 1)
    with pytest.raises(QtomoError):
        UniformGrid(1.0, 0.0, 10)
    with pytest.raises(QtomoError):
        UniformGrid(0.0, np.inf, 10)
    g = UniformGrid(-1, 1, 5)
    assert g.spacing == 0.5
    assert g.is_symmetric
    assert g.scaled(2.0) == UniformGrid(-2, 2, 5)


def test_samples_reject_bad_shapes():
    g = UniformGrid(0, 1, 4)
    with pytest.raises(QtomoError):
        Samples(g, np.zeros(3))
    with pytest.raises(QtomoError):
        Samples(g, np.array([0, np.nan, 0, 0]))


def test_trapezoid_integrates_gaussian():
    g = UniformGrid(-10, 10, 401)
    s = Samples(g, np.exp(-g.points**2))
    assert integrate(s) == pytest.approx(np.sqrt(np.pi), abs=1e-12)
    assert trapezoid_weights(g).sum() == pytest.approx(20.0)


def test_hermite_functions_orthonormal():
    g = UniformGrid(-15, 15, 2001)
    h = hermite_functions(20, g.points)
    gram = (h * trapezoid_weights(g)) @ h.T
    assert np.max(np.abs(gram - np.eye(21))) < 1e-10


def test_hermite_bounds_and_leakage():
    with pytest.raises(QtomoError):
        hermite_functions(61, [0.0])
    with pytest.warns(GridLeakageWarning):
        hermite_eigenfunction(10, UniformGrid(-2, 2, 41))
    assert not check_leakage(np.zeros(5), "zeros")


@given(k0=hst.floats(-5, 0), k1=hst.floats(0.1, 5), m=hst.integers(2, 40))
def test_fourier_sum_matches_dense_sum(k0, k1, m):
    g = UniformGrid(-6, 6, 129)
    f = np.exp(-g.points**2 / 2) * (1 + 0.3j * g.points)
    kg = UniformGrid(k0, k1, m)
    assert np.allclose(fourier_sum(f, g, kg), fourier_sum_direct(f, g, kg.points), atol=1e-10)


def test_fourier_sum_gaussian_closed_form():
    g = UniformGrid(-12, 12, 1024)
    kg = UniformGrid(-4, 4, 81)
    got = fourier_sum(np.exp(-g.points**2 / 2), g, kg)
    assert np.allclose(got, np.sqrt(2 * np.pi) * np.exp(-kg.points**2 / 2), atol=1e-12)


@pytest.mark.parametrize("scale", [0.7, -1.3])
def test_chirp_transform_fast_matches_direct(scale):
    g = UniformGrid(-8, 8, 257)
    f = np.exp(-g.points**2 / 2)
    xg = UniformGrid(-5, 5, 41)
    fast = chirp_transform(f, g, 0.3, xg, scale)
    direct = chirp_transform(f, g, 0.3, xg, scale, method="direct")
    assert np.allclose(fast, direct, atol=1e-10)
    with pytest.raises(QtomoError):
        chirp_transform(f, g, 0.3, xg, scale, method="bogus")


def test_chirp_overlap_of_ground_state_is_gaussian():
    # mu Q + nu P on the ground state has variance (mu^2 + nu^2)/2
    g = UniformGrid(-10, 10, 1024)
    psi = Samples(g, np.pi**-0.25 * np.exp(-g.points**2 / 2))
    mu, nu = 0.6, 0.8
    xg = UniformGrid(-4, 4, 81)
    dens = np.abs(chirp_overlap(psi, mu, nu, xg).values) ** 2
    assert np.allclose(dens, np.exp(-xg.points**2) / np.sqrt(np.pi), atol=1e-10)
    with pytest.raises(QtomoError):
        chirp_overlap(psi, 1.0, 0.0, xg)


def test_parallel_map_keeps_order():
    items = list(range(50))
    assert parallel_map(lambda x: x * x, items, threads=4) == [x * x for x in items]
    assert resolve_threads(None) >= 1
    with pytest.raises(QtomoError):
        resolve_threads(0)
