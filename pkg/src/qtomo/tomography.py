"""Symplectic and optical tomograms: forward maps, closed forms and reconstruction.

A tomogram T(X, mu, nu) is the probability density of the observable
mu Q + nu P. Every tomogram in this module is a callable ``T(X, mu, nu)``
where X is an array of points or a :class:`UniformGrid`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.ndimage import map_coordinates, spline_filter1d
from scipy.special import erfc, erfcx, eval_laguerre

from .numerics import (
    GridLeakageWarning,
    QtomoError,
    Samples,
    UniformGrid,
    chirp_transform,
    check_leakage,
    fourier_sum_direct,
    hermite_functions,
    parallel_map,
    trapezoid_weights,
)
from .phase_space import WignerFunction, _displacement_rows, _fock_matrix, _trim_support
from .states import DensityMatrixGrid, WaveFunction

NORM_TOL = 1e-6
DEFAULT_X_GRID = UniformGrid(-8.0, 8.0, 321)
DEFAULT_Y_GRID = UniformGrid(-12.0, 12.0, 481)
DEFAULT_MU_GRID = UniformGrid(-12.0, 12.0, 257)
DEFAULT_Q_GRID = UniformGrid(-6.0, 6.0, 97)


def _points(X) -> np.ndarray:
    return X.points if isinstance(X, UniformGrid) else np.asarray(X, dtype=float)


def _as_grid(X) -> UniformGrid | None:
    """Return X as a UniformGrid when its points are uniformly spaced."""
    if isinstance(X, UniformGrid):
        return X
    x = np.asarray(X, dtype=float)
    if x.ndim != 1 or x.size < 2:
        return None
    d = np.diff(x)
    if d[0] > 0 and np.allclose(d, d[0], rtol=1e-9, atol=0.0):
        return UniformGrid(x[0], x[-1], x.size)
    return None


def _check_params(mu: float, nu: float) -> float:
    s = float(np.hypot(mu, nu))
    if s == 0:
        raise QtomoError("degenerate observable: (mu, nu) = (0, 0)")
    return s


def angle_grid(n: int, full_circle: bool = False) -> UniformGrid:
    """n equally spaced angles over [0, pi), or [0, 2 pi) for ``full_circle``."""
    span = 2 * np.pi if full_circle else np.pi
    return UniformGrid(0.0, span * (n - 1) / n, n)


# --- tomogram base class and sampled containers --------------------------------------

class Tomogram:
    """Callable tomogram T(X, mu, nu)."""

    #: distributions on lines of phase space cannot be reconstructed on a grid
    singular = False

    def __call__(self, X, mu: float, nu: float) -> np.ndarray:
        raise NotImplementedError

    def characteristic(self, mu: float, nu: float, y_grid: UniformGrid = DEFAULT_Y_GRID) -> complex:
        """int T(X, mu, nu) exp(iX) dX, i.e. the mean of exp[i(mu Q + nu P)].

        Evaluated at X = s Y with s = |(mu, nu)|, which by homogeneity keeps the
        integrand on a fixed Y window whatever the size of (mu, nu).
        """
        s = np.hypot(mu, nu)
        if s == 0:
            return 1.0 + 0j
        row = s * np.asarray(self(s * y_grid.points, mu, nu), dtype=float)
        peak = np.max(np.abs(row))
        if peak > 0 and max(abs(row[0]), abs(row[-1])) > 1e-6 * peak:
            raise QtomoError(
                f"tomogram at (mu, nu) = ({mu:.3g}, {nu:.3g}) is not contained in "
                f"X/s in [{y_grid.min}, {y_grid.max}]; widen y_grid"
            )
        w = trapezoid_weights(y_grid)
        return complex(np.sum(w * row * np.exp(1j * s * y_grid.points)))

    def row(self, mu: float, nu: float, X_grid: UniformGrid = DEFAULT_X_GRID) -> Samples:
        return Samples(X_grid, np.asarray(self(X_grid, mu, nu), dtype=float))

    def sample(self, params, X_grid: UniformGrid = DEFAULT_X_GRID, norm_tol: float | None = NORM_TOL,
               threads: int | None = 1) -> "SymplecticTomogram":
        params = np.asarray(params, dtype=float).reshape(-1, 2)
        rows = parallel_map(lambda mn: np.asarray(self(X_grid, mn[0], mn[1]), dtype=float), params, threads)
        return SymplecticTomogram(X_grid, params, np.array(rows), norm_tol=norm_tol)

    def optical(self, n_angles: int = 180, X_grid: UniformGrid = DEFAULT_X_GRID,
                full_circle: bool = False, norm_tol: float | None = NORM_TOL,
                threads: int | None = 1) -> "OpticalTomogram":
        thetas = angle_grid(n_angles, full_circle)
        rows = parallel_map(
            lambda t: np.asarray(self(X_grid, np.cos(t), np.sin(t)), dtype=float), thetas.points, threads
        )
        return OpticalTomogram(X_grid, thetas, np.array(rows), norm_tol=norm_tol)


def _check_rows(X_grid: UniformGrid, values: np.ndarray, norm_tol: float | None) -> None:
    if not np.all(np.isfinite(values)):
        raise QtomoError("tomogram contains non-finite values")
    if values.min(initial=0.0) < -1e-10:
        raise QtomoError(f"tomogram has negative value {values.min():.2e}")
    if norm_tol is not None:
        norms = values @ trapezoid_weights(X_grid)
        bad = np.flatnonzero(np.abs(norms - 1.0) > norm_tol)
        if bad.size:
            raise QtomoError(
                f"tomogram row {bad[0]} integrates to {norms[bad[0]]:.8f}; "
                f"expected 1 within {norm_tol:g}"
            )


class SymplecticTomogram(Tomogram):
    """Rows of T(X, mu, nu) for an explicit list of (mu, nu) pairs."""

    def __init__(self, X_grid: UniformGrid, params, values, norm_tol: float | None = NORM_TOL):
        self.X_grid = X_grid
        self.params = np.asarray(params, dtype=float).reshape(-1, 2)
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (len(self.params), X_grid.count):
            raise QtomoError(
                f"values shape {self.values.shape} does not match "
                f"({len(self.params)}, {X_grid.count})"
            )
        _check_rows(X_grid, self.values, norm_tol)
        self._index = None

    def _direction_key(self, mu: float, nu: float) -> tuple[tuple[float, float], float]:
        """Canonical unit direction of (mu, nu) and the signed length along it."""
        s = _check_params(mu, nu)
        m, n = mu / s, nu / s
        if m < 0 or (m == 0 and n < 0):
            m, n, s = -m, -n, -s
        return (round(m, 11) + 0.0, round(n, 11) + 0.0), s

    def _lookup(self, mu: float, nu: float) -> tuple[int, float]:
        """Row index i and factor lam with (mu, nu) = lam * params[i]."""
        if self._index is None:
            self._index = {}
            for i, (m, n) in enumerate(self.params):
                key, s = self._direction_key(m, n)
                self._index.setdefault(key, (i, s))
        key, s = self._direction_key(mu, nu)
        if key not in self._index:
            raise QtomoError(f"no stored row along (mu, nu) = ({mu}, {nu})")
        i, s_row = self._index[key]
        return i, s / s_row

    def __call__(self, X, mu: float, nu: float) -> np.ndarray:
        """Evaluate through the stored row proportional to (mu, nu), using homogeneity."""
        i, lam = self._lookup(mu, nu)
        vals = CubicSpline(self.X_grid.points, self.values[i], extrapolate=False)(_points(X) / lam)
        return homogeneity_rescale(np.maximum(np.nan_to_num(vals, nan=0.0), 0.0), lam)

    def characteristic(self, mu: float, nu: float, y_grid: UniformGrid | None = None) -> complex:
        """Mean of exp[i(mu Q + nu P)] from the stored row, so y_grid is ignored."""
        if mu == 0 and nu == 0:
            return 1.0 + 0j
        i, lam = self._lookup(mu, nu)
        row = self.values[i]
        peak = row.max()
        if peak > 0 and max(row[0], row[-1]) > 1e-6 * peak:
            raise QtomoError(
                f"stored row along ({mu:.3g}, {nu:.3g}) is not contained in "
                f"X in [{self.X_grid.min}, {self.X_grid.max}]"
            )
        w = trapezoid_weights(self.X_grid)
        return complex(np.sum(w * row * np.exp(1j * lam * self.X_grid.points)))


def reconstruction_params(q_grid: UniformGrid = DEFAULT_Q_GRID,
                          mu_grid: UniformGrid = DEFAULT_MU_GRID) -> np.ndarray:
    """Unit directions of every (mu, q - q') pair used by :func:`reconstruct_density`.

    Sampling a state along these directions on a fixed X window is enough:
    other lengths follow from homogeneity.
    """
    mus = mu_grid.points
    nus = q_grid.spacing * np.arange(q_grid.count)
    m, n = np.meshgrid(mus, nus, indexing="ij")
    pairs = np.stack([m.ravel(), n.ravel()], axis=1)
    pairs = pairs[np.hypot(pairs[:, 0], pairs[:, 1]) > 0]
    unit = pairs / np.hypot(pairs[:, 0], pairs[:, 1])[:, None]
    flip = (unit[:, 0] < 0) | ((unit[:, 0] == 0) & (unit[:, 1] < 0))
    unit[flip] *= -1
    _, first = np.unique(np.round(unit, 11), axis=0, return_index=True)
    return unit[np.sort(first)]


class OpticalTomogram(Tomogram):
    """Rows T(X, cos theta, sin theta) on a uniform angle grid.

    Other (mu, nu) follow from homogeneity; angles between rows use
    trigonometric interpolation, X between nodes a cubic spline.
    """

    def __init__(self, X_grid: UniformGrid, theta_grid: UniformGrid, values,
                 norm_tol: float | None = NORM_TOL):
        self.X_grid = X_grid
        self.theta_grid = theta_grid
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (theta_grid.count, X_grid.count):
            raise QtomoError(
                f"values shape {self.values.shape} does not match "
                f"({theta_grid.count}, {X_grid.count})"
            )
        n, dtheta = theta_grid.count, theta_grid.spacing
        span = n * dtheta
        if abs(span - np.pi) < 1e-9:
            self.full_circle = False
        elif abs(span - 2 * np.pi) < 1e-9:
            self.full_circle = True
        else:
            raise QtomoError("theta grid must cover [t0, t0 + pi) or [t0, t0 + 2 pi) uniformly")
        _check_rows(X_grid, self.values, norm_tol)
        self._coeffs = None

    @property
    def thetas(self) -> np.ndarray:
        return self.theta_grid.points

    def circle_rows(self) -> np.ndarray:
        """Rows over a full turn, using T(X, theta + pi) = T(-X, theta)."""
        if self.full_circle:
            return self.values
        if not self.X_grid.is_symmetric:
            raise QtomoError("half-turn optical tomograms need an X grid symmetric about 0")
        return np.concatenate([self.values, self.values[:, ::-1]])

    def angle_row(self, theta: float) -> np.ndarray:
        """Row at an arbitrary angle by trigonometric interpolation."""
        if self._coeffs is None:
            rows = self.circle_rows()
            m = rows.shape[0]
            self._coeffs = (np.fft.fft(rows, axis=0) / m, np.fft.fftfreq(m, 1.0 / m))
        c, k = self._coeffs
        phi = theta - self.theta_grid.min
        return np.real(np.exp(1j * k * phi) @ c)

    def __call__(self, X, mu: float, nu: float) -> np.ndarray:
        s = _check_params(mu, nu)
        theta = np.arctan2(nu, mu)
        row = self.angle_row(theta)
        y = _points(X) / s
        grid = self.X_grid
        idx = (y - grid.min) / grid.spacing
        on_node = np.abs(idx - np.round(idx)) < 1e-9
        out = np.zeros_like(y)
        inside = (idx >= -1e-9) & (idx <= grid.count - 1 + 1e-9)
        exact = on_node & inside
        out[exact] = row[np.round(idx[exact]).astype(int)]
        rest = inside & ~on_node
        if np.any(rest):
            out[rest] = CubicSpline(grid.points, row)(y[rest])
        return np.maximum(out, 0.0) / s


# --- forward maps -----------------------------------------------------------------

class WavefunctionTomogram(Tomogram):
    """T(X, mu, nu) = |<X mu nu|psi>|^2 from the chirp transform of psi.

    The position branch is used when |nu| >= |mu| and the momentum branch
    otherwise, so the chirp rate never exceeds 1/2 in modulus.
    """

    def __init__(self, psi: WaveFunction, method: str = "fast"):
        self.psi = psi
        self.method = method
        self._momentum = None

    def momentum(self) -> Samples:
        if self._momentum is None:
            self._momentum = self.psi.momentum()
        return self._momentum

    def amplitude(self, X, mu: float, nu: float) -> np.ndarray:
        _check_params(mu, nu)
        grid = _as_grid(X)
        if grid is None:
            return self._amplitude_direct(_points(X), mu, nu)
        if abs(nu) >= abs(mu):
            amp = chirp_transform(self.psi.values, self.psi.grid, mu / (2 * nu), grid, nu, self.method)
            return amp / np.sqrt(2 * np.pi * abs(nu))
        pt = self.momentum()
        amp = chirp_transform(pt.values, pt.grid, -nu / (2 * mu), grid, -mu, self.method)
        return amp / np.sqrt(2 * np.pi * abs(mu))

    def _amplitude_direct(self, x: np.ndarray, mu: float, nu: float) -> np.ndarray:
        if abs(nu) >= abs(mu):
            g = self.psi.values * np.exp(0.5j * mu / nu * self.psi.grid.points**2)
            return fourier_sum_direct(g, self.psi.grid, x / nu) / np.sqrt(2 * np.pi * abs(nu))
        pt = self.momentum()
        g = pt.values * np.exp(-0.5j * nu / mu * pt.grid.points**2)
        return fourier_sum_direct(g, pt.grid, -x / mu) / np.sqrt(2 * np.pi * abs(mu))

    def __call__(self, X, mu: float, nu: float) -> np.ndarray:
        return np.abs(self.amplitude(X, mu, nu)) ** 2


def tomogram_from_wavefunction(psi: WaveFunction, params, X_grid: UniformGrid = DEFAULT_X_GRID,
                               threads: int | None = 1) -> SymplecticTomogram:
    return WavefunctionTomogram(psi).sample(params, X_grid, threads=threads)


class DensityTomogram(Tomogram):
    """T = <X mu nu| rho |X mu nu> by double quadrature over a density kernel."""

    def __init__(self, rho: DensityMatrixGrid):
        self.rho = rho
        self._momentum = None

    def _momentum_kernel(self) -> tuple[UniformGrid, np.ndarray]:
        """rho~(p, p') = (2 pi)^-1 int int exp(-i p y) rho(y, y') exp(i p' y') dy dy'."""
        if self._momentum is None:
            g = self.rho.grid
            f = np.exp(-1j * np.outer(g.points, g.points)) * trapezoid_weights(g)
            self._momentum = f @ self.rho.entries @ f.conj().T / (2 * np.pi)
        return self.rho.grid, self._momentum

    def __call__(self, X, mu: float, nu: float) -> np.ndarray:
        _check_params(mu, nu)
        x = _points(X)
        if abs(nu) >= abs(mu):
            grid, kern, a, scale = self.rho.grid, self.rho.entries, mu / (2 * nu), nu
        else:
            grid, kern = self._momentum_kernel()
            a, scale = -nu / (2 * mu), -mu
        y = grid.points
        # row X of f is <X mu nu|y> times the quadrature weight
        f = np.exp(1j * a * y[None, :] ** 2 - 1j * np.outer(x, y) / scale) * trapezoid_weights(grid)
        t = np.einsum("xa,ab,xb->x", f, kern, f.conj()) / (2 * np.pi * abs(scale))
        return t.real


def tomogram_from_density(rho: DensityMatrixGrid, mu: float, nu: float,
                          X_grid: UniformGrid = DEFAULT_X_GRID) -> Samples:
    return DensityTomogram(rho).row(mu, nu, X_grid)


def _line_integral(w: WignerFunction, x: np.ndarray, mu: float, nu: float, order: int) -> np.ndarray:
    """int W(z) delta(X - mu q - nu p) dz for each X, by sampling along each line."""
    s = _check_params(mu, nu)
    n = np.array([mu, nu]) / s
    t_perp = np.array([-n[1], n[0]])
    qg, pg = w.q_grid, w.p_grid
    half = np.hypot(max(abs(qg.min), abs(qg.max)), max(abs(pg.min), abs(pg.max)))
    dt = 0.5 * min(qg.spacing, pg.spacing)
    t = np.arange(-half, half + dt / 2, dt)
    u = x / s
    q = u[:, None] * n[0] + t[None, :] * t_perp[0]
    p = u[:, None] * n[1] + t[None, :] * t_perp[1]
    coords = np.array([((q - qg.min) / qg.spacing).ravel(), ((p - pg.min) / pg.spacing).ravel()])
    vals = map_coordinates(np.real(w.values), coords, order=order, mode="constant", cval=0.0)
    vals = vals.reshape(q.shape)
    wt = np.full(t.size, dt)
    wt[0] = wt[-1] = dt / 2
    return vals @ wt / s


def _warn_open_boundary(w: WignerFunction, tol: float = 1e-6) -> None:
    v = np.abs(w.values)
    edge = max(v[0].max(), v[-1].max(), v[:, 0].max(), v[:, -1].max())
    if edge > tol:
        warnings.warn(f"lines leave the phase-space grid where |W| = {edge:.1e}",
                      GridLeakageWarning, stacklevel=3)


class WignerTomogram(Tomogram):
    """Radon transform of a Wigner function, T = (2 pi)^-1 int W delta(X - mu q - nu p)."""

    def __init__(self, w: WignerFunction, order: int = 3):
        self.w = w
        self.order = order
        _warn_open_boundary(w)

    def __call__(self, X, mu: float, nu: float) -> np.ndarray:
        return _line_integral(self.w, _points(X), mu, nu, self.order) / (2 * np.pi)


def tomogram_from_wigner(w: WignerFunction, mu: float, nu: float,
                         X_grid: UniformGrid = DEFAULT_X_GRID, order: int = 3) -> Samples:
    return WignerTomogram(w, order).row(mu, nu, X_grid)


# --- closed forms ----------------------------------------------------------------------

def ho_level_tomogram(n: int, mu: float, nu: float, X) -> np.ndarray:
    """Tomogram of the n-th oscillator level.

    T_n = exp(-X^2/s^2) / sqrt(pi s^2) * H_n(X/s)^2 / (2^n n!) with s^2 = mu^2 + nu^2,
    evaluated as psi_n(X/s)^2 / s through the normalized Hermite recurrence.
    """
    s = _check_params(mu, nu)
    x = _points(X)
    return hermite_functions(n, x / s)[n] ** 2 / s


class FockLevelTomogram(Tomogram):
    """Closed-form tomogram of the oscillator level n."""

    def __init__(self, n: int):
        self.n = n

    def __call__(self, X, mu: float, nu: float) -> np.ndarray:
        return ho_level_tomogram(self.n, mu, nu, X)

    def characteristic(self, mu: float, nu: float, y_grid: UniformGrid | None = None) -> complex:
        s2 = mu * mu + nu * nu
        return complex(np.exp(-s2 / 4) * eval_laguerre(self.n, s2 / 2))


class ScaledTomogram(Tomogram):
    """T_lambda(X, mu, nu) = T(X, lambda mu, lambda nu)."""

    def __init__(self, base: Tomogram, lam: float):
        if lam == 0:
            raise QtomoError("scale parameter lambda must be non-zero")
        self.base = base
        self.lam = lam

    @property
    def singular(self) -> bool:
        return self.base.singular

    def __call__(self, X, mu: float, nu: float) -> np.ndarray:
        return self.base(X, self.lam * mu, self.lam * nu)

    def characteristic(self, mu: float, nu: float, y_grid: UniformGrid = DEFAULT_Y_GRID) -> complex:
        return self.base.characteristic(self.lam * mu, self.lam * nu, y_grid)


def scaled_first_excited_tomogram(lam: float, mu: float, nu: float, X) -> np.ndarray:
    """T_1(X, lambda mu, lambda nu); a genuine state only for |lambda| = 1."""
    if lam == 0:
        raise QtomoError("scale parameter lambda must be non-zero")
    return ho_level_tomogram(1, lam * mu, lam * nu, X)


def homogeneity_rescale(value, lam: float):
    """T(lambda X, lambda mu, lambda nu) from T(X, mu, nu)."""
    if lam == 0:
        raise QtomoError("homogeneity factor lambda must be non-zero")
    return np.asarray(value) / abs(lam)


class FunctionTomogram(Tomogram):
    """Wrap a plain function f(X, mu, nu)."""

    def __init__(self, fn: Callable, characteristic: Callable | None = None, singular: bool = False):
        self.fn = fn
        self._char = characteristic
        self.singular = singular

    def __call__(self, X, mu: float, nu: float) -> np.ndarray:
        _check_params(mu, nu)
        return np.asarray(self.fn(_points(X), mu, nu), dtype=float)

    def characteristic(self, mu: float, nu: float, y_grid: UniformGrid = DEFAULT_Y_GRID) -> complex:
        if self._char is not None:
            return complex(self._char(mu, nu))
        return super().characteristic(mu, nu, y_grid)


# --- classical states ---------------------------------------------------------------

@dataclass(frozen=True)
class LineDensity:
    """Measure g(t) dt carried by the phase-space line z(t) = origin + t * direction."""

    density: Callable
    origin: tuple = (0.0, 0.0)
    direction: tuple = (1.0, 1.0)

    def coefficients(self, mu: float, nu: float) -> tuple[float, float]:
        """mu q + nu p = a + b t along the line."""
        a = mu * self.origin[0] + nu * self.origin[1]
        b = mu * self.direction[0] + nu * self.direction[1]
        return a, b


def classical_tomogram(f, mu: float, nu: float, X_grid: UniformGrid = DEFAULT_X_GRID) -> Samples:
    """Radon transform of a classical phase-space density, without the 2 pi of the quantum map.

    ``f`` is either a grid density (a WignerFunction holding f itself) or a
    :class:`LineDensity`.
    """
    _check_params(mu, nu)
    x = X_grid.points
    if isinstance(f, LineDensity):
        a, b = f.coefficients(mu, nu)
        if b == 0:
            raise QtomoError("observable is constant along the support line; tomogram is a delta")
        return Samples(X_grid, np.asarray(f.density((x - a) / b), dtype=float) / abs(b))
    if isinstance(f, WignerFunction):
        _warn_open_boundary(f)
        return Samples(X_grid, _line_integral(f, x, mu, nu, order=1))
    raise QtomoError(f"unsupported phase-space density {type(f).__name__}")


def _uniform_unit(t):
    """Indicator of [0, 1] with value 1/2 at the two jumps."""
    t = np.asarray(t, dtype=float)
    return np.where((t > 0) & (t < 1), 1.0, 0.0) + 0.5 * ((t == 0) | (t == 1))


def _laplace_unit(t):
    return 0.5 * np.exp(-np.abs(np.asarray(t, dtype=float)))


def _uniform_smoothed(x, b, tau):
    """Density of b U + tau G with U uniform on [0, 1] and G standard normal."""
    lo, hi = min(0.0, b), max(0.0, b)
    if tau == 0:
        return _uniform_unit((x - lo) / (hi - lo)) / (hi - lo)
    from scipy.special import ndtr

    return (ndtr((x - lo) / tau) - ndtr((x - hi) / tau)) / (hi - lo)


def _laplace_smoothed(x, beta, tau):
    """Density of beta L + tau G with L standard Laplace and G standard normal."""
    beta = abs(beta)
    if tau == 0:
        return 0.5 * np.exp(-np.abs(x) / beta) / beta
    if beta == 0:
        return np.exp(-0.5 * (x / tau) ** 2) / (np.sqrt(2 * np.pi) * tau)
    r = tau / beta
    out = np.zeros_like(x)
    for sign in (-1.0, 1.0):
        z = (r + sign * x / tau) / np.sqrt(2)
        pos = z >= 0
        term = np.empty_like(x)
        term[pos] = np.exp(-0.5 * (x[pos] / tau) ** 2) * erfcx(z[pos])
        term[~pos] = np.exp(0.5 * r * r + sign * x[~pos] / beta) * erfc(z[~pos])
        out += term
    return out / (4 * beta)


class ClassicalLineTomogram(Tomogram):
    """Tomograms of classical states concentrated on the line q = p.

    ``uniform``: f = chi_[0,1](q) delta(q - p), T = chi_[0, mu+nu](X) / |mu + nu|.
    ``laplace``: f = exp(-|q|) delta(q - p) / 2, T = exp(-|X|/|mu+nu|) / (2 |mu + nu|).
    A positive ``width`` convolves the phase-space measure with an isotropic
    Gaussian of that standard deviation, giving a grid-representable surrogate.
    """

    def __init__(self, kind: str, width: float = 0.0):
        if kind not in ("uniform", "laplace"):
            raise QtomoError(f"unknown line density {kind!r}")
        self.kind = kind
        self.width = float(width)
        self.singular = self.width == 0.0

    def line_density(self) -> LineDensity:
        return LineDensity(_uniform_unit if self.kind == "uniform" else _laplace_unit)

    def surrogate(self, width: float = 0.05) -> "ClassicalLineTomogram":
        return ClassicalLineTomogram(self.kind, width)

    def __call__(self, X, mu: float, nu: float) -> np.ndarray:
        _check_params(mu, nu)
        x = _points(X)
        b = mu + nu
        tau = self.width * np.hypot(mu, nu)
        if b == 0 and tau == 0:
            raise QtomoError("observable is constant along the support line; tomogram is a delta")
        if abs(b) <= 1e-9 * tau:
            # the line projects to a point: only the smoothing is left
            return np.exp(-0.5 * (x / tau) ** 2) / (np.sqrt(2 * np.pi) * tau)
        if self.kind == "uniform":
            return _uniform_smoothed(x, b, tau)
        return _laplace_smoothed(x, b, tau)

    def characteristic(self, mu: float, nu: float, y_grid: UniformGrid | None = None) -> complex:
        b = mu + nu
        tau = self.width * np.hypot(mu, nu)
        smear = np.exp(-0.5 * tau * tau)
        if self.kind == "laplace":
            return complex(smear / (1 + b * b))
        if abs(b) < 1e-8:
            return complex(smear * (1 + 0.5j * b))
        return complex(smear * (np.exp(1j * b) - 1) / (1j * b))


# --- inverse maps ---------------------------------------------------------------------

def reconstruct_density(tomo: Tomogram, q_grid: UniformGrid = DEFAULT_Q_GRID,
                        mu_grid: UniformGrid = DEFAULT_MU_GRID, y_grid: UniformGrid | None = None,
                        threads: int | None = 1, hermitize: bool = True) -> DensityMatrixGrid:
    """rho(q, q') = (2 pi)^-1 int int T(X, mu, q - q') exp{i[X - mu (q + q')/2]} dX dmu.

    The X integral is the characteristic function of the tomogram at
    (mu, q - q'); it is computed on X = s Y, s = |(mu, q - q')|, so the
    required X range grows with s automatically (homogeneity). Kernel values
    with q < q' follow from Hermiticity.
    """
    if y_grid is None:
        y_grid = tomo.X_grid if isinstance(tomo, OpticalTomogram) else DEFAULT_Y_GRID
    n, h = q_grid.count, q_grid.spacing
    mus = mu_grid.points
    wmu = trapezoid_weights(mu_grid)

    def column(k):
        nu = k * h
        return np.array([tomo.characteristic(m, nu, y_grid) for m in mus])

    chi = np.array(parallel_map(column, range(n), threads))  # chi[k, j]
    q = q_grid.points
    kern = np.zeros((n, n), dtype=complex)
    for k in range(n):
        a = np.arange(k, n)
        mid = 0.5 * (q[a] + q[a - k])
        kern[a, a - k] = np.exp(-1j * np.outer(mid, mus)) @ (wmu * chi[k]) / (2 * np.pi)
    lower = np.tril(kern, -1)
    kern = np.tril(kern) + lower.conj().T
    tr = np.real(np.sum(trapezoid_weights(q_grid) * np.diag(kern)))
    if abs(tr - 1) > 1e-2:
        warnings.warn(f"reconstructed trace {tr:.4f}; q_grid may not cover the state",
                      GridLeakageWarning, stacklevel=2)
    if hermitize:
        return DensityMatrixGrid.hermitized(q_grid, kern)
    return DensityMatrixGrid(q_grid, kern)


def ram_lak_kernel(n: int, dx: float) -> np.ndarray:
    """Band-limited ramp filter sampled at lags -(n-1)..(n-1)."""
    lags = np.arange(-(n - 1), n)
    h = np.zeros(lags.size)
    h[lags == 0] = 1.0 / (4 * dx * dx)
    odd = (lags % 2) != 0
    h[odd] = -1.0 / (np.pi**2 * lags[odd] ** 2 * dx * dx)
    return h


def filter_projections(values: np.ndarray, dx: float) -> np.ndarray:
    """Convolve each row with the ramp filter via zero-padded FFTs."""
    n = values.shape[-1]
    kern = ram_lak_kernel(n, dx)
    size = 1 << int(np.ceil(np.log2(3 * n - 2)))
    spec = np.fft.rfft(values, size, axis=-1) * np.fft.rfft(kern, size)
    full = np.fft.irfft(spec, size, axis=-1)
    return dx * full[..., n - 1:2 * n - 1]


def reconstruct_wigner(opt: OpticalTomogram, q_grid: UniformGrid | None = None,
                       p_grid: UniformGrid | None = None) -> WignerFunction:
    """Filtered back-projection of an optical tomogram.

    W(q, p) = 2 pi int_0^pi (T_theta * h)(q cos theta + p sin theta) d theta with
    the ramp filter h; the 2 pi matches int int W dq dp / (2 pi) = 1.
    """
    if opt.theta_grid.count < 30:
        warnings.warn("fewer than 30 angles: reconstruction artifacts expected", RuntimeWarning, stacklevel=2)
    if q_grid is None:
        r = min(abs(opt.X_grid.min), abs(opt.X_grid.max)) / np.sqrt(2)
        q_grid = UniformGrid(-r, r, 121)
    p_grid = p_grid or q_grid
    xg = opt.X_grid
    filt = filter_projections(opt.values, xg.spacing)
    q, p = np.meshgrid(q_grid.points, p_grid.points, indexing="ij")
    acc = np.zeros(q.shape)
    for theta, row in zip(opt.thetas, filt):
        coeffs = spline_filter1d(row, order=3, mode="constant")
        idx = (q * np.cos(theta) + p * np.sin(theta) - xg.min) / xg.spacing
        acc += map_coordinates(coeffs, idx[None], order=3, mode="constant", cval=0.0, prefilter=False)
    dtheta = opt.theta_grid.spacing
    if opt.full_circle:
        dtheta *= 0.5
    return WignerFunction(q_grid, p_grid, 2 * np.pi * dtheta * acc)


def reconstruct_wigner_direct(tomo: Tomogram, q_grid: UniformGrid, p_grid: UniformGrid | None = None,
                              k_grid: UniformGrid = UniformGrid(-8.0, 8.0, 64),
                              y_grid: UniformGrid = DEFAULT_Y_GRID) -> WignerFunction:
    """W(q, p) = (2 pi)^-1 int int int T(X, mu, nu) exp{i[X - mu q - nu p]} dX dmu dnu.

    Slow triple-integral inversion, kept as an oracle for the back-projection.
    """
    p_grid = p_grid or q_grid
    k = k_grid.points
    w = trapezoid_weights(k_grid)
    chi = np.array([[tomo.characteristic(m, n, y_grid) for n in k] for m in k])
    eq = np.exp(-1j * np.outer(q_grid.points, k)) * w
    ep = np.exp(-1j * np.outer(p_grid.points, k)) * w
    vals = eq @ chi @ ep.T / (2 * np.pi)
    return WignerFunction(q_grid, p_grid, vals.real)


# --- discrete tomograms ---------------------------------------------------------------

def _displaced_diagonal(rho, q: float, p: float, pad: int | None) -> tuple[np.ndarray, int]:
    """Diagonal of D(q,p)^dag rho D(q,p) in the number basis."""
    m = _fock_matrix(rho)
    dim = m.shape[0]
    m = _trim_support(m)
    d = m.shape[0]
    if d > dim // 2:
        warnings.warn("state support exceeds half the truncation; enlarge dim",
                      GridLeakageWarning, stacklevel=3)
    full = dim + (dim if pad is None else pad)
    rows = _displacement_rows(q, p, d, full)
    diag = np.einsum("an,ab,bn->n", rows.conj(), m, rows).real
    return diag, dim


def photon_number_tomogram(rho, alpha: complex, pad: int | None = None) -> np.ndarray:
    """T(n, alpha) = <n| D(alpha)^dag rho D(alpha) |n> for n below the truncation."""
    q, p = np.sqrt(2) * np.real(alpha), np.sqrt(2) * np.imag(alpha)
    diag, dim = _displaced_diagonal(rho, q, p, pad)
    probs = np.clip(diag[:dim], 0.0, None)
    if abs(probs.sum() - 1) > 1e-6:
        warnings.warn(f"photon-number probabilities sum to {probs.sum():.8f}; truncation too small",
                      GridLeakageWarning, stacklevel=2)
    return probs


def husimi_tomogram(rho, z: complex, pad: int | None = None) -> tuple[float, float]:
    """Two-outcome tomogram (<z|rho|z>, 1 - <z|rho|z>) with |z> = D(z)|0>."""
    q, p = np.sqrt(2) * np.real(z), np.sqrt(2) * np.imag(z)
    diag, _ = _displaced_diagonal(rho, q, p, pad)
    h = float(np.clip(diag[0], 0.0, 1.0))
    return h, 1.0 - h
