"""Evolution under quadratic Hamiltonians H = P^2/2 + U(Q), U = 0 or omega^2 Q^2 / 2.

For these Hamiltonians the Moyal equation reduces to the Liouville equation,
so Wigner functions, classical densities and tomograms move along the exact
classical characteristics.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates
from scipy.special import eval_laguerre

from .numerics import HERMITE_MAX_N, GridLeakageWarning, QtomoError, UniformGrid, hermite_functions
from .phase_space import DEFAULT_PHASE_GRID, WignerFunction
from .states import WaveFunction
from .tomography import Tomogram, _check_params


@dataclass(frozen=True)
class QuadraticHamiltonian:
    kind: str = "harmonic"
    omega: float = 1.0

    def __post_init__(self):
        if self.kind not in ("free", "harmonic"):
            raise QtomoError(f"unsupported Hamiltonian {self.kind!r}; only free and harmonic are quadratic")
        if self.kind == "harmonic" and not self.omega > 0:
            raise QtomoError("omega must be positive")

    def flow_matrix(self, t: float) -> np.ndarray:
        """S(t) with (q(t), p(t)) = S(t) (q0, p0)."""
        if self.kind == "free":
            return np.array([[1.0, t], [0.0, 1.0]])
        w = self.omega
        c, s = np.cos(w * t), np.sin(w * t)
        return np.array([[c, s / w], [-w * s, c]])


def _hamiltonian(H) -> QuadraticHamiltonian:
    if isinstance(H, QuadraticHamiltonian):
        return H
    if isinstance(H, str):
        return QuadraticHamiltonian(H)
    raise QtomoError("Hamiltonian must be a QuadraticHamiltonian or 'free'/'harmonic'")


class EvolvedTomogram(Tomogram):
    """T_t(X, mu, nu) = T_0(X, (mu, nu) S(t)), i.e. the distribution of mu Q(t) + nu P(t)."""

    def __init__(self, base: Tomogram, H, t: float):
        self.base = base
        self.H = _hamiltonian(H)
        self.t = float(t)
        self._S = self.H.flow_matrix(self.t)

    @property
    def singular(self) -> bool:
        return self.base.singular

    def _params(self, mu: float, nu: float) -> tuple[float, float]:
        _check_params(mu, nu)
        m, n = np.array([mu, nu]) @ self._S
        return float(m), float(n)

    def __call__(self, X, mu: float, nu: float) -> np.ndarray:
        return self.base(X, *self._params(mu, nu))

    def characteristic(self, mu: float, nu: float, y_grid=None) -> complex:
        if mu == 0 and nu == 0:
            return 1.0 + 0j
        m, n = self._params(mu, nu)
        return self.base.characteristic(m, n) if y_grid is None else self.base.characteristic(m, n, y_grid)


def evolve_tomogram(T0: Tomogram, H, t: float) -> EvolvedTomogram:
    return EvolvedTomogram(T0, H, t)


def _pull_back(values: np.ndarray, q_grid: UniformGrid, p_grid: UniformGrid, S_inv: np.ndarray,
               order: int) -> np.ndarray:
    q, p = np.meshgrid(q_grid.points, p_grid.points, indexing="ij")
    q0 = S_inv[0, 0] * q + S_inv[0, 1] * p
    p0 = S_inv[1, 0] * q + S_inv[1, 1] * p
    coords = np.array([(q0 - q_grid.min) / q_grid.spacing, (p0 - p_grid.min) / p_grid.spacing])
    v = np.asarray(values)
    if np.iscomplexobj(v):
        return (map_coordinates(v.real, coords, order=order, mode="constant")
                + 1j * map_coordinates(v.imag, coords, order=order, mode="constant"))
    return map_coordinates(v, coords, order=order, mode="constant")


def evolve_wigner(W0: WignerFunction, H, t: float, order: int = 3) -> WignerFunction:
    """W_t(z) = W_0(S(t)^-1 z): semi-Lagrangian pull-back along exact characteristics."""
    H = _hamiltonian(H)
    S_inv = np.linalg.inv(H.flow_matrix(t))
    # points whose pre-image leaves the grid read zero; warn if that loses mass
    q, p = np.meshgrid(W0.q_grid.points, W0.p_grid.points, indexing="ij")
    q0 = S_inv[0, 0] * q + S_inv[0, 1] * p
    p0 = S_inv[1, 0] * q + S_inv[1, 1] * p
    outside = ((q0 < W0.q_grid.min) | (q0 > W0.q_grid.max) | (p0 < W0.p_grid.min) | (p0 > W0.p_grid.max))
    vals = _pull_back(W0.values, W0.q_grid, W0.p_grid, S_inv, order)
    v0 = np.abs(W0.values)
    edge = max(v0[0].max(), v0[-1].max(), v0[:, 0].max(), v0[:, -1].max())
    if np.any(outside) and edge > 1e-6:
        warnings.warn(f"flow leaves the phase-space grid where |W| reaches {edge:.1e}",
                      GridLeakageWarning, stacklevel=2)
    return WignerFunction(W0.q_grid, W0.p_grid, vals)


def evolve_classical(f0, H, t: float):
    """Liouville evolution of a classical density.

    ``f0`` is either a callable f(q, p), for which a callable is returned, or
    a grid density stored as a WignerFunction.
    """
    if isinstance(f0, WignerFunction):
        return evolve_wigner(f0, H, t)
    H = _hamiltonian(H)
    S_inv = np.linalg.inv(H.flow_matrix(t))

    def f_t(q, p):
        q, p = np.asarray(q, dtype=float), np.asarray(p, dtype=float)
        return f0(S_inv[0, 0] * q + S_inv[0, 1] * p, S_inv[1, 0] * q + S_inv[1, 1] * p)

    return f_t


def evolve_wavefunction(psi: WaveFunction, H, t: float, nmax: int = HERMITE_MAX_N) -> WaveFunction:
    """Exact Schroedinger evolution used as the reference route.

    Harmonic: expansion in oscillator eigenfunctions of frequency omega.
    Free: multiplication by exp(-i p^2 t / 2) in the discrete Fourier basis.
    """
    H = _hamiltonian(H)
    g = psi.grid
    if H.kind == "free":
        k = 2 * np.pi * np.fft.fftfreq(g.count, g.spacing)
        vals = np.fft.ifft(np.exp(-0.5j * k * k * t) * np.fft.fft(psi.values))
        return WaveFunction.normalized(g, vals)
    w = H.omega
    basis = w**0.25 * hermite_functions(nmax, np.sqrt(w) * g.points)
    weights = np.full(g.count, g.spacing)
    coeff = basis @ (weights * psi.values)
    lost = 1.0 - np.sum(np.abs(coeff) ** 2)
    if lost > 1e-8:
        warnings.warn(f"oscillator expansion misses {lost:.1e} of the norm; state too wide for nmax={nmax}",
                      GridLeakageWarning, stacklevel=2)
    phase = np.exp(-1j * w * (np.arange(nmax + 1) + 0.5) * t)
    return WaveFunction.normalized(g, (coeff * phase) @ basis)


def fock_wigner(n: int, q_grid: UniformGrid = DEFAULT_PHASE_GRID, p_grid: UniformGrid | None = None) -> WignerFunction:
    """W_n = 2 (-1)^n L_n(2 r^2) exp(-r^2)."""
    return WignerFunction.from_function(
        lambda q, p: 2 * (-1) ** n * eval_laguerre(n, 2 * (q * q + p * p)) * np.exp(-(q * q + p * p)),
        q_grid, p_grid)


def _spectral_second_derivative(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    n = values.shape[axis]
    k = 2 * np.pi * np.fft.fftfreq(n, h)
    shape = [1, 1]
    shape[axis] = n
    return np.real(np.fft.ifft(-(k**2).reshape(shape) * np.fft.fft(values, axis=axis), axis=axis))


MOYAL_GRID = UniformGrid(-8.0, 8.0, 129)


def stationary_moyal_residual(n: int, E: float, grid: UniformGrid = MOYAL_GRID) -> float:
    """max |1/2 (q^2 + p^2) W_n - 1/8 (d_q^2 + d_p^2) W_n - E W_n| for the unit oscillator."""
    if not 0 <= n <= 10:
        raise QtomoError("stationary_moyal_residual supports 0 <= n <= 10")
    w = fock_wigner(n, grid)
    q, p = w.mesh
    h = grid.spacing
    lap = _spectral_second_derivative(w.values, h, 0) + _spectral_second_derivative(w.values, h, 1)
    res = 0.5 * (q * q + p * p) * w.values - lap / 8 - E * w.values
    return float(np.max(np.abs(res)))
