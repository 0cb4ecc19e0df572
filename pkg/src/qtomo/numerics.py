"""Grids, quadrature, oscillator eigenfunctions and the chirp transform.

Units have hbar = 1 everywhere in the package.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import czt

HERMITE_MAX_N = 60
LEAKAGE_TOL = 1e-6


class QtomoError(ValueError):
    """Raised when an input violates a domain precondition."""


class GridLeakageWarning(UserWarning):
    """A function does not decay to negligible values at the grid boundary."""


@dataclass(frozen=True)
class UniformGrid:
    """Uniform sampling of an interval, endpoints included."""

    min: float
    max: float
    count: int

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 2:
            raise QtomoError(f"grid count must be an integer >= 2, got {self.count}")
        if not (np.isfinite(self.min) and np.isfinite(self.max)) or self.max <= self.min:
            raise QtomoError(f"grid needs min < max, got [{self.min}, {self.max}]")
        object.__setattr__(self, "min", float(self.min))
        object.__setattr__(self, "max", float(self.max))
        object.__setattr__(self, "count", int(self.count))

    @classmethod
    def symmetric(cls, half_width: float, count: int) -> "UniformGrid":
        return cls(-half_width, half_width, count)

    @property
    def spacing(self) -> float:
        return (self.max - self.min) / (self.count - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)

    @property
    def is_symmetric(self) -> bool:
        return abs(self.min + self.max) <= 1e-12 * max(1.0, abs(self.max))

    def scaled(self, factor: float) -> "UniformGrid":
        """Grid whose points are ``factor`` > 0 times these points."""
        if factor <= 0:
            raise QtomoError("grid scaling factor must be positive")
        return UniformGrid(factor * self.min, factor * self.max, self.count)

    def to_dict(self) -> dict:
        return {"min": self.min, "max": self.max, "count": self.count}


DEFAULT_GRID = UniformGrid(-10.0, 10.0, 1024)


@dataclass(frozen=True, eq=False)
class Samples:
    """Real or complex values sampled on a uniform grid."""

    grid: UniformGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.shape != (self.grid.count,):
            raise QtomoError(
                f"expected {self.grid.count} samples, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise QtomoError("samples contain non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def points(self) -> np.ndarray:
        return self.grid.points


def trapezoid_weights(grid: UniformGrid) -> np.ndarray:
    w = np.full(grid.count, grid.spacing)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def integrate(samples: Samples) -> complex | float:
    """Trapezoid rule over the sample grid."""
    return trapezoid(samples.values, dx=samples.grid.spacing)


def check_leakage(values: np.ndarray, what: str, tol: float = LEAKAGE_TOL) -> bool:
    """Warn when the first or last sample exceeds ``tol`` in modulus."""
    edge = max(abs(values[0]), abs(values[-1]))
    if edge > tol:
        warnings.warn(
            f"{what}: boundary value {edge:.2e} exceeds {tol:.0e}; widen the grid",
            GridLeakageWarning,
            stacklevel=3,
        )
        return True
    return False


def hermite_functions(nmax: int, x) -> np.ndarray:
    """Oscillator eigenfunctions psi_0..psi_nmax at points x, shape (nmax+1, len(x)).

    Uses the normalized three-term recurrence so no factorials appear.
    """
    if nmax < 0 or nmax > HERMITE_MAX_N:
        raise QtomoError(f"n must lie in [0, {HERMITE_MAX_N}], got {nmax}")
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x**2)
    if nmax >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, nmax):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def hermite_eigenfunction(n: int, grid: UniformGrid) -> Samples:
    """psi_n sampled on ``grid``; warns if the grid clips its support."""
    values = hermite_functions(n, grid.points)[n]
    check_leakage(values, f"psi_{n}")
    return Samples(grid, values)


def fourier_sum(values, grid: UniformGrid, k_grid: UniformGrid) -> np.ndarray:
    """Trapezoid approximation of int f(q) exp(-i k q) dq for k on a uniform grid.

    Evaluated with the chirp-z transform, O((N + M) log(N + M)).
    """
    g = np.asarray(values, dtype=complex) * trapezoid_weights(grid)
    h = grid.spacing
    k0, dk = k_grid.min, k_grid.spacing
    a = np.exp(1j * k0 * h)
    w = np.exp(-1j * dk * h)
    s = czt(g, m=k_grid.count, w=w, a=a)
    return s * np.exp(-1j * k_grid.points * grid.min)


def fourier_sum_direct(values, grid: UniformGrid, k) -> np.ndarray:
    """Dense O(N M) version of :func:`fourier_sum`, used as an oracle."""
    g = np.asarray(values, dtype=complex) * trapezoid_weights(grid)
    k = np.asarray(k, dtype=float)
    return np.exp(-1j * np.outer(k, grid.points)) @ g


def chirp_transform(values, grid: UniformGrid, a: float, X_grid: UniformGrid, scale: float,
                    method: str = "fast") -> np.ndarray:
    """int f(q) exp(i a q^2 - i X q / scale) dq for every X in ``X_grid``."""
    g = np.asarray(values, dtype=complex) * np.exp(1j * a * grid.points**2)
    if method == "direct":
        return fourier_sum_direct(g, grid, X_grid.points / scale)
    if method != "fast":
        raise QtomoError(f"unknown method {method!r}")
    lo, hi = X_grid.min / scale, X_grid.max / scale
    if scale > 0:
        return fourier_sum(g, grid, UniformGrid(lo, hi, X_grid.count))
    # frequencies decrease along X: transform on the increasing grid and flip
    return fourier_sum(g, grid, UniformGrid(hi, lo, X_grid.count))[::-1]


def chirp_overlap(psi: Samples, mu: float, nu: float, X_grid: UniformGrid,
                  method: str = "fast") -> Samples:
    """<X mu nu | psi> for the eigenstates of mu Q + nu P, in position representation.

    <X mu nu|psi> = (2 pi |nu|)^(-1/2) int psi(q) exp[i mu q^2 / (2 nu) - i X q / nu] dq
    """
    if nu == 0:
        raise QtomoError("chirp_overlap needs nu != 0; use the momentum branch")
    amp = chirp_transform(psi.values, psi.grid, mu / (2.0 * nu), X_grid, nu, method)
    return Samples(X_grid, amp / np.sqrt(2.0 * np.pi * abs(nu)))


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        return os.cpu_count() or 1
    if threads < 1:
        raise QtomoError("threads must be >= 1")
    return int(threads)


def parallel_map(fn, items, threads: int | None = None) -> list:
    """Ordered map, optionally over a thread pool; results keep input order."""
    items = list(items)
    n = resolve_threads(threads)
    if n == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
