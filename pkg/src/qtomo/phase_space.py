"""Wigner functions, displacement and parity operators, and the Moyal star product.

Convention: W(q, p) = int rho(q + x/2, q - x/2) exp(-i p x) dx, so that
int W dq dp / (2 pi) = 1 and the ground state has W = 2 exp(-q^2 - p^2).
Fock-space operators are plain complex ndarrays.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.ndimage import map_coordinates, spline_filter

from .numerics import (
    GridLeakageWarning,
    QtomoError,
    UniformGrid,
    fourier_sum,
    trapezoid_weights,
)
from .states import DensityMatrixGrid, FockDensityMatrix

DEFAULT_PHASE_GRID = UniformGrid(-5.0, 5.0, 101)


@dataclass(frozen=True, eq=False)
class WignerFunction:
    """Samples of a phase-space function on a (q, p) grid, indexed [iq, ip].

    States give real values; general Weyl symbols may be complex.
    """

    q_grid: UniformGrid
    p_grid: UniformGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.q_grid.count, self.p_grid.count):
            raise QtomoError(
                f"values shape {v.shape} does not match grids "
                f"({self.q_grid.count}, {self.p_grid.count})"
            )
        if not np.all(np.isfinite(v)):
            raise QtomoError("Wigner samples contain non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, fn, q_grid: UniformGrid = DEFAULT_PHASE_GRID,
                      p_grid: UniformGrid | None = None) -> "WignerFunction":
        p_grid = p_grid or q_grid
        q, p = np.meshgrid(q_grid.points, p_grid.points, indexing="ij")
        return cls(q_grid, p_grid, fn(q, p))

    @property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.q_grid.points, self.p_grid.points, indexing="ij")

    def integral(self) -> complex | float:
        """int int W dq dp by the product trapezoid rule."""
        wq, wp = trapezoid_weights(self.q_grid), trapezoid_weights(self.p_grid)
        return wq @ self.values @ wp

    def normalization(self) -> float:
        return float(np.real(self.integral()) / (2 * np.pi))

    def __call__(self, q, p):
        """Bilinear interpolation at arbitrary points; zero outside the grid."""
        iq = (np.asarray(q, dtype=float) - self.q_grid.min) / self.q_grid.spacing
        ip = (np.asarray(p, dtype=float) - self.p_grid.min) / self.p_grid.spacing
        coords = np.array([np.ravel(iq), np.ravel(ip)])
        v = self.values
        out = map_coordinates(np.real(v), coords, order=1, mode="constant", cval=0.0)
        if np.iscomplexobj(v):
            out = out + 1j * map_coordinates(np.imag(v), coords, order=1, mode="constant", cval=0.0)
        return out.reshape(np.shape(iq))


def trace_product(wa: WignerFunction, wb: WignerFunction) -> complex:
    """Tr(AB) = (2 pi)^-1 int int W_A W_B dq dp."""
    _same_phase_grids(wa, wb)
    wq, wp = trapezoid_weights(wa.q_grid), trapezoid_weights(wa.p_grid)
    return complex(wq @ (wa.values * wb.values) @ wp / (2 * np.pi))


def _same_phase_grids(a: WignerFunction, b: WignerFunction) -> None:
    if a.q_grid != b.q_grid or a.p_grid != b.p_grid:
        raise QtomoError("phase-space functions live on different grids")


# --- Wigner function from a density kernel -------------------------------------------

def _spline_coefficients(m: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    if order <= 1:
        return m.real, m.imag
    return (spline_filter(m.real, order=order, mode="constant"),
            spline_filter(m.imag, order=order, mode="constant"))


def _antidiagonal(rho: DensityMatrixGrid, q: float, order: int,
                  coeffs: tuple[np.ndarray, np.ndarray] | None = None) -> tuple[np.ndarray, UniformGrid]:
    """Samples of rho(q + x/2, q - x/2) on a uniform x grid with step 2h.

    ``coeffs`` are prefiltered spline coefficients of the kernel, reused across calls.
    """
    grid, m = rho.grid, rho.entries
    n, h = grid.count, grid.spacing
    s = 2.0 * (q - grid.min) / h  # i + j for the pair (q_i, q_j) with midpoint q
    k_max = n - 1
    k = np.arange(-k_max, k_max + 1)
    if abs(s - round(s)) < 1e-9:
        # midpoint sits on the half lattice, so the anti-diagonal hits nodes exactly
        s = int(round(s))
        k = k[(k % 2) == (s % 2)]
        i, j = (s + k) // 2, (s - k) // 2
        ok = (i >= 0) & (i < n) & (j >= 0) & (j < n)
        vals = np.zeros(k.size, dtype=complex)
        vals[ok] = m[i[ok], j[ok]]
        x = k * h
    else:
        x = 2.0 * np.arange(-k_max, k_max + 1) * h
        iq = (q + x / 2 - grid.min) / h
        jq = (q - x / 2 - grid.min) / h
        coords = np.array([iq, jq])
        re, im = coeffs if coeffs is not None else _spline_coefficients(m, order)
        vals = (map_coordinates(re, coords, order=order, mode="constant", prefilter=False)
                + 1j * map_coordinates(im, coords, order=order, mode="constant", prefilter=False))
    return vals, UniformGrid(x[0], x[-1], x.size)


def wigner_from_density(rho: DensityMatrixGrid, q_grid: UniformGrid = DEFAULT_PHASE_GRID,
                        p_grid: UniformGrid | None = None, keep_complex: bool = False,
                        order: int = 3) -> WignerFunction:
    """W(q, p) = int rho(q + x/2, q - x/2) exp(-i p x) dx on the requested grid.

    Values of q on the half lattice of the density grid read the kernel at
    nodes directly. Other q values interpolate the kernel along the
    anti-diagonal with a spline of the given order (1 is bilinear).
    """
    if not rho.grid.is_symmetric:
        raise QtomoError("wigner_from_density needs a position grid symmetric about 0")
    p_grid = p_grid or q_grid
    out = np.empty((q_grid.count, p_grid.count), dtype=complex)
    coeffs = None
    for a, q in enumerate(q_grid.points):
        s = 2.0 * (q - rho.grid.min) / rho.grid.spacing
        if coeffs is None and abs(s - round(s)) >= 1e-9:
            coeffs = _spline_coefficients(rho.entries, order)
        vals, x_grid = _antidiagonal(rho, q, order, coeffs)
        out[a] = fourier_sum(vals, x_grid, p_grid)
    if keep_complex:
        return WignerFunction(q_grid, p_grid, out)
    _warn_imaginary(out)
    return WignerFunction(q_grid, p_grid, out.real)


def _warn_imaginary(values: np.ndarray, tol: float = 1e-6) -> None:
    resid = np.max(np.abs(values.imag)) if values.size else 0.0
    if resid > tol:
        warnings.warn(f"Wigner values carry imaginary residue {resid:.2e}", RuntimeWarning, stacklevel=3)


# --- Fock-space displacement and parity ------------------------------------------------

@lru_cache(maxsize=8)
def _position_eigensystem(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of the truncated Q = (a + a^dag)/sqrt2."""
    off = np.sqrt(np.arange(1, dim) / 2.0)
    q = np.diag(off, 1) + np.diag(off, -1)
    vals, vecs = np.linalg.eigh(q)
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return vals, vecs


def ladder_operators(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated Q and P matrices."""
    a = np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)
    return (a + a.conj().T) / np.sqrt(2), (a - a.conj().T) / (1j * np.sqrt(2))


def _displacement_rows(q: float, p: float, rows: int, dim: int) -> np.ndarray:
    """Rows [0, rows) of exp[i(pQ - qP)] on a dim-level truncation.

    pQ - qP = r R^dag Q R with R = diag(exp(i beta n)), beta = pi/2 - atan2(p, q),
    so the exponential follows from one eigen-decomposition of the truncated Q.
    """
    lam, v = _position_eigensystem(dim)
    r = np.hypot(q, p)
    beta = 0.5 * np.pi - np.arctan2(p, q)
    phase = np.exp(1j * beta * np.arange(dim))
    left = np.conj(phase[:rows, None]) * v[:rows]
    return (left * np.exp(1j * r * lam)) @ (v.T * phase[None, :])


def displacement_operator(q: float, p: float, dim: int, pad: int | None = None) -> np.ndarray:
    """D(q, p) = exp[i(pQ - qP)] on the lowest ``dim`` number states.

    The exponential is taken on ``dim + pad`` levels and cropped, which keeps
    the returned block close to the untruncated operator.
    """
    if dim < 16:
        raise QtomoError("displacement_operator needs dim >= 16")
    pad = dim if pad is None else pad
    full = dim + pad
    d = _displacement_rows(q, p, full, full)[:dim, :dim]
    k = dim // 2
    err = np.max(np.abs(d[:, :k].conj().T @ d[:, :k] - np.eye(k)))
    if err > 1e-6:
        warnings.warn(
            f"displacement ({q}, {p}) truncated at dim {dim}: unitarity error {err:.1e}",
            GridLeakageWarning,
            stacklevel=2,
        )
    return d


def parity_operator(dim: int) -> np.ndarray:
    return np.diag((-1.0) ** np.arange(dim)).astype(complex)


def _fock_matrix(rho) -> np.ndarray:
    return np.asarray(rho.entries if isinstance(rho, FockDensityMatrix) else rho, dtype=complex)


def _trim_support(m: np.ndarray, tol: float = 1e-15) -> np.ndarray:
    """Drop trailing number states on which rho vanishes."""
    mags = np.abs(m).max(axis=0)
    live = np.flatnonzero(mags > tol)
    d = live[-1] + 1 if live.size else 1
    return m[:d, :d]


def wigner_point(rho, q: float, p: float, pad: int | None = None) -> complex:
    """2 Tr[rho D(q,p) Parity D(q,p)^dag] for a Fock-space density matrix."""
    m = _trim_support(_fock_matrix(rho))
    d = m.shape[0]
    full = d + (max(d, 48) if pad is None else pad)
    rows = _displacement_rows(q, p, d, full)  # rows of D restricted to the support of rho
    sign = (-1.0) ** np.arange(full)
    diag = np.einsum("an,ab,bn->n", rows.conj(), m, rows)
    return 2.0 * np.sum(sign * diag)


def wigner_via_parity(rho, q_grid: UniformGrid = DEFAULT_PHASE_GRID,
                      p_grid: UniformGrid | None = None) -> WignerFunction:
    """Wigner function as twice the expectation of the displaced parity operator."""
    p_grid = p_grid or q_grid
    out = np.empty((q_grid.count, p_grid.count), dtype=complex)
    for a, q in enumerate(q_grid.points):
        for b, p in enumerate(p_grid.points):
            out[a, b] = wigner_point(rho, q, p)
    _warn_imaginary(out)
    return WignerFunction(q_grid, p_grid, out.real)


def generalized_wigner(rho, gamma: float, q, p) -> np.ndarray | float:
    """W(q, p; gamma) = W(sqrt(gamma) q, sqrt(gamma) p; 1), evaluated by the parity route."""
    if gamma <= 0:
        raise QtomoError("gamma must be positive")
    s = np.sqrt(gamma)
    qs, ps = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(p, dtype=float))
    out = np.array([wigner_point(rho, s * a, s * b).real for a, b in zip(qs.ravel(), ps.ravel())])
    out = out.reshape(qs.shape)
    return float(out) if out.ndim == 0 else out


# --- Moyal star product ----------------------------------------------------------------

def _check_decay(w: WignerFunction, name: str, tol: float = 1e-8) -> None:
    v = np.abs(w.values)
    edge = max(v[0].max(), v[-1].max(), v[:, 0].max(), v[:, -1].max())
    if edge > tol:
        warnings.warn(f"symbol {name} does not decay at the grid boundary ({edge:.1e})",
                      GridLeakageWarning, stacklevel=3)


def weyl_kernel(w: WignerFunction) -> np.ndarray:
    """Operator kernel K(y_a, y_b) = (2 pi)^-1 int W((y_a + y_b)/2, p) exp(i p (y_a - y_b)) dp.

    Midpoints between nodes come from a cubic spline along q.
    """
    qg, pg = w.q_grid, w.p_grid
    n, h = qg.count, qg.spacing
    fine = np.empty((2 * n - 1, pg.count), dtype=complex)
    fine[0::2] = w.values
    spline = CubicSpline(qg.points, w.values, axis=0)
    fine[1::2] = spline(qg.points[:-1] + 0.5 * h)
    x_grid = UniformGrid(-(n - 1) * h, (n - 1) * h, 2 * n - 1)
    f = np.array([fourier_sum(row, pg, x_grid) for row in fine]) / (2 * np.pi)
    a, b = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    # exp(+i p x) at x = y_a - y_b is the transform at -x = (b - a) h
    return f[a + b, (b - a) + (n - 1)]


def weyl_symbol(kernel: np.ndarray, q_grid: UniformGrid, p_grid: UniformGrid) -> WignerFunction:
    """Inverse of :func:`weyl_kernel` on the grid nodes (anti-diagonals with even offsets)."""
    n, h = q_grid.count, q_grid.spacing
    k = np.arange(-(n - 1), n)
    x_grid = UniformGrid(2 * k[0] * h, 2 * k[-1] * h, k.size)
    out = np.empty((n, p_grid.count), dtype=complex)
    for i in range(n):
        a, b = i + k, i - k
        ok = (a >= 0) & (a < n) & (b >= 0) & (b < n)
        vals = np.zeros(k.size, dtype=complex)
        vals[ok] = kernel[a[ok], b[ok]]
        out[i] = fourier_sum(vals, x_grid, p_grid)
    return WignerFunction(q_grid, p_grid, out)


def _fd_weights(offsets: np.ndarray, order: int) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at 0 (unit spacing)."""
    m = offsets.size
    vander = np.vander(offsets, m, increasing=True).T
    rhs = np.zeros(m)
    rhs[order] = factorial(order)
    return np.linalg.solve(vander, rhs)


def _derivative(values: np.ndarray, h: float, axis: int, order: int, width: int = 7) -> np.ndarray:
    """Finite-difference derivative, exact for polynomials of degree < width."""
    if order == 0:
        return values
    v = np.moveaxis(values, axis, 0)
    n = v.shape[0]
    half = width // 2
    out = np.empty_like(v, dtype=complex)
    for i in range(n):
        start = min(max(i - half, 0), n - width)
        offsets = np.arange(start, start + width) - i
        wts = _fd_weights(offsets.astype(float), order)
        out[i] = np.tensordot(wts, v[start:start + width], axes=1)
    return np.moveaxis(out / h**order, 0, axis)


def _moyal_series(wa: WignerFunction, wb: WignerFunction, order: int) -> np.ndarray:
    hq, hp = wa.q_grid.spacing, wa.p_grid.spacing

    def d(v, nq, np_):
        return _derivative(_derivative(v, hq, 0, nq), hp, 1, np_)

    out = np.zeros(wa.values.shape, dtype=complex)
    for n in range(order + 1):
        pref = (0.5j) ** n / factorial(n)
        for k in range(n + 1):
            term = d(wa.values, n - k, k) * d(wb.values, k, n - k)
            out += pref * comb(n, k) * (-1) ** k * term
    return out


def moyal_star(wa: WignerFunction, wb: WignerFunction, method: str = "kernel",
               order: int = 4) -> WignerFunction:
    """Weyl symbol of the operator product AB.

    ``kernel``: map both symbols to operator kernels by a partial Fourier
    transform in p, multiply the kernels, and transform back. This is the
    twisted convolution factorized through the mixed (q, x) representation,
    O(N^3) instead of the O(N^4) integral against the Groenewold kernel.

    ``series``: the bidifferential expansion exp[(i/2)(d_q^A d_p^B - d_p^A d_q^B)]
    truncated at ``order`` with finite differences. Exact when one factor is a
    polynomial of degree <= ``order``; the right choice for non-decaying symbols.
    """
    _same_phase_grids(wa, wb)
    if method == "series":
        return WignerFunction(wa.q_grid, wa.p_grid, _moyal_series(wa, wb, order))
    if method != "kernel":
        raise QtomoError(f"unknown star-product method {method!r}")
    _check_decay(wa, "A")
    _check_decay(wb, "B")
    ka, kb = weyl_kernel(wa), weyl_kernel(wb)
    kc = ka @ kb * wa.q_grid.spacing
    return weyl_symbol(kc, wa.q_grid, wa.p_grid)


def moyal_star_direct(wa: WignerFunction, wb: WignerFunction, q: float, p: float) -> complex:
    """Star product at one point by quadrature against the Groenewold kernel.

    (A * B)(q, p) = pi^-2 int A(z1) B(z2) exp{2i[q p1 - q1 p + q1 p2 - q2 p1 + q2 p - p2 q]} dz1 dz2
    """
    _same_phase_grids(wa, wb)
    qs, ps = wa.q_grid.points, wa.p_grid.points
    wq, wp = trapezoid_weights(wa.q_grid), trapezoid_weights(wa.p_grid)
    a = wa.values * np.outer(wq, wp) * np.exp(2j * (q * ps[None, :] - qs[:, None] * p))
    b = wb.values * np.outer(wq, wp) * np.exp(2j * (qs[:, None] * p - ps[None, :] * q))
    # inner[q1, p1] = sum_{q2, p2} exp(2i q1 p2) b[q2, p2] exp(-2i q2 p1)
    e_qp = np.exp(2j * np.outer(qs, ps))
    inner = e_qp @ b.T @ np.conj(e_qp)
    return complex(np.sum(a * inner) / np.pi**2)
