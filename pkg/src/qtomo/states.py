"""Wave functions and density matrices on position grids and in Fock space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import (
    DEFAULT_GRID,
    QtomoError,
    Samples,
    UniformGrid,
    check_leakage,
    fourier_sum,
    hermite_functions,
    trapezoid_weights,
)

NORM_TOL = 1e-6
HERMITIAN_TOL = 1e-10
RANK_ONE_TOL = 1e-8


class WaveFunction(Samples):
    """Normalized pure state psi(q) on a uniform position grid."""

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        super().__post_init__()
        norm = self.norm_squared()
        if abs(norm - 1.0) > NORM_TOL:
            raise QtomoError(f"wave function norm^2 is {norm:.8f}, expected 1")

    @classmethod
    def normalized(cls, grid: UniformGrid, values) -> "WaveFunction":
        values = np.asarray(values, dtype=complex)
        norm = np.sqrt(np.real(np.sum(trapezoid_weights(grid) * np.abs(values) ** 2)))
        if norm == 0:
            raise QtomoError("cannot normalize a zero wave function")
        return cls(grid, values / norm)

    @property
    def amplitudes(self) -> np.ndarray:
        return self.values

    def norm_squared(self) -> float:
        return float(np.sum(trapezoid_weights(self.grid) * np.abs(self.values) ** 2))

    def inner(self, other: "WaveFunction") -> complex:
        """<self|other> by trapezoid quadrature."""
        _same_grid(self.grid, other.grid)
        return complex(np.sum(trapezoid_weights(self.grid) * np.conj(self.values) * other.values))

    def momentum(self, p_grid: UniformGrid | None = None) -> Samples:
        """psi~(p) = (2 pi)^(-1/2) int psi(y) exp(-i p y) dy."""
        p_grid = p_grid or self.grid
        return Samples(p_grid, fourier_sum(self.values, self.grid, p_grid) / np.sqrt(2 * np.pi))

    def density(self) -> "DensityMatrixGrid":
        return DensityMatrixGrid(self.grid, np.outer(self.values, np.conj(self.values)))

    def fock_coefficients(self, dim: int) -> np.ndarray:
        """c_n = <n|psi> for n < dim, by quadrature against Hermite functions."""
        basis = hermite_functions(dim - 1, self.grid.points)
        return basis @ (trapezoid_weights(self.grid) * self.values)


def _same_grid(a: UniformGrid, b: UniformGrid) -> None:
    if a != b:
        raise QtomoError(f"grid mismatch: {a} vs {b}")


def make_fock(n: int, grid: UniformGrid = DEFAULT_GRID) -> WaveFunction:
    values = hermite_functions(n, grid.points)[n]
    check_leakage(values, f"Fock state n={n}")
    return WaveFunction.normalized(grid, values)


def make_coherent(alpha: complex, grid: UniformGrid = DEFAULT_GRID) -> WaveFunction:
    """D(alpha)|0>, with q0 = sqrt2 Re(alpha) and p0 = sqrt2 Im(alpha)."""
    q0, p0 = np.sqrt(2.0) * np.real(alpha), np.sqrt(2.0) * np.imag(alpha)
    q = grid.points
    values = np.pi**-0.25 * np.exp(-0.5 * (q - q0) ** 2 + 1j * p0 * q - 0.5j * p0 * q0)
    check_leakage(values, f"coherent state alpha={alpha}")
    return WaveFunction.normalized(grid, values)


def make_squeezed_gaussian(alpha: complex, beta: float, grid: UniformGrid = DEFAULT_GRID) -> WaveFunction:
    """psi(q) = N exp(-alpha q^2 + i beta q) with N = (2 Re(alpha) / pi)^(1/4)."""
    if np.real(alpha) <= 0:
        raise QtomoError("squeezed Gaussian needs Re(alpha) > 0")
    q = grid.points
    norm = (2.0 * np.real(alpha) / np.pi) ** 0.25
    values = norm * np.exp(-alpha * q**2 + 1j * beta * q)
    check_leakage(values, "squeezed Gaussian")
    return WaveFunction.normalized(grid, values)


def fidelity(psi1: WaveFunction, psi2: WaveFunction) -> float:
    return abs(psi1.inner(psi2)) ** 2


def marginals(psi: WaveFunction, p_grid: UniformGrid | None = None) -> tuple[Samples, Samples]:
    """Position density |psi(q)|^2 and momentum density |psi~(p)|^2."""
    return (
        Samples(psi.grid, np.abs(psi.values) ** 2),
        Samples(p_grid or psi.grid, np.abs(psi.momentum(p_grid).values) ** 2),
    )


def superpose_wavefunctions(psi1: WaveFunction, psi2: WaveFunction, p1: float, p2: float,
                            phase: float = 0.0) -> WaveFunction:
    """sqrt(p1) psi1 + exp(i phase) sqrt(p2) psi2, renormalized."""
    _check_weights(p1, p2)
    _same_grid(psi1.grid, psi2.grid)
    values = np.sqrt(p1) * psi1.values + np.exp(1j * phase) * np.sqrt(p2) * psi2.values
    return WaveFunction.normalized(psi1.grid, values)


def _check_weights(p1: float, p2: float) -> None:
    if p1 < 0 or p2 < 0 or abs(p1 + p2 - 1.0) > 1e-12:
        raise QtomoError(f"weights must be non-negative and sum to 1, got {p1}, {p2}")


def _check_hermitian(m: np.ndarray, tol: float, what: str) -> None:
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > tol:
        raise QtomoError(f"{what} is not Hermitian (deviation {dev:.2e})")


@dataclass(frozen=True, eq=False)
class DensityMatrixGrid:
    """Kernel rho(q_i, q_j) on a uniform grid."""

    grid: UniformGrid
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        n = self.grid.count
        if m.shape != (n, n):
            raise QtomoError(f"density kernel must be {n}x{n}, got {m.shape}")
        _check_hermitian(m, HERMITIAN_TOL * max(1.0, np.max(np.abs(m))), "density kernel")
        tr = np.real(np.sum(trapezoid_weights(self.grid) * np.diag(m)))
        if abs(tr - 1.0) > NORM_TOL:
            raise QtomoError(f"density kernel trace is {tr:.8f}, expected 1")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @classmethod
    def mixture(cls, weights, states) -> "DensityMatrixGrid":
        grid = states[0].grid
        m = sum(w * np.outer(s.values, np.conj(s.values)) for w, s in zip(weights, states))
        return cls(grid, m)

    @classmethod
    def hermitized(cls, grid: UniformGrid, entries) -> "DensityMatrixGrid":
        """Symmetrize and renormalize a noisy kernel before validation."""
        m = np.asarray(entries, dtype=complex)
        m = 0.5 * (m + m.conj().T)
        tr = np.real(np.sum(trapezoid_weights(grid) * np.diag(m)))
        return cls(grid, m / tr)

    def operator(self) -> np.ndarray:
        """Matrix of the integral operator on the grid (kernel times dq)."""
        return self.entries * self.grid.spacing

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.operator())[::-1]

    def fock(self, dim: int) -> "FockDensityMatrix":
        basis = hermite_functions(dim - 1, self.grid.points) * trapezoid_weights(self.grid)
        return FockDensityMatrix(basis @ self.entries @ basis.T)


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    """Density matrix in the truncated number basis |0>, ..., |D-1>."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise QtomoError(f"density matrix must be square, got {m.shape}")
        _check_hermitian(m, HERMITIAN_TOL, "Fock density matrix")
        tr = np.real(np.trace(m))
        if abs(tr - 1.0) > NORM_TOL:
            raise QtomoError(f"Fock density trace is {tr:.8f}, expected 1")
        lo = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
        if lo < -1e-8:
            raise QtomoError(f"Fock density has negative eigenvalue {lo:.2e}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def pure(cls, vector) -> "FockDensityMatrix":
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def fock(cls, n: int, dim: int = 64) -> "FockDensityMatrix":
        v = np.zeros(dim)
        v[n] = 1.0
        return cls.pure(v)

    @classmethod
    def coherent(cls, alpha: complex, dim: int = 64) -> "FockDensityMatrix":
        return cls.pure(coherent_vector(alpha, dim))

    @classmethod
    def from_wavefunction(cls, psi: WaveFunction, dim: int = 64) -> "FockDensityMatrix":
        return cls.pure(psi.fock_coefficients(dim))


def coherent_vector(alpha: complex, dim: int) -> np.ndarray:
    """Number-basis amplitudes exp(-|a|^2/2) a^n / sqrt(n!)."""
    v = np.empty(dim, dtype=complex)
    v[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for k in range(1, dim):
        v[k] = v[k - 1] * alpha / np.sqrt(k)
    return v


def validate_density(rho, eig_tol: float = 1e-12) -> np.ndarray:
    """Check a finite-dimensional density matrix and return it as an array."""
    m = np.asarray(rho, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise QtomoError(f"density matrix must be square, got {m.shape}")
    _check_hermitian(m, 1e-10, "density matrix")
    if abs(np.trace(m).real - 1.0) > 1e-10:
        raise QtomoError(f"density trace is {np.trace(m).real:.12f}, expected 1")
    lo = np.linalg.eigvalsh(m)[0]
    if lo < -eig_tol:
        raise QtomoError(f"density matrix has negative eigenvalue {lo:.2e}")
    return m


def _matrix(rho) -> np.ndarray:
    return np.asarray(rho.entries if isinstance(rho, FockDensityMatrix) else rho, dtype=complex)


def eigen_decompose(rho) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and eigenvectors as columns.

    Gauge: the first component of each eigenvector with modulus above 1e-12
    is made real and positive.
    """
    m = _matrix(rho)
    _check_hermitian(m, 1e-8, "matrix")
    vals, vecs = np.linalg.eigh(0.5 * (m + m.conj().T))
    order = np.argsort(-vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        lead = np.flatnonzero(np.abs(col) > 1e-12)[0]
        vecs[:, j] = col * (abs(col[lead]) / col[lead])
    return vals, vecs


def _check_rank_one(m: np.ndarray, what: str) -> None:
    vals = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    if vals[-1] <= 0 or abs(vals[-2]) > RANK_ONE_TOL * vals[-1]:
        raise QtomoError(f"{what} is not a rank-one projector")


def fiducial_projector(v1, v2, phase: float = 0.0) -> np.ndarray:
    """Projector onto (v1 + exp(i phase) v2)/|.|.

    With this fiducial, :func:`superpose_projectors` reproduces the relative
    phase ``phase`` of :func:`superpose_wavefunctions` for orthogonal inputs.
    """
    chi = np.asarray(v1, dtype=complex) + np.exp(1j * phase) * np.asarray(v2, dtype=complex)
    chi = chi / np.linalg.norm(chi)
    return np.outer(chi, chi.conj())


def superpose_projectors(rho1, rho2, P0, p1: float, p2: float):
    """Superposition of two rank-one projectors relative to a fiducial projector P0.

    rho = p1 rho1 + p2 rho2 + sqrt(p1 p2) (rho1 P0 rho2 + rho2 P0 rho1) / sqrt(Tr(rho1 P0 rho2 P0)),
    divided by its trace.
    """
    _check_weights(p1, p2)
    a, b, f = _matrix(rho1), _matrix(rho2), _matrix(P0)
    for m, name in ((a, "rho1"), (b, "rho2"), (f, "P0")):
        _check_rank_one(m, name)
    denom = np.trace(a @ f @ b @ f).real
    if denom <= 1e-12:
        raise QtomoError("superposed states orthogonal to fiducial projector")
    cross = a @ f @ b + b @ f @ a
    out = p1 * a + p2 * b + np.sqrt(p1 * p2) * cross / np.sqrt(denom)
    out = out / np.trace(out).real
    out = 0.5 * (out + out.conj().T)
    if isinstance(rho1, FockDensityMatrix):
        return FockDensityMatrix(out)
    return out


def trace_distance(a, b) -> float:
    """Half the trace norm of a - b for Hermitian matrices."""
    d = _matrix(a) - _matrix(b)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (d + d.conj().T)))))
