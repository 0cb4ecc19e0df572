"""Qubit tomography: Euler unitaries, dual projector frames and the spin uncertainty matrix."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .numerics import QtomoError
from .states import eigen_decompose, validate_density

SIGMA = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)
SPIN = SIGMA / 2


@dataclass(frozen=True)
class EulerUnitary:
    theta: float
    psi: float
    phi: float

    @property
    def matrix(self) -> np.ndarray:
        return su2_matrix(self.theta, self.psi, self.phi)


@dataclass(frozen=True)
class SpinTomogramPoint:
    theta: float
    phi: float
    probs: np.ndarray

    def to_dict(self) -> dict:
        return {"theta": self.theta, "phi": self.phi, "probs": [float(p) for p in self.probs]}


def su2_matrix(theta: float, psi: float, phi: float) -> np.ndarray:
    """SU(2) element with Euler angles (theta, psi, phi)."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    a, b = np.exp(0.5j * (psi + phi)), np.exp(0.5j * (psi - phi))
    return np.array([[c * a, s * b], [-s * np.conj(b), c * np.conj(a)]])


def _unitary(U) -> np.ndarray:
    if isinstance(U, EulerUnitary):
        return U.matrix
    u = np.asarray(U, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise QtomoError(f"expected a square matrix, got shape {u.shape}")
    err = np.max(np.abs(u.conj().T @ u - np.eye(len(u))))
    if err > 1e-10:
        raise QtomoError(f"matrix is not unitary (error {err:.1e})")
    return u


def qubit_tomogram(rho, U) -> np.ndarray:
    """(T(+1/2), T(-1/2)) = diagonal of U rho U^dag."""
    m = validate_density(rho)
    if m.shape != (2, 2):
        raise QtomoError("qubit_tomogram needs a 2x2 density matrix")
    u = _unitary(U)
    return np.real(np.diag(u @ m @ u.conj().T))


def spin_tomogram_point(rho, theta: float, phi: float) -> SpinTomogramPoint:
    return SpinTomogramPoint(theta, phi, qubit_tomogram(rho, su2_matrix(theta, 0.0, phi)))


def projector_P(theta: float, phi: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return 0.5 * np.array([[1 + c, np.exp(-1j * phi) * s], [np.exp(1j * phi) * s, 1 - c]])


def dual_G(theta: float, phi: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[1 + 3 * c, 3 * np.exp(-1j * phi) * s],
                     [3 * np.exp(1j * phi) * s, 1 - 3 * c]]) / (4 * np.pi)


@lru_cache(maxsize=4)
def sphere_quadrature(n_theta: int = 32, n_phi: int = 64) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes (theta, phi) and weights for int int f sin(theta) dtheta dphi.

    Gauss-Legendre in cos(theta) times the uniform rule in phi.
    """
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    phis = 2 * np.pi * np.arange(n_phi) / n_phi
    th, ph = np.meshgrid(np.arccos(x), phis, indexing="ij")
    w = np.outer(wx, np.full(n_phi, 2 * np.pi / n_phi))
    for arr in (th, ph, w):
        arr.setflags(write=False)
    return th.ravel(), ph.ravel(), w.ravel()


def frame_identity(n_theta: int = 32, n_phi: int = 64) -> np.ndarray:
    """Quadrature value of int int G sin(theta) dtheta dphi, which equals I."""
    th, ph, w = sphere_quadrature(n_theta, n_phi)
    return sum(wk * dual_G(t, p) for t, p, wk in zip(th, ph, w))


def reconstruct_qubit(sampler, n_theta: int = 32, n_phi: int = 64) -> np.ndarray:
    """rho = int int G(theta, phi) T(+1/2; theta, phi) sin(theta) dtheta dphi.

    ``sampler(theta, phi)`` returns T(+1/2) = Tr[P(theta, phi) rho].
    """
    th, ph, w = sphere_quadrature(n_theta, n_phi)
    rho = np.zeros((2, 2), dtype=complex)
    for t, p, wk in zip(th, ph, w):
        rho += wk * float(sampler(t, p)) * dual_G(t, p)
    return 0.5 * (rho + rho.conj().T)


def orthostochastic(U) -> np.ndarray:
    """M(U) with entries |u_jk|^2; bistochastic for any unitary U."""
    return np.abs(_unitary(U)) ** 2


def bistochastic_tomogram(rho, U) -> np.ndarray:
    """Tomogram as M(U U0) applied to the spectrum of rho, with rho = U0 diag U0^dag."""
    m = validate_density(rho)
    vals, vecs = eigen_decompose(m)
    return orthostochastic(_unitary(U) @ vecs) @ vals


@dataclass(frozen=True)
class SpinUncertainty:
    S: np.ndarray
    first_minors: np.ndarray
    second_minors: np.ndarray
    determinant: float

    def nonnegative(self, tol: float = 1e-12) -> bool:
        minors = np.concatenate([self.first_minors, self.second_minors, [self.determinant]])
        return bool(np.all(minors >= -tol))


def spin_uncertainty_matrix(rho) -> SpinUncertainty:
    """S_hk = cov(J_h, J_k) + (i/2) eps_hkl <J_l> for a Hermitian 2x2 matrix (not necessarily a state).

    Second minors are the principal 2x2 minors in index order 12, 23, 31.
    """
    m = np.asarray(rho, dtype=complex)
    if m.shape != (2, 2):
        raise QtomoError("spin_uncertainty_matrix needs a 2x2 matrix")
    if np.max(np.abs(m - m.conj().T)) > 1e-10:
        raise QtomoError("input must be Hermitian")
    mean = np.real([np.trace(m @ j) for j in SPIN])
    cov = np.empty((3, 3))
    for h in range(3):
        for k in range(3):
            anti = SPIN[h] @ SPIN[k] + SPIN[k] @ SPIN[h]
            cov[h, k] = 0.5 * np.real(np.trace(m @ anti)) - mean[h] * mean[k]
    anti = np.array([[0, mean[2], -mean[1]], [-mean[2], 0, mean[0]], [mean[1], -mean[0], 0]])
    S = cov + 0.5j * anti
    first = np.real(np.diag(S))
    second = np.array([np.real(np.linalg.det(S[np.ix_(idx, idx)])) for idx in ((0, 1), (1, 2), (2, 0))])
    return SpinUncertainty(S, first, second, float(np.real(np.linalg.det(S))))
