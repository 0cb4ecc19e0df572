"""Two-qubit tomograms, the Bell functional and its product-state bound.

Basis order is |++>, |+->, |-+>, |--> with + the spin-up state. Euler psi
angles cancel in every probability and are accepted only for completeness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numerics import QtomoError, parallel_map
from .spin import _unitary, orthostochastic, qubit_tomogram, su2_matrix
from .states import eigen_decompose, validate_density


@dataclass(frozen=True)
class BellAngles:
    theta_a: float = 0.0
    phi_a: float = 0.0
    theta_b: float = 0.0
    phi_b: float = 0.0
    theta_c: float = 0.0
    phi_c: float = 0.0
    theta_d: float = 0.0
    phi_d: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.theta_a, self.phi_a, self.theta_b, self.phi_b,
                         self.theta_c, self.phi_c, self.theta_d, self.phi_d])

    @classmethod
    def from_array(cls, a) -> "BellAngles":
        return cls(*[float(v) for v in a])

    def direction(self, name: str) -> tuple[float, float]:
        return getattr(self, f"theta_{name}"), getattr(self, f"phi_{name}")

    def to_dict(self) -> dict:
        return dict(zip(("theta_a", "phi_a", "theta_b", "phi_b", "theta_c", "phi_c", "theta_d", "phi_d"),
                        self.as_array().tolist()))


#: CHSH-optimal settings for the triplet state, reaching B = -2 sqrt 2
CHSH_ANGLES = BellAngles(0.0, 0.0, np.pi / 4, 0.0, -np.pi / 4, 0.0, -np.pi / 2, 0.0)


def _local(U) -> np.ndarray:
    if isinstance(U, tuple):
        return su2_matrix(U[0], 0.0, U[1]) if len(U) == 2 else su2_matrix(*U)
    return _unitary(U)


# --- states ----------------------------------------------------------------------------

def up_up_density() -> np.ndarray:
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1
    return rho


def x_x_density() -> np.ndarray:
    """Both spins along +x."""
    return np.full((4, 4), 0.25, dtype=complex)


def mixture_density(delta: float) -> np.ndarray:
    return np.cos(delta) ** 2 * up_up_density() + np.sin(delta) ** 2 * x_x_density()


def triplet_density() -> np.ndarray:
    """(|+-> + |-+>) / sqrt 2."""
    v = np.array([0, 1, 1, 0]) / np.sqrt(2)
    return np.outer(v, v).astype(complex)


# --- tomograms -------------------------------------------------------------------------

def two_qubit_tomogram(rho, U1, U2) -> np.ndarray:
    """Diagonal of (U1 x U2) rho (U1 x U2)^dag.

    U1, U2 are unitaries, EulerUnitary objects or (theta, phi) pairs.
    """
    m = validate_density(rho)
    if m.shape != (4, 4):
        raise QtomoError("two_qubit_tomogram needs a 4x4 density matrix")
    u = np.kron(_local(U1), _local(U2))
    return np.real(np.einsum("ij,jk,ik->i", u, m, u.conj()))


def two_qubit_tomogram_bistochastic(rho, U1, U2) -> np.ndarray:
    """Same tomogram as M((U1 x U2) U0) applied to the spectrum of rho."""
    m = validate_density(rho)
    vals, vecs = eigen_decompose(m)
    return orthostochastic(np.kron(_local(U1), _local(U2)) @ vecs) @ vals


def product_tomogram(rho1, rho2, U1, U2) -> np.ndarray:
    return np.kron(qubit_tomogram(rho1, _local(U1)), qubit_tomogram(rho2, _local(U2)))


def convex_separable_tomogram(components, U1, U2) -> np.ndarray:
    """sum_k lambda_k T[rho1_k] x T[rho2_k] for components (lambda_k, rho1_k, rho2_k)."""
    weights = np.array([c[0] for c in components], dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
        raise QtomoError("convex weights must be non-negative and sum to 1")
    return sum(w * product_tomogram(r1, r2, U1, U2) for w, r1, r2 in components)


def up_up_tomogram(theta1: float, theta2: float) -> np.ndarray:
    c1, s1 = np.cos(theta1 / 2) ** 2, np.sin(theta1 / 2) ** 2
    c2, s2 = np.cos(theta2 / 2) ** 2, np.sin(theta2 / 2) ** 2
    return np.array([c1 * c2, c1 * s2, s1 * c2, s1 * s2])


def _x_factor(theta: float, phi: float) -> np.ndarray:
    """|cos(t/2) e^{i phi/2} + sin(t/2) e^{-i phi/2}|^2 and its partner."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    e = np.exp(0.5j * phi)
    return np.array([abs(c * e + s / e) ** 2, abs(-s * e + c / e) ** 2])


def x_x_tomogram(theta1: float, phi1: float, theta2: float, phi2: float) -> np.ndarray:
    """Component form: one quarter times the products of the single-spin factors."""
    f1, f2 = _x_factor(theta1, phi1), _x_factor(theta2, phi2)
    return 0.25 * np.array([f1[0] * f2[0], f1[0] * f2[1], f1[1] * f2[0], f1[1] * f2[1]])


def x_x_tomogram_tensor(theta1: float, phi1: float, theta2: float, phi2: float) -> np.ndarray:
    """Tensor form: (f1 / 2) x (f2 / 2)."""
    return np.kron(0.5 * _x_factor(theta1, phi1), 0.5 * _x_factor(theta2, phi2))


def mixture_tomogram(delta: float, theta1: float, phi1: float, theta2: float, phi2: float) -> np.ndarray:
    return (np.cos(delta) ** 2 * up_up_tomogram(theta1, theta2)
            + np.sin(delta) ** 2 * x_x_tomogram(theta1, phi1, theta2, phi2))


def entangled_triplet_tomogram(n1, n2) -> np.ndarray:
    """Closed-form tomogram of the triplet state for directions n = (theta, phi)."""
    (t1, p1), (t2, p2) = n1, n2
    c1, s1 = np.cos(t1 / 2), np.sin(t1 / 2)
    c2, s2 = np.cos(t2 / 2), np.sin(t2 / 2)
    cross = c1 * s1 * c2 * s2 * 2 * np.cos(p1 - p2)
    pp = 0.5 * (c1**2 * s2**2 + s1**2 * c2**2 + cross)
    pm = 0.5 * (c1**2 * c2**2 + s1**2 * s2**2 - cross)
    return np.array([pp, pm, pm, pp])


def x_correlator(theta_a: float, phi_a: float, theta_b: float, phi_b: float) -> float:
    """T(+1/2, +1/2) of the triplet state at directions a and b."""
    ca, sa = np.cos(theta_a / 2) ** 2, np.sin(theta_a / 2) ** 2
    cb, sb = np.cos(theta_b / 2) ** 2, np.sin(theta_b / 2) ** 2
    return float(0.5 * (ca * sb + sa * cb + 0.5 * np.sin(theta_a) * np.sin(theta_b) * np.cos(phi_a - phi_b)))


# --- Bell functional ----------------------------------------------------------------

def bell_matrix_I0() -> np.ndarray:
    return np.array([[1, -1, -1, 1]] * 3 + [[-1, 1, 1, -1]])


PAIRS = (("a", "b"), ("a", "c"), ("d", "b"), ("d", "c"))


def stochastic_from_tomograms(rho, angles: BellAngles) -> np.ndarray:
    """Columns are the tomograms at direction pairs (a,b), (a,c), (d,b), (d,c)."""
    cols = [two_qubit_tomogram(rho, angles.direction(x), angles.direction(y)) for x, y in PAIRS]
    return np.array(cols).T


def _check_stochastic(M, tol: float = 1e-10) -> np.ndarray:
    """Validate a column-stochastic 4x4 matrix; exact (Fraction) entries are kept exact."""
    M = np.asarray(M)
    if M.dtype != object:
        M = M.astype(float)
    if M.shape != (4, 4):
        raise QtomoError("expected a 4x4 matrix")
    if float(M.min()) < -tol or max(abs(float(v) - 1) for v in M.sum(axis=0)) > tol:
        raise QtomoError("matrix columns must be probability vectors")
    return M


def trace_bound_check(M) -> tuple[float, bool]:
    """Tr(M I0) and whether |Tr(M I0)| <= 2, the bound for convex sums of product matrices."""
    M = _check_stochastic(M)
    I0 = bell_matrix_I0()
    value = sum(M[i, j] * int(I0[j, i]) for i in range(4) for j in range(4))
    return value if M.dtype == object else float(value), bool(abs(value) <= 2 + 1e-9)


def bell_number(rho, angles: BellAngles) -> float:
    return float(np.trace(stochastic_from_tomograms(rho, angles) @ bell_matrix_I0()))


def bell_number_triplet(angles: BellAngles) -> float:
    """B = 4 (x_ab + x_ac + x_db - x_dc) - 2 for the triplet state."""
    x = [x_correlator(*angles.direction(p), *angles.direction(q)) for p, q in PAIRS]
    return 4 * (x[0] + x[1] + x[2] - x[3]) - 2


def _direction(theta, phi) -> np.ndarray:
    return np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)


def correlation_tensor(rho) -> np.ndarray:
    """R_jk = Tr[rho sigma_j x sigma_k], so (1,-1,-1,1) . T(n1, n2) = n1 . R n2."""
    from .spin import SIGMA

    m = validate_density(rho)
    return np.real(np.array([[np.trace(m @ np.kron(a, b)) for b in SIGMA] for a in SIGMA]))


def _bell_from_correlations(R, x) -> float:
    a, b, c, d = (_direction(x[2 * k], x[2 * k + 1]) for k in range(4))
    return float(a @ R @ b + a @ R @ c + d @ R @ b - d @ R @ c)


@dataclass(frozen=True)
class BellResult:
    B_max: float
    B: float
    angles: BellAngles

    def to_dict(self) -> dict:
        return {
            "B_max": self.B_max,
            "B": self.B,
            "angles": self.angles.to_dict(),
            "violated_classical_bound": bool(self.B_max > 2 + 1e-9),
            "cirelson_gap": float(2 * np.sqrt(2) - self.B_max),
        }


def maximize_bell(rho, grid_step: float = np.pi / 12, tol: float = 1e-5,
                  threads: int | None = 1) -> BellResult:
    """sup |B| over the eight angles: grid search, then coordinate descent.

    The grid covers the sphere in steps of ``grid_step`` with phi_a = 0.
    For fixed a and d the best b and c decouple:
    B = [C(a,b) + C(d,b)] + [C(a,c) - C(d,c)].
    """
    R = correlation_tensor(rho)
    thetas = np.arange(0.0, np.pi + grid_step / 2, grid_step)
    phis = np.arange(0.0, 2 * np.pi - grid_step / 2, grid_step)
    th, ph = (g.ravel() for g in np.meshgrid(thetas, phis, indexing="ij"))
    dirs = _direction(th, ph)
    C = dirs @ R @ dirs.T
    a_idx = np.flatnonzero(ph == 0.0)

    def best_for(a):
        out = []
        for sign in (1.0, -1.0):
            Cs = sign * C
            sb = Cs[a][None, :] + Cs  # [d, b]
            sc = Cs[a][None, :] - Cs  # [d, c]
            tot = sb.max(axis=1) + sc.max(axis=1)
            d = int(np.argmax(tot))
            out.append((float(tot[d]), sign, a, d, int(np.argmax(sb[d])), int(np.argmax(sc[d]))))
        return max(out)

    val, sign, a, d, b, c = max(parallel_map(best_for, a_idx, threads))
    x = np.array([th[a], 0.0, th[b], ph[b], th[c], ph[c], th[d], ph[d]])
    f = lambda v: sign * _bell_from_correlations(R, v)  # noqa: E731
    best = f(x)
    step = grid_step / 2
    free = [0, 2, 3, 4, 5, 6, 7]
    while step >= tol:
        improved = True
        while improved:
            improved = False
            for k in free:
                for delta in (step, -step):
                    trial = x.copy()
                    trial[k] += delta
                    val = f(trial)
                    if val > best + 1e-15:
                        x, best, improved = trial, val, True
        step /= 2
    angles = BellAngles.from_array(x)
    B = bell_number(rho, angles)
    return BellResult(abs(B), B, angles)


# --- hypercube proposition ---------------------------------------------------------

def chsh_form(p, q, s, t):
    return p * (s + t) + q * (s - t)


def hypercube_extrema(f=chsh_form, n: int = 4):
    """Extrema of a multilinear form over the vertices of [-1, 1]^n.

    Returns (max, min, argmax vertices, argmin vertices).
    """
    verts = np.array(list(itertools.product((-1.0, 1.0), repeat=n)))
    vals = np.array([f(*v) for v in verts])
    hi, lo = vals.max(), vals.min()
    return (float(hi), float(lo),
            [tuple(v) for v in verts[np.isclose(vals, hi)]],
            [tuple(v) for v in verts[np.isclose(vals, lo)]])


#: the stochastic matrix whose Bell number is 4
CONCLUSIONS_MATRIX = np.array([
    [Fraction(1), Fraction(1, 3), Fraction(1, 2), Fraction(0)],
    [Fraction(0), Fraction(0), Fraction(0), Fraction(1, 4)],
    [Fraction(0), Fraction(0), Fraction(0), Fraction(3, 4)],
    [Fraction(0), Fraction(2, 3), Fraction(1, 2), Fraction(0)],
], dtype=object)


def optimal_triplet_matrix() -> np.ndarray:
    """Matrix with entries (2 +- sqrt 2)/8 realizing |Tr(M I0)| = 2 sqrt 2."""
    hi, lo = (2 + np.sqrt(2)) / 8, (2 - np.sqrt(2)) / 8
    col, last = np.array([hi, lo, lo, hi]), np.array([lo, hi, hi, lo])
    return np.array([col, col, col, last]).T
