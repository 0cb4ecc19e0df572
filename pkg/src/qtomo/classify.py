"""Quantum/classical domain tests and uncertainty relations from tomograms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .numerics import QtomoError, Samples, UniformGrid
from .tomography import (
    DEFAULT_MU_GRID,
    DEFAULT_Q_GRID,
    OpticalTomogram,
    Tomogram,
    reconstruct_density,
    reconstruct_wigner,
)

TOL_Q = 5e-3
TOL_C = 5e-3
SURROGATE_WIDTH = 0.05
ROBERTSON_TOL = 1e-8
#: wide enough for Laplace tails, with 0, 1 and 2 on even nodes
MOMENT_GRID = UniformGrid(-60.0, 60.0, 12001)
CLASSICAL_X_GRID = UniformGrid(-20.0, 20.0, 801)
# a ridge of width 0.05 needs finer X sampling and more angles than smooth states
SURROGATE_X_GRID = UniformGrid(-20.0, 20.0, 3201)
SURROGATE_ANGLES = 720
SURROGATE_PHASE_GRID = UniformGrid(-6.0, 6.0, 201)


@dataclass(frozen=True)
class DomainVerdict:
    quantum: bool
    classical: bool
    min_operator_eigenvalue: float
    min_phase_density: float
    tol_q: float = TOL_Q
    tol_c: float = TOL_C
    phi_min: float | None = None
    robertson: "RobertsonResult | None" = None

    @property
    def label(self) -> str:
        if self.quantum and self.classical:
            return "Both"
        if self.quantum:
            return "Quantum only"
        if self.classical:
            return "Classical only"
        return "Neither"

    def to_dict(self) -> dict:
        out = {
            "quantum": self.quantum,
            "classical": self.classical,
            "label": self.label,
            "min_eigenvalue": self.min_operator_eigenvalue,
            "min_density": self.min_phase_density,
            "tol_q": self.tol_q,
            "tol_c": self.tol_c,
            "phi_min": self.phi_min,
        }
        if self.robertson is not None:
            out["robertson"] = {"lhs": self.robertson.lhs, "satisfied": self.robertson.satisfied}
        return out


@dataclass(frozen=True)
class RowMoments:
    mean: float
    second: float
    variance: float


@dataclass(frozen=True)
class RobertsonResult:
    lhs: float
    rhs: float
    satisfied: bool


@dataclass(frozen=True)
class MomentReport:
    rows: dict = field(repr=False)
    sigma_qq: float
    sigma_pp: float
    sigma_qp: float
    second_qq: float
    second_pp: float
    second_qp: float

    @property
    def robertson_lhs(self) -> float:
        return self.sigma_qq * self.sigma_pp - self.sigma_qp**2

    @property
    def heisenberg_product(self) -> float:
        return self.sigma_qq * self.sigma_pp


# --- moments ---------------------------------------------------------------------------

def row_moments(row: Samples, norm_tol: float | None = 1e-4) -> RowMoments:
    """Mean, uncentered second moment and variance of one tomogram row (Simpson rule)."""
    x = row.grid.points
    v = np.asarray(row.values, dtype=float)
    norm = simpson(v, x=x)
    if norm_tol is not None and abs(norm - 1) > norm_tol:
        raise QtomoError(f"tomogram row integrates to {norm:.6f}, expected 1 within {norm_tol:g}")
    mean = simpson(x * v, x=x) / norm
    second = simpson(x * x * v, x=x) / norm
    return RowMoments(float(mean), float(second), float(second - mean * mean))


def moments(tomo, mu: float = 1.0, nu: float = 0.0, X_grid: UniformGrid = MOMENT_GRID) -> RowMoments:
    """Moments of X under T(X, mu, nu); ``tomo`` may also be a single row."""
    if isinstance(tomo, Samples):
        return row_moments(tomo)
    return row_moments(Samples(X_grid, np.asarray(tomo(X_grid, mu, nu), dtype=float)))


def dual_second_moment(tomo: Tomogram, mu: float = 1.0, nu: float = 0.0, h: float = 1e-2) -> float:
    """Uncentered second moment as -g''(0), g(t) = int T(X, t mu, t nu) exp(iX) dX.

    This is the characteristic-function (dual symbol) route; the derivative
    uses the five-point stencil.
    """
    g = [tomo.characteristic(k * h * mu, k * h * nu) for k in (-2, -1, 0, 1, 2)]
    d2 = (-g[0] + 16 * g[1] - 30 * g[2] + 16 * g[3] - g[4]) / (12 * h * h)
    return float(-d2.real)


def moment_report(tomo: Tomogram, X_grid: UniformGrid = MOMENT_GRID) -> MomentReport:
    """Second-order moments from rows at (1,0), (0,1) and (1,1).

    The cross term follows from Var(Q + P) = s_QQ + s_PP + 2 s_QP, the same
    identity as the unit-direction row at pi/4 scaled by homogeneity.
    """
    rows = {}
    for mn in ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0)):
        rows[mn] = moments(tomo, *mn, X_grid=X_grid)
    q, p, d = rows[(1.0, 0.0)], rows[(0.0, 1.0)], rows[(1.0, 1.0)]
    return MomentReport(
        rows=rows,
        sigma_qq=q.variance,
        sigma_pp=p.variance,
        sigma_qp=0.5 * (d.variance - q.variance - p.variance),
        second_qq=q.second,
        second_pp=p.second,
        second_qp=0.5 * (d.second - q.second - p.second),
    )


def covariance_qp(tomo: Tomogram, X_grid: UniformGrid = MOMENT_GRID) -> float:
    return moment_report(tomo, X_grid).sigma_qp


def robertson_check(tomo: Tomogram, X_grid: UniformGrid = MOMENT_GRID,
                    tol: float = ROBERTSON_TOL) -> RobertsonResult:
    """Schroedinger-Robertson inequality s_QQ s_PP - s_QP^2 >= 1/4 with centered moments."""
    lhs = moment_report(tomo, X_grid).robertson_lhs
    return RobertsonResult(lhs, 0.25, bool(lhs >= 0.25 - tol))


def uncertainty_function(tomo, n_angles: int = 360, X_grid: UniformGrid = MOMENT_GRID) -> Samples:
    """Phi(theta) = Var_theta * Var_{theta + pi/2} - 1/4 over the optical angle grid.

    The partner angle wraps through T(X, theta + pi) = T(-X, theta), which
    leaves variances unchanged, so it is an index shift on the angle grid.
    """
    if isinstance(tomo, OpticalTomogram):
        opt = tomo
        norm_tol = 1e-4
    else:
        if n_angles % 2:
            raise QtomoError("n_angles must be even so theta + pi/2 is on the grid")
        # rows of line-supported states have jumps between nodes; renormalize instead
        norm_tol = None if tomo.singular else 1e-4
        opt = tomo.optical(n_angles, X_grid, norm_tol=None)
    n = opt.theta_grid.count
    quarter = n // 4 if opt.full_circle else n // 2
    if (n % 4 if opt.full_circle else n % 2) != 0:
        raise QtomoError("angle grid does not contain theta + pi/2 for every theta")
    var = np.array([row_moments(Samples(opt.X_grid, r), norm_tol).variance for r in opt.values])
    return Samples(opt.theta_grid, var * np.roll(var, -quarter) - 0.25)


# --- domain tests --------------------------------------------------------------------

def classical_test(tomo, tol: float = TOL_C, n_angles: int = 180,
                   X_grid: UniformGrid = CLASSICAL_X_GRID,
                   width: float = SURROGATE_WIDTH) -> tuple[bool, float]:
    """Non-negativity of the back-projected phase-space density f = W / (2 pi).

    Line-supported tomograms are replaced by their Gaussian-smoothed surrogate.
    """
    phase_grid = None
    if isinstance(tomo, OpticalTomogram):
        opt = tomo
    elif tomo.singular:
        opt = tomo.surrogate(width).optical(max(n_angles, SURROGATE_ANGLES), SURROGATE_X_GRID, norm_tol=None)
        phase_grid = SURROGATE_PHASE_GRID
    else:
        opt = tomo.optical(n_angles, X_grid, norm_tol=None)
    w = reconstruct_wigner(opt, phase_grid)
    lo = float(np.min(w.values) / (2 * np.pi))
    return bool(lo >= -tol), lo


def quantum_test(tomo, tol: float = TOL_Q, q_grid: UniformGrid = DEFAULT_Q_GRID,
                 mu_grid: UniformGrid = DEFAULT_MU_GRID, threads: int | None = 1) -> tuple[bool, float]:
    """Smallest eigenvalue of the reconstructed density operator."""
    import warnings

    from .numerics import GridLeakageWarning

    with warnings.catch_warnings():
        # non-states need not reconstruct to unit trace
        warnings.simplefilter("ignore", GridLeakageWarning)
        rho = reconstruct_density(tomo, q_grid, mu_grid, threads=threads)
    lo = float(np.linalg.eigvalsh(rho.operator())[0])
    return bool(lo >= -tol), lo


def classify(tomo, tol_q: float = TOL_Q, tol_c: float = TOL_C, n_angles: int = 180,
             q_grid: UniformGrid = DEFAULT_Q_GRID, mu_grid: UniformGrid = DEFAULT_MU_GRID,
             uncertainty: bool = True, threads: int | None = 1) -> DomainVerdict:
    quantum, lo_q = quantum_test(tomo, tol_q, q_grid, mu_grid, threads)
    classical, lo_c = classical_test(tomo, tol_c, n_angles)
    phi_min = robertson = None
    if uncertainty and not isinstance(tomo, OpticalTomogram):
        phi_min = float(np.min(uncertainty_function(tomo).values))
        robertson = robertson_check(tomo)
    return DomainVerdict(quantum, classical, lo_q, lo_c, tol_q, tol_c, phi_min, robertson)
