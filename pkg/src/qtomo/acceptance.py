"""Acceptance checks shared by ``qtomo selftest`` and the test suite.

Each check returns a :class:`CriterionResult` holding the measured
quantities, the bound each one was compared against and the verdict.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import classify as cl
from . import dynamics as dy
from . import entangle as en
from . import phase_space as ps
from . import spin as sp
from . import states as st
from . import tomography as tm
from .numerics import GridLeakageWarning, UniformGrid

SEED = 20240601


@dataclass
class Check:
    name: str
    value: float
    bound: float
    kind: str = "<="  # "<=", ">=", or "bool"

    @property
    def passed(self) -> bool:
        if self.kind == "bool":
            return bool(self.value)
        if not np.isfinite(self.value):
            return False
        return self.value <= self.bound if self.kind == "<=" else self.value >= self.bound

    def describe(self) -> str:
        if self.kind == "bool":
            return f"{self.name}={'yes' if self.value else 'no'}"
        return f"{self.name}={self.value:.3g}{self.kind}{self.bound:g}"


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.error is not None:
            body = f"error: {self.error}"
        else:
            failed = [c for c in self.checks if not c.passed]
            body = "; ".join(c.describe() for c in (failed or self.checks[:3]))
            if not failed and len(self.checks) > 3:
                body += f"; +{len(self.checks) - 3} more"
        return f"[{status}] {self.number:2d} {self.title} ({self.seconds:.1f} s): {body}"

    def to_dict(self) -> dict:
        return {
            "number": self.number,
            "title": self.title,
            "passed": self.passed,
            "seconds": self.seconds,
            "error": self.error,
            "checks": [{"name": c.name, "value": float(c.value), "bound": c.bound, "kind": c.kind,
                        "passed": c.passed} for c in self.checks],
        }


def _maxabs(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


# --- 1 -------------------------------------------------------------------------------

def pauli_counterexample() -> list[Check]:
    a, b = 1 + 1j, 1 - 1j
    psi1 = st.make_squeezed_gaussian(a, 0.0)
    psi2 = st.make_squeezed_gaussian(b, 0.0)
    (q1, p1), (q2, p2) = st.marginals(psi1), st.marginals(psi2)
    f = st.fidelity(psi1, psi2)
    closed = (a + np.conj(a)).real / (2 * np.sqrt((a * np.conj(a)).real))
    return [
        Check("position marginal diff", _maxabs(q1.values, q2.values), 1e-8),
        Check("momentum marginal diff", _maxabs(p1.values, p2.values), 1e-8),
        Check("|fidelity - 1/sqrt2|", abs(f - 1 / np.sqrt(2)), 1e-6),
        Check("|closed form - quadrature|", abs(closed - f), 1e-6),
    ]


# --- 2, 3 ----------------------------------------------------------------------------

PARAMS_12 = [(1.0, 0.0), (0.0, 1.0), (0.6, 0.8), (-0.8, 0.6), (1.5, -0.4), (0.3, 1.7),
             (-1.2, -0.9), (2.0, 0.5), (0.05, 1.1), (1.1, 0.05), (0.7, 0.7), (-0.4, 1.3)]
X_8 = UniformGrid(-8.0, 8.0, 321)


def closed_vs_numeric() -> list[Check]:
    err = 0.0
    for n in range(6):
        wt = tm.WavefunctionTomogram(st.make_fock(n))
        for mu, nu in PARAMS_12:
            err = max(err, _maxabs(tm.ho_level_tomogram(n, mu, nu, X_8.points), wt(X_8.points, mu, nu)))
    return [Check("max |closed - numeric| (n<=5, 12 params)", err, 1e-6)]


X_WIDE = UniformGrid(-60.0, 60.0, 6001)


def normalization_homogeneity() -> list[Check]:
    tomos = [tm.FockLevelTomogram(n) for n in range(6)]
    tomos += [tm.WavefunctionTomogram(st.make_fock(n)) for n in range(6)]
    tomos.append(tm.WavefunctionTomogram(st.make_coherent(1.0 + 0.5j)))
    tomos.append(tm.WavefunctionTomogram(st.make_squeezed_gaussian(0.5 + 0.3j, 0.2)))
    tomos.append(tm.ClassicalLineTomogram("laplace", 0.3))
    norm_err = 0.0
    for t in tomos:
        for mu, nu in PARAMS_12:
            row = t.row(mu, nu, X_WIDE)
            norm_err = max(norm_err, abs(float(np.trapezoid(row.values, X_WIDE.points)) - 1))
    closed = [tm.FockLevelTomogram(n) for n in range(6)] + [tm.ClassicalLineTomogram("laplace")]
    x = np.linspace(-6, 6, 97)
    hom_err = 0.0
    for t in closed:
        for lam in (-2.0, 0.5, 3.0):
            for mu, nu in PARAMS_12:
                lhs = t(lam * x, lam * mu, lam * nu)
                rhs = tm.homogeneity_rescale(t(x, mu, nu), lam)
                hom_err = max(hom_err, _maxabs(lhs, rhs))
    return [Check("max |row integral - 1|", norm_err, 1e-6),
            Check("max homogeneity residual", hom_err, 1e-8)]


# --- 4 -------------------------------------------------------------------------------

def reconstruction_round_trips(threads: int | None = 1) -> list[Check]:
    opt2 = tm.WavefunctionTomogram(st.make_fock(2)).optical(180, X_8, threads=threads)
    w2 = tm.reconstruct_wigner(opt2)
    exact2 = dy.fock_wigner(2, w2.q_grid, w2.p_grid)
    opt1 = tm.WavefunctionTomogram(st.make_fock(1)).optical(180, X_8, threads=threads)
    w1 = tm.reconstruct_wigner(opt1)
    i0 = int(np.argmin(np.abs(w1.q_grid.points)))
    start = time.perf_counter()
    sym = tm.WavefunctionTomogram(st.make_fock(2)).sample(tm.reconstruction_params(), tm.DEFAULT_Y_GRID,
                                                          threads=threads)
    rho = tm.reconstruct_density(sym, threads=threads)
    elapsed = time.perf_counter() - start
    exact = st.make_fock(2, tm.DEFAULT_Q_GRID).density().operator()
    return [
        Check("psi2 back-projection max error", _maxabs(w2.values, exact2.values), 1e-2),
        Check("psi1 |W(0,0) + 2|", abs(w1.values[i0, i0] + 2), 1e-2),
        Check("psi2 density trace distance", st.trace_distance(rho.operator(), exact), 1e-3),
        Check("symplectic round-trip seconds", elapsed, 60.0),
    ]


# --- 5 -------------------------------------------------------------------------------

PHASE_33 = UniformGrid(-4.0, 4.0, 33)


def dual_wigner_routes() -> list[Check]:
    err = 0.0
    cases = [(st.make_fock(n), st.FockDensityMatrix.fock(n)) for n in range(5)]
    alpha = 0.8 - 0.6j
    cases.append((st.make_coherent(alpha), st.FockDensityMatrix.coherent(alpha)))
    for psi, rho in cases:
        grid_route = ps.wigner_from_density(psi.density(), PHASE_33)
        parity_route = ps.wigner_via_parity(rho, PHASE_33)
        err = max(err, _maxabs(grid_route.values, parity_route.values))
    rng = np.random.default_rng(SEED)
    q, p = rng.uniform(-2, 2, (2, 25))
    ground = st.FockDensityMatrix.fock(0)
    lam = 2.0
    lhs = ps.generalized_wigner(ground, 1 / lam**2, lam * q, lam * p)
    closed = 2 * np.exp(-(q * q + p * p))
    # (q d_q + p d_p) W - 2 gamma d_gamma W = 0 by central differences at gamma = 1
    h = 1e-4
    W = lambda a, b, g: ps.generalized_wigner(ground, g, a, b)  # noqa: E731
    radial = (q * (W(q + h, p, 1.0) - W(q - h, p, 1.0)) + p * (W(q, p + h, 1.0) - W(q, p - h, 1.0))) / (2 * h)
    pde = radial - 2 * (W(q, p, 1.0 + h) - W(q, p, 1.0 - h)) / (2 * h)
    return [Check("grid vs parity Wigner (Fock 0-4, coherent)", err, 1e-4),
            Check("dilation identity residual, lambda=2", _maxabs(lhs, closed), 1e-6),
            Check("dilation PDE residual", float(np.max(np.abs(pde))), 1e-3)]


# --- 6, 7 ----------------------------------------------------------------------------

def gaussian_example() -> list[Check]:
    t = tm.FockLevelTomogram(0)
    rep = cl.moment_report(t)
    rho = tm.reconstruct_density(t)
    psi0 = st.make_fock(0, tm.DEFAULT_Q_GRID)
    fid = float(np.real(np.vdot(psi0.values, rho.operator() @ psi0.values)) * tm.DEFAULT_Q_GRID.spacing)
    return [
        Check("|s_QQ - 1/2|", abs(rep.sigma_qq - 0.5), 1e-6),
        Check("|s_PP - 1/2|", abs(rep.sigma_pp - 0.5), 1e-6),
        Check("|s_QP|", abs(rep.sigma_qp), 1e-6),
        Check("|Robertson lhs - 1/4|", abs(rep.robertson_lhs - 0.25), 1e-6),
        Check("fidelity with ground state", fid, 1 - 1e-3, ">="),
    ]


def line_examples() -> list[Check]:
    lap = cl.moment_report(tm.ClassicalLineTomogram("laplace"))
    uni = cl.moment_report(tm.ClassicalLineTomogram("uniform"))
    return [
        Check("laplace |<Q^2> - 2|", abs(lap.second_qq - 2), 1e-6),
        Check("laplace |<P^2> - 2|", abs(lap.second_pp - 2), 1e-6),
        Check("laplace |<QP>_sym - 2|", abs(lap.second_qp - 2), 1e-6),
        Check("laplace violates Robertson", lap.robertson_lhs < 0.25, 0, "bool"),
        Check("uniform |<Q^2> - 1/3|", abs(uni.second_qq - 1 / 3), 1e-6),
        Check("uniform |<P^2> - 1/3|", abs(uni.second_pp - 1 / 3), 1e-6),
        Check("uniform |<QP>_sym - 1/3|", abs(uni.second_qp - 1 / 3), 1e-6),
        Check("uniform violates Robertson", uni.robertson_lhs < 0.25, 0, "bool"),
    ]


# --- 8, 9 ----------------------------------------------------------------------------

def classification(threads: int | None = 1) -> list[Check]:
    cases = [
        ("lambda=2", tm.ScaledTomogram(tm.FockLevelTomogram(1), 2.0), "Neither"),
        ("ground", tm.FockLevelTomogram(0), "Both"),
        ("psi1", tm.FockLevelTomogram(1), "Quantum only"),
    ]
    out = []
    for name, t, want in cases:
        v = cl.classify(t, uncertainty=False, threads=threads)
        out.append(Check(f"{name} -> {v.label}", v.label == want, 0, "bool"))
    return out


def uncertainty_functions() -> list[Check]:
    out = []
    lo = np.inf
    for n in range(4):
        phi = cl.uncertainty_function(tm.FockLevelTomogram(n)).values
        lo = min(lo, float(phi.min()))
        if n == 0:
            out.append(Check("ground max |Phi|", float(np.max(np.abs(phi))), 1e-6))
        if n == 1:
            out.append(Check("psi1 max |Phi - 2|", float(np.max(np.abs(phi - 2))), 1e-4))
    phi_c = cl.uncertainty_function(tm.WavefunctionTomogram(st.make_coherent(1.0 + 0.5j))).values
    lo = min(lo, float(phi_c.min()))
    out.insert(0, Check("min Phi (Fock 0-3, coherent)", lo, -1e-6, ">="))
    return out


# --- 10 ------------------------------------------------------------------------------

def random_qubit(rng: np.random.Generator) -> np.ndarray:
    r = rng.normal(size=3)
    r *= rng.uniform() ** (1 / 3) / np.linalg.norm(r)
    return 0.5 * (np.eye(2) + np.einsum("k,kij->ij", r, sp.SIGMA))


def diagonal_state_S(alpha: float, beta: float) -> np.ndarray:
    s, d = alpha + beta, alpha - beta
    return 0.25 * np.array([[s, 1j * d, 0], [-1j * d, s, 0], [0, 0, s - d * d]])


def spin_checks() -> list[Check]:
    rng = np.random.default_rng(SEED)
    err = 0.0
    for _ in range(100):
        rho = random_qubit(rng)
        rec = sp.reconstruct_qubit(lambda t, p: sp.spin_tomogram_point(rho, t, p).probs[0])
        err = max(err, _maxabs(rec, rho))
    s_err, agree = 0.0, True
    for k in range(41):
        alpha = Fraction(k - 10, 20)
        a, b = float(alpha), float(1 - alpha)
        res = sp.spin_uncertainty_matrix(np.diag([a, b]))
        s_err = max(s_err, _maxabs(res.S, diagonal_state_S(a, b)))
        agree &= res.nonnegative() == (0 <= alpha <= 1)
    return [Check("qubit reconstruction error (100 states)", err, 1e-8),
            Check("diagonal-state S residual (41 points)", s_err, 1e-12),
            Check("minors >= 0 iff 0 <= alpha, beta <= 1", agree, 0, "bool")]


# --- 11 ------------------------------------------------------------------------------

def random_angles(rng: np.random.Generator) -> tuple[float, float, float, float]:
    return (rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi), rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))


def two_qubit_forms() -> list[Check]:
    rng = np.random.default_rng(SEED)
    errs = {"up-up": 0.0, "x-x": 0.0, "x-x tensor": 0.0, "mixture": 0.0, "triplet": 0.0}
    for _ in range(50):
        t1, p1, t2, p2 = random_angles(rng)
        delta = rng.uniform(0, np.pi)
        u1, u2 = (t1, p1), (t2, p2)
        direct = lambda rho: en.two_qubit_tomogram(rho, u1, u2)  # noqa: E731
        errs["up-up"] = max(errs["up-up"], _maxabs(en.up_up_tomogram(t1, t2), direct(en.up_up_density())))
        xx = direct(en.x_x_density())
        errs["x-x"] = max(errs["x-x"], _maxabs(en.x_x_tomogram(t1, p1, t2, p2), xx))
        errs["x-x tensor"] = max(errs["x-x tensor"], _maxabs(en.x_x_tomogram_tensor(t1, p1, t2, p2), xx))
        errs["mixture"] = max(errs["mixture"], _maxabs(en.mixture_tomogram(delta, t1, p1, t2, p2),
                                                       direct(en.mixture_density(delta))))
        errs["triplet"] = max(errs["triplet"], _maxabs(en.entangled_triplet_tomogram(u1, u2),
                                                       direct(en.triplet_density())))
    return [Check(f"{k} closed vs conjugation", v, 1e-10) for k, v in errs.items()]


# --- 12 ------------------------------------------------------------------------------

def random_pure_qubit(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def bell_checks(threads: int | None = 1) -> list[Check]:
    res = en.maximize_bell(en.triplet_density(), threads=threads)
    M = en.stochastic_from_tomograms(en.triplet_density(), res.angles)
    tr = abs(float(np.trace(M @ en.bell_matrix_I0())))
    # the optimal stochastic matrix, compared as a multiset of columns
    opt = en.optimal_triplet_matrix()
    match = np.allclose(np.sort(np.sort(M, axis=0), axis=1), np.sort(np.sort(opt, axis=0), axis=1), atol=1e-4)
    rng = np.random.default_rng(SEED)
    worst = -np.inf
    for _ in range(500):
        angles = en.BellAngles.from_array(rng.uniform(0, 2 * np.pi, 8))
        if rng.uniform() < 0.5:
            rho = np.kron(random_pure_qubit(rng), random_pure_qubit(rng))
        else:
            w = rng.dirichlet(np.ones(3))
            rho = sum(wk * np.kron(random_pure_qubit(rng), random_pure_qubit(rng)) for wk in w)
        worst = max(worst, abs(en.bell_number(rho, angles)))
    exact, _ = en.trace_bound_check(en.CONCLUSIONS_MATRIX)
    hi, lo, _, _ = en.hypercube_extrema()
    return [
        Check("|B_max - 2 sqrt2| (triplet)", abs(res.B_max - 2 * np.sqrt(2)), 1e-3),
        Check("||Tr(M I0)| - 2 sqrt2| at optimum", abs(tr - 2 * np.sqrt(2)), 1e-6),
        Check("optimum matrix has entries (2 +- sqrt2)/8", match, 0, "bool"),
        Check("max |B| over 500 separable trials", worst, 2 + 1e-9),
        Check("conclusions matrix Tr(M I0) == 4 exactly", exact == Fraction(4), 0, "bool"),
        Check("hypercube extrema == (2, -2)", (hi, lo) == (2.0, -2.0), 0, "bool"),
    ]


# --- 13 ------------------------------------------------------------------------------

PHASE_141 = UniformGrid(-7.0, 7.0, 141)


def dynamics_checks() -> list[Check]:
    H = dy.QuadraticHamiltonian("harmonic")
    psi = st.make_coherent(1.0 + 0.5j)
    W0 = ps.wigner_from_density(psi.density(), PHASE_141)
    diagram = 0.0
    for t in (np.pi / 4, 1.0, np.pi):
        via_wigner = dy.evolve_wigner(W0, H, t)
        via_state = ps.wigner_from_density(dy.evolve_wavefunction(psi, H, t).density(), PHASE_141)
        diagram = max(diagram, _maxabs(via_wigner.values, via_state.values))
    free = tm.WavefunctionTomogram(st.make_fock(0))
    var_err = 0.0
    for t in (0.0, 0.5, 1.0, 2.0, 3.0):
        evolved = dy.evolve_tomogram(free, "free", t)
        var = cl.moments(evolved, 1.0, 0.0).variance
        var_err = max(var_err, abs(var - 0.5 * (1 + t * t)))
    stationary = max(dy.stationary_moyal_residual(n, n + 0.5) for n in range(4))
    mismatched = min(dy.stationary_moyal_residual(n, n + 1.5) for n in range(4))
    return [
        Check("harmonic commuting diagram max error", diagram, 1e-3),
        Check("free variance |Var - (1+t^2)/2|", var_err, 1e-4),
        Check("stationary residual, n <= 3", stationary, 1e-3),
        Check("residual with wrong energy", mismatched, 0.5, ">="),
    ]


# --- 14 ------------------------------------------------------------------------------

def superposition_checks() -> list[Check]:
    idem = 0.0
    dist = 0.0
    # qubit
    e0, e1 = np.eye(2)
    for p1, phase in ((0.5, 0.0), (0.3, 1.1), (0.8, -2.0)):
        P0 = st.fiducial_projector(e0, e1, phase)
        rho = st.superpose_projectors(np.outer(e0, e0), np.outer(e1, e1), P0, p1, 1 - p1)
        v = np.sqrt(p1) * e0 + np.exp(1j * phase) * np.sqrt(1 - p1) * e1
        idem = max(idem, _maxabs(rho @ rho, rho))
        dist = max(dist, st.trace_distance(rho, np.outer(v, v.conj())))
    # psi0 / psi1 in the number basis
    dim = 16
    f0, f1 = st.FockDensityMatrix.fock(0, dim), st.FockDensityMatrix.fock(1, dim)
    g = UniformGrid(-10.0, 10.0, 1024)
    psi0, psi1 = st.make_fock(0, g), st.make_fock(1, g)
    for p1, phase in ((0.5, 0.0), (0.25, 0.7)):
        P0 = st.fiducial_projector(np.eye(dim)[0], np.eye(dim)[1], phase)
        rho = st.superpose_projectors(f0, f1, P0, p1, 1 - p1).entries
        psi = st.superpose_wavefunctions(psi0, psi1, p1, 1 - p1, phase)
        c = psi.fock_coefficients(dim)
        idem = max(idem, _maxabs(rho @ rho, rho))
        dist = max(dist, st.trace_distance(rho, np.outer(c, c.conj())))
    return [Check("idempotency residual", idem, 1e-8),
            Check("trace distance to wavefunction superposition", dist, 1e-6)]


CRITERIA = {
    1: ("Pauli counterexample", pauli_counterexample),
    2: ("closed-form vs numeric tomograms", closed_vs_numeric),
    3: ("normalization and homogeneity", normalization_homogeneity),
    4: ("reconstruction round trips", reconstruction_round_trips),
    5: ("dual Wigner routes", dual_wigner_routes),
    6: ("Gaussian moments and reconstruction", gaussian_example),
    7: ("Laplace and uniform line densities", line_examples),
    8: ("classification", classification),
    9: ("uncertainty function", uncertainty_functions),
    10: ("spin reconstruction and uncertainty matrix", spin_checks),
    11: ("two-qubit closed forms", two_qubit_forms),
    12: ("Bell functional", bell_checks),
    13: ("quadratic dynamics", dynamics_checks),
    14: ("projector superposition", superposition_checks),
}

_THREADED = {4, 8, 12}


def run_criterion(number: int, threads: int | None = 1) -> CriterionResult:
    title, fn = CRITERIA[number]
    result = CriterionResult(number, title)
    start = time.perf_counter()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", GridLeakageWarning)
            result.checks = fn(threads) if number in _THREADED else fn()
    except Exception as exc:  # reported as a failing criterion
        result.error = f"{type(exc).__name__}: {exc}"
    result.seconds = time.perf_counter() - start
    return result


def run_all(numbers=None, threads: int | None = 1, report=None) -> list[CriterionResult]:
    results = []
    for n in numbers or sorted(CRITERIA):
        r = run_criterion(n, threads)
        if report is not None:
            report(r.line())
        results.append(r)
    return results
