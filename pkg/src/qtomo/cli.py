"""Command-line front end.

Documents flow between subcommands as qtomo/1 JSON on stdin/stdout (or files
via -i/-o). Exit codes: 0 success, 1 usage error, 2 numerical validation
failure (bad state, schema violation, failed acceptance check).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import acceptance, classify as cl, dynamics as dy, entangle as en, io, spin as sp
from . import states as st
from . import tomography as tm
from .numerics import DEFAULT_GRID, GridLeakageWarning, QtomoError, UniformGrid, hermite_functions, resolve_threads
from .phase_space import WignerFunction, wigner_from_density

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# --- run configuration ------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """Validated settings shared by all subcommands."""

    grid: UniformGrid = DEFAULT_GRID
    x_grid: UniformGrid = tm.DEFAULT_X_GRID
    q_grid: UniformGrid = tm.DEFAULT_Q_GRID
    dim: int = 64
    angles: int = 180
    tol_q: float = cl.TOL_Q
    tol_c: float = cl.TOL_C
    tol_norm: float | None = None
    tol_robertson: float = cl.ROBERTSON_TOL
    threads: int = 1
    seed: int = acceptance.SEED
    input: str = "-"
    output: str = "-"

    def __post_init__(self):
        if self.dim < 1:
            raise UsageError("--dim must be at least 1")
        if self.angles < 2:
            raise UsageError("--angles must be at least 2")
        for name in ("tol_q", "tol_c", "tol_robertson"):
            if not getattr(self, name) >= 0:
                raise UsageError(f"--{name.replace('_', '-')} must be non-negative")
        if self.tol_norm is not None and not self.tol_norm >= 0:
            raise UsageError("--tol-norm must be non-negative")


def _grid_arg(text: str) -> UniformGrid:
    """MIN,MAX,COUNT."""
    try:
        lo, hi, n = text.split(",")
        return UniformGrid(float(lo), float(hi), int(n))
    except (ValueError, QtomoError) as exc:
        raise argparse.ArgumentTypeError(f"expected MIN,MAX,COUNT, got {text!r} ({exc})") from None


def _complex_arg(text: str) -> complex:
    try:
        return io.parse_complex(text)
    except QtomoError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _finite_arg(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not np.isfinite(x):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return x


def _floats_arg(text: str) -> list[float]:
    return [_finite_arg(v) for v in text.split(",") if v.strip()]


def _config(args) -> RunConfig:
    fields = {k: getattr(args, k) for k in RunConfig.__dataclass_fields__ if getattr(args, k, None) is not None}
    fields["threads"] = resolve_threads(getattr(args, "threads", None))
    return RunConfig(**fields)


# --- document I/O ----------------------------------------------------------------------

def _read_text(cfg: RunConfig) -> str:
    if cfg.input == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(cfg.input).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {cfg.input}: {exc.strerror}") from None
    if not text.strip():
        raise UsageError("no input document (pipe JSON on stdin or pass -i FILE)")
    return text


def _read(cfg: RunConfig):
    return io.loads(_read_text(cfg), cfg.tol_norm)


def _write(cfg: RunConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output == "-":
        sys.stdout.write(text)
    else:
        Path(cfg.output).write_text(text)


def _emit(cfg: RunConfig, obj, csv: bool = False) -> None:
    _write(cfg, io.to_csv(obj) if csv else io.dumps(obj))


def _expect(obj, types, what: str):
    if not isinstance(obj, types):
        raise QtomoError(f"expected {what}, got {type(obj).__name__}")
    return obj


def _tomogram_of(state, cfg: RunConfig) -> tm.Tomogram:
    """Tomogram of a state document; mixed states become a sum over eigenvectors."""
    if isinstance(state, st.WaveFunction):
        return tm.WavefunctionTomogram(state)
    if isinstance(state, st.FockDensityMatrix):
        vals, vecs = st.eigen_decompose(state)
        basis = hermite_functions(state.dim - 1, cfg.grid.points)
        grid, cols = cfg.grid, vecs.T @ basis
    elif isinstance(state, st.DensityMatrixGrid):
        vals, vecs = st.eigen_decompose(state.operator())
        grid, cols = state.grid, vecs.T / np.sqrt(state.grid.spacing)
    else:
        raise QtomoError(f"expected an oscillator state, got {type(state).__name__}")
    keep = vals > 1e-12
    parts = [(w, tm.WavefunctionTomogram(st.WaveFunction.normalized(grid, c)))
             for w, c in zip(vals[keep] / vals[keep].sum(), cols[keep])]
    if len(parts) == 1:
        return parts[0][1]
    return tm.FunctionTomogram(lambda X, mu, nu: sum(w * t(X, mu, nu) for w, t in parts))


# --- subcommands -------------------------------------------------------------------------

def cmd_state_make(args, cfg: RunConfig) -> int:
    kind = args.kind
    if kind in ("qubit", "triplet", "up-up", "x-x", "mixture"):
        if kind == "qubit":
            r = np.asarray(args.bloch, dtype=float)
            if r.shape != (3,) or np.linalg.norm(r) > 1 + 1e-12:
                raise QtomoError("--bloch needs three components with norm <= 1")
            m = 0.5 * (np.eye(2) + np.einsum("k,kij->ij", r, sp.SIGMA))
        else:
            m = _two_qubit_state(kind, args.delta)
        _write(cfg, io.dumps(io.to_document(st.validate_density(m), "qudit_density")))
        return EXIT_OK
    if kind == "fock":
        psi = st.make_fock(args.n, cfg.grid)
    elif kind == "coherent":
        psi = st.make_coherent(args.alpha, cfg.grid)
    elif kind == "squeezed":
        psi = st.make_squeezed_gaussian(args.alpha, args.beta, cfg.grid)
    else:  # superposition of Fock states n and m
        psi = st.superpose_wavefunctions(st.make_fock(args.n, cfg.grid), st.make_fock(args.m, cfg.grid),
                                         args.p1, 1 - args.p1, args.phase)
    if args.representation == "fock":
        _emit(cfg, st.FockDensityMatrix.from_wavefunction(psi, cfg.dim))
    else:
        _emit(cfg, psi)
    return EXIT_OK


def _two_qubit_state(kind: str, delta: float) -> np.ndarray:
    return {
        "triplet": en.triplet_density,
        "up-up": en.up_up_density,
        "x-x": en.x_x_density,
        "mixture": lambda: en.mixture_density(delta),
    }[kind]()


def cmd_tomogram_forward(args, cfg: RunConfig) -> int:
    tomo = _tomogram_of(_read(cfg), cfg)
    if args.symplectic:
        out = tomo.sample(tm.reconstruction_params(cfg.q_grid), tm.DEFAULT_Y_GRID, threads=cfg.threads)
    else:
        out = tomo.optical(cfg.angles, cfg.x_grid, full_circle=args.full_circle, threads=cfg.threads)
    _emit(cfg, out, args.csv)
    return EXIT_OK


def cmd_tomogram_reconstruct(args, cfg: RunConfig) -> int:
    tomo = _expect(_read(cfg), (tm.OpticalTomogram, tm.SymplecticTomogram), "a tomogram")
    if args.target == "wigner":
        tomo = _expect(tomo, tm.OpticalTomogram, "an optical tomogram for back-projection")
        grid = args.phase_grid
        _emit(cfg, tm.reconstruct_wigner(tomo, grid, grid), args.csv)
        return EXIT_OK
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GridLeakageWarning)
        rho = tm.reconstruct_density(tomo, cfg.q_grid, threads=cfg.threads)
    _emit(cfg, rho)
    return EXIT_OK


def cmd_classify(args, cfg: RunConfig) -> int:
    tomo = _expect(_read(cfg), (tm.OpticalTomogram, tm.SymplecticTomogram), "a tomogram")
    verdict = cl.classify(tomo, cfg.tol_q, cfg.tol_c, q_grid=cfg.q_grid, threads=cfg.threads)
    _emit(cfg, verdict)
    return EXIT_OK


def cmd_uncertainty(args, cfg: RunConfig) -> int:
    opt = _expect(_read(cfg), tm.OpticalTomogram, "an optical tomogram")
    phi = cl.uncertainty_function(opt)
    if args.csv:
        _write(cfg, io.to_csv(phi))
        return EXIT_OK
    rep = cl.moment_report(opt, opt.X_grid.scaled(np.sqrt(2)))
    doc = {
        "schema": io.SCHEMA_TAG,
        "type": "uncertainty",
        "theta_grid": {"min": opt.theta_grid.min, "max": opt.theta_grid.max, "count": opt.theta_grid.count},
        "phi": phi.values.tolist(),
        "phi_min": float(phi.values.min()),
        "sigma_qq": rep.sigma_qq,
        "sigma_pp": rep.sigma_pp,
        "sigma_qp": rep.sigma_qp,
        "robertson_lhs": rep.robertson_lhs,
        "robertson_satisfied": bool(rep.robertson_lhs >= 0.25 - cfg.tol_robertson),
    }
    _write(cfg, io.dumps(doc))
    return EXIT_OK


def cmd_spin_tomogram(args, cfg: RunConfig) -> int:
    rho = _read(cfg)
    if not isinstance(rho, np.ndarray) or rho.shape != (2, 2):
        raise QtomoError("spin tomogram needs a qubit density matrix")
    th, ph, _ = sp.sphere_quadrature(args.n_theta, args.n_phi)
    points = [sp.spin_tomogram_point(rho, t, p).to_dict() for t, p in zip(th, ph)]
    _write(cfg, io.dumps({"schema": io.SCHEMA_TAG, "type": "spin_tomogram", "points": points}))
    return EXIT_OK


def cmd_spin_reconstruct(args, cfg: RunConfig) -> int:
    doc = json.loads(_read_text(cfg))
    io.validate(doc, "spin_tomogram")
    table = {(round(p["theta"], 12), round(p["phi"], 12)): p["probs"][0] for p in doc["points"]}
    n_theta = len({k[0] for k in table})
    n_phi = len({k[1] for k in table})

    def sampler(t, p):
        key = (round(float(t), 12), round(float(p), 12))
        if key not in table:
            raise QtomoError("points do not lie on the Gauss-Legendre x uniform quadrature grid")
        return table[key]

    rho = sp.reconstruct_qubit(sampler, n_theta, n_phi)
    _write(cfg, io.dumps(io.to_document(rho, "qudit_density")))
    return EXIT_OK


def cmd_bell(args, cfg: RunConfig) -> int:
    if args.state is not None:
        rho = _two_qubit_state(args.state, args.delta)
    else:
        rho = _read(cfg)
        if not isinstance(rho, np.ndarray) or rho.shape != (4, 4):
            raise QtomoError("bell needs a two-qubit density matrix")
    if args.maximize:
        res = en.maximize_bell(rho, threads=cfg.threads)
    else:
        angles = en.CHSH_ANGLES if args.bell_angles is None else en.BellAngles.from_array(args.bell_angles)
        B = en.bell_number(rho, angles)
        res = en.BellResult(abs(B), B, angles)
    _write(cfg, io.dumps({"schema": io.SCHEMA_TAG, "type": "bell", **res.to_dict()}))
    return EXIT_OK


def cmd_evolve(args, cfg: RunConfig) -> int:
    H = dy.QuadraticHamiltonian(args.hamiltonian, args.omega)
    obj = _read(cfg)
    snapshots = []
    for t in args.times:
        if isinstance(obj, st.WaveFunction):
            out = dy.evolve_wavefunction(obj, H, t)
        elif isinstance(obj, WignerFunction):
            out = dy.evolve_wigner(obj, H, t)
        elif isinstance(obj, tm.OpticalTomogram):
            out = dy.evolve_tomogram(obj, H, t).optical(obj.theta_grid.count, obj.X_grid, obj.full_circle,
                                                          norm_tol=None, threads=cfg.threads)
        elif isinstance(obj, st.DensityMatrixGrid):
            out = dy.evolve_wigner(wigner_from_density(obj, args.phase_grid), H, t)
        else:
            raise QtomoError(f"cannot evolve {type(obj).__name__}")
        snapshots.append((t, io.to_document(out)))
    manifest = {"schema": io.SCHEMA_TAG, "type": "evolution", "hamiltonian": H.kind, "omega": H.omega,
                "snapshots": []}
    if args.out_dir is None:
        manifest["snapshots"] = [{"t": t, "document": d} for t, d in snapshots]
    else:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for k, (t, d) in enumerate(snapshots):
            path = out_dir / f"snapshot_{k:04d}.json"
            path.write_text(io.dumps({**d, "t": t}) + "\n")
            manifest["snapshots"].append({"t": t, "path": str(path)})
    _write(cfg, io.dumps(manifest))
    return EXIT_OK


def cmd_selftest(args, cfg: RunConfig) -> int:
    acceptance.SEED = cfg.seed
    numbers = args.only or sorted(acceptance.CRITERIA)
    unknown = [n for n in numbers if n not in acceptance.CRITERIA]
    if unknown:
        raise UsageError(f"unknown criterion {unknown[0]}; choose from 1-{len(acceptance.CRITERIA)}")
    report = None if args.json else (lambda line: print(line, flush=True))
    results = acceptance.run_all(numbers, cfg.threads, report)
    passed = sum(r.passed for r in results)
    if args.json:
        _write(cfg, json.dumps({"schema": io.SCHEMA_TAG, "type": "selftest",
                                "results": [r.to_dict() for r in results]}))
    else:
        print(f"{passed}/{len(results)} criteria passed", flush=True)
    return EXIT_OK if passed == len(results) else EXIT_VALIDATION


# --- parser ------------------------------------------------------------------------------

def _io_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("-i", "--input", default="-", help="input document (default: stdin)")
    p.add_argument("-o", "--output", default="-", help="output file (default: stdout)")


def _tol_flags(p: argparse.ArgumentParser, *which: str) -> None:
    if "q" in which:
        p.add_argument("--tol-q", type=_finite_arg, help=f"quantum test tolerance (default {cl.TOL_Q})")
    if "c" in which:
        p.add_argument("--tol-c", type=_finite_arg, help=f"classical test tolerance (default {cl.TOL_C})")
    if "norm" in which:
        p.add_argument("--tol-norm", type=_finite_arg, help="reject input tomogram rows whose integral misses 1 by more")
    if "robertson" in which:
        p.add_argument("--tol-robertson", type=_finite_arg, help=f"Robertson slack (default {cl.ROBERTSON_TOL})")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=int, help="worker threads (default: available cores)")

    parser = _Parser(prog="qtomo", description="Symplectic, optical and spin tomography toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    state = sub.add_parser("state", help="build states").add_subparsers(dest="action", required=True,
                                                                        parser_class=_Parser)
    make = state.add_parser("make", parents=[common], help="emit a state document")
    make.add_argument("--kind", required=True,
                      choices=["fock", "coherent", "squeezed", "superposition",
                               "qubit", "triplet", "up-up", "x-x", "mixture"])
    make.add_argument("--n", type=int, default=0, help="Fock level")
    make.add_argument("--m", type=int, default=1, help="second Fock level for superpositions")
    make.add_argument("--p1", type=_finite_arg, default=0.5, help="weight of level n in superpositions")
    make.add_argument("--phase", type=_finite_arg, default=0.0, help="relative phase in superpositions")
    make.add_argument("--alpha", type=_complex_arg, default=1.0 + 0j, help='complex literal, e.g. "1.0+0.5i"')
    make.add_argument("--beta", type=_finite_arg, default=0.0, help="linear chirp of the squeezed Gaussian")
    make.add_argument("--bloch", type=_floats_arg, default=[0.0, 0.0, 1.0], help="qubit Bloch vector x,y,z")
    make.add_argument("--delta", type=_finite_arg, default=0.0, help="mixing angle of the two-qubit mixture")
    make.add_argument("--grid", type=_grid_arg, help="position grid MIN,MAX,COUNT (default -10,10,1024)")
    make.add_argument("--representation", choices=["wavefunction", "fock"], default="wavefunction")
    make.add_argument("--dim", type=int, help="Fock truncation (default 64)")
    make.add_argument("-o", "--output", default="-", help="output file (default: stdout)")
    make.set_defaults(func=cmd_state_make)

    tomo = sub.add_parser("tomogram", help="forward and inverse tomogram maps").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    fwd = tomo.add_parser("forward", parents=[common], help="state document to tomogram")
    _io_flags(fwd)
    fwd.add_argument("--angles", type=int, help="number of optical angles (default 180)")
    fwd.add_argument("--full-circle", action="store_true", help="sample [0, 2 pi) instead of [0, pi)")
    fwd.add_argument("--x-grid", type=_grid_arg, help="X grid MIN,MAX,COUNT (default -8,8,321)")
    fwd.add_argument("--symplectic", action="store_true",
                     help="sample the unit directions needed for density reconstruction")
    fwd.add_argument("--q-grid", type=_grid_arg, help="reconstruction grid for --symplectic (default -6,6,97)")
    fwd.add_argument("--grid", type=_grid_arg, help="position grid used for Fock-basis input")
    fwd.add_argument("--csv", action="store_true", help='emit CSV with header "X,theta,value"')
    fwd.set_defaults(func=cmd_tomogram_forward)

    rec = tomo.add_parser("reconstruct", parents=[common], help="tomogram to Wigner function or density")
    _io_flags(rec)
    rec.add_argument("--target", choices=["wigner", "density"], default="wigner")
    rec.add_argument("--phase-grid", type=_grid_arg, help="Wigner output grid MIN,MAX,COUNT")
    rec.add_argument("--q-grid", type=_grid_arg, help="density grid MIN,MAX,COUNT (default -6,6,97)")
    _tol_flags(rec, "norm")
    rec.add_argument("--csv", action="store_true", help='emit CSV with header "q,p,value"')
    rec.set_defaults(func=cmd_tomogram_reconstruct)

    cls = sub.add_parser("classify", parents=[common], help="quantum/classical domain verdict")
    _io_flags(cls)
    cls.add_argument("--q-grid", type=_grid_arg, help="density grid MIN,MAX,COUNT (default -6,6,97)")
    _tol_flags(cls, "q", "c", "norm")
    cls.set_defaults(func=cmd_classify)

    unc = sub.add_parser("uncertainty", parents=[common], help="uncertainty function and Robertson check")
    _io_flags(unc)
    _tol_flags(unc, "robertson", "norm")
    unc.add_argument("--csv", action="store_true", help='emit Phi(theta) as CSV with header "x,value"')
    unc.set_defaults(func=cmd_uncertainty)

    spin = sub.add_parser("spin", help="qubit tomography").add_subparsers(dest="action", required=True,
                                                                         parser_class=_Parser)
    stomo = spin.add_parser("tomogram", parents=[common], help="qubit density to spin tomogram")
    _io_flags(stomo)
    stomo.add_argument("--n-theta", type=int, default=32, help="Gauss-Legendre nodes in cos(theta)")
    stomo.add_argument("--n-phi", type=int, default=64, help="uniform nodes in phi")
    stomo.set_defaults(func=cmd_spin_tomogram)
    srec = spin.add_parser("reconstruct", parents=[common], help="spin tomogram to qubit density")
    _io_flags(srec)
    srec.set_defaults(func=cmd_spin_reconstruct)

    bell = sub.add_parser("bell", parents=[common], help="Bell number of a two-qubit state")
    _io_flags(bell)
    bell.add_argument("--state", choices=["triplet", "up-up", "x-x", "mixture"],
                      help="built-in state instead of an input document")
    bell.add_argument("--delta", type=_finite_arg, default=0.0, help="mixing angle for --state mixture")
    bell.add_argument("--maximize", action="store_true", help="maximize |B| over all eight angles")
    bell.add_argument("--angles", dest="bell_angles", type=_floats_arg,
                      help="theta_a,phi_a,theta_b,phi_b,theta_c,phi_c,theta_d,phi_d (default CHSH settings)")
    bell.set_defaults(func=cmd_bell)

    evo = sub.add_parser("evolve", parents=[common], help="evolve under a quadratic Hamiltonian")
    _io_flags(evo)
    evo.add_argument("--hamiltonian", choices=["harmonic", "free"], default="harmonic")
    evo.add_argument("--omega", type=_finite_arg, default=1.0)
    evo.add_argument("--times", type=_floats_arg, required=True, help="comma-separated times")
    evo.add_argument("--out-dir", help="write numbered snapshot files here")
    evo.add_argument("--phase-grid", type=_grid_arg, help="Wigner grid for density input")
    evo.set_defaults(func=cmd_evolve)

    self_ = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    self_.add_argument("--only", type=lambda s: [int(v) for v in s.split(",")], help="e.g. 1,4,12")
    self_.add_argument("--json", action="store_true", help="emit a JSON report")
    self_.add_argument("--seed", type=int, help=f"random seed for sampled checks (default {acceptance.SEED})")
    self_.add_argument("-o", "--output", default="-", help="output file for --json")
    self_.set_defaults(func=cmd_selftest)
    return parser


def _validate_args(args) -> None:
    if getattr(args, "bell_angles", None) is not None and len(args.bell_angles) != 8:
        raise UsageError("--angles needs eight values")
    if getattr(args, "times", None) is not None and not args.times:
        raise UsageError("--times needs at least one value")
    if getattr(args, "kind", None) == "superposition" and not 0 <= args.p1 <= 1:
        raise UsageError("--p1 must lie in [0, 1]")
    if getattr(args, "threads", None) is not None and args.threads < 1:
        raise UsageError("--threads must be positive")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate_args(args)
        return args.func(args, _config(args))
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except QtomoError as exc:
        print(f"qtomo: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except BrokenPipeError:
        # downstream closed early (e.g. head); silence the flush at exit
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK


def flag_reference() -> str:
    """Markdown listing of every subcommand's help text."""
    parser = build_parser()
    out = ["# qtomo command-line reference", ""]

    def walk(p: argparse.ArgumentParser, name: str):
        subs = [a for a in p._actions if isinstance(a, argparse._SubParsersAction)]
        if not subs:
            out.extend([f"## {name}", "", "```", p.format_help().rstrip(), "```", ""])
            return
        for action in subs:
            for child, cp in action.choices.items():
                walk(cp, f"{name} {child}")

    out.extend(["```", parser.format_help().rstrip(), "```", ""])
    walk(parser, "qtomo")
    return "\n".join(out)


if __name__ == "__main__":
    sys.exit(main())
