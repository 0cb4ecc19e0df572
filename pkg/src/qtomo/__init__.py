"""Tomographic representations of quantum and classical states.

Symplectic and optical tomograms of oscillator states, their inversion to
density matrices and Wigner functions, quantum/classical domain tests,
qubit and two-qubit spin tomograms, Bell functionals and evolution under
quadratic Hamiltonians.
"""

from .classify import DomainVerdict, moment_report, robertson_check, uncertainty_function
from .dynamics import QuadraticHamiltonian, evolve_tomogram, evolve_wavefunction, evolve_wigner
from .entangle import BellAngles, BellResult, bell_number, maximize_bell
from .numerics import DEFAULT_GRID, GridLeakageWarning, QtomoError, Samples, UniformGrid
from .phase_space import WignerFunction, wigner_from_density, wigner_via_parity
from .spin import reconstruct_qubit, spin_tomogram_point, spin_uncertainty_matrix
from .states import (
    DensityMatrixGrid,
    FockDensityMatrix,
    WaveFunction,
    make_coherent,
    make_fock,
    make_squeezed_gaussian,
)
from .tomography import (
    ClassicalLineTomogram,
    FockLevelTomogram,
    OpticalTomogram,
    SymplecticTomogram,
    Tomogram,
    WavefunctionTomogram,
    reconstruct_density,
    reconstruct_wigner,
)

__version__ = "0.1.0"

__all__ = [
    "BellAngles", "BellResult", "ClassicalLineTomogram", "DEFAULT_GRID", "DensityMatrixGrid",
    "DomainVerdict", "FockDensityMatrix", "FockLevelTomogram", "GridLeakageWarning", "OpticalTomogram",
    "QtomoError", "QuadraticHamiltonian", "Samples", "SymplecticTomogram", "Tomogram", "UniformGrid",
    "WaveFunction", "WavefunctionTomogram", "WignerFunction", "bell_number",
    "evolve_tomogram", "evolve_wavefunction", "evolve_wigner", "make_coherent", "make_fock",
    "make_squeezed_gaussian", "maximize_bell", "moment_report", "reconstruct_density",
    "reconstruct_qubit", "reconstruct_wigner", "robertson_check", "spin_tomogram_point",
    "spin_uncertainty_matrix", "uncertainty_function", "wigner_from_density", "wigner_via_parity",
]
