"""Simulation and verification toolkit for unitary purification bounds."""

__version__ = "0.1.0"

from purelab.errors import (
    BoundViolationError,
    DomainError,
    NonConvergenceError,
    PurelabError,
    ValidationError,
)
from purelab.spectra import (
    JointSpectrum,
    QubitSpectrum,
    Spectrum,
    generalized_polarization,
    joint_spectrum,
    polarization_of_qubit,
    qubit_from_polarization,
    sort_descending,
)

__all__ = [
    "__version__",
    "BoundViolationError",
    "DomainError",
    "NonConvergenceError",
    "PurelabError",
    "ValidationError",
    "JointSpectrum",
    "QubitSpectrum",
    "Spectrum",
    "generalized_polarization",
    "joint_spectrum",
    "polarization_of_qubit",
    "qubit_from_polarization",
    "sort_descending",
]
