"""Stationary Wigner functions of the Morse and Liouville potentials from
Mellin-space closed forms, with independent Schrodinger-side oracles."""

from .errors import (
    ContourError,
    ConvergenceError,
    DegenerateParameterError,
    DomainError,
    GammaPoleError,
    GridMismatchError,
    MorseError,
    NormalizationRequiredError,
    ResonanceError,
    SeriesDivergenceError,
    UnsupportedSourceError,
    WindowingRequiredError,
)
from .factors import FactorSolution, difference_residual, residual_report
from .field import WignerField
from .mellin import ContourSpec, wigner_field, wigner_point, wigner_x_derivative
from .model import MorseSystem, PhasePoint, SpectralLabel, bound_count, energy_of, u_of_x, v_of_x

__version__ = "0.1.0"

__all__ = [
    "ContourError", "ContourSpec", "ConvergenceError", "DegenerateParameterError", "DomainError",
    "FactorSolution", "GammaPoleError", "GridMismatchError", "MorseError", "MorseSystem",
    "NormalizationRequiredError", "PhasePoint", "ResonanceError", "SeriesDivergenceError",
    "SpectralLabel", "UnsupportedSourceError", "WignerField", "WindowingRequiredError",
    "bound_count", "difference_residual", "energy_of", "residual_report", "u_of_x", "v_of_x",
    "wigner_field", "wigner_point", "wigner_x_derivative",
]
