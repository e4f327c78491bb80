"""Exception hierarchy shared by all modules."""


class MorseError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MorseError, ValueError):
    """An argument lies outside the domain of the operation."""


class GammaPoleError(DomainError):
    """A Gamma-function argument sits on (or too close to) a pole."""

    def __init__(self, n, message=None):
        self.n = int(n)
        super().__init__(message or f"Gamma pole at non-positive integer {self.n}")


class DegenerateParameterError(DomainError):
    """Parameters hit a degenerate configuration of a closed formula."""


class ResonanceError(DegenerateParameterError):
    """Scattering wavenumber with 2ik/alpha an integer."""


class ConvergenceError(MorseError, ArithmeticError):
    """A series or quadrature failed to reach its tolerance."""


class SeriesDivergenceError(ConvergenceError):
    """A series was detected to diverge."""


class ContourError(MorseError):
    """The Mellin inversion contour is invalid or its truncation failed."""


class WindowingRequiredError(MorseError):
    """A Wigner-transform integrand does not decay and no window was given."""


class NormalizationRequiredError(MorseError):
    """Operation needs a normalized field."""


class GridMismatchError(MorseError, ValueError):
    """Fields combined on different grids."""


class UnsupportedSourceError(MorseError):
    """Requested field source cannot provide the requested quantity."""
