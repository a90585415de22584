"""Exception and warning taxonomy shared across the package.

Exit-code mapping for the command line front end lives in ``spectran.cli``;
library code raises these types and never calls ``sys.exit``.
"""


class SpectranError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(SpectranError, ValueError):
    """An argument violates a documented precondition."""


class ValidationError(SpectranError, ValueError):
    """Input data (tabulated potential, config file) failed validation."""


class ConfigError(SpectranError, ValueError):
    """A run configuration is malformed, incomplete, or inconsistent."""


class ResourceError(SpectranError):
    """A requested computation exceeds the configured resource caps."""


class ResolutionError(SpectranError):
    """Grid spacing too coarse to resolve the potential (strict mode only)."""


class SolverError(SpectranError):
    """A direct eigensolver failed."""


class ConvergenceError(SpectranError):
    """An iterative computation did not reach the requested accuracy."""


class AccuracyError(SpectranError):
    """A quadrature or extrapolation cannot certify the requested accuracy."""


class DomainError(SpectranError):
    """The requested quantity is undefined or unreachable for these inputs."""


class BracketingError(SpectranError):
    """Root bracketing failed within the allowed search interval."""


class SearchError(SpectranError):
    """A parameter scan exhausted its range without meeting its goal."""


class RegimeError(SpectranError):
    """Operation invoked outside the spectral regime it is defined for."""


class ResolutionWarning(UserWarning):
    """Grid spacing is coarser than the potential channel it must resolve."""


class NearThresholdWarning(UserWarning):
    """Eigenvalues inside the discretization margin of the continuum edge were excluded."""
