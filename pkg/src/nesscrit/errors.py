"""Exception hierarchy shared by all modules."""


class NessError(Exception):
    """Base class for every error raised by the package."""


class ModelValidationError(NessError, ValueError):
    """A model, generator or config violates one of its invariants."""


class ModelTooSmallError(ModelValidationError):
    """Generator span exceeds the number of sites of a finite chain."""


class UnsupportedGeneratorError(NessError, ValueError):
    """The operation is restricted to generators with odd Majorana couplings only."""


class NumericalError(NessError, RuntimeError):
    """A numerical routine did not reach its target accuracy."""


class DegenerateSteadyStateError(NumericalError):
    """The Sylvester operator is singular, so the steady state is not unique.

    ``pair`` holds the two eigenvalues of X whose sum vanishes.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class IntegrationError(NumericalError):
    """Time integration of the correlation-matrix ODE failed."""


class QuadratureToleranceError(NumericalError):
    """Periodic quadrature did not converge; ``achieved`` holds the last error estimate."""

    def __init__(self, message, achieved=None, profile=None):
        super().__init__(message)
        self.achieved = achieved
        self.profile = profile


class CriticalityError(NumericalError):
    """A pole sits on the unit circle, so residue correlations are undefined."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NoSolutionError(NumericalError):
    """The linear criticality system is inconsistent."""


class IllConditionedError(NumericalError):
    """A rank or dimension estimate changed under a small perturbation."""


class FitWindowError(NessError, ValueError):
    """Too few usable points inside the requested fit window."""


class DegenerateGeneratorError(NumericalError):
    """All moment conditions vanish, so the generator's symbol is identically zero."""
