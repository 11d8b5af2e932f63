"""Exception types raised across the package."""


class ParameterDomainError(ValueError):
    """A model parameter or argument lies outside its admissible domain."""


class UnsupportedRepresentation(TypeError):
    """The subordinator model lacks the representation an operation needs."""


class NumericalFailure(RuntimeError):
    """A numerical routine missed its accuracy target.

    ``estimate`` holds the achieved error estimate, when one exists.
    """

    def __init__(self, message, estimate=None, stage=None):
        super().__init__(message)
        self.estimate = estimate
        self.stage = stage


class BracketNotFound(ValueError):
    """A profile never crosses the requested epsilon levels."""


class LevelNotAttained(ValueError):
    """The requested front level is not bracketed by the search interval."""


class FitDegenerate(ValueError):
    """A scaling fit was asked to fit a trace with no variation."""


class CapExceeded(RuntimeError):
    """A simulated path did not cross its level within the step cap."""
