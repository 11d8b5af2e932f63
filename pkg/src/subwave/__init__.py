"""Subordinated traveling waves and their long-time front laws.

Submodules
----------
specfun        Mittag-Leffler, M-Wright and E1 evaluators.
laplace        Talbot / de Hoog inversion, forward transforms, Tauberian values.
subordinators  Kernel models, inverse-subordinator densities and survivals.
waves          Wave profiles, subordination, Cesaro means, fronts.
asymptotics    Front laws for classes C1-C3, fits and two-sided checks.
montecarlo     Path simulation of the inverse subordinator.
gfd            General fractional derivatives on time grids.
experiment     Config schema and pipelines used by the ``subwave`` command.
"""
__version__ = "0.1.0"

from .errors import (BracketNotFound, CapExceeded, FitDegenerate, LevelNotAttained,
                     NumericalFailure, ParameterDomainError, UnsupportedRepresentation)
from .subordinators import (DistributedOrder, GammaSubordinator, KernelClass,
                            LaplaceSymbolOnly, Stable, Weight, density_G, survival_E)
from .waves import WaveProfile, cesaro_wave, front_trace, subordinate

__all__ = [
    "__version__",
    "BracketNotFound", "CapExceeded", "FitDegenerate", "LevelNotAttained",
    "NumericalFailure", "ParameterDomainError", "UnsupportedRepresentation",
    "DistributedOrder", "GammaSubordinator", "KernelClass", "LaplaceSymbolOnly",
    "Stable", "Weight", "density_G", "survival_E",
    "WaveProfile", "cesaro_wave", "front_trace", "subordinate",
]
