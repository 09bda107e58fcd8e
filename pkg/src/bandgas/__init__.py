"""bandgas: almost-Hermitian random matrix ensembles and bandlimited point
processes -- finite-N kernels, limiting densities, cross-sections, Ward
checks, Monte Carlo sampling and a data-emitting CLI."""

__version__ = "0.1.0"

from .geometry import EnsembleSpec, EllipticDroplet, EquilibriumLaw  # noqa: F401
from .specfun import ScaledComplex, SpecialFunctionResult  # noqa: F401
