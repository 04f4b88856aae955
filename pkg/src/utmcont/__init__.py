"""UTM solvers for linear IBVPs with analytic continuation beyond the domain."""

from .expr import Expression, DerivativeCache, parse

__version__ = "0.1.0"

__all__ = ["Expression", "DerivativeCache", "parse", "__version__"]
