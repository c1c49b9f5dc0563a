"""Takagi-Landsberg expansions of Holder functions, their fractional calculus,
and series solvers for two linear integral equations.

Submodules: ``dyadic`` (bases and expansions), ``fraccalc`` (fractional
integrals and derivatives), ``stieltjes`` (Young integrals), ``solvers``
(truncated systems), ``oracle`` (brute-force references) and ``cli``.
"""

from .dyadic import DyadicIndex, HolderExpansion, dyadic_grid, expand, expand_samples, takagi_landsberg
from .solvers import LinearRSProblem, VolterraProblem, solve_linear_rs, solve_volterra

__version__ = "0.1.0"

__all__ = [
    "DyadicIndex",
    "HolderExpansion",
    "LinearRSProblem",
    "VolterraProblem",
    "dyadic_grid",
    "expand",
    "expand_samples",
    "solve_linear_rs",
    "solve_volterra",
    "takagi_landsberg",
]
