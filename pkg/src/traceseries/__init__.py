"""Exact Poincare series of pure and mixed trace rings over block matrix algebras."""

from .exactpoly import Monomial, Polynomial, RationalSeries, TruncatedSeries, VarId, t, z
from .molien import block_repeat_series, build_integrand, evaluate, poincare_series
from .quiver import BlockStructure
from .schur import Partition, schur_eval

__all__ = [
    "BlockStructure", "Monomial", "Partition", "Polynomial", "RationalSeries", "TruncatedSeries", "VarId",
    "block_repeat_series", "build_integrand", "evaluate", "poincare_series", "schur_eval", "t", "z",
]
__version__ = "0.1.0"
