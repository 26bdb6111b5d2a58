"""Laguerre-type 2x2 matrix differential operators on (0, inf).

Operators ``D = t I d^2 + (C - t U) d - V``, their symmetric matrix
weights, the monic matrix orthogonal polynomials they share, and a
classifier reducing an arbitrary ``(C, U, V)`` to a canonical family.
"""

from .classify import Classification
from .mops import MOPSequence, build_by_moments, build_by_recursion, favard_check
from .operators import LagOperator, MatPoly, family1, family2, family3
from .weights import WeightSpec

__all__ = [
    "Classification",
    "LagOperator",
    "MOPSequence",
    "MatPoly",
    "WeightSpec",
    "build_by_moments",
    "build_by_recursion",
    "family1",
    "family2",
    "family3",
    "favard_check",
]
