"""
Exact integer, polynomial and rigorous real arithmetic
"""

from .integers import (
    FactorResult,
    PrimeSquareSplit,
    SplitStatus,
    divisors,
    extended_gcd,
    factor,
    is_prime,
    is_square,
    is_squarefree,
    isqrt,
    ord2,
    prime_times_square,
    valuation,
)
from .poly import (
    BigPoly,
    NewtonPolygon,
    NewtonSegment,
    SturmReport,
    discriminant,
    newton_polygon,
    newton_polygon_2adic,
    resultant,
    sturm_real_roots,
)
from .reals import (
    CFExpansion,
    HighPrecReal,
    certified_continued_fraction,
    compare,
    continued_fraction,
    decide_less,
    highprec_log,
    highprec_sqrt,
    hp_log,
)

__all__ = [
    "BigPoly",
    "CFExpansion",
    "FactorResult",
    "HighPrecReal",
    "NewtonPolygon",
    "NewtonSegment",
    "PrimeSquareSplit",
    "SplitStatus",
    "SturmReport",
    "certified_continued_fraction",
    "compare",
    "continued_fraction",
    "decide_less",
    "discriminant",
    "divisors",
    "extended_gcd",
    "factor",
    "highprec_log",
    "highprec_sqrt",
    "hp_log",
    "is_prime",
    "is_square",
    "is_squarefree",
    "isqrt",
    "newton_polygon",
    "newton_polygon_2adic",
    "ord2",
    "prime_times_square",
    "resultant",
    "sturm_real_roots",
    "valuation",
]
