"""
Discriminants of the cubics X^3 + aX^2 + (eta1*2^n - 1 + eta2 - a)X - eta2
"""

import logging
from itertools import product
from typing import Any, List, Tuple

from pydantic import BaseModel, Field

from .arith.poly import BigPoly
from .errors import CrossCheckError, DomainError

logger = logging.getLogger(__name__)

# (a0, n0, eta1, eta2) with discriminant divisible by 3
ZERO_CASES = ((0, 0, -1, -1), (0, 1, 1, -1))

IDENTITY_RANGE = range(-1000, 1001)


class CubicCase(BaseModel):
    a0: int = Field(..., description="a mod 3")
    n0: int = Field(..., description="n mod 2")
    eta1: int = Field(..., description="Sign of 2^n")
    eta2: int = Field(..., description="Minus the constant term")
    delta_mod3: int = Field(..., description="Discriminant mod 3")

    @property
    def key(self) -> Tuple[int, int, int, int]:
        return self.a0, self.n0, self.eta1, self.eta2


def _check_signs(eta1: int, eta2: int) -> None:
    if eta1 not in (1, -1) or eta2 not in (1, -1):
        raise DomainError(f"eta1, eta2 must be +1 or -1, got {eta1}, {eta2}")


def cubic_coefficients(a: int, n: int, eta1: int, eta2: int) -> Tuple[int, int, int]:
    """(a, b, c) for X^3 + aX^2 + bX + c."""
    _check_signs(eta1, eta2)
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    return a, eta1 * 2**n - 1 + eta2 - a, -eta2


def cubic_poly(a: int, n: int, eta1: int, eta2: int) -> BigPoly:
    a, b, c = cubic_coefficients(a, n, eta1, eta2)
    return BigPoly((c, b, a, 1))


def _disc_formula(a: Any, b: Any, c: Any) -> Any:
    return 18 * a * b * c - 4 * a**3 * c + a**2 * b**2 - 4 * b**3 - 27 * c**2


def cubic_disc(a: int, n: int, eta1: int, eta2: int) -> int:
    """Discriminant of X^3 + aX^2 + (eta1*2^n - 1 + eta2 - a)X - eta2."""
    return int(_disc_formula(*cubic_coefficients(a, n, eta1, eta2)))


def mod3_table() -> List[CubicCase]:
    """
    The 24 residue classes (a mod 3, n mod 2, eta1, eta2) with their discriminant mod 3.

    Since 2^n mod 3 only depends on n mod 2, the representatives a0 in {0,1,2},
    n0 in {0,1} cover every case. Exactly two classes have 3 | disc.
    """
    table = [
        CubicCase(a0=a0, n0=n0, eta1=e1, eta2=e2, delta_mod3=cubic_disc(a0, n0, e1, e2) % 3)
        for a0, n0, e1, e2 in product(range(3), range(2), (1, -1), (1, -1))
    ]
    zeros = tuple(sorted(case.key for case in table if case.delta_mod3 == 0))
    if zeros != tuple(sorted(ZERO_CASES)):
        raise CrossCheckError(f"classes with 3 | disc are {zeros}", stage="cubic")
    return table


def case_of(a: int, n: int, eta1: int, eta2: int) -> Tuple[int, int, int, int]:
    return a % 3, n % 2, eta1, eta2


def caseII_identity() -> bool:
    """
    Check disc(X^3 + aX^2 - (a+3)X + 1) = (a^2 + 3a + 9)^2.

    Symbolically, as polynomials in a, and numerically through cubic_disc with
    n = 0, eta1 = eta2 = -1 for a in [-1000, 1000].
    """
    a = BigPoly.x()
    lhs = _disc_formula(a, -(a + 3), BigPoly.constant(1))
    rhs = (a * a + a * 3 + 9) ** 2
    if lhs != rhs:
        raise CrossCheckError(f"disc is {lhs}, expected {rhs}", stage="cubic")
    for value in IDENTITY_RANGE:
        if cubic_disc(value, 0, -1, -1) != (value * value + 3 * value + 9) ** 2:
            raise CrossCheckError(f"identity fails at a = {value}", stage="cubic")
    logger.debug("case II discriminant identity holds")
    return True
