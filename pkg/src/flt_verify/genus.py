"""
Genus theory of quadratic fields: prime discriminants, 2-ranks and the (a)(b)(c) classification
"""

import logging
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

from .arith.integers import factor, is_prime, is_squarefree
from .arith.reals import HighPrecReal, compare, highprec_log
from .constants import (
    DEFAULT_PRECISION_BITS,
    ELL_MODULUS,
    ELL_RESIDUE,
    MAX_PRECISION_BITS,
    ODLYZKO_BASE,
    ODLYZKO_OFFSET,
)
from .errors import CrossCheckError, DomainError
from .formclass import conditions_abc_direct
from .quadring import ResidueRing, Splitting, periodic_expansion, prime_above_2, validate_field_datum
from .unitsq import compcrit_test

logger = logging.getLogger(__name__)

TWO_PARTS = (1, -4, 8, -8)


class ClassificationTag(str, Enum):
    UNRAMIFIED = "2-unramified"
    IMAGINARY_OUT_OF_SCOPE = "imaginary: FLT conclusion out of scope"
    IMAGINARY = "imaginary"
    SQRT2 = "Q(sqrt 2)"
    ELL_3_MOD_8 = "d in {l, 2l}, l = 3 mod 8"
    ELL_7_MOD_8 = "d in {l, 2l}, l = 7 mod 8"
    EVEN_CLASS_NUMBER = "h even"


class PrimeDiscFactorization(BaseModel):
    """Factorization of a fundamental discriminant into prime discriminants"""

    D: int = Field(..., description="Fundamental discriminant")
    factors: List[int] = Field(..., description="Prime discriminants, the 2-part (if any) first")
    t: int = Field(..., description="Number of prime discriminant factors")


class QuadFieldReport(BaseModel):
    """Closed-form evaluation of conditions (a)(b)(c) for Q(sqrt(d))"""

    d: int = Field(..., description="Squarefree field datum")
    D: int = Field(..., description="Fundamental discriminant")
    factors: List[int] = Field(..., description="Prime discriminant factors of D")
    two_rank_clplus: int = Field(..., description="2-rank of the narrow class group")
    two_rank_cl: int = Field(..., description="2-rank of the class group")
    cond_a: bool = Field(..., description="2 is (totally) ramified")
    cond_b: Optional[bool] = Field(
        None, description="2-part of h+ divides the order of [P]; None when P is not unique"
    )
    cond_c: bool = Field(..., description="The class number h is odd")
    classification_tag: ClassificationTag = Field(..., description="Which classification branch applies")
    eta: Optional[int] = Field(None, description="Sign of the norm of a generator of P, when defined")

    @property
    def all_hold(self) -> bool:
        return bool(self.cond_a and self.cond_b and self.cond_c)


def fundamental_discriminant(d: int) -> int:
    validate_field_datum(d)
    return d if d % 4 == 1 else 4 * d


def _odd_prime_discriminant(p: int) -> int:
    return p if p % 4 == 1 else -p


def is_fundamental(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def prime_disc_factorization(D: int) -> PrimeDiscFactorization:
    """Unique factorization of a fundamental discriminant into prime discriminants."""
    if not is_fundamental(D):
        raise DomainError(f"{D} is not a fundamental discriminant")
    odd = abs(D)
    while odd % 2 == 0:
        odd //= 2
    result = factor(odd)
    if not result.complete:
        raise DomainError(f"cannot factor the odd part of {D}")
    odd_factors = [_odd_prime_discriminant(p) for p, _ in result.factors]
    product = 1
    for f in odd_factors:
        product *= f
    two_part = D // product
    if two_part not in TWO_PARTS:
        raise CrossCheckError(f"2-part {two_part} of {D} is not a prime discriminant", stage="genus")
    factors = ([two_part] if two_part != 1 else []) + odd_factors
    return PrimeDiscFactorization(D=D, factors=factors, t=len(factors))


def two_ranks(D: int) -> Tuple[int, int]:
    """(2-rank of Cl+, 2-rank of Cl) from the number of prime discriminant factors."""
    fact = prime_disc_factorization(D)
    rank_plus = fact.t - 1
    if D < 0 or all(f > 0 for f in fact.factors):
        return rank_plus, rank_plus
    return rank_plus, fact.t - 2


def _d_is_ell_or_2ell(d: int) -> Optional[int]:
    ell = d // 2 if d % 2 == 0 else d
    if ell > 2 and ell % 4 == 3 and is_prime(ell):
        return ell
    return None


def eta_sign(d: int) -> int:
    """
    Sign eta with a^2 - d*b^2 = 2*eta for some integers a, b.

    The representation is looked up among the convergents of sqrt(d) over one
    period plus one term. d = 2 is settled by sqrt(2) itself.
    """
    if d == 2:
        return -1
    if _d_is_ell_or_2ell(d) is None:
        raise DomainError(f"eta is defined for d = l or 2l with l prime = 3 mod 4, got {d}")
    expansion = periodic_expansion(d)
    count = len(expansion.period) + 2
    for p, q in expansion.convergents(count):
        n = p * p - d * q * q
        if n in (2, -2):
            logger.debug("eta(%d): %d^2 - %d*%d^2 = %d", d, p, d, q, n)
            return n // 2
    raise CrossCheckError(f"no element of norm +-2 among the convergents of sqrt({d})", stage="eta")


def _cond_b_real(d: int, fact: PrimeDiscFactorization, rank_cl: int, eta: Optional[int]) -> bool:
    if fact.t == 1:
        return True
    if fact.t >= 3:
        # [P]^2 = (2) is narrowly principal while 4 divides h+
        return False
    if rank_cl == 0:
        if eta is None:
            raise CrossCheckError(f"eta missing for d = {d} with odd class number", stage="genus")
        return eta == -1
    # D = 8p with p = 1 mod 4: the genus character at p decides whether [P] is a square
    p = d // 2
    return p % 8 == 5


def classify_conditions(d: int) -> QuadFieldReport:
    """
    Evaluate conditions (a)(b)(c) by the genus-theory closed forms.

    For ramified real fields they hold together exactly when d = 2 or d is l or 2l
    with l prime congruent to 3 mod 8.
    """
    D = fundamental_discriminant(d)
    fact = prime_disc_factorization(D)
    rank_plus, rank_cl = two_ranks(D)
    cond_a = d % 4 != 1
    cond_c = rank_cl == 0

    if not cond_a:
        tag = ClassificationTag.UNRAMIFIED
        return QuadFieldReport(
            d=d, D=D, factors=fact.factors, two_rank_clplus=rank_plus, two_rank_cl=rank_cl,
            cond_a=False, cond_b=None, cond_c=cond_c, classification_tag=tag, eta=None,
        )

    if d < 0:
        tag = ClassificationTag.IMAGINARY_OUT_OF_SCOPE if d in (-1, -2) else ClassificationTag.IMAGINARY
        return QuadFieldReport(
            d=d, D=D, factors=fact.factors, two_rank_clplus=rank_plus, two_rank_cl=rank_cl,
            cond_a=True, cond_b=True if fact.t == 1 else None, cond_c=cond_c,
            classification_tag=tag, eta=None,
        )

    eta = eta_sign(d) if cond_c else None
    ell = _d_is_ell_or_2ell(d)
    if eta is not None and ell is not None and (eta == -1) != (ell % 8 == 3):
        raise CrossCheckError(f"eta({d}) = {eta} contradicts l = {ell} mod 8", stage="eta")
    cond_b = _cond_b_real(d, fact, rank_cl, eta)

    if d == 2:
        tag = ClassificationTag.SQRT2
    elif cond_c and ell is not None:
        tag = ClassificationTag.ELL_3_MOD_8 if ell % 8 == 3 else ClassificationTag.ELL_7_MOD_8
    else:
        tag = ClassificationTag.EVEN_CLASS_NUMBER
    return QuadFieldReport(
        d=d, D=D, factors=fact.factors, two_rank_clplus=rank_plus, two_rank_cl=rank_cl,
        cond_a=True, cond_b=cond_b, cond_c=cond_c, classification_tag=tag, eta=eta,
    )


def narrow_odd_ramified_real(dmax: int) -> List[int]:
    """Real d <= dmax with 2 ramified and h+ odd; only d = 2 can appear."""
    out = []
    for d in range(2, dmax + 1):
        if d % 4 == 1 or not is_squarefree(d):
            continue
        if prime_disc_factorization(fundamental_discriminant(d)).t == 1:
            out.append(d)
    return out


def odlyzko_max_degree(
    disc_bound: "int | Fraction",
    bits: int = DEFAULT_PRECISION_BITS,
    max_bits: int = MAX_PRECISION_BITS,
) -> int:
    """Largest n with base^n * exp(-offset) < disc_bound, decided on rigorous enclosures."""
    disc_bound = Fraction(disc_bound)
    if disc_bound <= 0:
        raise DomainError("discriminant bound must be positive")

    def below(n: int) -> bool:
        def make(b: int) -> HighPrecReal:
            return highprec_log(ODLYZKO_BASE, b) * n - highprec_log(disc_bound, b)

        return compare(make, ODLYZKO_OFFSET, bits, max_bits) < 0

    n = 0
    if not below(0):
        return 0
    while below(n + 1):
        n += 1
    return n


class RayClassReport(BaseModel):
    """Parity data for the ray class groups modulo P^2 of Q(sqrt(l))"""

    ell: int = Field(..., description="Prime l = 1 mod 24")
    class_number_odd: bool = Field(..., description="h is odd (genus theory, t = 1)")
    unit_group_orders: List[int] = Field(..., description="|(O/P^2)^x| for each prime P above 2")
    minus_one_generates: bool = Field(..., description="-1 generates (O/P^2)^x for both primes")
    ray_class_number_odd: bool = Field(..., description="Both ray class numbers modulo P^2 are odd")


def ray_class_check(ell: int) -> RayClassReport:
    """Check that the ray class numbers of Q(sqrt(l)) modulo the squares of the primes above 2 are odd."""
    if not is_prime(ell) or ell % ELL_MODULUS != ELL_RESIDUE:
        raise DomainError(f"{ell} is not a prime congruent to {ELL_RESIDUE} mod {ELL_MODULUS}")
    _, rank_cl = two_ranks(fundamental_discriminant(ell))
    split = prime_above_2(ell)
    if split.splitting is not Splitting.SPLIT:
        raise CrossCheckError(f"2 does not split in Q(sqrt({ell}))", stage="ray-class")
    orders = []
    generates = True
    for prime in split.ideals:
        ring = ResidueRing(prime**2)
        order = ring.unit_group_order()
        orders.append(order)
        minus_one_order = ring.multiplicative_order(ring.reduce(-1))
        generates = generates and minus_one_order == order
    return RayClassReport(
        ell=ell,
        class_number_odd=rank_cl == 0,
        unit_group_orders=orders,
        minus_one_generates=generates,
        ray_class_number_odd=rank_cl == 0 and generates,
    )


class CompareCounts(BaseModel):
    """Counts of real quadratic fields with 2 ramified, by which criterion applies"""

    dmax: int = Field(..., description="Largest squarefree d scanned")
    total: int = Field(..., description="Fields with 2 ramified")
    h_plus_odd: int = Field(..., description="h+ is odd")
    b_and_h_odd: int = Field(..., description="Condition (b) holds and h is odd")
    b_holds: int = Field(..., description="Condition (b) holds")
    units_square: int = Field(..., description="Every unit congruent to 1 mod 16P is a square")


def compare_sets(dmax: int) -> CompareCounts:
    """Tally the nested criterion sets over ramified real quadratic fields with d <= dmax."""
    counts = dict(total=0, h_plus_odd=0, b_and_h_odd=0, b_holds=0, units_square=0)
    for d in range(2, dmax + 1):
        if d % 4 == 1 or not is_squarefree(d):
            continue
        direct = conditions_abc_direct(d)
        counts["total"] += 1
        counts["h_plus_odd"] += direct.h_plus % 2
        counts["b_holds"] += bool(direct.cond_b)
        counts["b_and_h_odd"] += bool(direct.cond_b and direct.cond_c)
        counts["units_square"] += compcrit_test(d).all_squares
        logger.debug("compare_sets: d = %d done", d)
    return CompareCounts(dmax=dmax, **counts)


__all__ = [
    "ClassificationTag",
    "CompareCounts",
    "PrimeDiscFactorization",
    "QuadFieldReport",
    "RayClassReport",
    "classify_conditions",
    "compare_sets",
    "eta_sign",
    "fundamental_discriminant",
    "is_fundamental",
    "narrow_odd_ramified_real",
    "odlyzko_max_degree",
    "prime_disc_factorization",
    "ray_class_check",
    "two_ranks",
]
