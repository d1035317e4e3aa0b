"""
Fundamental units of real quadratic fields and the square-unit criterion modulo 16P
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

from .arith.integers import is_square, isqrt
from .constants import COMPCRIT_MODULUS_FACTOR
from .errors import CrossCheckError, DomainError
from .quadring import (
    QuadIdeal,
    QuadInt,
    QuadNumber,
    ResidueRing,
    Splitting,
    ord_prime,
    periodic_expansion,
    prime_above_2,
    validate_field_datum,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class FundamentalUnit:
    d: int
    epsilon: QuadInt
    norm: int
    cf_period: int


def fundamental_unit(d: int) -> FundamentalUnit:
    """
    Fundamental unit eps > 1 of Q(sqrt(d)) from one period of the continued fraction of omega.

    With L the period length and p/q the convergent before the period closes,
    eps = p - q * conj(omega).
    """
    validate_field_datum(d)
    if d < 2:
        raise DomainError(f"fundamental units need a real quadratic field, got d = {d}")
    p0, q0 = (1, 2) if d % 4 == 1 else (0, 1)
    expansion = periodic_expansion(d, p0, q0)
    period = len(expansion.period)
    p, q = list(expansion.convergents(period))[-1]
    if q0 == 2:
        eps = QuadInt(d, 2 * p - q, q)
    else:
        eps = QuadInt.of(d, p, q)
    norm = eps.norm()
    if norm not in (1, -1):
        raise CrossCheckError(f"convergent {p}/{q} of sqrt({d}) gave norm {norm}", stage="unit")
    logger.debug("fundamental unit of Q(sqrt(%d)) = %s (period %d)", d, eps, period)
    return FundamentalUnit(d=d, epsilon=eps, norm=norm, cf_period=period)


def verify_minimal_unit(d: int, bound: int) -> bool:
    """
    Check by direct search that no unit > 1 precedes the fundamental unit.

    Units (a + b*sqrt(d))/2 > 1 have a, b > 0 and a^2 - d*b^2 = +-4; the smallest b wins.
    The search runs over b <= bound.
    """
    eps = fundamental_unit(d).epsilon
    for b in range(1, min(bound, eps.b) + 1):
        for s in (-4, 4):
            a2 = d * b * b + s
            if a2 <= 0 or not is_square(a2):
                continue
            a = isqrt(a2)
            try:
                found = QuadInt(d, a, b)
            except DomainError:
                continue
            if found != eps:
                logger.warning("unit %s is smaller than %s", found, eps)
                return False
            return True
    return eps.b > bound


class CompCritReport(BaseModel):
    """Kernel of {+-1} x <eps> -> (O/16P)^x and whether it consists of squares"""

    d: int = Field(..., description="Squarefree field datum")
    applicable: bool = Field(..., description="Exactly one prime above 2")
    splitting: str = Field(..., description="Decomposition type of 2")
    modulus_norm: Optional[int] = Field(None, description="Norm of 16P")
    epsilon: Optional[str] = Field(None, description="Generator of V modulo +-1")
    epsilon_norm: Optional[int] = Field(None, description="Norm of the generator")
    epsilon_order_mod_16P: Optional[int] = Field(None, description="Order of eps in (O/16P)^x")
    minus_one_in_image: Optional[bool] = Field(None, description="-1 lies in the image of <eps>")
    U_generators: List[Tuple[int, int]] = Field(
        default_factory=list, description="Kernel generators as (sign, exponent): sign * eps^exponent"
    )
    all_squares: bool = Field(False, description="Every element of the kernel is a square of a unit")


def materialize(d: int, eps: QuadInt, generator: Tuple[int, int]) -> QuadInt:
    sign, exponent = generator
    return (eps**exponent) * sign


def compcrit_test(d: int, v_generator: Optional[QuadInt] = None) -> CompCritReport:
    """
    Square-unit test for a real quadratic field with a single prime P above 2.

    V = {+-1} x <v>; v defaults to the fundamental unit. A caller passing v_generator
    asserts that <v> has odd index in the unit group and is 2-saturated.
    """
    validate_field_datum(d)
    if d < 2:
        raise DomainError(f"the square-unit test needs a real quadratic field, got d = {d}")
    split = prime_above_2(d)
    if split.splitting is Splitting.SPLIT:
        return CompCritReport(d=d, applicable=False, splitting=split.splitting.value)

    eps = v_generator if v_generator is not None else fundamental_unit(d).epsilon
    if eps.d != d or eps.norm() not in (1, -1):
        raise DomainError(f"{eps} is not a unit of Q(sqrt({d}))")
    modulus = split.ideals[0].scale(COMPCRIT_MODULUS_FACTOR)
    ring = ResidueRing(modulus)
    m = ring.multiplicative_order(eps)
    minus_one = m % 2 == 0 and ring.equal(ring.power(eps, m // 2), -1)
    if minus_one:
        generator = (-1, m // 2)
        all_squares = False
    else:
        generator = (1, m)
        all_squares = m % 2 == 0

    if not ring.equal(materialize(d, eps, generator), 1):
        raise CrossCheckError(f"kernel generator {generator} is not 1 mod 16P", stage="compcrit")
    logger.debug("compcrit d=%d: order %d, -1 in image: %s", d, m, minus_one)
    return CompCritReport(
        d=d,
        applicable=True,
        splitting=split.splitting.value,
        modulus_norm=modulus.norm,
        epsilon=str(eps),
        epsilon_norm=eps.norm(),
        epsilon_order_mod_16P=m,
        minus_one_in_image=minus_one,
        U_generators=[generator],
        all_squares=all_squares,
    )


@dataclass(frozen=True, slots=True)
class DescentResult:
    lambda_prime: QuadNumber
    mu_prime: QuadNumber
    epsilon: QuadNumber
    ord_lambda: int
    ord_lambda_prime: int
    ord_mu_prime: int


def descend(
    lam: "QuadNumber | QuadInt",
    prime: QuadIdeal,
    eps: "QuadNumber | QuadInt | None" = None,
    require_s_unit: bool = True,
) -> DescentResult:
    """
    Replace an S-unit solution (lam, 1 - lam) with 1 - lam = eps^2 by
    lam' = (1 + eps)^2 / (1 - eps)^2 and mu' = -4*eps / (1 - eps)^2.

    Requires ord_P(lam) > 4*ord_P(2) and ord_P(1 - lam) = 0; then
    ord_P(lam') = 2*ord_P(lam) - 4*ord_P(2) and ord_P(mu') = 0.

    Args:
        lam: The element lambda
        prime: The prime P above 2
        eps: A square root of 1 - lam; found when omitted
        require_s_unit: Insist that lam and 1 - lam are S-units (off for synthetic inputs)
    """
    if isinstance(lam, QuadInt):
        lam = QuadNumber.from_int(lam)
    if isinstance(eps, QuadInt):
        eps = QuadNumber.from_int(eps)
    if lam.is_zero() or lam == QuadNumber.rational(lam.d, 1):
        raise DomainError("lambda must not be 0 or 1")
    mu = 1 - lam
    if require_s_unit and not (lam.is_s_unit() and mu.is_s_unit()):
        raise DomainError("(lambda, 1 - lambda) is not an S-unit solution")

    t = ord_prime(lam, prime)
    o2 = ord_prime(QuadInt.of(lam.d, 2), prime)
    if t <= 4 * o2:
        raise DomainError(f"ord_P(lambda) = {t} is not greater than 4*ord_P(2) = {4 * o2}")
    if ord_prime(mu, prime) != 0:
        raise DomainError(f"ord_P(1 - lambda) = {ord_prime(mu, prime)} is not 0")
    if eps is None:
        eps = mu.sqrt()
        if eps is None:
            raise DomainError("1 - lambda is not a square in the field")
    elif eps * eps != mu:
        raise DomainError("eps^2 differs from 1 - lambda")

    lam1, lam2 = 1 + eps, 1 - eps
    if ord_prime(lam1, prime) < ord_prime(lam2, prime):
        eps = -eps
        lam1, lam2 = lam2, lam1
    lam_p = (lam1 * lam1) / (lam2 * lam2)
    mu_p = (eps * -4) / (lam2 * lam2)

    if lam_p + mu_p != QuadNumber.rational(lam.d, 1):
        raise CrossCheckError("lambda' + mu' != 1", stage="descend")
    ord_lp = ord_prime(lam_p, prime)
    ord_mp = ord_prime(mu_p, prime)
    if ord_lp != 2 * t - 4 * o2 or ord_mp != 0:
        raise CrossCheckError(
            f"valuations ord(lambda') = {ord_lp}, ord(mu') = {ord_mp}; expected {2 * t - 4 * o2} and 0",
            stage="descend",
        )
    if require_s_unit and not (lam_p.is_s_unit() and mu_p.is_s_unit()):
        raise CrossCheckError("descended pair is not an S-unit solution", stage="descend")
    return DescentResult(
        lambda_prime=lam_p,
        mu_prime=mu_p,
        epsilon=eps,
        ord_lambda=t,
        ord_lambda_prime=ord_lp,
        ord_mu_prime=ord_mp,
    )
