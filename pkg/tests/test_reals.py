"""
Tests for rigorous reals and certified continued fractions
"""

from fractions import Fraction

import gmpy2
import mpmath
import pytest

from flt_verify.arith.reals import (
    HighPrecReal,
    certified_continued_fraction,
    compare,
    continued_fraction,
    decide_less,
    highprec_log,
    highprec_sqrt,
    hp_log,
)
from flt_verify.errors import DomainError, PrecisionExhaustedError


def mp_fraction(x: mpmath.mpf) -> Fraction:
    man, exp = mpmath.mpf(x).man_exp
    return Fraction(int(man)) * Fraction(2) ** int(exp)


def encloses(value: HighPrecReal, reference: mpmath.mpf, slack_bits: int = 300) -> bool:
    ref = mp_fraction(reference)
    return abs(value.center - ref) <= value.radius + Fraction(1, 2**slack_bits)


@pytest.fixture(autouse=True)
def mp_precision() -> None:
    """Run mpmath oracles at 400 bits"""
    mpmath.mp.prec = 400


@pytest.mark.parametrize("x", [2, 3, Fraction(1, 7), 12, 10**12, Fraction(29009, 1000)])
def test_log_encloses_mpmath(x: Fraction) -> None:
    """Test log enclosures against mpmath"""
    value = highprec_log(x, 128)
    assert value.radius <= Fraction(1, 2**120)
    assert encloses(value, mpmath.log(mpmath.mpf(Fraction(x).numerator) / Fraction(x).denominator))


def test_log_edge_cases() -> None:
    """Test log(1) and invalid inputs"""
    assert highprec_log(1, 64).center == 0
    with pytest.raises(DomainError):
        highprec_log(0)
    with pytest.raises(DomainError):
        highprec_log(2, 8)


def test_sqrt() -> None:
    """Test square roots, exact and inexact"""
    assert highprec_sqrt(Fraction(9, 4), 64).center == Fraction(3, 2)
    assert highprec_sqrt(Fraction(9, 4), 64).radius == 0
    root2 = highprec_sqrt(2, 128)
    assert encloses(root2, mpmath.sqrt(2))
    assert root2.lower ** 2 <= 2 <= root2.upper ** 2


def test_interval_arithmetic() -> None:
    """Test that +, -, *, / keep the true value inside"""
    a = highprec_sqrt(2, 100)
    b = highprec_log(3, 100)
    assert encloses(a + b, mpmath.sqrt(2) + mpmath.log(3))
    assert encloses(a - b, mpmath.sqrt(2) - mpmath.log(3))
    assert encloses(a * b, mpmath.sqrt(2) * mpmath.log(3))
    assert encloses(a / b, mpmath.sqrt(2) / mpmath.log(3))
    assert encloses(3 - a, 3 - mpmath.sqrt(2))
    assert encloses(hp_log(a * 5, 100), mpmath.log(5 * mpmath.sqrt(2)))
    assert (a - a).sign() is None
    assert a.sign() == 1


def test_continued_fraction_exact() -> None:
    """Test the terminating expansion of the dyadic 13/8"""
    expansion = continued_fraction(HighPrecReal(13, -3, Fraction(0)), 10)
    assert expansion.terms == (1, 1, 1, 1, 2)
    assert expansion.exact
    assert expansion.convergent(4) == (13, 8)


def test_continued_fraction_of_rational_enclosure() -> None:
    """Test that a rounded 41/29 certifies its first four terms"""
    expansion = continued_fraction(HighPrecReal.from_number(Fraction(41, 29)), 4)
    assert expansion.certified
    assert expansion.terms == (1, 2, 2, 2)
    assert expansion.convergents == ((1, 1), (3, 2), (7, 5), (17, 12))


def test_continued_fraction_of_sqrt2() -> None:
    """Test that a 128-bit enclosure of sqrt(2) certifies 20 terms"""
    expansion = continued_fraction(highprec_sqrt(2, 128), 20)
    assert expansion.certified
    assert expansion.terms == (1,) + (2,) * 19


def test_certified_expansion_escalates() -> None:
    """Test that too few bits are doubled until the terms are certified"""
    expansion = certified_continued_fraction(lambda bits: highprec_sqrt(3, bits), 40, bits=32)
    assert expansion.certified
    assert expansion.terms[:5] == (1, 1, 2, 1, 2)


def test_compare() -> None:
    """Test rigorous comparisons and precision exhaustion"""
    assert compare(lambda b: highprec_log(2, b), Fraction(69, 100)) == 1
    assert compare(lambda b: highprec_log(2, b), Fraction(7, 10)) == -1
    assert decide_less(lambda b: highprec_sqrt(2, b), Fraction(1415, 1000))
    with pytest.raises(PrecisionExhaustedError):
        compare(lambda b: HighPrecReal.from_number(Fraction(1, 3), b), Fraction(1, 3), bits=32, max_bits=64)


LN10_50_DIGITS = Fraction("2.30258509299404568401799145468436420760110148862877")


def mpfr_log(x: int, rounding: int) -> Fraction:
    with gmpy2.context(precision=200, round=rounding):
        num, den = gmpy2.log(gmpy2.mpfr(x)).as_integer_ratio()
    return Fraction(int(num), int(den))


def test_log_endpoints_cover_directed_roundings() -> None:
    """Test that log(3) at 128 bits contains MPFR's 200-bit downward and upward roundings"""
    value = highprec_log(3, 128)
    lo, hi = mpfr_log(3, gmpy2.RoundDown), mpfr_log(3, gmpy2.RoundUp)
    assert lo < hi
    assert value.lower <= lo and hi <= value.upper


def test_log10_against_fifty_digits() -> None:
    """Test log(10) against its 50-digit decimal expansion"""
    value = highprec_log(10, 200)
    assert abs(value.center - LN10_50_DIGITS) < Fraction(1, 10**49)
    assert value.radius < Fraction(1, 10**50)


def test_interval_product_of_mixed_signs() -> None:
    """Test products and quotients of enclosures with opposite signs"""
    a = highprec_sqrt(2, 100) - 1
    b = highprec_log(Fraction(1, 3), 100)
    assert encloses(a * b, (mpmath.sqrt(2) - 1) * mpmath.log(mpmath.mpf(1) / 3))
    assert encloses(b / a, mpmath.log(mpmath.mpf(1) / 3) / (mpmath.sqrt(2) - 1))
    assert (a * b).sign() == -1


def test_convergent_determinant() -> None:
    """Test p_k q_(k-1) - p_(k-1) q_k = (-1)^(k-1) along a certified expansion"""
    x = highprec_log(3, 256) / highprec_log(2, 256)
    expansion = continued_fraction(x, 30)
    assert expansion.certified
    convergents = expansion.convergents
    for k in range(1, len(convergents)):
        (p, q), (p_prev, q_prev) = convergents[k], convergents[k - 1]
        assert p * q_prev - p_prev * q == (-1) ** (k - 1)
