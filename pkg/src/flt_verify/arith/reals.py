"""
Rigorous fixed-point reals: logarithms, square roots, certified continued fractions

Interval endpoints are rounded outward by MPFR (gmpy2) under RoundDown/RoundUp
contexts, then stored as a dyadic center with an exact rational radius.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, List, Optional, Tuple, Union

import gmpy2

from ..constants import DEFAULT_PRECISION_BITS, MAX_PRECISION_BITS, MIN_PRECISION_BITS
from ..errors import DomainError, PrecisionExhaustedError

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]

# radius is rounded up to this many bits past the working precision
_RADIUS_GUARD = 8
# MPFR precision beyond the integer part and the requested fractional bits
_MPFR_GUARD = 16


def _dyadic(mantissa: int, exponent: int) -> Fraction:
    if exponent >= 0:
        return Fraction(mantissa << exponent)
    return Fraction(mantissa, 1 << -exponent)


def _round_up_radius(radius: Fraction, bits: int) -> Fraction:
    scale = 1 << (bits + _RADIUS_GUARD)
    return Fraction(-((-radius.numerator * scale) // radius.denominator), scale)


def _int_bits(x: Fraction) -> int:
    return (abs(x.numerator) // x.denominator).bit_length()


def _to_fraction(value: Any) -> Fraction:
    num, den = value.as_integer_ratio()
    return Fraction(int(num), int(den))


def _directed(
    x: Fraction, rounding: Any, precision: int, fn: Optional[Callable[[Any], Any]] = None
) -> Fraction:
    """fn(x) (or x itself) rounded by MPFR in the given direction, as an exact rational."""
    with gmpy2.context(precision=precision, round=rounding):
        value = gmpy2.mpfr(gmpy2.mpq(x.numerator, x.denominator))
        if fn is not None:
            value = fn(value)
    return _to_fraction(value)


@dataclass(frozen=True, slots=True)
class HighPrecReal:
    """The interval mantissa * 2^exponent +/- radius; the true value always lies inside."""

    mantissa: int
    exponent: int
    radius: Fraction

    @classmethod
    def enclose(cls, center: Fraction, radius: Fraction, bits: int) -> "HighPrecReal":
        """Round center to `bits` fractional bits, widening the radius to cover the rounding."""
        scaled = center * (1 << bits)
        m = math.floor(scaled + Fraction(1, 2))
        err = abs(center - _dyadic(m, -bits))
        return cls(m, -bits, _round_up_radius(radius + err, bits))

    @classmethod
    def from_bounds(cls, lower: Fraction, upper: Fraction, bits: int) -> "HighPrecReal":
        """Enclose [lower, upper] after rounding it outward to MPFR numbers."""
        precision = bits + _MPFR_GUARD + max(_int_bits(lower), _int_bits(upper))
        lo = _directed(lower, gmpy2.RoundDown, precision)
        hi = _directed(upper, gmpy2.RoundUp, precision)
        return cls.enclose((lo + hi) / 2, (hi - lo) / 2, bits)

    @classmethod
    def from_number(cls, x: Number, bits: int = DEFAULT_PRECISION_BITS) -> "HighPrecReal":
        return cls.enclose(Fraction(x), Fraction(0), bits)

    @property
    def bits(self) -> int:
        return max(-self.exponent, 0)

    @property
    def center(self) -> Fraction:
        return _dyadic(self.mantissa, self.exponent)

    @property
    def lower(self) -> Fraction:
        return self.center - self.radius

    @property
    def upper(self) -> Fraction:
        return self.center + self.radius

    def contains(self, x: Number) -> bool:
        return self.lower <= x <= self.upper

    def sign(self) -> Optional[int]:
        """+1 or -1 when the whole interval lies on one side of zero, else None."""
        if self.lower > 0:
            return 1
        if self.upper < 0:
            return -1
        return None

    def __float__(self) -> float:
        return float(self.center)

    def _coerce(self, other: "HighPrecReal | Number") -> "HighPrecReal":
        if isinstance(other, HighPrecReal):
            return other
        return HighPrecReal.from_number(other, self.bits)

    def __add__(self, other: "HighPrecReal | Number") -> "HighPrecReal":
        o = self._coerce(other)
        bits = max(self.bits, o.bits)
        return HighPrecReal.from_bounds(self.lower + o.lower, self.upper + o.upper, bits)

    __radd__ = __add__

    def __neg__(self) -> "HighPrecReal":
        return HighPrecReal(-self.mantissa, self.exponent, self.radius)

    def __sub__(self, other: "HighPrecReal | Number") -> "HighPrecReal":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Number) -> "HighPrecReal":
        return self._coerce(other) - self

    def __mul__(self, other: "HighPrecReal | Number") -> "HighPrecReal":
        o = self._coerce(other)
        products = [a * b for a in (self.lower, self.upper) for b in (o.lower, o.upper)]
        return HighPrecReal.from_bounds(min(products), max(products), max(self.bits, o.bits))

    __rmul__ = __mul__

    def __truediv__(self, other: "HighPrecReal | Number") -> "HighPrecReal":
        o = self._coerce(other)
        if o.sign() is None:
            raise DomainError("division by an enclosure containing zero")
        quotients = [a / b for a in (self.lower, self.upper) for b in (o.lower, o.upper)]
        return HighPrecReal.from_bounds(min(quotients), max(quotients), max(self.bits, o.bits))

    def __rtruediv__(self, other: Number) -> "HighPrecReal":
        return self._coerce(other) / self

    def __str__(self) -> str:
        return f"{float(self.center):.15g} +/- {float(self.radius):.3g}"


def _check_bits(bits: int) -> None:
    if bits < MIN_PRECISION_BITS:
        raise DomainError(f"precision must be at least {MIN_PRECISION_BITS} bits, got {bits}")


def _log_precision(x: Fraction, bits: int) -> int:
    # |log x| < (bit length of num or den + 1) * log 2
    size = max(x.numerator.bit_length(), x.denominator.bit_length()) + 1
    return bits + _MPFR_GUARD + size.bit_length()


def highprec_log(x: Number, bits: int = DEFAULT_PRECISION_BITS) -> HighPrecReal:
    """
    Natural logarithm of a positive rational with error radius <= 2^-bits.

    Args:
        x: Positive rational
        bits: Target precision

    Returns:
        Enclosure of log(x)
    """
    x = Fraction(x)
    if x <= 0:
        raise DomainError(f"log of non-positive number {x}")
    _check_bits(bits)
    if x == 1:
        return HighPrecReal(0, -bits, Fraction(0))
    precision = _log_precision(x, bits)
    lo = _directed(x, gmpy2.RoundDown, precision, gmpy2.log)
    hi = _directed(x, gmpy2.RoundUp, precision, gmpy2.log)
    return HighPrecReal.from_bounds(lo, hi, bits)


def hp_log(x: HighPrecReal, bits: Optional[int] = None) -> HighPrecReal:
    """Log of an enclosure, from the logs of its endpoints."""
    bits = bits or x.bits
    if x.lower <= 0:
        raise DomainError("log of an enclosure that is not strictly positive")
    precision = max(_log_precision(x.lower, bits), _log_precision(x.upper, bits))
    lo = _directed(x.lower, gmpy2.RoundDown, precision, gmpy2.log)
    hi = _directed(x.upper, gmpy2.RoundUp, precision, gmpy2.log)
    return HighPrecReal.from_bounds(lo, hi, bits)


def highprec_sqrt(x: Number, bits: int = DEFAULT_PRECISION_BITS) -> HighPrecReal:
    """Square root of a non-negative rational; exact squares of dyadics come back with radius 0."""
    x = Fraction(x)
    if x < 0:
        raise DomainError(f"square root of negative number {x}")
    _check_bits(bits)
    precision = bits + _MPFR_GUARD + _int_bits(x) // 2 + 1
    lo = _directed(x, gmpy2.RoundDown, precision, gmpy2.sqrt)
    hi = _directed(x, gmpy2.RoundUp, precision, gmpy2.sqrt)
    return HighPrecReal.from_bounds(lo, hi, bits)


@dataclass(frozen=True, slots=True)
class CFExpansion:
    """Continued fraction terms whose values are certified by the enclosure."""

    terms: Tuple[int, ...]
    convergents: Tuple[Tuple[int, int], ...]
    certified: bool
    exact: bool = False

    def convergent(self, index: int) -> Tuple[int, int]:
        return self.convergents[index]


def _convergents(terms: List[int]) -> Tuple[Tuple[int, int], ...]:
    out = []
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    for a in terms:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append((p, q))
    return tuple(out)


def continued_fraction(x: HighPrecReal, n_terms: int) -> CFExpansion:
    """
    Expand x, emitting only the terms shared by both interval endpoints.

    `certified` is true when n_terms terms were produced, or when x is an exact
    rational whose expansion terminated earlier.
    """
    if n_terms < 1:
        raise DomainError("n_terms must be positive")
    terms: List[int] = []
    if x.radius == 0:
        value = x.center
        while len(terms) < n_terms:
            a = math.floor(value)
            terms.append(a)
            frac = value - a
            if frac == 0:
                return CFExpansion(tuple(terms), _convergents(terms), True, exact=True)
            value = 1 / frac
        return CFExpansion(tuple(terms), _convergents(terms), True, exact=False)

    lo, hi = x.lower, x.upper
    while len(terms) < n_terms:
        a = math.floor(lo)
        if math.floor(hi) != a:
            break
        terms.append(a)
        lo_frac, hi_frac = lo - a, hi - a
        if lo_frac <= 0:
            break
        lo, hi = 1 / hi_frac, 1 / lo_frac
    certified = len(terms) >= n_terms
    if not certified:
        logger.debug("enclosure at %d bits certifies only %d terms", x.bits, len(terms))
    return CFExpansion(tuple(terms), _convergents(terms), certified)


def certified_continued_fraction(
    make: Callable[[int], HighPrecReal],
    n_terms: int,
    bits: int = DEFAULT_PRECISION_BITS,
    max_bits: int = MAX_PRECISION_BITS,
) -> CFExpansion:
    """Recompute `make(bits)` at doubling precision until n_terms terms are certified."""
    while True:
        expansion = continued_fraction(make(bits), n_terms)
        if expansion.certified:
            return expansion
        if bits * 2 > max_bits:
            raise PrecisionExhaustedError(
                f"only {len(expansion.terms)} of {n_terms} terms certified at {bits} bits"
            )
        logger.warning("escalating continued fraction precision from %d to %d bits", bits, 2 * bits)
        bits *= 2


def compare(
    make: Callable[[int], HighPrecReal],
    threshold: Number,
    bits: int = DEFAULT_PRECISION_BITS,
    max_bits: int = MAX_PRECISION_BITS,
) -> int:
    """
    Decide the sign of value - threshold rigorously.

    Returns:
        -1 if the value is below the threshold, +1 if above

    Raises:
        PrecisionExhaustedError: the enclosure still straddles at max_bits
    """
    threshold = Fraction(threshold)
    while True:
        value = make(bits)
        if value.upper < threshold:
            return -1
        if value.lower > threshold:
            return 1
        if bits * 2 > max_bits:
            raise PrecisionExhaustedError(f"enclosure {value} straddles {threshold} at {bits} bits")
        logger.info("enclosure straddles %s at %d bits; doubling precision", threshold, bits)
        bits *= 2


def decide_less(
    make: Callable[[int], HighPrecReal],
    threshold: Number,
    bits: int = DEFAULT_PRECISION_BITS,
    max_bits: int = MAX_PRECISION_BITS,
) -> bool:
    return compare(make, threshold, bits, max_bits) < 0
