"""
Exact arithmetic in quadratic fields: integers, field elements, ideals and residue rings
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import lcm
from typing import Iterable, Iterator, List, Optional, Tuple, Union

from .arith.integers import extended_gcd, is_square, is_squarefree, isqrt, ord2, valuation
from .constants import MAX_RESIDUE_RING_SIZE
from .errors import CrossCheckError, DomainError, UnsupportedError

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


def _check_d(d: int) -> None:
    if d in (0, 1):
        raise DomainError(f"d = {d} does not define a quadratic field")


def validate_field_datum(d: int) -> int:
    """Return d after checking it is a squarefree integer other than 0 and 1."""
    _check_d(d)
    if not is_squarefree(d):
        raise DomainError(f"d = {d} is not squarefree")
    return d


@dataclass(frozen=True, slots=True)
class QuadInt:
    """The algebraic integer (a + b*sqrt(d))/2 of Q(sqrt(d))."""

    d: int
    a: int
    b: int

    def __post_init__(self) -> None:
        _check_d(self.d)
        if self.d % 4 == 1:
            if (self.a - self.b) % 2:
                raise DomainError(f"({self.a} + {self.b}*sqrt({self.d}))/2 is not integral")
        elif self.a % 2 or self.b % 2:
            raise DomainError(f"({self.a} + {self.b}*sqrt({self.d}))/2 is not in Z[sqrt({self.d})]")

    @classmethod
    def of(cls, d: int, x: int, y: int = 0) -> "QuadInt":
        """x + y*sqrt(d)."""
        return cls(d, 2 * x, 2 * y)

    @classmethod
    def omega(cls, d: int) -> "QuadInt":
        """Generator of the ring of integers over Z."""
        return cls(d, 1, 1) if d % 4 == 1 else cls(d, 0, 2)

    def _same(self, other: "QuadInt | int") -> "QuadInt":
        if isinstance(other, QuadInt):
            if other.d != self.d:
                raise DomainError(f"mixed fields: d = {self.d} and d = {other.d}")
            return other
        return QuadInt(self.d, 2 * int(other), 0)

    def __add__(self, other: "QuadInt | int") -> "QuadInt":
        o = self._same(other)
        return QuadInt(self.d, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self) -> "QuadInt":
        return QuadInt(self.d, -self.a, -self.b)

    def __sub__(self, other: "QuadInt | int") -> "QuadInt":
        return self + (-self._same(other))

    def __rsub__(self, other: int) -> "QuadInt":
        return self._same(other) - self

    def __mul__(self, other: "QuadInt | int") -> "QuadInt":
        o = self._same(other)
        a = (self.a * o.a + self.d * self.b * o.b) // 2
        b = (self.a * o.b + self.b * o.a) // 2
        return QuadInt(self.d, a, b)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "QuadInt":
        if e < 0:
            if abs(self.norm()) != 1:
                raise DomainError("negative power of a non-unit")
            return self.unit_inverse() ** (-e)
        result = QuadInt(self.d, 2, 0)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self) -> "QuadInt":
        return QuadInt(self.d, self.a, -self.b)

    def norm(self) -> int:
        return (self.a * self.a - self.d * self.b * self.b) // 4

    def trace(self) -> int:
        return self.a

    def unit_inverse(self) -> "QuadInt":
        n = self.norm()
        if n not in (1, -1):
            raise DomainError(f"{self} is not a unit")
        return self.conjugate() * n

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def coords(self) -> Tuple[int, int]:
        """Coordinates (x0, x1) with self = x0 + x1*omega."""
        if self.d % 4 == 1:
            return (self.a - self.b) // 2, self.b
        return self.a // 2, self.b // 2

    @classmethod
    def from_coords(cls, d: int, x0: int, x1: int) -> "QuadInt":
        if d % 4 == 1:
            return cls(d, 2 * x0 + x1, x1)
        return cls(d, 2 * x0, 2 * x1)

    def real_sign(self) -> int:
        """Sign of a + b*sqrt(d) in the embedding with sqrt(d) > 0 (real fields only)."""
        if self.d < 0:
            raise DomainError("real sign needs a real quadratic field")
        a, b = self.a, self.b
        if a >= 0 and b >= 0:
            return 0 if a == b == 0 else 1
        if a <= 0 and b <= 0:
            return -1
        lhs, rhs = a * a, self.d * b * b
        if a > 0:
            return 1 if lhs > rhs else -1
        return 1 if rhs > lhs else -1

    def __str__(self) -> str:
        if self.a % 2 == 0 and self.b % 2 == 0:
            x, y = self.a // 2, self.b // 2
            if y == 0:
                return str(x)
            return f"{x} {'+' if y > 0 else '-'} {abs(y)}*sqrt({self.d})"
        return f"({self.a} {'+' if self.b > 0 else '-'} {abs(self.b)}*sqrt({self.d}))/2"


def _frac_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0 or not (is_square(q.numerator) and is_square(q.denominator)):
        return None
    return Fraction(isqrt(q.numerator), isqrt(q.denominator))


@dataclass(frozen=True, slots=True)
class QuadNumber:
    """The field element x + y*sqrt(d) with rational x, y."""

    d: int
    x: Fraction
    y: Fraction

    def __post_init__(self) -> None:
        _check_d(self.d)
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))

    @classmethod
    def from_int(cls, z: QuadInt) -> "QuadNumber":
        return cls(z.d, Fraction(z.a, 2), Fraction(z.b, 2))

    @classmethod
    def rational(cls, d: int, q: Rational) -> "QuadNumber":
        return cls(d, Fraction(q), Fraction(0))

    def _same(self, other: "QuadNumber | QuadInt | Rational") -> "QuadNumber":
        if isinstance(other, QuadNumber):
            o = other
        elif isinstance(other, QuadInt):
            o = QuadNumber.from_int(other)
        else:
            return QuadNumber(self.d, Fraction(other), Fraction(0))
        if o.d != self.d:
            raise DomainError(f"mixed fields: d = {self.d} and d = {o.d}")
        return o

    def __add__(self, other: "QuadNumber | QuadInt | Rational") -> "QuadNumber":
        o = self._same(other)
        return QuadNumber(self.d, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self) -> "QuadNumber":
        return QuadNumber(self.d, -self.x, -self.y)

    def __sub__(self, other: "QuadNumber | QuadInt | Rational") -> "QuadNumber":
        return self + (-self._same(other))

    def __rsub__(self, other: Rational) -> "QuadNumber":
        return self._same(other) - self

    def __mul__(self, other: "QuadNumber | QuadInt | Rational") -> "QuadNumber":
        o = self._same(other)
        return QuadNumber(
            self.d, self.x * o.x + self.d * self.y * o.y, self.x * o.y + self.y * o.x
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadNumber":
        n = self.norm()
        if n == 0:
            raise DomainError("inverse of zero")
        return QuadNumber(self.d, self.x / n, -self.y / n)

    def __truediv__(self, other: "QuadNumber | QuadInt | Rational") -> "QuadNumber":
        return self * self._same(other).inverse()

    def __rtruediv__(self, other: Rational) -> "QuadNumber":
        return self._same(other) * self.inverse()

    def __pow__(self, e: int) -> "QuadNumber":
        base = self if e >= 0 else self.inverse()
        result = QuadNumber(self.d, Fraction(1), Fraction(0))
        for _ in range(abs(e)):
            result = result * base
        return result

    def conjugate(self) -> "QuadNumber":
        return QuadNumber(self.d, self.x, -self.y)

    def norm(self) -> Fraction:
        return self.x * self.x - self.d * self.y * self.y

    def trace(self) -> Fraction:
        return 2 * self.x

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_rational(self) -> bool:
        return self.y == 0

    def to_quadint(self) -> Optional[QuadInt]:
        """The same element as a QuadInt when it is integral."""
        a, b = 2 * self.x, 2 * self.y
        if a.denominator != 1 or b.denominator != 1:
            return None
        try:
            return QuadInt(self.d, int(a), int(b))
        except DomainError:
            return None

    def denominator(self) -> int:
        """A positive integer D with D*self integral."""
        return lcm(self.x.denominator, self.y.denominator)

    def is_s_unit(self) -> bool:
        """True iff the element is a unit away from the primes above 2."""
        if self.is_zero():
            return False
        if self.denominator() & (self.denominator() - 1):
            return False
        n = abs(self.norm())
        return all(part & (part - 1) == 0 for part in (n.numerator, n.denominator))

    def sqrt(self) -> Optional["QuadNumber"]:
        """A square root inside the field, if one exists."""
        n = _frac_sqrt(self.norm())
        if n is None:
            return None
        for s in (n, -n):
            u2 = (self.x + s) / 2
            v2 = (self.x - s) / (2 * self.d)
            u = _frac_sqrt(u2)
            v = _frac_sqrt(v2)
            if u is None or v is None:
                continue
            if u != 0:
                v = self.y / (2 * u)
            candidate = QuadNumber(self.d, u, v)
            if candidate * candidate == self:
                return candidate
        return None

    def __str__(self) -> str:
        if self.y == 0:
            return str(self.x)
        return f"{self.x} {'+' if self.y > 0 else '-'} {abs(self.y)}*sqrt({self.d})"


@dataclass(frozen=True, slots=True)
class QuadIdeal:
    """
    Nonzero ideal of the ring of integers in Hermite normal form.

    The Z-basis is u and v + w*omega with u, w > 0 and 0 <= v < u.
    """

    d: int
    u: int
    v: int
    w: int

    @classmethod
    def from_generators(cls, d: int, gens: Iterable["QuadInt | int"]) -> "QuadIdeal":
        """The ideal generated by gens, via an HNF of the Z-span of g and g*omega."""
        omega = QuadInt.omega(d)
        vectors: List[Tuple[int, int]] = []
        for g in gens:
            g = g if isinstance(g, QuadInt) else QuadInt.of(d, int(g))
            if g.d != d:
                raise DomainError(f"generator from d = {g.d} in an ideal of d = {d}")
            vectors.append(g.coords())
            vectors.append((g * omega).coords())

        pivot: Optional[Tuple[int, int]] = None
        bottom: List[int] = []
        for v0, v1 in vectors:
            if v1 == 0:
                bottom.append(v0)
                continue
            if pivot is None:
                pivot = (v0, v1)
                continue
            p0, p1 = pivot
            g, s, t = extended_gcd(p1, v1)
            pivot = (s * p0 + t * v0, g)
            bottom.append((v1 // g) * p0 - (p1 // g) * v0)
        u = 0
        for b in bottom:
            u = extended_gcd(u, b)[0]
        if pivot is None or u == 0:
            raise DomainError("generators do not span a nonzero ideal")
        p0, p1 = pivot
        if p1 < 0:
            p0, p1 = -p0, -p1
        return cls(d, u, p0 % u, p1)

    @classmethod
    def principal(cls, x: "QuadInt") -> "QuadIdeal":
        return cls.from_generators(x.d, [x])

    @classmethod
    def unit(cls, d: int) -> "QuadIdeal":
        return cls(d, 1, 0, 1)

    @property
    def norm(self) -> int:
        return self.u * self.w

    def basis(self) -> Tuple[QuadInt, QuadInt]:
        return QuadInt.from_coords(self.d, self.u, 0), QuadInt.from_coords(self.d, self.v, self.w)

    def reduce_coords(self, x0: int, x1: int) -> Tuple[int, int]:
        q = x1 // self.w
        x1 -= q * self.w
        x0 -= q * self.v
        return x0 % self.u, x1

    def contains(self, x: "QuadInt | int") -> bool:
        x = x if isinstance(x, QuadInt) else QuadInt.of(self.d, int(x))
        return self.reduce_coords(*x.coords()) == (0, 0)

    def __mul__(self, other: "QuadIdeal") -> "QuadIdeal":
        if other.d != self.d:
            raise DomainError("ideals from different fields")
        return QuadIdeal.from_generators(
            self.d, [x * y for x in self.basis() for y in other.basis()]
        )

    def __pow__(self, e: int) -> "QuadIdeal":
        if e < 0:
            raise DomainError("negative ideal power")
        result = QuadIdeal.unit(self.d)
        for _ in range(e):
            result = result * self
        return result

    def scale(self, n: int) -> "QuadIdeal":
        """The ideal n * self."""
        return QuadIdeal.from_generators(self.d, [n * g for g in self.basis()])

    def conjugate(self) -> "QuadIdeal":
        return QuadIdeal.from_generators(self.d, [g.conjugate() for g in self.basis()])

    def __add__(self, other: "QuadIdeal") -> "QuadIdeal":
        return QuadIdeal.from_generators(self.d, [*self.basis(), *other.basis()])


class Splitting(str, Enum):
    RAMIFIED = "ramified"
    INERT = "inert"
    SPLIT = "split"


@dataclass(frozen=True, slots=True)
class TwoSplitting:
    splitting: Splitting
    ideals: Tuple[QuadIdeal, ...]


def prime_above_2(d: int) -> TwoSplitting:
    """
    Decompose 2 in Q(sqrt(d)) from the factorization of the minimal polynomial of omega mod 2.

    Split primes are listed as (2, omega) then (2, omega - 1).
    """
    validate_field_datum(d)
    omega = QuadInt.omega(d)
    if d % 4 != 1:
        r = d % 2
        ideal = QuadIdeal.from_generators(d, [2, omega - r])
        return TwoSplitting(Splitting.RAMIFIED, (ideal,))
    if d % 8 == 1:
        ideals = tuple(QuadIdeal.from_generators(d, [2, omega - r]) for r in (0, 1))
        return TwoSplitting(Splitting.SPLIT, ideals)
    return TwoSplitting(Splitting.INERT, (QuadIdeal.from_generators(d, [2]),))


def ord_sqrt2(x: QuadInt) -> int:
    """Valuation at (sqrt(2)) in Z[sqrt(2)]: min(2*ord2(x0), 2*ord2(x1) + 1)."""
    if x.d != 2:
        raise DomainError(f"ord_sqrt2 needs d = 2, got d = {x.d}")
    if x.is_zero():
        raise DomainError("valuation of zero")
    x0, x1 = x.a // 2, x.b // 2
    candidates = []
    if x0:
        candidates.append(2 * ord2(x0))
    if x1:
        candidates.append(2 * ord2(x1) + 1)
    return min(candidates)


def _prime_of(ideal: QuadIdeal) -> Tuple[int, int]:
    """(p, f) with norm(ideal) = p^f for a prime ideal."""
    n = ideal.norm
    for p in range(2, isqrt(n) + 2):
        if n % p == 0:
            f = valuation(n, p)
            if p**f != n:
                raise DomainError(f"ideal of norm {n} is not a prime ideal")
            return p, f
    return n, 1


def ord_prime(x: "QuadInt | QuadNumber", prime: QuadIdeal) -> int:
    """Valuation of a nonzero field element at a prime ideal, by ideal-power membership."""
    if isinstance(x, QuadNumber):
        if x.is_zero():
            raise DomainError("valuation of zero")
        den = x.denominator()
        scaled = (x * den).to_quadint()
        if scaled is None:
            raise CrossCheckError("scaling by the denominator did not give an integer")
        if den == 1:
            return ord_prime(scaled, prime)
        return ord_prime(scaled, prime) - ord_prime(QuadInt.of(x.d, den), prime)
    if x.is_zero():
        raise DomainError("valuation of zero")
    p, f = _prime_of(prime)
    n = abs(x.norm())
    bound = valuation(n, p) // f
    power = QuadIdeal.unit(x.d)
    for e in range(1, bound + 1):
        power = power * prime
        if not power.contains(x):
            return e - 1
    return bound


class ResidueRing:
    """The quotient ring O_K / I with basis-reduced representatives."""

    def __init__(self, ideal: QuadIdeal):
        self.ideal = ideal
        self.d = ideal.d
        self.size = ideal.norm

    def reduce(self, x: "QuadInt | int") -> QuadInt:
        x = x if isinstance(x, QuadInt) else QuadInt.of(self.d, int(x))
        return QuadInt.from_coords(self.d, *self.ideal.reduce_coords(*x.coords()))

    def add(self, x: QuadInt, y: QuadInt) -> QuadInt:
        return self.reduce(x + y)

    def mul(self, x: QuadInt, y: QuadInt) -> QuadInt:
        return self.reduce(x * y)

    def power(self, x: QuadInt, e: int) -> QuadInt:
        result = self.reduce(1)
        base = self.reduce(x)
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def equal(self, x: "QuadInt | int", y: "QuadInt | int") -> bool:
        return self.reduce(x) == self.reduce(y)

    def elements(self) -> Iterator[QuadInt]:
        for x1 in range(self.ideal.w):
            for x0 in range(self.ideal.u):
                yield QuadInt.from_coords(self.d, x0, x1)

    def is_unit(self, x: QuadInt) -> bool:
        return (QuadIdeal.principal(x) + self.ideal).norm == 1 if not x.is_zero() else self.size == 1

    def unit_group_order(self) -> int:
        if self.size > MAX_RESIDUE_RING_SIZE:
            raise UnsupportedError(
                f"residue ring of size {self.size} exceeds the enumeration envelope"
            )
        return sum(1 for x in self.elements() if self.is_unit(x))

    def multiplicative_order(self, x: QuadInt) -> int:
        """Order of a unit of the ring, found by stepping through its powers."""
        if not self.is_unit(x):
            raise DomainError(f"{x} is not a unit modulo the ideal")
        one = self.reduce(1)
        base = self.reduce(x)
        current = base
        for k in range(1, self.size + 1):
            if current == one:
                return k
            current = self.mul(current, base)
        raise CrossCheckError(f"no multiplicative order found for {x} within ring size")


def residue_ring(ideal: QuadIdeal) -> ResidueRing:
    return ResidueRing(ideal)


def reduce(x: "QuadInt | int", ring: ResidueRing) -> QuadInt:
    return ring.reduce(x)


def unit_group_order(ring: ResidueRing) -> int:
    return ring.unit_group_order()


@dataclass(frozen=True, slots=True)
class PeriodicCF:
    """Continued fraction of (p0 + sqrt(d))/q0: a head term then a repeating block."""

    d: int
    p0: int
    q0: int
    head: int
    period: Tuple[int, ...]

    def terms(self, count: int) -> Iterator[int]:
        yield self.head
        for i in range(count - 1):
            yield self.period[i % len(self.period)]

    def convergents(self, count: int) -> Iterator[Tuple[int, int]]:
        p_prev, p = 0, 1
        q_prev, q = 1, 0
        for a in self.terms(count):
            p_prev, p = p, a * p + p_prev
            q_prev, q = q, a * q + q_prev
            yield p, q


def periodic_expansion(d: int, p0: int = 0, q0: int = 1) -> PeriodicCF:
    """
    Exact continued fraction of (p0 + sqrt(d))/q0 for sqrt(d) and (1 + sqrt(d))/2.

    The first complete quotient of these two is reduced, so the expansion is purely
    periodic after the head term.
    """
    if d <= 1 or is_square(d):
        raise DomainError(f"sqrt({d}) is not a real quadratic irrational")
    if q0 <= 0 or (d - p0 * p0) % q0:
        raise DomainError(f"({p0} + sqrt({d}))/{q0} is not in standard form")
    s = isqrt(d)
    head = (p0 + s) // q0
    p = head * q0 - p0
    q = (d - p * p) // q0
    start = (p, q)
    period: List[int] = []
    for _ in range(4 * d + 4):
        a = (p + s) // q
        period.append(a)
        p = a * q - p
        q = (d - p * p) // q
        if (p, q) == start:
            return PeriodicCF(d, p0, q0, head, tuple(period))
    raise CrossCheckError(f"continued fraction of sqrt({d}) did not close its period")
