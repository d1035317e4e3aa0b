"""
Univariate integer polynomials, Sturm sequences, 2-adic Newton polygons and resultants
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import comb, gcd, lcm
from typing import Any, List, Sequence, Tuple, Union

from ..errors import DomainError
from .integers import valuation

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]


def _trim(coeffs: Sequence[int]) -> Tuple[int, ...]:
    end = len(coeffs)
    while end and coeffs[end - 1] == 0:
        end -= 1
    return tuple(int(c) for c in coeffs[:end])


@dataclass(frozen=True, slots=True)
class BigPoly:
    """Integer polynomial, coefficients in ascending order; () is the zero polynomial."""

    coeffs: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def x(cls) -> "BigPoly":
        return cls((0, 1))

    @classmethod
    def constant(cls, c: int) -> "BigPoly":
        return cls((c,))

    @property
    def degree(self) -> int:
        """Degree, or -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> int:
        if self.is_zero:
            raise DomainError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def is_monic(self) -> bool:
        return not self.is_zero and self.leading == 1

    def __add__(self, other: "BigPoly | int") -> "BigPoly":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return BigPoly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self) -> "BigPoly":
        return BigPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "BigPoly | int") -> "BigPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other: int) -> "BigPoly":
        return _as_poly(other) - self

    def __mul__(self, other: "BigPoly | int") -> "BigPoly":
        other = _as_poly(other)
        if self.is_zero or other.is_zero:
            return BigPoly(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return BigPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "BigPoly":
        if e < 0:
            raise DomainError("negative polynomial power")
        result = BigPoly((1,))
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __call__(self, x: Any) -> Any:
        acc: Any = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "BigPoly":
        return BigPoly(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def shift(self, c: int) -> "BigPoly":
        """Return f(x + c)."""
        out = [0] * len(self.coeffs)
        for i, a in enumerate(self.coeffs):
            if a:
                for j in range(i + 1):
                    out[j] += a * comb(i, j) * c ** (i - j)
        return BigPoly(tuple(out))

    def content(self) -> int:
        return reduce(gcd, self.coeffs, 0)

    def divide_content(self) -> "BigPoly":
        """Divide by the positive content, keeping signs."""
        g = self.content()
        if g <= 1:
            return self
        return BigPoly(tuple(c // g for c in self.coeffs))

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            mag = abs(c)
            body = str(mag) if (mag != 1 or i == 0) else ""
            body = f"{body}*{mono}" if body and mono else body or mono
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {body}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def _as_poly(p: "BigPoly | int") -> BigPoly:
    return p if isinstance(p, BigPoly) else BigPoly.constant(int(p))


def pseudo_remainder(f: BigPoly, g: BigPoly) -> BigPoly:
    """prem(f, g) = lc(g)^(deg f - deg g + 1) * f mod g, computed over Z."""
    if g.is_zero:
        raise DomainError("pseudo-remainder by the zero polynomial")
    if f.degree < g.degree:
        return f
    lc = g.leading
    dg = g.degree
    r = list(f.coeffs)
    e = f.degree - dg + 1
    while len(r) - 1 >= dg and any(r):
        t = r[-1]
        s = len(r) - 1 - dg
        r = [lc * c for c in r]
        for j, b in enumerate(g.coeffs):
            r[s + j] -= t * b
        r = list(_trim(r))
        e -= 1
    return BigPoly(tuple(r)) * (lc**e)


def _sign(n: int) -> int:
    return (n > 0) - (n < 0)


def sturm_sequence(f: BigPoly) -> List[BigPoly]:
    """
    Sturm chain of f built from signed pseudo-remainders.

    Each term is divided by its positive content only, so signs match the chain
    of true remainders.
    """
    if f.is_zero:
        raise DomainError("Sturm sequence of the zero polynomial")
    seq = [f.divide_content()]
    df = f.derivative()
    if df.is_zero:
        return seq
    seq.append(df.divide_content())
    while True:
        prev, cur = seq[-2], seq[-1]
        if cur.degree == 0:
            break
        r = pseudo_remainder(prev, cur)
        if r.is_zero:
            break
        k = prev.degree - cur.degree + 1
        factor_sign = _sign(cur.leading) ** k
        seq.append((r * (-factor_sign)).divide_content())
    return seq


def _variations(values: Sequence[int]) -> int:
    signs = [_sign(v) for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _count_real_roots(seq: Sequence[BigPoly]) -> int:
    at_plus = [p.leading for p in seq]
    at_minus = [p.leading * (-1) ** p.degree for p in seq]
    return _variations(at_minus) - _variations(at_plus)


def _rational_divmod(f: Sequence[Fraction], g: Sequence[Fraction]) -> Tuple[List[Fraction], List[Fraction]]:
    r = list(f)
    q = [Fraction(0)] * max(len(f) - len(g) + 1, 1)
    while len(r) >= len(g) and any(r):
        s = len(r) - len(g)
        t = r[-1] / g[-1]
        q[s] = t
        for j, b in enumerate(g):
            r[s + j] -= t * b
        while r and r[-1] == 0:
            r.pop()
    return q, r


def _to_integer_poly(coeffs: Sequence[Fraction]) -> BigPoly:
    den = reduce(lcm, (c.denominator for c in coeffs), 1)
    poly = BigPoly(tuple(int(c * den) for c in coeffs)).divide_content()
    return -poly if poly.coeffs and poly.leading < 0 else poly


def exact_quotient(f: BigPoly, g: BigPoly) -> BigPoly:
    """f / g over Q (g must divide f), scaled to a primitive integer polynomial."""
    q, r = _rational_divmod([Fraction(c) for c in f.coeffs], [Fraction(c) for c in g.coeffs])
    if any(r):
        raise DomainError(f"{g} does not divide {f}")
    return _to_integer_poly(q)


@dataclass(frozen=True, slots=True)
class SturmReport:
    polynomial: BigPoly
    real_root_count: int
    is_squarefree: bool


def sturm_real_roots(f: BigPoly) -> SturmReport:
    """
    Count the distinct real roots of f with a Sturm chain.

    If gcd(f, f') is nonconstant the count is taken on f / gcd(f, f') and the
    report is flagged as not squarefree.
    """
    if f.is_zero:
        raise DomainError("Sturm count of the zero polynomial")
    if f.degree == 0:
        return SturmReport(f, 0, True)
    seq = sturm_sequence(f)
    gcd_poly = seq[-1]
    squarefree = gcd_poly.degree == 0
    if not squarefree:
        logger.debug("%s is not squarefree; counting roots of its squarefree part", f)
        seq = sturm_sequence(exact_quotient(f, gcd_poly))
    return SturmReport(f, _count_real_roots(seq), squarefree)


@dataclass(frozen=True, slots=True)
class NewtonSegment:
    start: Tuple[int, int]
    end: Tuple[int, int]

    @property
    def slope(self) -> Fraction:
        """Geometric slope dv/di; increases from left to right along the hull."""
        return Fraction(self.end[1] - self.start[1], self.end[0] - self.start[0])

    @property
    def root_valuation(self) -> Fraction:
        """Valuation of the roots this segment accounts for."""
        return -self.slope

    @property
    def length(self) -> int:
        return self.end[0] - self.start[0]


@dataclass(frozen=True, slots=True)
class NewtonPolygon:
    prime: int
    points: Tuple[Tuple[int, int], ...]
    hull: Tuple[NewtonSegment, ...]

    @property
    def is_pure(self) -> bool:
        """One segment spanning the whole degree range."""
        return (
            len(self.hull) == 1
            and self.hull[0].start[0] == 0
            and self.hull[0].end[0] == self.points[-1][0]
        )


def newton_polygon(f: BigPoly, prime: int) -> NewtonPolygon:
    """Lower convex hull of (i, ord_p(c_i)) over the nonzero coefficients of f."""
    if f.is_zero:
        raise DomainError("Newton polygon of the zero polynomial")
    points = tuple((i, valuation(c, prime)) for i, c in enumerate(f.coeffs) if c != 0)
    hull: List[Tuple[int, int]] = []
    for p in points:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            # drop the middle point unless the turn is strictly convex
            if (x1 - x0) * (p[1] - y0) - (y1 - y0) * (p[0] - x0) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    segments = tuple(NewtonSegment(a, b) for a, b in zip(hull, hull[1:]))
    return NewtonPolygon(prime, points, segments)


def newton_polygon_2adic(f: BigPoly) -> NewtonPolygon:
    return newton_polygon(f, 2)


def _bareiss_determinant(matrix: List[List[int]]) -> int:
    m = [row[:] for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def resultant(f: BigPoly, g: BigPoly) -> int:
    """Resultant via the Sylvester matrix (fraction-free elimination)."""
    if f.is_zero or g.is_zero:
        return 0
    m, n = f.degree, g.degree
    size = m + n
    if size == 0:
        return 1
    fd = list(reversed(f.coeffs))
    gd = list(reversed(g.coeffs))
    rows = []
    for i in range(n):
        rows.append([0] * i + fd + [0] * (size - i - len(fd)))
    for i in range(m):
        rows.append([0] * i + gd + [0] * (size - i - len(gd)))
    return _bareiss_determinant(rows)


def discriminant(f: BigPoly) -> int:
    """disc(f) = (-1)^(n(n-1)/2) * res(f, f') / lc(f)."""
    n = f.degree
    if n < 1:
        raise DomainError("discriminant needs degree at least 1")
    res = resultant(f, f.derivative())
    value, rem = divmod(res, f.leading)
    if rem:
        raise DomainError("resultant not divisible by the leading coefficient")
    return value * (-1) ** (n * (n - 1) // 2)
