"""
Narrow class groups of real quadratic fields via indefinite binary quadratic forms
"""

import logging
from dataclasses import dataclass, field
from math import gcd
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from .arith.integers import divisors, extended_gcd, is_square, isqrt
from .constants import MAX_FORM_DISCRIMINANT
from .errors import CrossCheckError, DomainError, UnsupportedError
from .quadring import validate_field_datum
from .unitsq import fundamental_unit

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class IndefiniteForm:
    """The form a*x^2 + b*x*y + c*y^2 with positive non-square discriminant."""

    a: int
    b: int
    c: int

    def __post_init__(self) -> None:
        D = self.discriminant
        if D <= 0 or is_square(D):
            raise DomainError(f"form {self.as_tuple()} has discriminant {D}")
        if gcd(gcd(self.a, self.b), self.c) != 1:
            raise DomainError(f"form {self.as_tuple()} is not primitive")

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def as_tuple(self) -> Tuple[int, int, int]:
        return self.a, self.b, self.c

    @classmethod
    def from_ab(cls, a: int, b: int, D: int) -> "IndefiniteForm":
        num = b * b - D
        if num % (4 * a):
            raise DomainError(f"no form ({a}, {b}, *) of discriminant {D}")
        return cls(a, b, num // (4 * a))

    @classmethod
    def principal(cls, D: int) -> "IndefiniteForm":
        r = isqrt(D)
        b = r if (r - D) % 2 == 0 else r - 1
        return cls.from_ab(1, b, D)

    def __str__(self) -> str:
        return f"({self.a}, {self.b}, {self.c})"


def is_reduced(f: IndefiniteForm) -> bool:
    """0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b, tested in integers."""
    D = f.discriminant
    a2 = 2 * abs(f.a)
    if f.b <= 0 or f.b * f.b >= D:
        return False
    if (a2 + f.b) ** 2 <= D:
        return False
    lhs = a2 - f.b
    return lhs < 0 or lhs * lhs < D


def rho(f: IndefiniteForm) -> IndefiniteForm:
    """Right neighbour (c, b', *) with b' = -b mod 2|c| normalized against sqrt(D)."""
    D = f.discriminant
    c = f.c
    m = 2 * abs(c)
    if c * c > D:
        b = (-f.b) % m
        if b > abs(c):
            b -= m
    else:
        r = isqrt(D)
        b = r - (r + f.b) % m
    return IndefiniteForm.from_ab(c, b, D)


def reduce(f: IndefiniteForm) -> IndefiniteForm:
    """A reduced form properly equivalent to f."""
    steps = 0
    while not is_reduced(f):
        f = rho(f)
        steps += 1
        if steps > 4 * f.discriminant.bit_length() + 64:
            raise CrossCheckError(f"reduction of {f} does not terminate", stage="formclass")
    return f


def cycle(f: IndefiniteForm) -> List[IndefiniteForm]:
    """The rho-cycle of a reduced form."""
    if not is_reduced(f):
        raise DomainError(f"{f} is not reduced")
    out = [f]
    g = rho(f)
    while g != f:
        out.append(g)
        g = rho(g)
    return out


def compose(f: IndefiniteForm, g: IndefiniteForm) -> IndefiniteForm:
    """
    Dirichlet composition, reduced.

    With s = (b1 + b2)/2 and u*a1 + v*a2 + w*s = e = gcd(a1, a2, s):
    A = a1*a2/e^2 and B = b1 + 2*(a1/e)*(u*(s - b1) - w*c1) taken mod 2A.
    """
    D = f.discriminant
    if g.discriminant != D:
        raise DomainError(f"cannot compose forms of discriminants {D} and {g.discriminant}")
    a1, b1, c1 = f.as_tuple()
    a2, b2, _ = g.as_tuple()
    s = (b1 + b2) // 2
    g1, x1, y1 = extended_gcd(a1, a2)
    e, x2, w = extended_gcd(g1, s)
    u = x1 * x2
    A = (a1 * a2) // (e * e)
    B = b1 + 2 * (a1 // e) * (u * (s - b1) - w * c1)
    B %= 2 * abs(A)
    return reduce(IndefiniteForm.from_ab(A, B, D))


@dataclass(slots=True)
class FormClassGroup:
    """Reduced forms of discriminant D grouped into cycles, one per narrow class."""

    D: int
    reduced_forms: Tuple[IndefiniteForm, ...]
    cycles: Tuple[Tuple[IndefiniteForm, ...], ...]
    _index: Dict[IndefiniteForm, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        for i, cyc in enumerate(self.cycles):
            for f in cyc:
                self._index[f] = i

    @property
    def h_plus(self) -> int:
        return len(self.cycles)

    @property
    def two_sylow_order(self) -> int:
        h = self.h_plus
        return h & -h

    def class_of(self, f: IndefiniteForm) -> int:
        """Index of the cycle holding the reduction of f."""
        return self._index[reduce(f)]

    @property
    def principal_class(self) -> int:
        return self.class_of(IndefiniteForm.principal(self.D))

    def representatives(self) -> List[IndefiniteForm]:
        return [cyc[0] for cyc in self.cycles]


def _reduced_forms(D: int) -> List[IndefiniteForm]:
    r = isqrt(D)
    forms = []
    for b in range(1, r + 1):
        if (b - D) % 2:
            continue
        n = (D - b * b) // 4
        for div in divisors(n):
            for a in (div, -div):
                c = -n // a
                if gcd(gcd(a, b), c) != 1:
                    continue
                f = IndefiniteForm(a, b, c)
                if is_reduced(f):
                    forms.append(f)
    return forms


def class_group(D: int) -> FormClassGroup:
    """Narrow class group of discriminant D by exhaustive enumeration of reduced forms."""
    if D <= 0 or is_square(D) or D % 4 not in (0, 1):
        raise DomainError(f"{D} is not a positive non-square discriminant")
    if D >= MAX_FORM_DISCRIMINANT:
        raise UnsupportedError(f"discriminant {D} exceeds the enumeration envelope {MAX_FORM_DISCRIMINANT}")
    forms = _reduced_forms(D)
    seen = set()
    cycles = []
    for f in sorted(forms, key=lambda g: (g.b, abs(g.a), g.a)):
        if f in seen:
            continue
        cyc = tuple(cycle(f))
        seen.update(cyc)
        cycles.append(cyc)
    if len(seen) != len(forms):
        raise CrossCheckError(f"cycles of discriminant {D} leave reduced forms unvisited", stage="formclass")
    principal = IndefiniteForm.principal(D)
    cycles.sort(key=lambda cyc: principal not in cyc)
    logger.debug("D = %d: %d reduced forms in %d cycles", D, len(forms), len(cycles))
    return FormClassGroup(D=D, reduced_forms=tuple(forms), cycles=tuple(cycles))


def class_order(group: FormClassGroup, f: IndefiniteForm) -> int:
    principal = group.principal_class
    power = reduce(f)
    for k in range(1, group.h_plus + 1):
        if group.class_of(power) == principal:
            return k
        power = compose(power, f)
    raise CrossCheckError(f"class of {f} has no order dividing h+ = {group.h_plus}", stage="formclass")


def two_rank(group: FormClassGroup) -> int:
    """2-rank of the narrow class group from the number of classes of order at most 2."""
    principal = group.principal_class
    count = sum(
        1 for f in group.representatives() if group.class_of(compose(f, f)) == principal
    )
    rank = count.bit_length() - 1
    if count != 1 << rank:
        raise CrossCheckError(f"{count} classes of order <= 2 is not a power of 2", stage="formclass")
    return rank


def norm_two_form(D: int, which: int = 0) -> Optional[IndefiniteForm]:
    """The form (2, b, c) of an ideal of norm 2, or None when 2 is inert."""
    if D % 8 == 5:
        return None
    b = next(b for b in range(4) if (b * b - D) % 8 == 0)
    if which:
        b = -b
    return IndefiniteForm.from_ab(2, b, D)


def order_of_prime_class(
    D: int, which: int = 0, lenient: bool = False, group: Optional[FormClassGroup] = None
) -> int:
    """
    Order of the class of a prime above 2 in the narrow class group.

    `which` selects between the two primes when 2 splits. An inert 2 gives the
    principal ideal (2): DomainError, or order 1 when `lenient`.
    """
    f = norm_two_form(D, which)
    if f is None:
        if lenient:
            logger.info("2 is inert for D = %d; [P] = [(2)] has order 1", D)
            return 1
        raise DomainError(f"2 is inert in discriminant {D}")
    group = group or class_group(D)
    return class_order(group, f)


class DirectConditions(BaseModel):
    """Conditions (a)(b)(c) evaluated from the form class group"""

    d: int = Field(..., description="Squarefree field datum")
    D: int = Field(..., description="Fundamental discriminant")
    cond_a: bool = Field(..., description="2 is ramified")
    cond_b: Optional[bool] = Field(None, description="2-part of h+ divides the order of [P]; None when 2 splits")
    cond_c: bool = Field(..., description="h is odd")
    h: int = Field(..., description="Class number")
    h_plus: int = Field(..., description="Narrow class number")
    order_of_P: Optional[int] = Field(None, description="Order of [P] in the narrow class group")
    unit_norm: int = Field(..., description="Norm of the fundamental unit")


def conditions_abc_direct(d: int) -> DirectConditions:
    validate_field_datum(d)
    if d < 2:
        raise DomainError(f"direct evaluation needs a real quadratic field, got d = {d}")
    D = d if d % 4 == 1 else 4 * d
    group = class_group(D)
    unit_norm = fundamental_unit(d).norm
    h_plus = group.h_plus
    h = h_plus if unit_norm == -1 else h_plus // 2
    if unit_norm == 1 and h_plus % 2:
        raise CrossCheckError(f"h+ = {h_plus} is odd although the unit norm is +1 (d = {d})", stage="formclass")
    order = None
    cond_b = None
    if d % 8 != 1:
        order = order_of_prime_class(D, lenient=True, group=group)
        cond_b = order % group.two_sylow_order == 0
    return DirectConditions(
        d=d,
        D=D,
        cond_a=d % 4 != 1,
        cond_b=cond_b,
        cond_c=h % 2 == 1,
        h=h,
        h_plus=h_plus,
        order_of_P=order,
        unit_norm=unit_norm,
    )
