"""
The family f_n = ((1 + sqrt(-7))(x + sqrt(-7))^n - (1 - sqrt(-7))(x - sqrt(-7))^n) / (2 sqrt(-7))

Each f_n should define a totally real field of degree n in which 2 totally ramifies.
Real roots are counted with Sturm chains; ramification is certified by a shifted
2-adic Newton polygon with a single segment of slope h/n, gcd(h, n) = 1.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb, gcd
from pathlib import Path
from typing import Iterator, List, Optional, Union

from pydantic import BaseModel, Field

from .arith.poly import BigPoly, newton_polygon_2adic, sturm_real_roots
from .constants import MAX_SHIFT_WINDOW, SHIFT_WINDOW
from .errors import CrossCheckError, DomainError

logger = logging.getLogger(__name__)

MINUS_SIGNS = ("−", "–")


@dataclass(frozen=True, slots=True)
class FamilyPolynomial:
    """f_n together with (x + sqrt(-7))^n = A + B*sqrt(-7)."""

    n: int
    f: BigPoly
    A: BigPoly
    B: BigPoly


def gen_fn(n: int) -> FamilyPolynomial:
    """Expand (x + sqrt(-7))^n binomially; f_n = A + B."""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    a = [0] * (n + 1)
    b = [0] * (n + 1)
    for k in range(n + 1):
        term = comb(n, k) * (-7) ** (k // 2)
        if k % 2:
            b[n - k] = term
        else:
            a[n - k] = term
    A, B = BigPoly(tuple(a)), BigPoly(tuple(b))
    f = A + B
    if not f.is_monic or f.degree != n:
        raise CrossCheckError(f"f_{n} = {f} is not monic of degree {n}", stage="polyfam")
    return FamilyPolynomial(n=n, f=f, A=A, B=B)


def check_norm_form(fp: FamilyPolynomial) -> bool:
    """A^2 + 7 B^2 = (x^2 + 7)^n."""
    return fp.A * fp.A + 7 * (fp.B * fp.B) == BigPoly((7, 0, 1)) ** fp.n


def _real_root_count(f: BigPoly) -> int:
    report = sturm_real_roots(f)
    if not report.is_squarefree:
        raise DomainError(f"{f} is not squarefree")
    return report.real_root_count


def is_totally_real(f: BigPoly) -> bool:
    """True iff the squarefree polynomial f has deg(f) distinct real roots."""
    return _real_root_count(f) == f.degree


def check_totally_real(fp: FamilyPolynomial) -> bool:
    try:
        return is_totally_real(fp.f)
    except DomainError as e:
        raise CrossCheckError(f"f_{fp.n}: {e}", stage="polyfam") from e


class RamificationStatus(str, Enum):
    CERTIFIED = "certified-totally-ramified"
    INCONCLUSIVE = "inconclusive"


class RamificationCertificate(BaseModel):
    status: RamificationStatus
    shift: Optional[int] = Field(None, description="c such that f(x + c) has a pure 2-adic Newton polygon")
    slope: Optional[str] = Field(None, description="Root valuation h/n with gcd(h, n) = 1")
    window: int = Field(..., description="Largest |c| tried")

    @property
    def certified(self) -> bool:
        return self.status is RamificationStatus.CERTIFIED


def _shift_order(window: int) -> Iterator[int]:
    yield 0
    for c in range(1, window + 1):
        yield -c
        yield c


def _pure_slope(f: BigPoly) -> Optional[Fraction]:
    polygon = newton_polygon_2adic(f)
    if not polygon.is_pure:
        return None
    h = polygon.hull[0].root_valuation * f.degree
    if h.denominator != 1 or gcd(int(h), f.degree) != 1:
        return None
    return Fraction(int(h), f.degree)


def certify_2_ramified(
    fp: Union[FamilyPolynomial, BigPoly],
    window: int = SHIFT_WINDOW,
    max_window: int = MAX_SHIFT_WINDOW,
) -> RamificationCertificate:
    """
    Search shifts 0, -1, 1, ..., -window, window for a pure 2-adic Newton polygon.

    If the window fails it is widened (logged) up to max_window. Failure is
    inconclusive, never a proof that 2 does not totally ramify.
    """
    f = fp.f if isinstance(fp, FamilyPolynomial) else fp
    if not f.is_monic or f.degree < 1:
        raise DomainError(f"{f} is not monic of positive degree")
    if f.degree == 1:
        return RamificationCertificate(status=RamificationStatus.CERTIFIED, shift=0, slope="0", window=0)

    tried = 0
    current = window
    while True:
        for c in _shift_order(current):
            if abs(c) < tried:
                continue
            slope = _pure_slope(f.shift(c))
            if slope is not None:
                return RamificationCertificate(
                    status=RamificationStatus.CERTIFIED, shift=c, slope=str(slope), window=current
                )
        if current >= max_window:
            break
        tried = current + 1
        current = min(2 * current, max_window)
        logger.warning("no certifying shift for %s; widening the window to %d", f, current)
    return RamificationCertificate(status=RamificationStatus.INCONCLUSIVE, window=current)


class IngestRecord(BaseModel):
    """One line of an ingested polynomial list"""

    line: int = Field(..., description="1-based line number")
    text: str = Field(..., description="Raw line")
    polynomial: Optional[str] = None
    degree: Optional[int] = None
    totally_real: Optional[bool] = None
    ramification: Optional[RamificationCertificate] = None
    error: Optional[str] = Field(None, description="Parse or check failure")


def parse_poly_line(text: str) -> BigPoly:
    """Parse ascending coefficients "c0,c1,...,cn"."""
    for minus in MINUS_SIGNS:
        text = text.replace(minus, "-")
    fields = [field.strip() for field in text.split(",")]
    if any(not field for field in fields):
        raise DomainError(f"empty coefficient in {text!r}")
    try:
        coeffs = tuple(int(field) for field in fields)
    except ValueError as e:
        raise DomainError(f"bad coefficient in {text!r}") from e
    f = BigPoly(coeffs)
    if f.degree < 1:
        raise DomainError(f"{text!r} is constant")
    return f


def check_polynomial(f: BigPoly, line: int = 0, text: str = "") -> IngestRecord:
    record = IngestRecord(line=line, text=text or ",".join(map(str, f.coeffs)), polynomial=str(f), degree=f.degree)
    try:
        record.totally_real = is_totally_real(f)
        record.ramification = certify_2_ramified(f)
    except DomainError as e:
        record.error = str(e)
    return record


def ingest_poly_list(path: Union[str, Path]) -> List[IngestRecord]:
    """Check each polynomial in a file; bad lines become error records and processing continues."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            try:
                f = parse_poly_line(text)
            except DomainError as e:
                logger.warning("line %d: %s", number, e)
                records.append(IngestRecord(line=number, text=text, error=str(e)))
                continue
            records.append(check_polynomial(f, number, text))
    return records
