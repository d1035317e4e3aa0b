"""
The exponential Diophantine equation 2^s1 + eta*2^s2 = (tau^k - tau^-k)/(2*sqrt(2)), tau = 3 + 2*sqrt(2)

Pipeline: Baker-Wustholz bound, continued fraction reduction, brute force, and the
tail argument for 2^(2 s1 + 3) + 1.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, gcd
from typing import Callable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from .arith.integers import SplitStatus, is_prime, ord2, prime_times_square
from .arith.reals import (
    CFExpansion,
    HighPrecReal,
    certified_continued_fraction,
    compare,
    highprec_log,
    highprec_sqrt,
    hp_log,
)
from .constants import (
    A_UPPER_CHECK,
    B_UPPER_CHECK,
    BRUTE_FORCE_K_MAX,
    BW_D,
    BW_N,
    C_LOWER_CHECK,
    C_UPPER_CHECK,
    CONVERGENT_SEARCH_TERMS,
    DEFAULT_PRECISION_BITS,
    ELL_MODULUS,
    ELL_RESIDUE,
    K_MAX_UPPER_CHECK,
    MAX_PRECISION_BITS,
    QUOTED_CONVERGENT,
    QUOTED_CONVERGENT_INDEX,
    REDUCED_BOUND_CEILING,
    TAU,
)
from .errors import CrossCheckError, DomainError, PrecisionExhaustedError
from .quadring import QuadInt

logger = logging.getLogger(__name__)

SANITY_RANGE = range(100, 111)


@dataclass(frozen=True, slots=True, order=True)
class DioSolution:
    k: int
    eta: int
    s1: int
    s2: int

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return self.k, self.eta, self.s1, self.s2


def tau() -> QuadInt:
    return QuadInt.of(2, *TAU)


def pell_value(k: int) -> int:
    """P_k from P_0 = 0, P_1 = 2, P_(k+1) = 6 P_k - P_(k-1)."""
    if k < 0:
        raise DomainError(f"k must be non-negative, got {k}")
    prev, cur = 0, 2
    if k == 0:
        return 0
    for _ in range(k - 1):
        prev, cur = cur, 6 * cur - prev
    return cur


def pell_value_direct(k: int) -> int:
    """P_k as the sqrt(2)-coordinate of tau^k."""
    if k < 0:
        raise DomainError(f"k must be non-negative, got {k}")
    return (tau() ** k).b // 2


def s2_bound(k: int) -> int:
    if k < 1:
        raise DomainError("s2 bound needs k >= 1; k = 0 is the family eta = -1, s1 = s2")
    return ord2(k) + 1


def _power_of_two_exponent(n: int) -> Optional[int]:
    if n <= 0 or n & (n - 1):
        return None
    return n.bit_length() - 1


def _scan(start: int, stop: int, s2_limit: Callable[[int, int], int]) -> List[DioSolution]:
    found = []
    prev, cur = pell_value(start - 1), pell_value(start)
    for k in range(start, stop):
        for s2 in range(s2_limit(k, cur) + 1):
            for eta in (1, -1):
                s1 = _power_of_two_exponent(cur - eta * 2**s2)
                if s1 is not None and s1 >= s2:
                    found.append(DioSolution(k, eta, s1, s2))
        prev, cur = cur, 6 * cur - prev
    return found


def _chunks(k_max: int, jobs: int) -> List[Tuple[int, int]]:
    jobs = max(1, min(jobs, k_max))
    step = -(-k_max // jobs)
    return [(lo, min(lo + step, k_max + 1)) for lo in range(1, k_max + 1, step)]


def _run(k_max: int, jobs: int, s2_limit: Callable[[int, int], int]) -> List[DioSolution]:
    if k_max < 1:
        raise DomainError("k_max must be at least 1")
    chunks = _chunks(k_max, jobs)
    if len(chunks) == 1:
        found = _scan(*chunks[0], s2_limit)
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = pool.map(lambda c: _scan(c[0], c[1], s2_limit), chunks)
            found = [s for part in parts for s in part]
    return sorted(found, key=lambda s: (s.k, s.s1, s.s2, s.eta))


def brute_force(k_max: int, jobs: int = 1) -> List[DioSolution]:
    """All solutions with 1 <= k <= k_max, using s2 <= ord2(k) + 1."""
    return _run(k_max, jobs, lambda k, _p: s2_bound(k))


def brute_force_unbounded(k_max: int, jobs: int = 1) -> List[DioSolution]:
    """All solutions with 1 <= k <= k_max, s2 up to the bit length of P_k."""
    return _run(k_max, jobs, lambda _k, p: p.bit_length())


def _tau_enclosure(bits: int) -> HighPrecReal:
    return highprec_sqrt(2, bits + 8) * TAU[1] + TAU[0]


def log_tau(bits: int) -> HighPrecReal:
    return hp_log(_tau_enclosure(bits), bits)


def log_sqrt2(bits: int) -> HighPrecReal:
    return highprec_log(2, bits + 1) / 2


def log_ratio(bits: int) -> HighPrecReal:
    """log(tau) / log(sqrt(2))."""
    return log_tau(bits + 8) / log_sqrt2(bits + 8)


@dataclass(frozen=True, slots=True)
class LinFormBound:
    """Baker-Wustholz data; C, a, b are rigorous upper bounds and k_max = ceil(2(a + b log b))."""

    C: Fraction
    a: Fraction
    b: Fraction
    k_max: int
    bits: int


def _bw_parts(bits: int) -> Tuple[HighPrecReal, HighPrecReal, HighPrecReal, HighPrecReal]:
    n, d = BW_N, BW_D
    lt = log_tau(bits)
    head = 18 * factorial(n + 1) * n ** (n + 1) * (32 * d) ** (n + 2)
    # heights: h(sqrt 2) = 1/2 and h(tau) = log(tau)/2
    C = highprec_log(2 * n * d, bits) * lt * Fraction(head, 4)
    a = (C * highprec_log(6, bits) + highprec_log(12, bits)) / lt
    b = (C + 1) / lt
    return C, a, b, lt


def bw_constant(bits: int = DEFAULT_PRECISION_BITS, max_bits: int = MAX_PRECISION_BITS) -> LinFormBound:
    """Baker-Wustholz constant and the first bound on k, with every stated inequality re-verified."""

    def part(i: int) -> Callable[[int], HighPrecReal]:
        return lambda b: _bw_parts(b)[i]

    checks = [
        (part(0), C_LOWER_CHECK, 1, "C > 1.32e10"),
        (part(0), C_UPPER_CHECK, -1, "C < 1.33e10"),
        (part(1), A_UPPER_CHECK, -1, "a < 1.36e10"),
        (part(2), B_UPPER_CHECK, -1, "b < 7.55e9"),
    ]
    for make, threshold, expected, label in checks:
        if compare(make, threshold, bits, max_bits) != expected:
            raise CrossCheckError(f"inequality {label} fails", stage="bw")

    C, a, b, _ = _bw_parts(bits)
    blogb = b * hp_log(b, bits)
    k_max = math.ceil((a + blogb).upper * 2)
    if k_max >= K_MAX_UPPER_CHECK:
        raise CrossCheckError(f"k_max = {k_max} is not below 3.8e11", stage="bw")
    _check_closed_form(k_max, a, b, bits, "bw")
    logger.info("Baker-Wustholz: C < %.6e, k_max = %d", float(C.upper), k_max)
    return LinFormBound(C=C.upper, a=a.upper, b=b.upper, k_max=k_max, bits=bits)


def _check_closed_form(bound: int, a: HighPrecReal, b: HighPrecReal, bits: int, stage: str) -> None:
    # bound - a - b*log(bound) > 0, and x - b*log(x) increases for x > b
    slack = bound - a.upper - b.upper * hp_log(HighPrecReal.from_number(bound, bits), bits).upper
    if slack <= 0 or bound <= b.upper:
        raise CrossCheckError(f"closed-form bound {bound} does not exceed a + b log(bound)", stage=stage)


@dataclass(frozen=True, slots=True)
class ReductionResult:
    index: int
    p: int
    q: int
    a_prime: Fraction
    b_prime: Fraction
    bound: int
    bits: int


def ratio_expansion(
    n_terms: int = CONVERGENT_SEARCH_TERMS,
    bits: int = DEFAULT_PRECISION_BITS,
    max_bits: int = MAX_PRECISION_BITS,
) -> CFExpansion:
    return certified_continued_fraction(log_ratio, n_terms, bits, max_bits)


def cf_reduce(
    k_upper: int,
    convergent_index: Optional[int] = None,
    bits: int = DEFAULT_PRECISION_BITS,
    max_bits: int = MAX_PRECISION_BITS,
) -> ReductionResult:
    """
    Reduce k < k_upper with a convergent p/q of log(tau)/log(sqrt(2)) having q > 2*k_upper.

    Then k < a' + b' log k with a' = log(24q/log sqrt(2))/log(tau) and b' = 1/log(tau),
    closed to k < 2(a' + max(0, b' log b')), rounded up.

    Args:
        k_upper: Current bound on k
        convergent_index: 0-based convergent to use; the first admissible one by default
    """
    expansion = ratio_expansion(CONVERGENT_SEARCH_TERMS, bits, max_bits)
    if convergent_index is None:
        candidates = [i for i, (_, q) in enumerate(expansion.convergents) if q > 2 * k_upper]
        if not candidates:
            raise PrecisionExhaustedError(
                f"no convergent with q > {2 * k_upper} among {len(expansion.terms)} certified terms"
            )
        index = candidates[0]
    else:
        index = convergent_index
        if index >= len(expansion.convergents):
            raise DomainError(f"convergent {index} beyond the {len(expansion.convergents)} certified terms")
    p, q = expansion.convergents[index]
    if q <= 2 * k_upper:
        raise CrossCheckError(f"q = {q} does not exceed 2*k_upper = {2 * k_upper}", stage="cf")

    x = log_ratio(bits)
    if not abs(Fraction(p, q) - x.center) + x.radius < Fraction(1, q * q):
        raise CrossCheckError(f"|p/q - x| < 1/q^2 not certified for p/q = {p}/{q}", stage="cf")

    lt = log_tau(bits)
    a_p = hp_log((HighPrecReal.from_number(24 * q, bits) / log_sqrt2(bits)), bits) / lt
    b_p = HighPrecReal.from_number(1, bits) / lt
    blogb = b_p * hp_log(b_p, bits)
    extra = max(Fraction(0), blogb.upper)
    bound = math.ceil(2 * (a_p.upper + extra))
    _check_closed_form(bound, a_p, b_p, bits, "cf")
    logger.info("continued fraction reduction with convergent %d (q = %d): k < %d", index, q, bound)
    return ReductionResult(index=index, p=p, q=q, a_prime=a_p.upper, b_prime=b_p.upper, bound=bound, bits=bits)


class ProofEntry(BaseModel):
    stage: str = Field(..., description="Pipeline stage")
    name: str = Field(..., description="Quantity or inequality")
    value: str = Field(..., description="Exact value or rigorous bound")


class K0Family(BaseModel):
    k: int = Field(0, description="k = 0")
    eta: int = Field(-1, description="eta = -1")
    relation: str = Field("s1 = s2", description="Free parameter relation")


class DioReport(BaseModel):
    """Solutions of the Pell-type equation and the log of every verified constant"""

    solutions: List[DioSolution] = Field(..., description="Solutions with k >= 1")
    k0_family: K0Family = Field(default_factory=K0Family, description="The k = 0 family")
    proof_log: List[ProofEntry] = Field(default_factory=list, description="Constants and inequalities in order")


def solve(
    bits: int = DEFAULT_PRECISION_BITS,
    max_bits: int = MAX_PRECISION_BITS,
    jobs: int = 1,
) -> DioReport:
    """Run bound, reduction and brute force; any failing stage raises CrossCheckError naming it."""
    log: List[ProofEntry] = []

    def record(stage: str, name: str, value: object) -> None:
        log.append(ProofEntry(stage=stage, name=name, value=str(value)))

    bw = bw_constant(bits, max_bits)
    record("bw", "C <", f"{float(bw.C):.6e}")
    record("bw", "a <", f"{float(bw.a):.6e}")
    record("bw", "b <", f"{float(bw.b):.6e}")
    record("bw", "k_max", bw.k_max)

    red = cf_reduce(bw.k_max, QUOTED_CONVERGENT_INDEX, bits, max_bits)
    if (red.p, red.q) != QUOTED_CONVERGENT:
        raise CrossCheckError(f"convergent {red.index} is {red.p}/{red.q}", stage="cf")
    record("cf", "convergent index", red.index)
    record("cf", "p", red.p)
    record("cf", "q", red.q)
    record("cf", "a' <", f"{float(red.a_prime):.6f}")
    record("cf", "b' <", f"{float(red.b_prime):.6f}")
    record("cf", "reduced bound", red.bound)
    first = cf_reduce(bw.k_max, None, bits, max_bits)
    record("cf", "first admissible convergent", f"{first.index} (bound {first.bound})")
    again = cf_reduce(red.bound, None, bits, max_bits)
    record("cf", "second pass (informational)", again.bound)

    if red.bound > REDUCED_BOUND_CEILING or red.bound > BRUTE_FORCE_K_MAX:
        raise CrossCheckError(f"reduced bound {red.bound} exceeds the brute-force range", stage="bound")
    record("bound", "k <", red.bound)

    solutions = brute_force(BRUTE_FORCE_K_MAX, jobs)
    for s in solutions:
        if 2**s.s1 + s.eta * 2**s.s2 != pell_value(s.k):
            raise CrossCheckError(f"{s} does not solve the equation", stage="brute")
    record("brute", "k range", f"1..{BRUTE_FORCE_K_MAX}")
    record("brute", "solutions", [s.as_tuple() for s in solutions])
    return DioReport(solutions=solutions, proof_log=log)


class BwSanity(BaseModel):
    k: int
    s1: int
    log_abs_lambda: float = Field(..., description="Upper end of log|Lambda|")
    lower_bound: float = Field(..., description="-C log B")
    holds: bool


def bw_sanity(k: int, bits: int = DEFAULT_PRECISION_BITS) -> BwSanity:
    """Check log|Lambda| > -C log B for the s1 closest to the line, Lambda = (2 s1 + 3) log sqrt 2 - k log tau."""
    C = _bw_parts(bits)[0]
    x = log_ratio(bits)
    s1 = max(0, round((k * x.center - 3) / 2))
    lt, l2 = log_tau(bits), log_sqrt2(bits)

    def lam(s: int) -> HighPrecReal:
        return l2 * (2 * s + 3) - lt * k

    s1 = min((s for s in (s1 - 1, s1, s1 + 1) if s >= 0), key=lambda s: abs(lam(s).center))
    value = lam(s1)
    if value.sign() is None:
        raise PrecisionExhaustedError(f"sign of Lambda undecided at k = {k}")
    magnitude = value if value.sign() > 0 else -value
    log_abs = hp_log(magnitude, bits)
    B = max(2 * s1 + 3, k)
    rhs = -(C * highprec_log(B, bits))
    return BwSanity(
        k=k, s1=s1, log_abs_lambda=float(log_abs.upper), lower_bound=float(rhs.upper),
        holds=log_abs.lower > rhs.upper,
    )


class TailEntry(BaseModel):
    s1: int
    value: int = Field(..., description="2^(2 s1 + 3) + 1")
    status: str = Field(..., description="yes/no/unresolved: value = l*w^2 with l prime")
    ell: Optional[int] = None
    admissible: bool = Field(False, description="l = 1 mod 24")


class TailReport(BaseModel):
    """Direct and congruence checks that l*w^2 = 2^(2 s1 + 3) + 1 has no admissible solution"""

    s1_max: int
    entries: List[TailEntry]
    divisible_by_three: bool = Field(..., description="3 divides every value")
    nine_iff_three_divides_s1: bool = Field(..., description="9 | value exactly when 3 | s1")
    gcd_is_three: bool = Field(..., description="gcd of the two cubic factors is 3 for t = 0..t_max")
    mod4_obstruction: bool = Field(..., description="Both factors are 1 mod 4 for t >= 1, never 3x^2")
    flagged: List[int] = Field(default_factory=list, description="s1 with incomplete factorization")

    @property
    def holds(self) -> bool:
        return (
            not any(e.admissible for e in self.entries)
            and self.divisible_by_three
            and self.nine_iff_three_divides_s1
            and self.gcd_is_three
            and self.mod4_obstruction
        )


def tail_check(s1_max: int = 30, t_max: int = 20) -> TailReport:
    """Verify that 2^(2 s1 + 3) + 1 is never l*w^2 with l prime = 1 mod 24, directly and by congruences."""
    if s1_max < 0:
        raise DomainError("s1_max must be non-negative")
    entries = []
    flagged = []
    nine_ok = True
    for s1 in range(s1_max + 1):
        value = 2 ** (2 * s1 + 3) + 1
        split = prime_times_square(value)
        admissible = split.status is SplitStatus.YES and split.prime is not None and split.prime % ELL_MODULUS == ELL_RESIDUE
        if split.status is SplitStatus.UNRESOLVED:
            logger.warning("tail check: 2^%d + 1 left unresolved", 2 * s1 + 3)
            flagged.append(s1)
        entries.append(
            TailEntry(s1=s1, value=value, status=split.status.value, ell=split.prime, admissible=admissible)
        )
        nine_ok = nine_ok and ((value % 9 == 0) == (s1 % 3 == 0))

    gcd_ok = True
    mod4_ok = True
    for t in range(t_max + 1):
        x = 2 ** (2 * t + 1)
        f1, f2 = x + 1, x * x - x + 1
        gcd_ok = gcd_ok and gcd(f1, f2) == 3 and f1 * f2 == x**3 + 1
        if t >= 1:
            # 3x^2 is 0 or 3 mod 4
            mod4_ok = mod4_ok and f1 % 4 == 1 and f2 % 4 == 1
    return TailReport(
        s1_max=s1_max,
        entries=entries,
        divisible_by_three=all(e.value % 3 == 0 for e in entries),
        nine_iff_three_divides_s1=nine_ok,
        gcd_is_three=gcd_ok,
        mod4_obstruction=mod4_ok,
        flagged=flagged,
    )


class PellImage(BaseModel):
    solution: Tuple[int, int, int, int] = Field(..., description="(k, eta, s1, s2)")
    value: int = Field(..., description="2^(2 s1 + 1) + 2^(2 s2 + 1) + 1 - eta*2^(s1 + s2 + 2)")
    ell: Optional[int] = Field(None, description="l when the value is l*w^2 with l prime")
    w: Optional[int] = None
    admissible: bool = Field(False, description="l = 1 mod 24")


def pell_images(solutions: Optional[Sequence[DioSolution]] = None) -> List[PellImage]:
    """The value l*w2^2 forced by each nonzero-k solution, and the prime l it would need."""
    if solutions is None:
        solutions = brute_force(BRUTE_FORCE_K_MAX)
    out = []
    for s in solutions:
        value = 2 ** (2 * s.s1 + 1) + 2 ** (2 * s.s2 + 1) + 1 - s.eta * 2 ** (s.s1 + s.s2 + 2)
        split = prime_times_square(value)
        ell = split.prime if split.status is SplitStatus.YES else None
        out.append(
            PellImage(
                solution=s.as_tuple(),
                value=value,
                ell=ell,
                w=split.root if ell is not None else None,
                admissible=ell is not None and is_prime(ell) and ell % ELL_MODULUS == ELL_RESIDUE,
            )
        )
    return out
