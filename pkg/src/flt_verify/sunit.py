"""
S-unit equation apparatus for Q(sqrt(l)), l = 1 mod 24: parametrized search, lemma checks,
S3 orbits and Frey curve invariants
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple, TypeVar, Union

from pydantic import BaseModel, Field

from .arith.integers import PrimeSquareSplit, SplitStatus, is_prime, is_square, isqrt, prime_times_square, valuation
from .constants import DEFAULT_RHO_STEP_CAP, ELL_MODULUS, ELL_RESIDUE, EXCEPTIONAL_ELL
from .dio import pell_images, solve, tail_check
from .errors import CrossCheckError, DomainError
from .genus import RayClassReport, ray_class_check
from .quadring import QuadIdeal, QuadInt, QuadNumber, ord_prime, prime_above_2

logger = logging.getLogger(__name__)

FieldElement = Union[Fraction, QuadNumber]
T = TypeVar("T", Fraction, QuadNumber)

# Solutions from r1 >= this are covered by the sign law
SIGN_LAW_MIN_R1 = 6
SMALL_R1_MAX = 5


@dataclass(frozen=True, slots=True)
class ParamSolution:
    """lam = (eta1*2^r1 - eta2*2^r2 + 1 + v*sqrt(l))/2 and mu = 1 - lam."""

    ell: int
    eta1: int
    eta2: int
    r1: int
    r2: int
    v: int
    lam: QuadInt
    mu: QuadInt

    @property
    def trace_part(self) -> int:
        return self.eta1 * 2**self.r1 - self.eta2 * 2**self.r2 + 1

    @property
    def is_exceptional(self) -> bool:
        """Both primes above 2 divide lam or mu to order at least 2."""
        return self.r2 >= 2


@dataclass(frozen=True, slots=True)
class UnresolvedValue:
    eta1: int
    eta2: int
    r1: int
    r2: int
    n: int


@dataclass(frozen=True, slots=True)
class ParamSearchResult:
    solutions: Tuple[ParamSolution, ...]
    unresolved: Tuple[UnresolvedValue, ...]


def norm_equation_value(eta1: int, eta2: int, r1: int, r2: int) -> int:
    """(eta1*2^r1 - eta2*2^r2 + 1)^2 - eta1*2^(r1+2)."""
    a = eta1 * 2**r1 - eta2 * 2**r2 + 1
    return a * a - eta1 * 2 ** (r1 + 2)


def conjugate_equation_value(eta1: int, eta2: int, r1: int, r2: int) -> int:
    """(eta2*2^r2 - eta1*2^r1 + 1)^2 - eta2*2^(r2+2)."""
    b = eta2 * 2**r2 - eta1 * 2**r1 + 1
    return b * b - eta2 * 2 ** (r2 + 2)


def _ell_congruence_possible(n: int) -> bool:
    # n = l*v^2 with l = 1 mod 24: even 2- and 3-valuations, unit parts 1 mod 8 and 1 mod 3
    for q, mod in ((2, 8), (3, 3)):
        e = valuation(n, q)
        if e % 2 or (n // q**e) % mod != 1:
            return False
    return True


def _make_solution(ell: int, eta1: int, eta2: int, r1: int, r2: int, v: int) -> ParamSolution:
    a = eta1 * 2**r1 - eta2 * 2**r2 + 1
    lam = QuadInt(ell, a, v)
    mu = QuadInt(ell, 2 - a, -v)
    sol = ParamSolution(ell=ell, eta1=eta1, eta2=eta2, r1=r1, r2=r2, v=v, lam=lam, mu=mu)
    if lam + mu != QuadInt.of(ell, 1):
        raise CrossCheckError(f"lambda + mu != 1 for {sol}", stage="param-search")
    if conjugate_equation_value(eta1, eta2, r1, r2) != ell * v * v:
        raise CrossCheckError(f"conjugate equation fails for {sol}", stage="param-search")
    if lam.norm() != eta1 * 2**r1 or mu.norm() != eta2 * 2**r2:
        raise CrossCheckError(f"norm law fails for {sol}", stage="param-search")
    return sol


def param_search(
    r1_max: int,
    ell_filter: Optional[Tuple[int, int]] = (ELL_MODULUS, ELL_RESIDUE),
    ell: Optional[int] = None,
    step_cap: int = DEFAULT_RHO_STEP_CAP,
) -> ParamSearchResult:
    """
    Enumerate eta1, eta2 in {+-1} and 0 <= r2 <= r1 <= r1_max, and write each
    N = (eta1*2^r1 - eta2*2^r2 + 1)^2 - eta1*2^(r1+2) as l*v^2 with l prime.

    Args:
        r1_max: Largest r1
        ell_filter: (modulus, residue) the prime l must satisfy; None accepts every prime
        ell: Restrict to this prime, which avoids factoring altogether
        step_cap: Rho iterations allowed per cofactor

    Returns:
        Solutions (both signs of v) and the values whose factorization stayed incomplete
    """
    if r1_max < 0:
        raise DomainError("r1_max must be non-negative")
    default_filter = ell_filter == (ELL_MODULUS, ELL_RESIDUE)
    solutions: List[ParamSolution] = []
    unresolved: List[UnresolvedValue] = []
    for r1 in range(r1_max + 1):
        for r2 in range(r1 + 1):
            for eta1 in (1, -1):
                for eta2 in (1, -1):
                    n = norm_equation_value(eta1, eta2, r1, r2)
                    if n <= 0:
                        continue
                    if default_filter and not _ell_congruence_possible(n):
                        continue
                    if ell is not None:
                        if n % ell or not is_square(n // ell):
                            continue
                        split = PrimeSquareSplit(SplitStatus.YES, ell, isqrt(n // ell))
                    else:
                        split = prime_times_square(n, step_cap)
                    if split.status is SplitStatus.UNRESOLVED:
                        logger.warning("N = %d (eta=%d,%d r=%d,%d) unresolved", n, eta1, eta2, r1, r2)
                        unresolved.append(UnresolvedValue(eta1, eta2, r1, r2, n))
                        continue
                    if split.status is SplitStatus.NO:
                        continue
                    assert split.prime is not None and split.root is not None
                    if ell_filter is not None and split.prime % ell_filter[0] != ell_filter[1] % ell_filter[0]:
                        continue
                    for v in (split.root, -split.root):
                        solutions.append(_make_solution(split.prime, eta1, eta2, r1, r2, v))
    logger.info("param_search(r1_max=%d): %d solutions, %d unresolved", r1_max, len(solutions), len(unresolved))
    return ParamSearchResult(tuple(solutions), tuple(unresolved))


class LemmaChecks(BaseModel):
    """Predicates of the parametrization lemmas evaluated on one solution"""

    norm_equation: bool = Field(..., description="(eta1*2^r1 - eta2*2^r2 + 1)^2 - eta1*2^(r1+2) = l*v^2")
    conjugate_equation: bool = Field(..., description="The same relation with the roles of lambda and mu swapped")
    norm_law: bool = Field(..., description="Norm(lambda) = eta1*2^r1 and Norm(mu) = eta2*2^r2")
    parity: bool = Field(..., description="eta_i = -1 exactly when r_i is odd")
    r2_positive: bool = Field(..., description="r2 > 0")
    sign_law: Optional[bool] = Field(None, description="eta1 = eta2 = -1; evaluated when r1 >= 6")
    small_r1_exceptional: Optional[bool] = Field(None, description="l = 73 whenever r1 <= 5")

    @property
    def all_pass(self) -> bool:
        return all(v is not False for v in self.model_dump().values())


def filter_lemmas(sol: ParamSolution) -> LemmaChecks:
    n = sol.ell * sol.v * sol.v
    return LemmaChecks(
        norm_equation=norm_equation_value(sol.eta1, sol.eta2, sol.r1, sol.r2) == n,
        conjugate_equation=conjugate_equation_value(sol.eta1, sol.eta2, sol.r1, sol.r2) == n,
        norm_law=sol.lam.norm() == sol.eta1 * 2**sol.r1 and sol.mu.norm() == sol.eta2 * 2**sol.r2,
        parity=all((eta == -1) == (r % 2 == 1) for eta, r in ((sol.eta1, sol.r1), (sol.eta2, sol.r2))),
        r2_positive=sol.r2 > 0,
        sign_law=(sol.eta1 == -1 and sol.eta2 == -1) if sol.r1 >= SIGN_LAW_MIN_R1 else None,
        small_r1_exceptional=(sol.ell == EXCEPTIONAL_ELL) if sol.r1 <= SMALL_R1_MAX else None,
    )


def solve_odd_square_difference(k: int, eta: int) -> Optional[Tuple[int, int]]:
    """The positive odd solution (a, b) of a^2 - b^2 = eta*2^k: (2^(k-2) + eta, 2^(k-2) - eta), k >= 3."""
    if eta not in (1, -1):
        raise DomainError(f"eta must be +-1, got {eta}")
    if k < 3:
        return None
    a, b = 2 ** (k - 2) + eta, 2 ** (k - 2) - eta
    if a * a - b * b != eta * 2**k:
        raise CrossCheckError(f"({a}, {b}) does not solve a^2 - b^2 = {eta}*2^{k}")
    return a, b


def _sort_key(z: FieldElement) -> Tuple[Fraction, Fraction]:
    if isinstance(z, QuadNumber):
        return z.x, z.y
    return Fraction(z), Fraction(0)


def _is_zero_or_one(z: FieldElement) -> bool:
    if isinstance(z, QuadNumber):
        return z.y == 0 and z.x in (0, 1)
    return z in (0, 1)


def s3_orbit(lam: T) -> List[T]:
    """The images z, 1/z, 1-z, 1/(1-z), z/(z-1), (z-1)/z, deduplicated and sorted."""
    if isinstance(lam, int):
        lam = Fraction(lam)
    if _is_zero_or_one(lam):
        raise DomainError("lambda must not be 0 or 1")
    one_minus = 1 - lam
    images = {
        lam,
        1 / lam,
        one_minus,
        1 / one_minus,
        lam / (lam - 1),
        (lam - 1) / lam,
    }
    return sorted(images, key=_sort_key)


def _conjugate(z: FieldElement) -> FieldElement:
    return z.conjugate() if isinstance(z, QuadNumber) else z


def s_unit_orbits(lams: Iterable[FieldElement]) -> List[List[FieldElement]]:
    """Group values of lambda into orbits under S3 and Galois conjugation."""
    seen: Dict[FieldElement, int] = {}
    orbits: List[List[FieldElement]] = []
    for lam in lams:
        if lam in seen:
            continue
        members = set(s3_orbit(lam))
        members |= {_conjugate(z) for z in members}
        ordered = sorted(members, key=_sort_key)
        for z in ordered:
            seen[z] = len(orbits)
        orbits.append(ordered)
    return orbits


@dataclass(frozen=True, slots=True)
class FreyInvariants:
    c4: FieldElement
    c6: FieldElement
    delta: FieldElement
    j: FieldElement


def frey_invariants(lam: "FieldElement | QuadInt | int") -> FreyInvariants:
    """
    Invariants of Y^2 = X(X + 1)(X + lam):
    c4 = 16(lam^2 - lam + 1), c6 = -64(1 - lam/2)(1 - 2 lam)(1 + lam),
    delta = 16 lam^2 (lam - 1)^2 and j = c4^3 / delta.
    """
    if isinstance(lam, QuadInt):
        lam = QuadNumber.from_int(lam)
    elif isinstance(lam, int):
        lam = Fraction(lam)
    if _is_zero_or_one(lam):
        raise DomainError("lambda must not be 0 or 1")
    c4 = (lam * lam - lam + 1) * 16
    c6 = (1 - lam / 2) * (1 - lam * 2) * (1 + lam) * -64
    delta = lam * lam * (lam - 1) * (lam - 1) * 16
    j = c4 * c4 * c4 / delta
    if c4 * c4 * c4 - c6 * c6 != delta * 1728:
        raise CrossCheckError(f"c4^3 - c6^2 != 1728*delta for lambda = {lam}", stage="frey")
    return FreyInvariants(c4=c4, c6=c6, delta=delta, j=j)


def j_valuation_check(lam: "QuadNumber | QuadInt", prime: QuadIdeal) -> Optional[bool]:
    """ord_P(j) = 8*ord_P(2) - 2t when t = ord_P(lam) > 4*ord_P(2); None otherwise."""
    if isinstance(lam, QuadInt):
        lam = QuadNumber.from_int(lam)
    t = ord_prime(lam, prime)
    o2 = ord_prime(QuadInt.of(lam.d, 2), prime)
    if t <= 4 * o2:
        return None
    j = frey_invariants(lam).j
    assert isinstance(j, QuadNumber)
    return ord_prime(j, prime) == 8 * o2 - 2 * t


class KrausStatus(str, Enum):
    EXCEPTIONAL_ORBIT = "exceptional-orbit-only"
    NO_EXCEPTIONAL = "no-exceptional-solutions"
    UNEXPECTED = "unexpected-exceptional-solutions"


class KrausVerdict(BaseModel):
    """Outcome of the S-unit enumeration for one prime l"""

    ell: int = Field(..., description="Prime l = 1 mod 24")
    r1_max: int = Field(..., description="Enumeration bound on r1")
    status: KrausStatus = Field(..., description="Verdict of the enumeration")
    surviving_orbits: List[List[str]] = Field(
        default_factory=list,
        description="Orbits (S3 x Galois) of solutions with both primes above 2 to order >= 2",
    )
    allowed_solutions: int = Field(0, description="Solutions where one prime above 2 has order 1")
    ray_class: RayClassReport = Field(..., description="Parity of the ray class numbers modulo P^2")
    closure_solutions: List[Tuple[int, int, int, int]] = Field(
        default_factory=list, description="(k, eta, s1, s2) of the Pell-type equation closing r1 >= 6"
    )
    closure_tail_ok: bool = Field(False, description="2^(2 s1 + 3) + 1 is never l*w^2 with l = 1 mod 24")
    exceptional_images: List[int] = Field(
        default_factory=list, description="Primes l = 1 mod 24 reached by the nonzero-k solutions"
    )


@lru_cache(maxsize=1)
def _closure() -> Tuple[Tuple[Tuple[int, int, int, int], ...], bool, Tuple[int, ...]]:
    solved = solve()
    tail = tail_check()
    images = tuple(sorted({img.ell for img in pell_images() if img.ell is not None and img.admissible}))
    sols = tuple((s.k, s.eta, s.s1, s.s2) for s in solved.solutions)
    return sols, tail.holds, images


def kraus_verify(ell: int, r1_max: int) -> KrausVerdict:
    """
    Enumerate the parametrized solutions for one prime l, check every lemma on them,
    and attach the closure argument for r1 >= 6.

    With l fixed each N is tested for l*v^2 directly, so nothing is factored and the
    enumeration is always complete. Exceptional solutions are accepted only when their
    orbit is the one of (-23 + 3*sqrt(73))/2.
    """
    if not is_prime(ell) or ell % ELL_MODULUS != ELL_RESIDUE:
        raise DomainError(f"{ell} is not a prime congruent to {ELL_RESIDUE} mod {ELL_MODULUS}")
    result = param_search(r1_max, ell=ell)
    for sol in result.solutions:
        checks = filter_lemmas(sol)
        if not checks.all_pass:
            raise CrossCheckError(f"lemma check failed on {sol}: {checks.model_dump()}", stage="kraus")

    exceptional = [QuadNumber.from_int(s.lam) for s in result.solutions if s.is_exceptional]
    orbits = s_unit_orbits(exceptional)
    known = set(s_unit_orbits(exceptional_orbit())[0])
    if not orbits:
        status = KrausStatus.NO_EXCEPTIONAL
    elif all(set(orbit) == known for orbit in orbits):
        status = KrausStatus.EXCEPTIONAL_ORBIT
    else:
        status = KrausStatus.UNEXPECTED
        logger.warning("l = %d: %d exceptional orbits", ell, len(orbits))

    sols, tail_ok, images = _closure()
    return KrausVerdict(
        ell=ell,
        r1_max=r1_max,
        status=status,
        surviving_orbits=[[str(z) for z in orbit] for orbit in orbits],
        allowed_solutions=sum(1 for s in result.solutions if not s.is_exceptional),
        ray_class=ray_class_check(ell),
        closure_solutions=list(sols),
        closure_tail_ok=tail_ok,
        exceptional_images=list(images),
    )


def exceptional_orbit() -> List[QuadNumber]:
    """S3 orbit of lambda = (-23 + 3*sqrt(73))/2."""
    return s3_orbit(QuadNumber.from_int(QuadInt(EXCEPTIONAL_ELL, -23, 3)))


def primes_above_two_ord(sol: ParamSolution) -> List[Tuple[int, int]]:
    """(ord_P(lam), ord_P(mu)) for each prime P above 2."""
    return [(ord_prime(sol.lam, p), ord_prime(sol.mu, p)) for p in prime_above_2(sol.ell).ideals]
