"""
Exact integer kernels: square roots, primality, factoring and square-part extraction
"""

import logging
import random
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import gmpy2

from ..constants import (
    DEFAULT_RHO_STEP_CAP,
    MR_DETERMINISTIC_BOUND,
    MR_DETERMINISTIC_WITNESSES,
    MR_PROBABILISTIC_ROUNDS,
    TRIAL_DIVISION_BOUND,
)
from ..errors import DomainError

logger = logging.getLogger(__name__)

# gcds are taken once per batch of rho steps
_RHO_BATCH = 128


def isqrt(n: int) -> int:
    """Return floor(sqrt(n)) for n >= 0."""
    if n < 0:
        raise DomainError(f"isqrt of negative number {n}")
    return int(gmpy2.isqrt(n))


def is_square(n: int) -> bool:
    """True iff n is a perfect square (negative numbers never are)."""
    return n >= 0 and bool(gmpy2.is_square(n))


def ord2(n: int) -> int:
    """2-adic valuation of a nonzero integer."""
    if n == 0:
        raise DomainError("2-adic valuation of zero")
    return int(gmpy2.bit_scan1(gmpy2.mpz(abs(n))))


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise DomainError("valuation of zero")
    if p == 2:
        return ord2(n)
    _, count = gmpy2.remove(abs(n), p)
    return int(count)


def extended_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    g, s, t = gmpy2.gcdext(a, b)
    return int(g), int(s), int(t)


@lru_cache(maxsize=8)
def small_primes(limit: int) -> Tuple[int, ...]:
    """All primes below limit (Eratosthenes)."""
    if limit < 3:
        return ()
    sieve = bytearray([1]) * limit
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(limit - 1) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, limit, p)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def _strong_probable_prime(n: int, a: int, d: int, s: int) -> bool:
    x = int(gmpy2.powmod(a, d, n))
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """
    Miller-Rabin primality test.

    Exact below 341550071728321 (witnesses 2..17). Above that bound the first 12
    primes are used as witnesses followed by pseudo-random bases seeded by n, 64
    rounds in total, so the answer is reproducible for a given n.

    Args:
        n: Integer to test

    Returns:
        True if n is (probably, above the bound) prime
    """
    if n < 2:
        return False
    for p in small_primes(100):
        if n % p == 0:
            return n == p
    d = n - 1
    s = ord2(d)
    d >>= s
    if n < MR_DETERMINISTIC_BOUND:
        witnesses: List[int] = list(MR_DETERMINISTIC_WITNESSES)
    else:
        witnesses = list(small_primes(40))
        rng = random.Random(n)
        witnesses += [rng.randrange(2, n - 1) for _ in range(MR_PROBABILISTIC_ROUNDS - len(witnesses))]
    return all(_strong_probable_prime(n, a, d, s) for a in witnesses)


def _brent(n: int, step_cap: int) -> Optional[int]:
    """Find a nontrivial factor of odd composite n, or None once step_cap is spent."""
    modulus = gmpy2.mpz(n)
    steps = 0
    for c in range(1, 32):
        y = gmpy2.mpz(2)
        x = ys = y
        q = gmpy2.mpz(1)
        g = gmpy2.mpz(1)
        r = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % modulus
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(_RHO_BATCH, r - k)):
                    y = (y * y + c) % modulus
                    q = q * abs(x - y) % modulus
                g = gmpy2.gcd(q, modulus)
                k += _RHO_BATCH
            steps += 2 * r
            r *= 2
            if steps > step_cap and g == 1:
                return None
        if g == modulus:
            # the batch overshot; replay it one step at a time
            while True:
                ys = (ys * ys + c) % modulus
                g = gmpy2.gcd(abs(x - ys), modulus)
                if g > 1:
                    break
        if g != modulus:
            return int(g)
        logger.debug("rho cycle closed without a factor of %d (c=%d), retrying", n, c)
    return None


@dataclass(frozen=True, slots=True)
class FactorResult:
    """Prime factorization, possibly with composite cofactors left unresolved."""

    n: int
    factors: Tuple[Tuple[int, int], ...]
    unresolved: Tuple[int, ...] = ()

    @property
    def complete(self) -> bool:
        return not self.unresolved

    def as_dict(self) -> Dict[int, int]:
        return dict(self.factors)


def factor(n: int, step_cap: int = DEFAULT_RHO_STEP_CAP) -> FactorResult:
    """
    Factor n > 0 by trial division below 10^4 and then Brent's variant of Pollard rho.

    Composite cofactors that survive step_cap rho iterations are returned in
    `unresolved`; the listed primes always multiply into n together with them.

    Args:
        n: Positive integer
        step_cap: Rho iterations allowed per cofactor

    Returns:
        FactorResult with primes in increasing order
    """
    if n <= 0:
        raise DomainError(f"cannot factor {n}")
    counts: Dict[int, int] = {}
    m = n
    for p in small_primes(TRIAL_DIVISION_BOUND):
        if p * p > m:
            break
        if m % p == 0:
            rest, e = gmpy2.remove(m, p)
            m = int(rest)
            counts[p] = int(e)
    unresolved: List[int] = []
    stack = [m] if m > 1 else []
    while stack:
        c = stack.pop()
        if is_prime(c):
            counts[c] = counts.get(c, 0) + 1
            continue
        if is_square(c):
            root = isqrt(c)
            stack.extend([root, root])
            continue
        d = _brent(c, step_cap)
        if d is None:
            logger.warning("factorization of %d left cofactor %d unresolved", n, c)
            unresolved.append(c)
        else:
            stack.extend([d, c // d])
    return FactorResult(
        n=n, factors=tuple(sorted(counts.items())), unresolved=tuple(sorted(unresolved))
    )


def divisors(n: int) -> List[int]:
    """Sorted positive divisors of n > 0."""
    result = factor(n)
    if not result.complete:
        raise DomainError(f"cannot list divisors of {n}: factorization incomplete")
    divs = [1]
    for p, e in result.factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def is_squarefree(n: int) -> bool:
    """True iff no square of a prime divides n (n != 0; sign ignored)."""
    if n == 0:
        return False
    result = factor(abs(n))
    if not result.complete:
        if any(is_square(c) for c in result.unresolved):
            return False
        raise DomainError(f"squarefreeness of {n} undecided: factorization incomplete")
    return all(e == 1 for _, e in result.factors)


class SplitStatus(str, Enum):
    YES = "yes"
    NO = "no"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True, slots=True)
class PrimeSquareSplit:
    """Outcome of writing n as prime * root**2."""

    status: SplitStatus
    prime: Optional[int] = None
    root: Optional[int] = None


def prime_times_square(n: int, step_cap: int = DEFAULT_RHO_STEP_CAP) -> PrimeSquareSplit:
    """
    Decide whether n = l * v^2 with l prime, and if so return (l, v) with v > 0.

    Only the case "all small primes occur to even powers and the cofactor is a
    composite non-square" needs rho; everything else is settled by trial division,
    primality and perfect-square tests.
    """
    if n <= 1:
        return PrimeSquareSplit(SplitStatus.NO)
    core = 1
    root = 1
    m = n
    for p in small_primes(TRIAL_DIVISION_BOUND):
        if p * p > m:
            break
        if m % p == 0:
            rest, e = gmpy2.remove(m, p)
            m, e = int(rest), int(e)
            if e % 2:
                core *= p
            root *= p ** (e // 2)

    if m == 1:
        return _split_from_core(core, root)
    if is_prime(m):
        if core == 1:
            return PrimeSquareSplit(SplitStatus.YES, m, root)
        return PrimeSquareSplit(SplitStatus.NO)
    if is_square(m):
        return _split_from_core(core, root * isqrt(m))
    if core > 1:
        # m carries a prime to an odd power as well
        return PrimeSquareSplit(SplitStatus.NO)

    result = factor(m, step_cap)
    if not result.complete:
        return PrimeSquareSplit(SplitStatus.UNRESOLVED)
    for p, e in result.factors:
        if e % 2:
            core *= p
        root *= p ** (e // 2)
    return _split_from_core(core, root)


def _split_from_core(core: int, root: int) -> PrimeSquareSplit:
    if core > 1 and is_prime(core):
        return PrimeSquareSplit(SplitStatus.YES, core, root)
    return PrimeSquareSplit(SplitStatus.NO)
