"""
Tests for the exponential Diophantine pipeline: bounds, reduction, brute force and tail checks
"""

import mpmath
import pytest

from flt_verify.constants import K_MAX_UPPER_CHECK, QUOTED_CONVERGENT, QUOTED_CONVERGENT_INDEX
from flt_verify.dio import (
    SANITY_RANGE,
    DioReport,
    DioSolution,
    LinFormBound,
    brute_force,
    brute_force_unbounded,
    bw_constant,
    bw_sanity,
    cf_reduce,
    log_ratio,
    pell_images,
    pell_value,
    pell_value_direct,
    s2_bound,
    solve,
    tail_check,
    tau,
)
from flt_verify.errors import DomainError
from flt_verify.quadring import ord_sqrt2

EXPECTED = [
    DioSolution(1, 1, 0, 0),
    DioSolution(1, -1, 2, 1),
    DioSolution(2, 1, 3, 2),
    DioSolution(2, -1, 4, 2),
]


@pytest.fixture(scope="module")
def bound() -> LinFormBound:
    """Baker-Wustholz bound at the default precision"""
    return bw_constant()


@pytest.fixture(scope="module")
def report() -> DioReport:
    """Full pipeline run"""
    return solve()


def test_pell_value() -> None:
    """Test the recurrence against powers of tau up to k = 500"""
    assert [pell_value(k) for k in range(5)] == [0, 2, 12, 70, 408]
    for k in range(501):
        assert pell_value(k) == pell_value_direct(k)
    with pytest.raises(DomainError):
        pell_value(-1)


@pytest.mark.parametrize("a", range(1, 21))
def test_tau_power_valuation(a: int) -> None:
    """Test the sqrt(2)-adic valuation of tau^(2^a) - 1"""
    assert ord_sqrt2(tau() ** (2**a) - 1) == 2 * a + 3


def test_s2_bound() -> None:
    """Test s2 <= ord2(k) + 1"""
    assert s2_bound(1) == 1
    assert s2_bound(12) == 3
    assert s2_bound(1024) == 11
    with pytest.raises(DomainError):
        s2_bound(0)


def test_brute_force() -> None:
    """Test the four solutions with small k"""
    assert brute_force(100) == EXPECTED
    assert brute_force(100, jobs=4) == EXPECTED
    for s in EXPECTED:
        assert 2**s.s1 + s.eta * 2**s.s2 == pell_value(s.k)
    with pytest.raises(DomainError):
        brute_force(0)


def test_s2_bound_is_never_binding() -> None:
    """Test that searching every s2 finds nothing beyond the valuation bound"""
    found = brute_force_unbounded(200, jobs=2)
    assert found == EXPECTED
    assert all(s.s2 <= s2_bound(s.k) for s in found)


def test_log_ratio() -> None:
    """Test log(tau)/log(sqrt(2)) against mpmath"""
    mpmath.mp.prec = 300
    reference = mpmath.log(3 + 2 * mpmath.sqrt(2)) / mpmath.log(mpmath.sqrt(2))
    x = log_ratio(256)
    assert x.radius < 2**-200
    assert abs(float(x.center) - float(reference)) < 1e-15


def test_bw_constant(bound: LinFormBound) -> None:
    """Test the asserted ranges of C, a, b and k_max"""
    assert 132 * 10**8 < bound.C < 133 * 10**8
    assert bound.a < 136 * 10**8
    assert bound.b < 755 * 10**7
    assert 369 * 10**9 < bound.k_max < K_MAX_UPPER_CHECK


def test_cf_reduce_quoted_convergent(bound: LinFormBound) -> None:
    """Test the reduction with the quoted convergent"""
    red = cf_reduce(bound.k_max, QUOTED_CONVERGENT_INDEX)
    assert (red.p, red.q) == QUOTED_CONVERGENT
    assert red.q > 2 * bound.k_max
    assert red.bound <= 100


def test_cf_reduce_first_admissible(bound: LinFormBound) -> None:
    """Test that the first convergent with q > 2*k_max is used by default"""
    red = cf_reduce(bound.k_max)
    assert red.index == 24
    assert red.q == 44557981501665
    assert red.bound <= 100
    again = cf_reduce(red.bound)
    assert again.bound <= red.bound


def test_cf_reduce_index_out_of_range(bound: LinFormBound) -> None:
    """Test that convergent indices past the certified terms are rejected"""
    with pytest.raises(DomainError):
        cf_reduce(bound.k_max, 500)


def test_solve(report: DioReport) -> None:
    """Test the pipeline result and its proof log"""
    assert report.solutions == EXPECTED
    assert report.k0_family.eta == -1
    stages = [entry.stage for entry in report.proof_log]
    assert stages[0] == "bw"
    assert stages[-1] == "brute"
    assert {"bw", "cf", "bound", "brute"} == set(stages)
    quoted = next(e for e in report.proof_log if e.name == "q")
    assert quoted.value == str(QUOTED_CONVERGENT[1])


@pytest.mark.parametrize("k", list(SANITY_RANGE))
def test_bw_sanity(k: int) -> None:
    """Test that the linear form stays above the Baker-Wustholz lower bound"""
    result = bw_sanity(k)
    assert result.holds
    assert result.log_abs_lambda > result.lower_bound


def test_tail_check() -> None:
    """Test that 2^(2 s1 + 3) + 1 never gives an admissible prime"""
    tail = tail_check()
    assert tail.holds
    assert tail.flagged == []
    assert len(tail.entries) == 31
    assert tail.entries[0].value == 9
    with pytest.raises(DomainError):
        tail_check(-1)


def test_pell_images() -> None:
    """Test that only the solution (1, -1, 2, 1) reaches l = 73"""
    images = pell_images(EXPECTED)
    assert [img.value for img in images] == [1, 73, 33, 801]
    admissible = [img for img in images if img.admissible]
    assert [(img.solution, img.ell) for img in admissible] == [((1, -1, 2, 1), 73)]
    assert images[3].ell == 89
    assert images[3].w == 3
