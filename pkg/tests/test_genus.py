"""
Tests for prime discriminants, 2-ranks and the (a)(b)(c) classification
"""

from fractions import Fraction

import pytest

from flt_verify.arith.integers import is_prime, is_squarefree
from flt_verify.errors import DomainError
from flt_verify.formclass import class_group, conditions_abc_direct, two_rank
from flt_verify.genus import (
    ClassificationTag,
    classify_conditions,
    compare_sets,
    eta_sign,
    fundamental_discriminant,
    is_fundamental,
    narrow_odd_ramified_real,
    odlyzko_max_degree,
    prime_disc_factorization,
    ray_class_check,
    two_ranks,
)


def test_is_fundamental() -> None:
    """Test recognition of fundamental discriminants"""
    for D in (5, 8, 12, 13, 24, 40, -3, -20):
        assert is_fundamental(D)
    for D in (0, 1, 9, 16, 20, 7, 45):
        assert not is_fundamental(D)
    assert fundamental_discriminant(3) == 12
    assert fundamental_discriminant(13) == 13


def test_prime_disc_factorization() -> None:
    """Test factorization into prime discriminants with the 2-part first"""
    assert prime_disc_factorization(12).factors == [-4, -3]
    assert prime_disc_factorization(-20).factors == [-4, 5]
    assert prime_disc_factorization(8).factors == [8]
    fact = prime_disc_factorization(4 * 1155)
    assert fact.t == 5
    product = 1
    for f in fact.factors:
        product *= f
    assert product == 4 * 1155
    with pytest.raises(DomainError):
        prime_disc_factorization(16)


def test_two_ranks() -> None:
    """Test 2-ranks of Cl+ and Cl"""
    assert two_ranks(12) == (1, 0)
    assert two_ranks(40) == (1, 1)
    assert two_ranks(8) == (0, 0)
    assert two_ranks(-20) == (1, 1)


@pytest.mark.parametrize("d, eta", [(2, -1), (3, -1), (6, -1), (7, 1), (14, 1), (22, -1)])
def test_eta_sign(d: int, eta: int) -> None:
    """Test the sign of the norm of a generator of P"""
    assert eta_sign(d) == eta


def test_eta_sign_domain() -> None:
    """Test that eta needs d = l or 2l"""
    with pytest.raises(DomainError):
        eta_sign(15)


@pytest.mark.parametrize("d", [2, 3, 6, 11, 19, 22, 38, 43])
def test_all_conditions_hold(d: int) -> None:
    """Test fields where (a), (b) and (c) hold together"""
    assert classify_conditions(d).all_hold


def test_classification_tags() -> None:
    """Test the branch reported for each kind of field"""
    three = classify_conditions(3)
    assert three.classification_tag is ClassificationTag.ELL_3_MOD_8
    assert three.eta == -1
    seven = classify_conditions(7)
    assert seven.cond_b is False
    assert seven.classification_tag is ClassificationTag.ELL_7_MOD_8
    assert classify_conditions(2).classification_tag is ClassificationTag.SQRT2
    ten = classify_conditions(10)
    assert ten.cond_b is True and ten.cond_c is False
    assert ten.classification_tag is ClassificationTag.EVEN_CLASS_NUMBER
    five = classify_conditions(5)
    assert five.classification_tag is ClassificationTag.UNRAMIFIED
    assert five.cond_b is None and not five.cond_a


def test_imaginary_fields() -> None:
    """Test imaginary fields are classified but flagged"""
    minus_one = classify_conditions(-1)
    assert minus_one.classification_tag is ClassificationTag.IMAGINARY_OUT_OF_SCOPE
    assert minus_one.cond_b is True
    minus_five = classify_conditions(-5)
    assert minus_five.classification_tag is ClassificationTag.IMAGINARY
    assert minus_five.cond_b is None


def test_genus_agrees_with_forms() -> None:
    """Test closed forms against the form class group for ramified d below 200"""
    for d in range(2, 200):
        if d % 4 == 1 or not is_squarefree(d):
            continue
        report = classify_conditions(d)
        direct = conditions_abc_direct(d)
        assert (report.cond_a, report.cond_b, report.cond_c) == (direct.cond_a, direct.cond_b, direct.cond_c), d


def test_all_hold_characterization() -> None:
    """Test that (a)(b)(c) hold exactly for d = 2 and d in {l, 2l} with l = 3 mod 8"""
    for d in range(2, 300):
        if not is_squarefree(d):
            continue
        ell = d // 2 if d % 2 == 0 else d
        expected = d == 2 or (ell % 8 == 3 and is_prime(ell))
        assert classify_conditions(d).all_hold is expected, d


@pytest.mark.slow
def test_genus_rank_matches_forms_to_100000() -> None:
    """Test the genus 2-rank against the form class group for every fundamental D below 10^5"""
    for D in range(5, 10**5):
        if not is_fundamental(D):
            continue
        rank_plus, _ = two_ranks(D)
        assert rank_plus == two_rank(class_group(D)), D


@pytest.mark.slow
def test_all_hold_characterization_to_10000() -> None:
    """Test the (a)(b)(c) characterization for every squarefree d below 10^4"""
    for d in range(2, 10**4):
        if not is_squarefree(d):
            continue
        ell = d // 2 if d % 2 == 0 else d
        expected = d == 2 or (ell % 8 == 3 and is_prime(ell))
        assert classify_conditions(d).all_hold is expected, d


def test_narrow_odd_ramified_real() -> None:
    """Test that only d = 2 has 2 ramified with odd narrow class number"""
    assert narrow_odd_ramified_real(100) == [2]


def test_odlyzko_max_degree() -> None:
    """Test the degree bound from the discriminant lower bound"""
    assert odlyzko_max_degree(Fraction(2901, 100)) == 3
    assert odlyzko_max_degree(1) == 2
    with pytest.raises(DomainError):
        odlyzko_max_degree(0)


def test_ray_class_check() -> None:
    """Test ray class parity modulo P^2 for l = 73 and l = 97"""
    report = ray_class_check(73)
    assert report.unit_group_orders == [2, 2]
    assert report.minus_one_generates
    assert report.class_number_odd
    assert report.ray_class_number_odd
    assert ray_class_check(97).ray_class_number_odd
    with pytest.raises(DomainError):
        ray_class_check(7)


def test_compare_sets() -> None:
    """Test the nested criterion counts"""
    counts = compare_sets(30)
    assert counts.total == 13
    assert counts.h_plus_odd == 1
    assert counts.h_plus_odd <= counts.b_and_h_odd <= counts.b_holds <= counts.total
