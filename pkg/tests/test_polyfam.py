"""
Tests for the f_n family: expansion, real roots, ramification certificates and list ingestion
"""

from fractions import Fraction
from pathlib import Path

import mpmath
import pytest
import sympy

from flt_verify.arith.poly import BigPoly, newton_polygon_2adic
from flt_verify.errors import DomainError
from flt_verify.polyfam import (
    RamificationStatus,
    certify_2_ramified,
    check_norm_form,
    check_polynomial,
    check_totally_real,
    gen_fn,
    ingest_poly_list,
    is_totally_real,
    parse_poly_line,
)

FAMILY = range(1, 33)


def test_small_members() -> None:
    """Test f_1, f_2 and f_3"""
    assert gen_fn(1).f == BigPoly((1, 1))
    assert str(gen_fn(2).f) == "x^2 + 2*x - 7"
    assert str(gen_fn(3).f) == "x^3 + 3*x^2 - 21*x - 7"
    with pytest.raises(DomainError):
        gen_fn(0)


@pytest.mark.parametrize("n", FAMILY)
def test_family_member(n: int) -> None:
    """Test degree, norm form and total reality of f_n"""
    fp = gen_fn(n)
    assert fp.f.is_monic and fp.f.degree == n
    assert check_norm_form(fp)
    assert check_totally_real(fp)


@pytest.mark.parametrize("n", [1, 2, 7, 16, 32])
def test_family_matches_complex_formula(n: int) -> None:
    """Test f_n against ((1+s)(x+s)^n - (1-s)(x-s)^n)/(2s), s = sqrt(-7), at 200 bits"""
    mpmath.mp.prec = 200
    s = mpmath.sqrt(mpmath.mpc(-7))
    f = gen_fn(n).f
    for x in (Fraction(-3), Fraction(1, 2), Fraction(2), Fraction(5, 3), Fraction(11)):
        xm = mpmath.mpf(x.numerator) / x.denominator
        reference = ((1 + s) * (xm + s) ** n - (1 - s) * (xm - s) ** n) / (2 * s)
        exact = f(x)
        scale = max(abs(reference), 1)
        assert abs(reference.imag) < scale * mpmath.mpf(2) ** -50
        assert abs(reference.real - mpmath.mpf(exact.numerator) / exact.denominator) < scale * mpmath.mpf(2) ** -50


@pytest.mark.parametrize("n", range(2, 13))
def test_real_roots_against_sympy(n: int) -> None:
    """Test the Sturm count against sympy's real root count"""
    x = sympy.symbols("x")
    expr = sum(c * x**i for i, c in enumerate(gen_fn(n).f.coeffs))
    assert sympy.Poly(expr, x).count_roots() == n


def test_is_totally_real() -> None:
    """Test Sturm-based total reality on simple inputs"""
    assert is_totally_real(BigPoly((-2, 0, 1)))
    assert not is_totally_real(BigPoly((2, 0, 1)))
    with pytest.raises(DomainError):
        is_totally_real(BigPoly((1, 2, 1)))


def test_certificates_small() -> None:
    """Test the certifying shifts for n = 2 and n = 3"""
    two = certify_2_ramified(gen_fn(2))
    assert two.certified
    assert (two.shift, two.slope) == (-1, "3/2")
    assert gen_fn(2).f.shift(-1) == BigPoly((-8, 0, 1))
    three = certify_2_ramified(gen_fn(3))
    assert (three.shift, three.slope) == (-1, "4/3")
    assert gen_fn(3).f.shift(-1) == BigPoly((16, -24, 0, 1))
    assert certify_2_ramified(gen_fn(1)).slope == "0"


@pytest.mark.parametrize("n", range(2, 33))
def test_certificates_family(n: int) -> None:
    """Test that x -> x - 1 gives a pure polygon of slope (n + 1)/n"""
    cert = certify_2_ramified(gen_fn(n))
    assert cert.status is RamificationStatus.CERTIFIED
    assert cert.shift == -1
    assert cert.slope == f"{n + 1}/{n}"
    polygon = newton_polygon_2adic(gen_fn(n).f.shift(cert.shift))
    assert polygon.is_pure


def test_certificate_inconclusive() -> None:
    """Test that a polynomial without a pure shift is reported inconclusive"""
    cert = certify_2_ramified(BigPoly((-3, 0, 0, 0, 1)), window=2, max_window=4)
    assert cert.status is RamificationStatus.INCONCLUSIVE
    assert cert.window == 4
    assert cert.shift is None
    with pytest.raises(DomainError):
        certify_2_ramified(BigPoly((1, 2)))


def test_parse_poly_line() -> None:
    """Test coefficient parsing, including typographic minus signs"""
    assert parse_poly_line("-7, 2, 1") == BigPoly((-7, 2, 1))
    assert parse_poly_line("−8,0,1") == BigPoly((-8, 0, 1))
    for bad in ("1,,2", "a,1", "5", "0,0"):
        with pytest.raises(DomainError):
            parse_poly_line(bad)


def test_check_polynomial() -> None:
    """Test one ingested polynomial, good and not squarefree"""
    good = check_polynomial(BigPoly((-7, 2, 1)))
    assert good.totally_real
    assert good.ramification is not None and good.ramification.certified
    assert good.error is None
    bad = check_polynomial(BigPoly((1, 2, 1)))
    assert bad.error is not None


def test_ingest_poly_list(tmp_path: Path) -> None:
    """Test that bad lines become error records and processing continues"""
    path = tmp_path / "polys.txt"
    path.write_text("# f_2 and f_3\n-7,2,1\n\n1,,2\n-7,-21,3,1\n", encoding="utf-8")
    records = ingest_poly_list(path)
    assert [r.line for r in records] == [2, 4, 5]
    assert records[0].totally_real and records[0].error is None
    assert records[1].error is not None and records[1].polynomial is None
    assert records[2].degree == 3
    assert records[2].ramification is not None and records[2].ramification.shift == -1
