from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermcert.algebra import GaussianRational, basis_enumerate, format_rational, multiindex_combine, parse_rational

rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 10**6)
gaussians = st.builds(GaussianRational, rationals, rationals)


def test_enumerate_examples():
    assert list(basis_enumerate(1, 2)) == [(2, 0), (1, 1), (0, 2)]
    assert len(basis_enumerate(2, 4)) == 15
    assert list(basis_enumerate(0, 5)) == [(5,)]


def test_enumerate_graded_lex_order_ptwo():
    assert list(basis_enumerate(2, 2)) == [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]


@pytest.mark.parametrize("n,d", [(-1, 2), (1, -1)])
def test_enumerate_rejects_negative(n, d):
    with pytest.raises(ValueError):
        basis_enumerate(n, d)


@pytest.mark.parametrize("n", range(5))
@pytest.mark.parametrize("d", range(9))
def test_cardinality_and_rank_roundtrip(n, d):
    B = basis_enumerate(n, d)
    assert B.cardinality == comb(n + d, n) == len(B)
    for i in range(len(B)):
        assert B.rank(B.unrank(i)) == i
        assert sum(B.unrank(i)) == d


def test_rank_rejects_foreign_index():
    B = basis_enumerate(1, 2)
    with pytest.raises((KeyError, ValueError)):
        B.rank((1, 2))


def test_multiindex_combine_examples():
    assert multiindex_combine((2, 0), (0, 2), "add") == (2, 2)
    assert multiindex_combine((2, 1), (1, 1), "subtract") == (1, 0)
    assert multiindex_combine((1, 0), (0, 1), "subtract") is None
    with pytest.raises(ValueError):
        multiindex_combine((1, 0), (1, 0, 0))


@given(gaussians, gaussians)
def test_add_sub_exact(a, b):
    assert (a + b) - b == a


@given(gaussians, gaussians.filter(bool))
def test_mul_div_exact(a, b):
    assert (a * b) / b == a


@given(gaussians)
def test_conjugation_and_abs2(a):
    assert a.conj().conj() == a
    prod = a * a.conj()
    assert prod.im == 0 and prod.re >= 0
    assert prod.re == a.abs2()


@given(gaussians, gaussians)
@settings(max_examples=50)
def test_complex_consistency(a, b):
    assert complex(a * b) == pytest.approx(complex(a) * complex(b), rel=1e-12, abs=1e-12)


def test_canonical_denominators():
    a = GaussianRational(Fraction(2, 4), Fraction(-6, 8))
    assert (a.re.numerator, a.re.denominator) == (1, 2)
    assert (a.im.numerator, a.im.denominator) == (-3, 4)
    assert GaussianRational(3) == 3
    assert hash(GaussianRational(3)) == hash(GaussianRational(Fraction(6, 2)))


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        GaussianRational(1, 1) / GaussianRational(0)


def test_rational_text_roundtrip():
    for q in (Fraction(-3, 2), Fraction(7), Fraction(0)):
        assert parse_rational(format_rational(q)) == q
    assert format_rational(Fraction(-3, 2)) == "-3/2"
