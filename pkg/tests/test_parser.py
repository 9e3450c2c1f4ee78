import random
from fractions import Fraction

import pytest

from conftest import mono, rand_form, sq
from hermcert.algebra import GaussianRational
from hermcert.hermform import HoloSection, from_squares, norm_power
from hermcert.parser import (
    InhomogeneousError,
    ParseError,
    UndeclaredVariableError,
    parse,
    parse_affine,
    parse_holo,
    parse_scalar,
    to_expression,
)
from hermcert.polys import MixedHermPoly


def test_examples(jet_form, circle, quillen_form):
    e = parse("sq(z0^4) + (sq(z0*z2) - sq(z1^2))^2")
    assert e.degree == 4 and e.variables == ("z0", "z1", "z2")
    assert e.elaborate() == jet_form
    assert parse("(sq(z0) - sq(z1))^2").elaborate() == circle
    assert parse("sq(z0^2) + sq(z1^2) - 3/2*sq(z0*z1)").elaborate() == quillen_form


def test_whitespace_insignificant(quillen_form):
    assert parse("sq(z0^2)+sq(z1^2)-3/2*sq(z0*z1)").elaborate() == quillen_form
    assert parse("  sq ( z0 ^ 2 ) +sq(z1^2)\n- 3/2 * sq(z0 * z1) ").elaborate() == quillen_form


def test_norm_power():
    assert parse("normK(2)", n=1).elaborate() == norm_power(1, 2)
    assert parse("normK(1) * sq(z0 + z2)").elaborate() == norm_power(2, 1) * sq(mono(1, 0, 0) + mono(0, 0, 1))


def test_complex_coefficients():
    P = parse("sq((1+2i)*z0 + i*z1) - sq(3/2i*z1)").elaborate()
    s = HoloSection(1, 1, {(1, 0): GaussianRational(1, 2), (0, 1): GaussianRational(0, 1)})
    t = HoloSection(1, 1, {(0, 1): GaussianRational(0, Fraction(3, 2))})
    assert P == from_squares([(1, s), (-1, t)])
    assert P.C[((1, 0), (0, 1))] == GaussianRational(1, 2) * GaussianRational(0, -1)


def test_explicit_n_pads_variables():
    e = parse("sq(z0)", n=2)
    assert e.variables == ("z0", "z1", "z2") and e.elaborate().n == 2
    assert parse("sq(z0)").elaborate().n == 0


def test_round_trip(jet_form, circle, quillen_form):
    for P in (jet_form, circle, quillen_form, norm_power(2, 3), -sq(mono(1, 2))):
        assert parse(to_expression(P), n=P.n).elaborate() == P


def test_round_trip_random():
    rng = random.Random(31)
    for _ in range(60):
        n = rng.randint(1, 3)
        P = rand_form(rng, n, rng.randint(0, 3))
        assert parse(to_expression(P), n=n).elaborate() == P


@pytest.mark.parametrize(
    "text, error, position",
    [
        ("sq(z0)*", ParseError, 7),
        ("sq(z0 $ z1)", ParseError, 6),
        ("3/0*sq(z0)", ParseError, 2),
        ("sq(z0+1)", InhomogeneousError, 5),
        ("sq(z0)+sq(z0^2)", InhomogeneousError, 6),
        ("sq(z0) - 3", InhomogeneousError, 7),
        ("sq(z0) + sq(w)", UndeclaredVariableError, 12),
    ],
)
def test_errors_carry_positions(text, error, position):
    with pytest.raises(error) as info:
        parse(text)
    assert info.value.position == position
    assert f"position {position}" in str(info.value)


def test_undeclared_beyond_explicit_n():
    with pytest.raises(UndeclaredVariableError) as info:
        parse("sq(z0) + sq(z3)", n=1)
    assert info.value.position == 12


def test_non_hermitian_rejected():
    with pytest.raises(ParseError):
        parse_affine("x", ["x"])


def test_affine_and_holo_helpers():
    x = MixedHermPoly.variable(1, 0)
    assert parse_affine("1 + sq(x)", ["x"]) == 1 + x * x.conj()
    assert parse_holo("x*y + y^2") == mono(1, 1) + mono(0, 2)
    with pytest.raises(InhomogeneousError):
        parse_holo("x + y^2")


@pytest.mark.parametrize(
    "text, value",
    [("-3/2", GaussianRational(Fraction(-3, 2))), ("1+2i", GaussianRational(1, 2)), ("2/3i", GaussianRational(0, Fraction(2, 3)))],
)
def test_scalars(text, value):
    assert parse_scalar(text) == value
