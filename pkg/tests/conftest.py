import random
from fractions import Fraction

import pytest

from hermcert.algebra import GaussianRational, basis_enumerate
from hermcert.curves import RationalCurve
from hermcert.hermform import HermitianForm, HoloSection, from_squares

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def mono(*alpha, c=1) -> HoloSection:
    return HoloSection.monomial(alpha, c)


def sq(s: HoloSection, w=1) -> HermitianForm:
    return from_squares([(w, s)])


@pytest.fixture
def circle() -> HermitianForm:
    return (sq(mono(1, 0)) - sq(mono(0, 1))) ** 2


@pytest.fixture
def quillen_form() -> HermitianForm:
    return from_squares([(1, mono(2, 0)), (1, mono(0, 2)), (Fraction(-3, 2), mono(1, 1))])


@pytest.fixture
def jet_form() -> HermitianForm:
    inner = sq(mono(1, 0, 1)) - sq(mono(0, 2, 0))
    return sq(mono(4, 0, 0)) + inner * inner


@pytest.fixture
def gamma_curve() -> RationalCurve:
    x, y = mono(1, 0), mono(0, 1)
    return RationalCurve((x * x, x * y, x * y + y * y))


@pytest.fixture
def residual_Q() -> HermitianForm:
    x, y = mono(1, 0), mono(0, 1)
    inner = sq(x * y + y * y) - sq(y * y)
    return sq(x**4) + inner * inner


# random generators shared by the property tests ------------------------------


def rand_rational(rng: random.Random, h: int = 6) -> Fraction:
    return Fraction(rng.randint(-h, h), rng.randint(1, h))


def rand_gauss(rng: random.Random, h: int = 6, complex_prob: float = 0.5) -> GaussianRational:
    im = rand_rational(rng, h) if rng.random() < complex_prob else 0
    return GaussianRational(rand_rational(rng, h), im)


def rand_section(rng: random.Random, n: int, d: int, terms: int | None = None) -> HoloSection:
    basis = basis_enumerate(n, d)
    k = terms or rng.randint(1, min(4, len(basis)))
    coeffs = {}
    for a in rng.sample(list(basis), min(k, len(basis))):
        coeffs[a] = rand_gauss(rng)
    s = HoloSection(n, d, coeffs)
    return s if not s.is_zero() else HoloSection.monomial(basis[0])


def rand_form(rng: random.Random, n: int, d: int, k: int | None = None, signs=(1, -1)) -> HermitianForm:
    k = k or rng.randint(1, 4)
    return from_squares([(rng.choice(signs), rand_section(rng, n, d)) for _ in range(k)])


def rand_point(rng: random.Random, n: int, h: int = 5) -> tuple:
    return tuple(rand_gauss(rng, h) for _ in range(n + 1))
