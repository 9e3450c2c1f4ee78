"""Exact Gaussian-rational scalars and monomial-basis combinatorics."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb
from numbers import Rational
from typing import Iterator, Sequence

__all__ = [
    "GaussianRational",
    "as_scalar",
    "ZERO",
    "ONE",
    "I",
    "MonomialBasis",
    "basis_enumerate",
    "multiindex_combine",
    "degree",
    "format_rational",
    "parse_rational",
]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational number")


class GaussianRational:
    """A complex number ``re + im*i`` with arbitrary-precision rational parts.

    Values are treated as immutable. Comparison with ``int`` and ``Fraction``
    works when the imaginary part is zero, and hashing is compatible with
    those types so real scalars may be used as dictionary keys interchangeably.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            self.re, self.im = re.re, re.im + _frac(im)
            return
        if isinstance(re, complex):
            self.re, self.im = Fraction(re.real), Fraction(re.imag) + _frac(im)
            return
        self.re = _frac(re)
        self.im = _frac(im)

    @staticmethod
    def _new(re: Fraction, im: Fraction) -> "GaussianRational":
        z = object.__new__(GaussianRational)
        z.re = re
        z.im = im
        return z

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        return GaussianRational._new(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        return GaussianRational._new(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return as_scalar(other) - self

    def __neg__(self):
        return GaussianRational._new(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b:
            if not d:
                return GaussianRational._new(a * c, d)
            return GaussianRational._new(a * c, a * d)
        if not d:
            return GaussianRational._new(a * c, b * c)
        return GaussianRational._new(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        c, d = other.re, other.im
        if not d:
            if not c:
                raise ZeroDivisionError("division by zero Gaussian rational")
            return GaussianRational._new(self.re / c, self.im / c)
        den = c * c + d * d
        a, b = self.re, self.im
        return GaussianRational._new((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, other):
        return as_scalar(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return ONE / (self ** (-k))
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "GaussianRational":
        if not self.im:
            return self
        return GaussianRational._new(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Squared modulus, always a nonnegative rational."""
        return self.re * self.re + self.im * self.im

    # comparisons / conversion ---------------------------------------------
    def is_real(self) -> bool:
        return not self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return not self.im and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __float__(self):
        if self.im:
            raise TypeError("non-real Gaussian rational has no float value")
        return float(self.re)

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def as_scalar(x) -> GaussianRational:
    """Coerce ints, Fractions, rational strings or complex values exactly."""
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, int):
        return GaussianRational._new(Fraction(x), Fraction(0))
    if isinstance(x, Fraction):
        return GaussianRational._new(x, Fraction(0))
    if isinstance(x, (float, complex, str, Rational)):
        return GaussianRational(x)
    raise TypeError(f"cannot interpret {x!r} as an exact scalar")


def format_rational(q: Fraction) -> str:
    """Serialize a rational as a ``num/den`` string."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


# --------------------------------------------------------------------------
# multi-indices and monomial bases


def degree(alpha: Sequence[int]) -> int:
    return sum(alpha)


def multiindex_combine(a: Sequence[int], b: Sequence[int], mode: str = "add"):
    """Componentwise ``a + b`` or ``a - b``.

    Subtraction returns ``None`` when a component would become negative.
    """
    if len(a) != len(b):
        raise ValueError(f"multi-index length mismatch: {len(a)} vs {len(b)}")
    if mode == "add":
        return tuple(x + y for x, y in zip(a, b))
    if mode == "subtract":
        out = tuple(x - y for x, y in zip(a, b))
        if any(e < 0 for e in out):
            return None
        return out
    raise ValueError(f"unknown mode {mode!r}")


@lru_cache(maxsize=None)
def _graded_lex(nvars: int, d: int) -> tuple[tuple[int, ...], ...]:
    if nvars == 1:
        return ((d,),)
    out = []
    for first in range(d, -1, -1):
        for rest in _graded_lex(nvars - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


class MonomialBasis:
    """Degree-``d`` monomials in ``n + 1`` variables, graded lexicographic.

    Within a degree the order is lexicographically descending in the exponent
    tuple, so ``z0^2, z0*z1, z1^2`` for ``n = 1, d = 2``.
    """

    __slots__ = ("n", "d", "elements", "_index")

    def __init__(self, n: int, d: int):
        if n < 0 or d < 0:
            raise ValueError(f"basis needs n >= 0 and d >= 0, got n={n}, d={d}")
        self.n = n
        self.d = d
        self.elements = _graded_lex(n + 1, d)
        self._index = {a: i for i, a in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def __contains__(self, alpha):
        return tuple(alpha) in self._index

    def rank(self, alpha: Sequence[int]) -> int:
        try:
            return self._index[tuple(alpha)]
        except KeyError:
            raise ValueError(f"{tuple(alpha)} is not a degree-{self.d} monomial in {self.n + 1} variables") from None

    def unrank(self, i: int) -> tuple[int, ...]:
        return self.elements[i]

    @property
    def cardinality(self) -> int:
        return comb(self.n + self.d, self.n)

    def __repr__(self):
        return f"MonomialBasis(n={self.n}, d={self.d})"


@lru_cache(maxsize=None)
def basis_enumerate(n: int, d: int) -> MonomialBasis:
    if n < 0 or d < 0:
        raise ValueError(f"basis needs n >= 0 and d >= 0, got n={n}, d={d}")
    return MonomialBasis(n, d)
