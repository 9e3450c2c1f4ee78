"""Surface syntax for Hermitian forms.

Grammar (whitespace is insignificant)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := rational | 'sq' '(' holo ')' | '(' expr ')' ['^' uint]
            | ('normK' | 'norm') '(' uint ')'
    holo   := ['+'|'-'] hterm (('+'|'-') hterm)*
    hterm  := hpow ('*' hpow)*
    hpow   := hatom ['^' uint]
    hatom  := rational | imag | 'i' | variable | '(' holo ')'

``3i`` is an imaginary literal. Degrees are tracked syntactically, so a
sum whose terms have different degrees is rejected even if it cancels.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import GaussianRational, as_scalar
from .hermform import HermitianForm, HoloSection
from .polys import MixedHermPoly

__all__ = [
    "ParseError",
    "InhomogeneousError",
    "UndeclaredVariableError",
    "FormExpression",
    "parse",
    "parse_affine",
    "parse_holo",
    "parse_scalar",
    "to_expression",
]


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class InhomogeneousError(ParseError):
    pass


class UndeclaredVariableError(ParseError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<imag>\d+(?:/\d+)?i\b)|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out, pos = [], 0
    while pos < len(text):
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append(Token(kind, m.group(kind), start))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


_Z_VAR = re.compile(r"z(\d+)$")


def _infer_variables(tokens: Sequence[Token]) -> list[str]:
    top = -1
    for t in tokens:
        if t.kind != "name" or t.text in ("sq", "normK", "norm", "i"):
            continue
        m = _Z_VAR.match(t.text)
        if not m:
            raise UndeclaredVariableError(f"undeclared variable {t.text!r}", t.pos)
        top = max(top, int(m.group(1)))
    return [f"z{i}" for i in range(max(top, 0) + 1)]


class _Parser:
    """Recursive descent producing ``(poly, degree)`` pairs directly."""

    def __init__(self, text: str, variables: Sequence[str], homogeneous: bool):
        self.text = text
        self.toks = tokenize(text)
        self.k = 0
        self.vars = list(variables)
        self.index = {v: i for i, v in enumerate(self.vars)}
        self.nv = len(self.vars)
        self.homogeneous = homogeneous

    # token helpers
    @property
    def cur(self) -> Token:
        return self.toks[self.k]

    def take(self) -> Token:
        t = self.toks[self.k]
        self.k += 1
        return t

    def accept(self, text: str) -> bool:
        if self.cur.kind in ("op", "name") and self.cur.text == text:
            self.k += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not (self.cur.kind in ("op", "name") and self.cur.text == text):
            raise ParseError(f"expected {text!r}, found {self.cur.text or 'end of input'!r}", self.cur.pos)
        return self.take()

    def uint(self) -> int:
        t = self.cur
        if t.kind != "num":
            raise ParseError("expected a nonnegative integer", t.pos)
        self.k += 1
        return int(t.text)

    def rational(self) -> Fraction:
        num = self.uint()
        if self.cur.kind == "op" and self.cur.text == "/" and self.toks[self.k + 1].kind == "num":
            self.k += 1
            den_tok = self.cur
            den = self.uint()
            if den == 0:
                raise ParseError("zero denominator", den_tok.pos)
            return Fraction(num, den)
        return Fraction(num)

    def finish(self):
        if self.cur.kind != "end":
            raise ParseError(f"unexpected {self.cur.text!r}", self.cur.pos)

    def _combine(self, left, right, sign, pos):
        (p, d), (q, e) = left, right
        if self.homogeneous and d is not None and e is not None and d != e:
            raise InhomogeneousError(f"cannot add terms of degree {d} and {e}", pos)
        return (p + q if sign > 0 else p - q), (d if d is not None else e)

    # Hermitian level
    def expr(self):
        sign = 1
        if self.cur.kind == "op" and self.cur.text in "+-":
            sign = -1 if self.take().text == "-" else 1
        p, d = self.term()
        acc = (p if sign > 0 else -p, d)
        while self.cur.kind == "op" and self.cur.text in "+-":
            tok = self.take()
            acc = self._combine(acc, self.term(), 1 if tok.text == "+" else -1, tok.pos)
        return acc

    def term(self):
        p, d = self.factor()
        while self.accept("*"):
            q, e = self.factor()
            p, d = p * q, d + e
        return p, d

    def factor(self):
        t = self.cur
        if t.kind == "num":
            return MixedHermPoly.constant(self.nv, self.rational()), 0
        if t.kind == "name" and t.text == "sq":
            self.take()
            self.expect("(")
            h, e = self.holo()
            self.expect(")")
            return h * h.conj(), e
        if t.kind == "name" and t.text in ("normK", "norm"):
            self.take()
            self.expect("(")
            K = self.uint()
            self.expect(")")
            base = MixedHermPoly(self.nv, {})
            for i in range(self.nv):
                base = base + MixedHermPoly.variable(self.nv, i) * MixedHermPoly.variable(self.nv, i, conjugate=True)
            return base**K, K
        if t.kind == "op" and t.text == "(":
            self.take()
            p, d = self.expr()
            self.expect(")")
            if self.accept("^"):
                k = self.uint()
                return p**k, d * k
            return p, d
        raise ParseError(f"expected a factor, found {t.text or 'end of input'!r}", t.pos)

    # holomorphic level
    def holo(self):
        sign = 1
        if self.cur.kind == "op" and self.cur.text in "+-":
            sign = -1 if self.take().text == "-" else 1
        p, d = self.hterm()
        acc = (p if sign > 0 else -p, d)
        while self.cur.kind == "op" and self.cur.text in "+-":
            tok = self.take()
            nxt = self.hterm()
            acc = self._holo_combine(acc, nxt, 1 if tok.text == "+" else -1, tok.pos)
        return acc

    def _holo_combine(self, left, right, sign, pos):
        (p, d), (q, e) = left, right
        # pure numbers carry degree None so coefficients like (1/2+3i) can be summed
        if self.homogeneous and (d or 0) != (e or 0):
            raise InhomogeneousError(f"holomorphic terms of degree {d or 0} and {e or 0} in one sum", pos)
        return (p + q if sign > 0 else p - q), (d if d is not None else e)

    def hterm(self):
        p, d = self.hpow()
        while self.accept("*"):
            q, e = self.hpow()
            p, d = p * q, _add_deg(d, e)
        return p, d

    def hpow(self):
        p, d = self.hatom()
        if self.accept("^"):
            k = self.uint()
            p, d = p**k, (None if d is None else d * k)
        return p, d

    def hatom(self):
        t = self.cur
        if t.kind == "num":
            return MixedHermPoly.constant(self.nv, self.rational()), None
        if t.kind == "imag":
            self.take()
            return MixedHermPoly.constant(self.nv, GaussianRational(0, Fraction(t.text[:-1]))), None
        if t.kind == "name":
            self.take()
            if t.text == "i":
                return MixedHermPoly.constant(self.nv, GaussianRational(0, 1)), None
            if t.text not in self.index:
                raise UndeclaredVariableError(f"undeclared variable {t.text!r}", t.pos)
            return MixedHermPoly.variable(self.nv, self.index[t.text]), 1
        if t.kind == "op" and t.text == "(":
            self.take()
            p, d = self.holo()
            self.expect(")")
            return p, d
        raise ParseError(f"expected a holomorphic term, found {t.text or 'end of input'!r}", t.pos)


def _add_deg(d, e):
    if d is None:
        return e
    if e is None:
        return d
    return d + e


@dataclass(frozen=True)
class FormExpression:
    source: str
    variables: tuple[str, ...]
    poly: MixedHermPoly
    degree: int

    def elaborate(self) -> HermitianForm:
        """The exact form; variable ``z_i`` is coordinate ``i``."""
        if not self.poly.is_real():
            raise ParseError("expression is not Hermitian", 0)
        return HermitianForm(len(self.variables) - 1, self.degree, self.poly.coeffs)


def parse(text: str, n: int | None = None) -> FormExpression:
    """Parse a homogeneous Hermitian expression in ``z0..zn``.

    ``n`` defaults to the largest variable index that appears.
    """
    toks = tokenize(text)
    inferred = _infer_variables(toks)
    if n is not None:
        if len(inferred) - 1 > n:
            bad = next(t for t in toks if t.kind == "name" and _Z_VAR.match(t.text) and int(t.text[1:]) > n)
            raise UndeclaredVariableError(f"undeclared variable {bad.text!r}", bad.pos)
        inferred = [f"z{i}" for i in range(n + 1)]
    p = _Parser(text, inferred, homogeneous=True)
    poly, deg = p.expr()
    p.finish()
    return FormExpression(text, tuple(inferred), poly, deg)


def parse_affine(text: str, variables: Sequence[str]) -> MixedHermPoly:
    """Parse a Hermitian polynomial in the given affine variables (no homogeneity)."""
    p = _Parser(text, variables, homogeneous=False)
    poly, _ = p.expr()
    p.finish()
    if not poly.is_real():
        raise ParseError("expression is not Hermitian", 0)
    return poly


def parse_holo(text: str, variables: Sequence[str] = ("x", "y")) -> HoloSection:
    """Parse a homogeneous holomorphic polynomial, e.g. ``x*y + y^2``."""
    p = _Parser(text, variables, homogeneous=True)
    poly, deg = p.holo()
    p.finish()
    coeffs = poly.holo_part()
    return HoloSection(len(variables) - 1, deg or 0, coeffs)


def parse_scalar(text: str) -> GaussianRational:
    """A Gaussian rational such as ``-3/2``, ``1+2i`` or ``2/3i``."""
    p = _Parser(text, [], homogeneous=False)
    poly, deg = p.holo()
    p.finish()
    if deg not in (None, 0):
        raise ParseError("expected a number", 0)
    return as_scalar(poly.coeffs.get(((), ()), 0))


def _rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def to_expression(P: HermitianForm) -> str:
    """Print ``P`` as a signed combination of ``sq(...)`` atoms that re-parses to ``P``."""
    from .spectra import exact_squares

    names = [f"z{i}" for i in range(P.n + 1)]
    if P.d == 0:
        z = (0,) * (P.n + 1)
        c = P.C[(z, z)].re if P.C else Fraction(0)
        return ("- " if c < 0 else "") + _rat(abs(c))
    if P.is_zero():
        return f"0*sq({names[0]}^{P.d})"
    parts = []
    for w, s in exact_squares(P):
        mag = abs(w)
        coef = "" if mag == 1 else _rat(mag) + "*"
        parts.append(("-" if w < 0 else "+", f"{coef}sq({s.format(names)})"))
    out = ("- " if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out
