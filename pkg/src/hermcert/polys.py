"""Sparse polynomials in holomorphic and anti-holomorphic variables.

A term is keyed by ``(alpha, beta)``: the monomial ``z^alpha * conj(z)^beta``.
The same container serves holomorphic polynomials (every ``beta`` zero),
Hermitian polynomials (``c[alpha, beta] == conj(c[beta, alpha])``) and the
intermediate products the parser builds.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .algebra import ONE, ZERO, GaussianRational, as_scalar

__all__ = ["MixedHermPoly", "exact_point", "monomial_value"]

Key = tuple[tuple[int, ...], tuple[int, ...]]


def exact_point(v) -> tuple[GaussianRational, ...] | None:
    """Coerce coordinates to Gaussian rationals, or ``None`` for floating input."""
    out = []
    for x in v:
        if isinstance(x, (float, complex)):
            return None
        try:
            out.append(as_scalar(x))
        except TypeError:
            return None
    return tuple(out)


def _powers(x, top: int, one):
    p = [one]
    for _ in range(top):
        p.append(p[-1] * x)
    return p


def monomial_value(powers: Sequence[Sequence], alpha: Sequence[int]):
    val = powers[0][alpha[0]]
    for i in range(1, len(alpha)):
        e = alpha[i]
        if e:
            val = val * powers[i][e]
    return val


class MixedHermPoly:
    """Sparse polynomial in ``x_1..x_k`` and their conjugates, exact coefficients."""

    __slots__ = ("n_vars", "coeffs")

    def __init__(self, n_vars: int, coeffs: Mapping[Key, object] | None = None):
        self.n_vars = n_vars
        clean: dict[Key, GaussianRational] = {}
        for (a, b), c in (coeffs or {}).items():
            a, b = tuple(a), tuple(b)
            if len(a) != n_vars or len(b) != n_vars:
                raise ValueError(f"exponent length mismatch for {n_vars} variables: {(a, b)}")
            if any(e < 0 for e in a) or any(e < 0 for e in b):
                raise ValueError(f"negative exponent in {(a, b)}")
            c = as_scalar(c)
            if c:
                clean[(a, b)] = clean.get((a, b), ZERO) + c
        self.coeffs = {k: v for k, v in clean.items() if v}

    @classmethod
    def _raw(cls, n_vars: int, coeffs: dict) -> "MixedHermPoly":
        p = object.__new__(cls)
        p.n_vars = n_vars
        p.coeffs = coeffs
        return p

    # constructors ---------------------------------------------------------
    @classmethod
    def constant(cls, n_vars: int, c=1) -> "MixedHermPoly":
        z = (0,) * n_vars
        return cls(n_vars, {(z, z): c})

    @classmethod
    def variable(cls, n_vars: int, i: int, conjugate: bool = False) -> "MixedHermPoly":
        e = tuple(1 if j == i else 0 for j in range(n_vars))
        z = (0,) * n_vars
        return cls(n_vars, {((z, e) if conjugate else (e, z)): 1})

    @classmethod
    def holomorphic(cls, n_vars: int, coeffs: Mapping[tuple[int, ...], object]) -> "MixedHermPoly":
        z = (0,) * n_vars
        return cls(n_vars, {(tuple(a), z): c for a, c in coeffs.items()})

    @classmethod
    def abs2_of(cls, h: "MixedHermPoly") -> "MixedHermPoly":
        """``|h|^2`` for a holomorphic polynomial ``h``."""
        if not h.is_holomorphic():
            raise ValueError("abs2_of expects a holomorphic polynomial")
        return h * h.conj()

    # structure ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def is_holomorphic(self) -> bool:
        return all(not any(b) for (_, b) in self.coeffs)

    def is_real(self) -> bool:
        for (a, b), c in self.coeffs.items():
            if self.coeffs.get((b, a), ZERO) != c.conj():
                return False
        return True

    def holo_part(self) -> dict[tuple[int, ...], GaussianRational]:
        """Coefficients of a holomorphic polynomial keyed by ``alpha``."""
        if not self.is_holomorphic():
            raise ValueError("polynomial has anti-holomorphic terms")
        return {a: c for (a, _), c in self.coeffs.items()}

    def degrees(self) -> set[tuple[int, int]]:
        return {(sum(a), sum(b)) for (a, b) in self.coeffs}

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "MixedHermPoly":
        if isinstance(other, MixedHermPoly):
            if other.n_vars != self.n_vars:
                raise ValueError(f"variable-count mismatch: {self.n_vars} vs {other.n_vars}")
            return other
        return MixedHermPoly.constant(self.n_vars, as_scalar(other))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            s = out.get(k, ZERO) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return MixedHermPoly._raw(self.n_vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MixedHermPoly._raw(self.n_vars, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MixedHermPoly):
            c = as_scalar(other)
            if not c:
                return MixedHermPoly._raw(self.n_vars, {})
            return MixedHermPoly._raw(self.n_vars, {k: v * c for k, v in self.coeffs.items()})
        other = self._coerce(other)
        out: dict[Key, GaussianRational] = {}
        for (a1, b1), c1 in self.coeffs.items():
            for (a2, b2), c2 in other.coeffs.items():
                k = (
                    tuple(x + y for x, y in zip(a1, a2)),
                    tuple(x + y for x, y in zip(b1, b2)),
                )
                out[k] = out.get(k, ZERO) + c1 * c2
        return MixedHermPoly._raw(self.n_vars, {k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = MixedHermPoly.constant(self.n_vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def conj(self) -> "MixedHermPoly":
        return MixedHermPoly._raw(self.n_vars, {(b, a): c.conj() for (a, b), c in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, MixedHermPoly):
            return NotImplemented
        return self.n_vars == other.n_vars and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n_vars, frozenset(self.coeffs.items())))

    # calculus and substitution --------------------------------------------
    def diff(self, i: int, anti: bool = False) -> "MixedHermPoly":
        """Partial derivative in ``x_i`` (or ``conj(x_i)`` when ``anti``)."""
        out = {}
        for (a, b), c in self.coeffs.items():
            e = (b if anti else a)[i]
            if not e:
                continue
            if anti:
                nb = b[:i] + (e - 1,) + b[i + 1:]
                out[(a, nb)] = c * e
            else:
                na = a[:i] + (e - 1,) + a[i + 1:]
                out[(na, b)] = c * e
        return MixedHermPoly._raw(self.n_vars, out)

    def substitute_monomials(self, images: Sequence[Sequence[int]], n_new: int) -> "MixedHermPoly":
        """Replace ``x_i`` by the monomial ``y^images[i]`` (conjugately on ``conj(x_i)``)."""
        if len(images) != self.n_vars:
            raise ValueError(f"need {self.n_vars} monomial images, got {len(images)}")
        for img in images:
            if len(img) != n_new:
                raise ValueError(f"monomial image {tuple(img)} must have {n_new} exponents")

        def push(a):
            out = [0] * n_new
            for e, img in zip(a, images):
                if e:
                    for j, f in enumerate(img):
                        out[j] += e * f
            return tuple(out)

        out: dict[Key, GaussianRational] = {}
        for (a, b), c in self.coeffs.items():
            k = (push(a), push(b))
            out[k] = out.get(k, ZERO) + c
        return MixedHermPoly._raw(n_new, {k: v for k, v in out.items() if v})

    def compose(self, images: Sequence["MixedHermPoly"], n_new: int) -> "MixedHermPoly":
        """Substitute holomorphic polynomials ``x_i -> images[i]``."""
        if len(images) != self.n_vars:
            raise ValueError(f"need {self.n_vars} images, got {len(images)}")
        cimages = [h.conj() for h in images]
        cache: dict = {}

        def power(lst, idx, e, tag):
            key = (tag, idx, e)
            if key not in cache:
                cache[key] = lst[idx] ** e
            return cache[key]

        total = MixedHermPoly._raw(n_new, {})
        for (a, b), c in self.coeffs.items():
            term = MixedHermPoly.constant(n_new, c)
            for i, e in enumerate(a):
                if e:
                    term = term * power(images, i, e, 0)
            for i, e in enumerate(b):
                if e:
                    term = term * power(cimages, i, e, 1)
            total = total + term
        return total

    # evaluation -----------------------------------------------------------
    def evaluate(self, v: Sequence, w: Sequence | None = None):
        """``sum c * v^alpha * conj(w)^beta``; exact when every input is exact."""
        if w is None:
            w = v
        if len(v) != self.n_vars or len(w) != self.n_vars:
            raise ValueError(f"point dimension mismatch: expected {self.n_vars}")
        ev, ew = exact_point(v), exact_point(w)
        if ev is not None and ew is not None:
            vv, ww, one, zero = ev, tuple(x.conj() for x in ew), ONE, ZERO
        else:
            vv = tuple(complex(x) for x in v)
            ww = tuple(complex(x).conjugate() for x in w)
            one, zero = 1.0 + 0j, 0j
        if not self.coeffs:
            return zero
        top_a = [0] * self.n_vars
        top_b = [0] * self.n_vars
        for a, b in self.coeffs:
            for i in range(self.n_vars):
                top_a[i] = max(top_a[i], a[i])
                top_b[i] = max(top_b[i], b[i])
        pv = [_powers(vv[i], top_a[i], one) for i in range(self.n_vars)]
        pw = [_powers(ww[i], top_b[i], one) for i in range(self.n_vars)]
        total = zero
        exact = ev is not None and ew is not None
        if self.n_vars == 0:
            for c in self.coeffs.values():
                total = total + (c if exact else complex(c))
            return total
        for (a, b), c in self.coeffs.items():
            term = monomial_value(pv, a) * monomial_value(pw, b)
            total = total + (c * term if exact else complex(c) * term)
        return total

    def format(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"x{i + 1}" for i in range(self.n_vars)]
        if not self.coeffs:
            return "0"

        def mono(e, conj):
            parts = []
            for nm, k in zip(names, e):
                if k:
                    base = f"conj({nm})" if conj else nm
                    parts.append(base if k == 1 else f"{base}^{k}")
            return parts

        terms = []
        for (a, b), c in sorted(self.coeffs.items()):
            parts = mono(a, False) + mono(b, True)
            cs = str(c)
            if not parts:
                terms.append(f"({cs})")
            else:
                terms.append(("" if c == 1 else f"({cs})*") + "*".join(parts))
        return " + ".join(terms)

    def __repr__(self):
        return f"MixedHermPoly({self.n_vars}, {self.format()})"
