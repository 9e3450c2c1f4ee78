"""Hermitian algebraic functions on projective space.

A form of degree ``d`` on P^n is the bihomogeneous polynomial

    P(z, conj(w)) = sum_{|a| = |b| = d} C[a, b] z^a conj(w)^b

with ``C`` a Hermitian matrix over the degree-``d`` monomials. Coefficients
are Gaussian rationals; everything in this module is exact.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from .algebra import ONE, ZERO, GaussianRational, as_scalar, basis_enumerate
from .polys import MixedHermPoly, exact_point, monomial_value, _powers

__all__ = [
    "HoloSection",
    "HermitianForm",
    "from_squares",
    "eval_pair",
    "product",
    "norm_power",
    "unit_form",
    "support_space_basis",
    "gcurvature",
    "independent_subset",
]


class HoloSection:
    """Homogeneous polynomial of degree ``d`` in ``z0..zn`` (a section of O(d))."""

    __slots__ = ("n", "d", "coeffs")

    def __init__(self, n: int, d: int, coeffs: Mapping[Sequence[int], object] | None = None):
        if n < 0 or d < 0:
            raise ValueError(f"invalid section shape n={n}, d={d}")
        self.n = n
        self.d = d
        out: dict[tuple[int, ...], GaussianRational] = {}
        for a, c in (coeffs or {}).items():
            a = tuple(a)
            if len(a) != n + 1 or sum(a) != d or any(e < 0 for e in a):
                raise ValueError(f"exponent {a} is not a degree-{d} monomial in {n + 1} variables")
            c = as_scalar(c)
            s = out.get(a, ZERO) + c
            if s:
                out[a] = s
            else:
                out.pop(a, None)
        self.coeffs = out

    @classmethod
    def monomial(cls, alpha: Sequence[int], c=1) -> "HoloSection":
        alpha = tuple(alpha)
        return cls(len(alpha) - 1, sum(alpha), {alpha: c})

    @classmethod
    def from_poly(cls, poly: MixedHermPoly) -> "HoloSection":
        coeffs = poly.holo_part()
        degs = {sum(a) for a in coeffs}
        if len(degs) > 1:
            raise ValueError(f"section is not homogeneous (degrees {sorted(degs)})")
        d = degs.pop() if degs else 0
        return cls(poly.n_vars - 1, d, coeffs)

    @classmethod
    def from_vector(cls, n: int, d: int, vec: Sequence) -> "HoloSection":
        basis = basis_enumerate(n, d)
        if len(vec) != len(basis):
            raise ValueError(f"vector length {len(vec)} != basis size {len(basis)}")
        return cls(n, d, {a: c for a, c in zip(basis, vec)})

    def to_poly(self) -> MixedHermPoly:
        return MixedHermPoly.holomorphic(self.n + 1, self.coeffs)

    def vector(self) -> list[GaussianRational]:
        return [self.coeffs.get(a, ZERO) for a in basis_enumerate(self.n, self.d)]

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "HoloSection"):
        if self.n != other.n:
            raise ValueError(f"variable-count mismatch: n={self.n} vs n={other.n}")

    def __add__(self, other: "HoloSection") -> "HoloSection":
        self._check(other)
        if self.d != other.d and self.coeffs and other.coeffs:
            raise ValueError(f"cannot add sections of degrees {self.d} and {other.d}")
        d = self.d if self.coeffs else other.d
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out.get(a, ZERO) + c
        return HoloSection(self.n, d, out)

    def __neg__(self):
        return HoloSection(self.n, self.d, {a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, HoloSection):
            self._check(other)
            out: dict = {}
            for a, c in self.coeffs.items():
                for b, e in other.coeffs.items():
                    k = tuple(x + y for x, y in zip(a, b))
                    out[k] = out.get(k, ZERO) + c * e
            return HoloSection(self.n, self.d + other.d, out)
        c = as_scalar(other)
        return HoloSection(self.n, self.d, {a: v * c for a, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "HoloSection":
        out = HoloSection.monomial((0,) * (self.n + 1))
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, HoloSection):
            return NotImplemented
        return (self.n, self.d, self.coeffs) == (other.n, other.d, other.coeffs)

    def __hash__(self):
        return hash((self.n, self.d, frozenset(self.coeffs.items())))

    def evaluate(self, v: Sequence):
        if len(v) != self.n + 1:
            raise ValueError(f"point must have {self.n + 1} coordinates")
        ev = exact_point(v)
        if ev is None:
            vv, one, zero = [complex(x) for x in v], 1 + 0j, 0j
        else:
            vv, one, zero = ev, ONE, ZERO
        pw = [_powers(x, self.d, one) for x in vv]
        total = zero
        for a, c in self.coeffs.items():
            term = monomial_value(pw, a)
            total = total + (c * term if ev is not None else complex(c) * term)
        return total

    def format(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"z{i}" for i in range(self.n + 1)]
        if not self.coeffs:
            return "0"
        terms = []
        for a in basis_enumerate(self.n, self.d):
            c = self.coeffs.get(a)
            if c is None:
                continue
            mono = "*".join(nm if e == 1 else f"{nm}^{e}" for nm, e in zip(names, a) if e)
            coef = _format_coeff(c)
            if not mono:
                terms.append(coef)
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{coef}*{mono}")
        return " + ".join(terms)

    def __repr__(self):
        return f"HoloSection(n={self.n}, d={self.d}, {self.format()})"


def _format_coeff(c: GaussianRational) -> str:
    if not c.im:
        return f"({c.re})" if c.re < 0 or c.re.denominator != 1 else str(c.re)
    if not c.re:
        return f"({c.im}*i)"
    return f"({c.re}+{c.im}*i)" if c.im > 0 else f"({c.re}-{-c.im}*i)"


class HermitianForm:
    """Exact Hermitian coefficient matrix over the degree-``d`` monomials of P^n.

    ``C`` maps ``(alpha, beta)`` to ``C[alpha, beta]``; zero entries are not
    stored. Construction checks homogeneity and Hermitian symmetry.
    """

    __slots__ = ("n", "d", "C")

    def __init__(self, n: int, d: int, C: Mapping | None = None, *, check: bool = True):
        self.n = n
        self.d = d
        out: dict = {}
        for (a, b), c in (C or {}).items():
            a, b = tuple(a), tuple(b)
            c = as_scalar(c)
            if not c:
                continue
            if check and (len(a) != n + 1 or len(b) != n + 1 or sum(a) != d or sum(b) != d):
                raise ValueError(f"entry {(a, b)} is not indexed by degree-{d} monomials in {n + 1} variables")
            out[(a, b)] = out.get((a, b), ZERO) + c
        self.C = {k: v for k, v in out.items() if v}
        if check:
            for (a, b), c in self.C.items():
                if self.C.get((b, a), ZERO) != c.conj():
                    raise ValueError(f"matrix is not Hermitian at {(a, b)}")

    @classmethod
    def _raw(cls, n: int, d: int, C: dict) -> "HermitianForm":
        f = object.__new__(cls)
        f.n, f.d, f.C = n, d, C
        return f

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, n: int, d: int) -> "HermitianForm":
        return cls._raw(n, d, {})

    @classmethod
    def from_poly(cls, poly: MixedHermPoly) -> "HermitianForm":
        degs = poly.degrees()
        if len(degs) > 1:
            raise ValueError(f"expression is not bihomogeneous of a single degree: {sorted(degs)}")
        if degs:
            (p, q), = degs
            if p != q:
                raise ValueError(f"holomorphic degree {p} differs from anti-holomorphic degree {q}")
        else:
            p = 0
        if not poly.is_real():
            raise ValueError("expression is not Hermitian")
        return cls._raw(poly.n_vars - 1, p, dict(poly.coeffs))

    @classmethod
    def from_matrix(cls, n: int, d: int, M: Sequence[Sequence]) -> "HermitianForm":
        basis = basis_enumerate(n, d)
        if len(M) != len(basis) or any(len(r) != len(basis) for r in M):
            raise ValueError(f"matrix must be {len(basis)}x{len(basis)}")
        return cls(n, d, {(a, b): M[i][j] for i, a in enumerate(basis) for j, b in enumerate(basis)})

    def to_poly(self) -> MixedHermPoly:
        return MixedHermPoly._raw(self.n + 1, dict(self.C))

    @property
    def basis(self):
        return basis_enumerate(self.n, self.d)

    def matrix(self) -> list[list[GaussianRational]]:
        basis = self.basis
        M = [[ZERO] * len(basis) for _ in basis]
        for (a, b), c in self.C.items():
            M[basis.rank(a)][basis.rank(b)] = c
        return M

    # predicates -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.C

    def is_diagonal(self) -> bool:
        return all(a == b for a, b in self.C)

    def is_hermitian(self) -> bool:
        return all(self.C.get((b, a), ZERO) == c.conj() for (a, b), c in self.C.items())

    def __eq__(self, other):
        if not isinstance(other, HermitianForm):
            return NotImplemented
        return (self.n, self.d, self.C) == (other.n, other.d, other.C)

    def __hash__(self):
        return hash((self.n, self.d, frozenset(self.C.items())))

    # algebra --------------------------------------------------------------
    def _check(self, other: "HermitianForm"):
        if self.n != other.n:
            raise ValueError(f"variable-count mismatch: n={self.n} vs n={other.n}")

    def __add__(self, other: "HermitianForm") -> "HermitianForm":
        self._check(other)
        if self.d != other.d and self.C and other.C:
            raise ValueError(f"cannot add forms of degrees {self.d} and {other.d}")
        d = self.d if self.C else other.d
        out = dict(self.C)
        for k, c in other.C.items():
            s = out.get(k, ZERO) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return HermitianForm._raw(self.n, d, out)

    def __neg__(self):
        return HermitianForm._raw(self.n, self.d, {k: -c for k, c in self.C.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "HermitianForm":
        c = as_scalar(c)
        if c.im:
            raise ValueError("Hermitian forms can only be scaled by real numbers")
        if not c:
            return HermitianForm.zero(self.n, self.d)
        return HermitianForm._raw(self.n, self.d, {k: v * c for k, v in self.C.items()})

    def __mul__(self, other):
        if isinstance(other, HermitianForm):
            return product(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __pow__(self, m: int) -> "HermitianForm":
        if m < 0:
            raise ValueError("negative power")
        result = unit_form(self.n)
        base = self
        while m:
            if m & 1:
                result = product(result, base)
            m >>= 1
            if m:
                base = product(base, base)
        return result

    # evaluation -----------------------------------------------------------
    def eval_pair(self, v: Sequence, w: Sequence):
        return eval_pair(self, v, w)

    def __call__(self, v: Sequence):
        """Diagonal value ``P(v, conj(v))``; a ``Fraction`` for exact input, else a float."""
        val = eval_pair(self, v, v)
        if isinstance(val, GaussianRational):
            return val.re
        return val.real

    def format(self) -> str:
        from .parser import to_expression

        return to_expression(self)

    def __repr__(self):
        return f"HermitianForm(n={self.n}, d={self.d}, nnz={len(self.C)})"


def unit_form(n: int) -> HermitianForm:
    """The constant form 1 (degree 0)."""
    z = (0,) * (n + 1)
    return HermitianForm._raw(n, 0, {(z, z): ONE})


def from_squares(terms: Iterable[tuple[object, HoloSection]]) -> HermitianForm:
    """Form of ``sum sign * |s|^2``.

    ``sign`` is normally +1 or -1; any real rational weight is accepted, and
    repeated sections accumulate.
    """
    terms = list(terms)
    if not terms:
        raise ValueError("from_squares needs at least one term")
    n, d = terms[0][1].n, terms[0][1].d
    out: dict = {}
    for sign, s in terms:
        if s.n != n or s.d != d:
            raise ValueError(f"mixed shapes: (n={n}, d={d}) vs (n={s.n}, d={s.d})")
        w = as_scalar(sign)
        if w.im:
            raise ValueError("square weights must be real")
        items = list(s.coeffs.items())
        for a, ca in items:
            wa = w * ca
            for b, cb in items:
                k = (a, b)
                out[k] = out.get(k, ZERO) + wa * cb.conj()
    return HermitianForm._raw(n, d, {k: v for k, v in out.items() if v})


def eval_pair(P: HermitianForm, v: Sequence, w: Sequence):
    """``sum C[a, b] v^a conj(w)^b``; exact for exact coordinates, complex otherwise."""
    if len(v) != P.n + 1 or len(w) != P.n + 1:
        raise ValueError(f"points must have {P.n + 1} coordinates")
    ev, ew = exact_point(v), exact_point(w)
    exact = ev is not None and ew is not None
    if exact:
        vv, ww, one, zero = ev, [x.conj() for x in ew], ONE, ZERO
    else:
        vv = [complex(x) for x in v]
        ww = [complex(x).conjugate() for x in w]
        one, zero = 1 + 0j, 0j
    pv = [_powers(x, P.d, one) for x in vv]
    pw = [_powers(x, P.d, one) for x in ww]
    if exact:
        rows: dict = {}
        for (a, b), c in P.C.items():
            rows.setdefault(a, []).append((b, c))
        total = zero
        for a, entries in rows.items():
            inner = zero
            for b, c in entries:
                inner = inner + c * monomial_value(pw, b)
            total = total + monomial_value(pv, a) * inner
        return total
    total = zero
    for (a, b), c in P.C.items():
        total += complex(c) * monomial_value(pv, a) * monomial_value(pw, b)
    return total


def product(P: HermitianForm, Q: HermitianForm) -> HermitianForm:
    """Tensor product ``P (x) Q``: degrees add, values multiply."""
    if P.n != Q.n:
        raise ValueError(f"variable-count mismatch: n={P.n} vs n={Q.n}")
    out: dict = {}
    q_items = list(Q.C.items())
    for (a1, b1), c1 in P.C.items():
        for (a2, b2), c2 in q_items:
            k = (
                tuple(x + y for x, y in zip(a1, a2)),
                tuple(x + y for x, y in zip(b1, b2)),
            )
            out[k] = out.get(k, ZERO) + c1 * c2
    return HermitianForm._raw(P.n, P.d + Q.d, {k: v for k, v in out.items() if v})


def norm_power(n: int, m: int) -> HermitianForm:
    """``(|z0|^2 + ... + |zn|^2)^m``, diagonal with multinomial entries ``m!/alpha!``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if m <= 0:
        raise ValueError(f"norm_power needs m >= 1, got {m}")
    fm = factorial(m)
    C = {}
    for a in basis_enumerate(n, m):
        den = 1
        for e in a:
            den *= factorial(e)
        C[(a, a)] = as_scalar(Fraction(fm, den))
    return HermitianForm._raw(n, m, C)


def independent_subset(vectors: Sequence[Sequence[GaussianRational]]) -> list[int]:
    """Indices of a maximal linearly independent subset, by exact row reduction."""
    echelon: list[tuple[int, list]] = []  # (pivot column, reduced row with 1 at pivot)
    chosen = []
    for idx, vec in enumerate(vectors):
        row = [as_scalar(x) for x in vec]
        for piv, erow in echelon:
            f = row[piv]
            if f:
                row = [x - f * y for x, y in zip(row, erow)]
        piv = next((j for j, x in enumerate(row) if x), None)
        if piv is None:
            continue
        inv = ONE / row[piv]
        row = [x * inv for x in row]
        for k, (p, erow) in enumerate(echelon):
            f = erow[piv]
            if f:
                echelon[k] = (p, [x - f * y for x, y in zip(erow, row)])
        echelon.append((piv, row))
        chosen.append(idx)
    return chosen


def exact_rank(vectors: Sequence[Sequence]) -> int:
    return len(independent_subset(vectors))


def support_space_basis(P: HermitianForm) -> list[HoloSection]:
    """Column sections ``u_b = sum_a C[a, b] z^a``, reduced to an independent set."""
    if P.is_zero():
        raise ValueError("support space of the zero form is undefined")
    basis = P.basis
    cols: dict = {}
    for (a, b), c in P.C.items():
        cols.setdefault(b, {})[a] = c
    order = [b for b in basis if b in cols]
    sections = [HoloSection(P.n, P.d, cols[b]) for b in order]
    keep = independent_subset([s.vector() for s in sections])
    return [sections[i] for i in keep]


def gcurvature(P: HermitianForm, points: Sequence[Sequence]) -> list[list]:
    """The N x N matrix ``[P(v_i, conj(v_j))]``."""
    if not points:
        raise ValueError("gcurvature needs at least one point")
    for v in points:
        if len(v) != P.n + 1:
            raise ValueError(f"points must have {P.n + 1} coordinates")
    N = len(points)
    M = [[None] * N for _ in range(N)]
    for i in range(N):
        for j in range(i, N):
            val = eval_pair(P, points[i], points[j])
            M[i][j] = val
            M[j][i] = val.conj() if isinstance(val, GaussianRational) else val.conjugate()
    return M
