"""Rational curves into P^n, pullbacks, local expansions and base divisors on P^1."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .algebra import ONE, ZERO, GaussianRational, as_scalar
from .hermform import HermitianForm, HoloSection, from_squares, support_space_basis
from .polys import MixedHermPoly

__all__ = [
    "RationalCurve",
    "BidegreeExpansion",
    "JetResult",
    "DivisorP1",
    "JetFailure",
    "JetScanReport",
    "pullback",
    "local_expansion",
    "jet_check",
    "base_divisor_factor",
    "jpp_scan",
    "normalize_center",
]


@dataclass(frozen=True)
class RationalCurve:
    """``[x:y] -> [h_0(x, y): ... : h_n(x, y)]`` with binary components of one degree."""

    components: tuple[HoloSection, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("a curve needs at least one component")
        if any(c.n != 1 for c in comps):
            raise ValueError("curve components must be binary forms in (x, y)")
        nonzero = [c for c in comps if not c.is_zero()]
        if not nonzero:
            raise ValueError("curve components are all identically zero")
        degs = {c.d for c in nonzero}
        if len(degs) > 1:
            raise ValueError(f"curve components have different degrees {sorted(degs)}")
        e = degs.pop()
        fixed = tuple(c if not c.is_zero() else HoloSection(1, e) for c in comps)
        object.__setattr__(self, "components", fixed)

    @property
    def n_target(self) -> int:
        return len(self.components) - 1

    @property
    def e(self) -> int:
        return self.components[0].d

    @classmethod
    def identity(cls) -> "RationalCurve":
        return cls((HoloSection.monomial((1, 0)), HoloSection.monomial((0, 1))))

    def __call__(self, point: Sequence) -> tuple:
        return tuple(c.evaluate(point) for c in self.components)


def pullback(P: HermitianForm, curve: RationalCurve) -> HermitianForm:
    """Exact substitution ``z_i -> h_i(x, y)``; the result has degree ``d * e``."""
    if curve.n_target != P.n:
        raise ValueError(f"curve maps into P^{curve.n_target} but the form lives on P^{P.n}")
    images = [c.to_poly() for c in curve.components]
    poly = P.to_poly().compose(images, 2)
    return HermitianForm(1, P.d * curve.e, poly.coeffs, check=False)


# --------------------------------------------------------------------------
# local expansions


def normalize_center(center: Sequence) -> tuple[GaussianRational, GaussianRational]:
    """Scale ``[a:b]`` to ``[a/b:1]`` or ``[1:0]``."""
    a, b = (as_scalar(x) for x in center)
    if b:
        return a / b, ONE
    if not a:
        raise ValueError("[0:0] is not a point of P^1")
    return ONE, ZERO


@dataclass(frozen=True)
class BidegreeExpansion:
    """Coefficients ``c[(j, k)]`` of ``t^j conj(t)^k`` around a point of P^1."""

    coeffs: dict[tuple[int, int], GaussianRational]
    center: tuple[GaussianRational, GaussianRational]
    chart: str  # "finite" (y = 1) or "infinity" (x = 1)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_real(self) -> bool:
        return all(self.coeffs.get((k, j), ZERO) == c.conj() for (j, k), c in self.coeffs.items())

    def evaluate(self, t: complex) -> float:
        return sum(complex(c) * t**j * np.conj(t) ** k for (j, k), c in self.coeffs.items()).real


def local_expansion(P: HermitianForm, center: Sequence) -> BidegreeExpansion:
    """Exact expansion of ``P`` in a local coordinate ``t`` centred at ``[a:b]``.

    For ``b != 0`` substitute ``(x, y) = (a/b + t, 1)``; otherwise ``(1, t)``.
    """
    if P.n != 1:
        raise ValueError("local expansions are defined for forms on P^1")
    a, b = normalize_center(center)
    t = MixedHermPoly.variable(1, 0)
    one = MixedHermPoly.constant(1, 1)
    if b:
        images, chart = [one * a + t, one], "finite"
    else:
        images, chart = [one, t], "infinity"
    poly = P.to_poly().compose(images, 1)
    coeffs = {(al[0], be[0]): c for (al, be), c in poly.coeffs.items()}
    return BidegreeExpansion(coeffs, (a, b), chart)


@dataclass(frozen=True)
class JetResult:
    passed: bool
    mu: int
    lowest_block: dict[tuple[int, int], GaussianRational]

    @property
    def vanishing_order(self) -> Fraction:
        """``mu / 2``: the order of the lowest term, in units of ``|t|^2``."""
        return Fraction(self.mu, 2)


def jet_check(expansion: BidegreeExpansion) -> JetResult:
    """Lowest-order term must be ``c |t|^mu`` with ``c > 0``."""
    if expansion.is_zero():
        raise ValueError("identically zero expansion")
    mu = min(j + k for (j, k) in expansion.coeffs)
    block = {jk: c for jk, c in expansion.coeffs.items() if sum(jk) == mu}
    ok = False
    if mu % 2 == 0 and set(block) == {(mu // 2, mu // 2)}:
        c = block[(mu // 2, mu // 2)]
        ok = c.is_real() and c.re > 0
    return JetResult(ok, mu, dict(sorted(block.items())))


# --------------------------------------------------------------------------
# univariate arithmetic over Q(i), coefficient lists low -> high


def _trim(p: list) -> list:
    while p and not p[-1]:
        p.pop()
    return p


def _poly_mod(a: list, b: list) -> list:
    a = list(a)
    lead = b[-1]
    db = len(b) - 1
    while len(_trim(a)) - 1 >= db and a:
        f = a[-1] / lead
        shift = len(a) - 1 - db
        for i, c in enumerate(b):
            a[shift + i] = a[shift + i] - f * c
        a.pop()  # leading term cancels
    return _trim(a)


def _poly_gcd(polys: Iterable[list]) -> list:
    g: list = []
    for p in polys:
        p = _trim(list(p))
        if not p:
            continue
        if not g:
            g = p
            continue
        a, b = g, p
        while b:
            a, b = b, _poly_mod(a, b)
        g = a
        if len(g) == 1:
            break
    if not g:
        return []
    inv = ONE / g[-1]
    return [c * inv for c in g]


def _poly_eval(p: list, x):
    acc = ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _rational_roots(p: list) -> list[GaussianRational]:
    """Roots of ``p`` in Q(i), found numerically and confirmed exactly."""
    if len(p) <= 1:
        return []
    approx = np.roots([complex(c) for c in reversed(p)])
    found: list[GaussianRational] = []
    for z in approx:
        for bound in (10, 100, 10**4, 10**6):
            cand = GaussianRational(
                Fraction(float(z.real)).limit_denominator(bound),
                Fraction(float(z.imag)).limit_denominator(bound),
            )
            if not _poly_eval(p, cand):
                if cand not in found:
                    found.append(cand)
                break
    return found


def _binary_to_univariate(s: HoloSection) -> list:
    """Coefficients of ``s(x, 1)`` in powers of ``x``."""
    out = [ZERO] * (s.d + 1)
    for (i, _), c in s.coeffs.items():
        out[i] = c
    return _trim(out)


def _univariate_to_binary(p: list, d: int) -> HoloSection:
    return HoloSection(1, d, {(i, d - i): c for i, c in enumerate(p) if c})


def _divide_binary(num: dict, den: dict) -> dict:
    """Exact quotient of homogeneous binary forms given as ``{(i, j): c}``."""
    num = {k: v for k, v in num.items() if v}
    lead = max(den)
    lc = den[lead]
    q: dict = {}
    while num:
        top = max(num)
        if top[0] < lead[0] or top[1] < lead[1]:
            raise ArithmeticError("binary form division is not exact")
        f = num[top] / lc
        mono = (top[0] - lead[0], top[1] - lead[1])
        q[mono] = f
        for k, c in den.items():
            kk = (k[0] + mono[0], k[1] + mono[1])
            v = num.get(kk, ZERO) - f * c
            if v:
                num[kk] = v
            else:
                num.pop(kk, None)
    return q


@dataclass(frozen=True)
class DivisorP1:
    """``P = |s_D|^2 * residual`` with ``s_D`` the gcd of the support space of ``P``."""

    s_D: HoloSection
    residual: HermitianForm
    roots: tuple[tuple[GaussianRational, GaussianRational], ...] = field(default=())

    def order_at(self, center: Sequence) -> int:
        """Vanishing order of ``s_D`` at ``[a:b]``."""
        if self.s_D.d == 0:
            return 0
        exp = local_expansion(from_squares([(1, self.s_D)]), center)
        return jet_check(exp).mu // 2


def base_divisor_factor(P: HermitianForm) -> DivisorP1:
    """Extract the gcd ``s_D`` of the support-space sections and divide it out.

    The gcd is computed on the dehomogenizations ``s(x, 1)`` by Euclid's
    algorithm; the multiplicity at ``[1:0]`` is the least degree deficit.
    The identity ``|s_D|^2 * residual == P`` is re-verified exactly.
    """
    if P.n != 1:
        raise ValueError("base divisors are computed on P^1")
    if P.is_zero():
        raise ValueError("the zero form has no base divisor")
    sections = support_space_basis(P)
    unis = [_binary_to_univariate(s) for s in sections]
    g = _poly_gcd(unis)
    y_mult = min(P.d - (len(u) - 1) for u in unis)
    dg = len(g) - 1
    s_D = _univariate_to_binary(g, dg) * HoloSection.monomial((0, y_mult))
    if s_D.d == 0:
        residual = P
    else:
        den = dict(s_D.coeffs)
        cden = {k: c.conj() for k, c in den.items()}
        by_beta: dict = {}
        for (a, b), c in P.C.items():
            by_beta.setdefault(b, {})[a] = c
        half: dict = {}
        for b, col in by_beta.items():
            for a, c in _divide_binary(col, den).items():
                half.setdefault(a, {})[b] = c
        out: dict = {}
        for a, row in half.items():
            for b, c in _divide_binary(row, cden).items():
                out[(a, b)] = c
        residual = HermitianForm(1, P.d - s_D.d, out)
        if from_squares([(1, s_D)]) * residual != P:
            raise ArithmeticError("base divisor factorization failed to reproduce the form")
    roots = [(r, ONE) for r in _rational_roots(g)]
    if y_mult:
        roots.append((ONE, ZERO))
    return DivisorP1(s_D, residual, tuple(roots))


# --------------------------------------------------------------------------
# jet battery


@dataclass(frozen=True)
class JetFailure:
    curve_index: int
    center: tuple[GaussianRational, GaussianRational]
    result: JetResult


@dataclass
class JetScanReport:
    """Outcome of a jet battery. ``passed`` means no failure was found."""

    passed: bool
    failure: JetFailure | None
    checked: list[tuple[int, tuple, JetResult]] = field(default_factory=list)
    divisors: list[DivisorP1] = field(default_factory=list)


_DEFAULT_CENTERS = ((ZERO, ONE), (ONE, ZERO))


def jpp_scan(
    P: HermitianForm,
    curves: Sequence[RationalCurve],
    centers_per_curve: Sequence[Sequence[Sequence]] | Sequence[Sequence] | None = None,
) -> JetScanReport:
    """Pull back along each curve and run :func:`jet_check` at a battery of centers.

    Centers are the user-supplied ones, the rational roots of the pullback's
    base divisor, and ``[0:1]``, ``[1:0]``. The check runs on the divisor-free
    residual, which has a passing jet wherever the full pullback does.
    """
    if not curves:
        raise ValueError("jpp_scan needs at least one curve")
    per_curve = _split_centers(centers_per_curve, len(curves))
    report = JetScanReport(True, None)
    for idx, curve in enumerate(curves):
        pb = pullback(P, curve)
        if pb.is_zero():
            raise ValueError(f"form vanishes identically on curve {idx}")
        div = base_divisor_factor(pb)
        report.divisors.append(div)
        centers: list = []
        for c in list(per_curve[idx]) + list(div.roots) + list(_DEFAULT_CENTERS):
            c = normalize_center(c)
            if c not in centers:
                centers.append(c)
        for c in centers:
            res = jet_check(local_expansion(div.residual, c))
            report.checked.append((idx, c, res))
            if not res.passed and report.failure is None:
                report.passed = False
                report.failure = JetFailure(idx, c, res)
        if report.failure is not None:
            break
    return report


def _split_centers(spec, n_curves: int) -> list[list]:
    if spec is None:
        return [[] for _ in range(n_curves)]
    spec = list(spec)
    if spec and all(len(s) == 2 and not isinstance(s[0], (list, tuple)) for s in spec):
        return [spec for _ in range(n_curves)]  # one shared list of points
    if len(spec) != n_curves:
        raise ValueError("centers_per_curve must list centers for every curve")
    return [list(s) for s in spec]
