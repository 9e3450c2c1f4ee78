"""Affine charts, monomial blowup substitutions and squared-monomial factors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .hermform import HermitianForm
from .polys import MixedHermPoly

__all__ = [
    "MixedHermPoly",
    "BlowupStep",
    "BlowupTrace",
    "dehomogenize",
    "monomial_substitute",
    "factor_monomial_square",
    "blowup_chain",
]


def dehomogenize(P: HermitianForm, chart: int) -> MixedHermPoly:
    """Set ``z_chart = 1``; the affine variables are the remaining ``z_j`` in order.

    ``P = |z_chart|^(2d) * p(z_j / z_chart)`` where ``p`` is the result.
    """
    if not 0 <= chart <= P.n:
        raise IndexError(f"chart index {chart} out of range 0..{P.n}")

    def drop(e):
        return e[:chart] + e[chart + 1:]

    out: dict = {}
    for (a, b), c in P.C.items():
        k = (drop(a), drop(b))
        out[k] = out.get(k, 0) + c
    return MixedHermPoly(P.n, out)


def monomial_substitute(q: MixedHermPoly, images: Sequence[Sequence[int]], n_new: int | None = None) -> MixedHermPoly:
    """Replace each ``x_i`` by the monomial ``y^images[i]`` (and conjugates likewise)."""
    if n_new is None:
        n_new = len(images[0]) if images else 0
    for img in images:
        if not any(img):
            raise ValueError("substitution monomials must be nonconstant")
    return q.substitute_monomials(images, n_new)


def factor_monomial_square(q: MixedHermPoly) -> tuple[tuple[int, ...], MixedHermPoly]:
    """Split ``q = |y^gamma|^2 * reduced`` with ``gamma`` as large as possible.

    ``gamma_i`` is the least ``min(alpha_i, beta_i)`` over the terms of ``q``.
    """
    if q.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    gamma = [min(min(a[i], b[i]) for (a, b) in q.coeffs) for i in range(q.n_vars)]
    g = tuple(gamma)

    def sub(e):
        return tuple(x - y for x, y in zip(e, g))

    reduced = MixedHermPoly._raw(q.n_vars, {(sub(a), sub(b)): c for (a, b), c in q.coeffs.items()})
    return g, reduced


@dataclass(frozen=True)
class BlowupStep:
    images: tuple[tuple[int, ...], ...]
    substituted: MixedHermPoly  # reduced part of the previous step after substitution
    gamma: tuple[int, ...]  # factor extracted at this step
    total_gamma: tuple[int, ...]  # |y^total_gamma|^2 * reduced equals the full transform
    reduced: MixedHermPoly


@dataclass
class BlowupTrace:
    start: MixedHermPoly
    steps: list[BlowupStep] = field(default_factory=list)
    probes: list[tuple[tuple, object]] = field(default_factory=list)

    @property
    def final(self) -> MixedHermPoly:
        return self.steps[-1].reduced if self.steps else self.start

    def full_transform(self, i: int) -> MixedHermPoly:
        """The blown-up polynomial after step ``i``, monomial factor included."""
        st = self.steps[i]
        z = (0,) * len(st.total_gamma)
        factor = MixedHermPoly(len(z), {(st.total_gamma, st.total_gamma): 1})
        return factor * st.reduced

    @property
    def residual_zeros(self) -> list[tuple]:
        return [pt for pt, val in self.probes if val == 0]


def _push(e: Sequence[int], images: Sequence[Sequence[int]], n_new: int) -> tuple[int, ...]:
    out = [0] * n_new
    for k, img in zip(e, images):
        for j, f in enumerate(img):
            out[j] += k * f
    return tuple(out)


def blowup_chain(
    q: MixedHermPoly, steps: Sequence[Sequence[Sequence[int]]], probes: Sequence[Sequence] = ()
) -> BlowupTrace:
    """Fold substitute-then-factor over ``steps``, then evaluate the final part at ``probes``.

    Each step substitutes into the reduced polynomial of the previous step;
    the extracted monomial factors accumulate in ``total_gamma``.
    """
    if not q.is_real():
        raise ValueError("blowup input must be a real (Hermitian) polynomial")
    trace = BlowupTrace(start=q)
    current = q
    total = (0,) * q.n_vars
    for images in steps:
        images = tuple(tuple(int(x) for x in img) for img in images)
        n_new = len(images[0])
        sub = monomial_substitute(current, images, n_new)
        gamma, reduced = factor_monomial_square(sub)
        total = tuple(x + y for x, y in zip(_push(total, images, n_new), gamma))
        trace.steps.append(BlowupStep(images, sub, gamma, total, reduced))
        current = reduced
    for pt in probes:
        trace.probes.append((tuple(pt), current.evaluate(pt)))
    return trace
