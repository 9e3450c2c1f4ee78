"""Distinguished bases, moduli and sum-of-squared-norms decompositions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import basis_enumerate
from .hermform import HermitianForm, HoloSection, from_squares
from .spectra import exact_squares, jacobi_eigh, psd_exact, signature, to_float

__all__ = [
    "EIGEN_CUTOFF",
    "FloatSection",
    "FloatForm",
    "DistinguishedBasis",
    "distinguished_basis",
    "rational_distinguished_basis",
    "modulus",
    "exact_modulus",
    "sos_decomposition",
    "rebase_distinguished",
    "hyperbolic_rotation",
]

EIGEN_CUTOFF = 1e-10  # relative to ||C||_F; smaller eigenvalues count as the zero block


def _monomial_values(n: int, d: int, v: Sequence[complex]) -> np.ndarray:
    v = np.asarray([complex(x) for x in v])
    return np.array([np.prod(v ** np.array(a)) for a in basis_enumerate(n, d)], dtype=complex)


@dataclass(frozen=True)
class FloatSection:
    """Section of O(d) on P^n with floating coefficients in graded-lex order."""

    n: int
    d: int
    coeffs: np.ndarray

    def evaluate(self, v: Sequence) -> complex:
        return complex(self.coeffs @ _monomial_values(self.n, self.d, v))

    @classmethod
    def from_exact(cls, s: HoloSection, scale: float = 1.0) -> "FloatSection":
        return cls(s.n, s.d, scale * np.array([complex(c) for c in s.vector()], dtype=complex))


@dataclass(frozen=True)
class FloatForm:
    """Hermitian form with a floating coefficient matrix."""

    n: int
    d: int
    matrix: np.ndarray

    def eval_pair(self, v: Sequence, w: Sequence) -> complex:
        mv = _monomial_values(self.n, self.d, v)
        mw = _monomial_values(self.n, self.d, w)
        return complex(mv @ self.matrix @ mw.conj())

    def __call__(self, v: Sequence) -> float:
        return self.eval_pair(v, v).real


def _gram(rows: np.ndarray, size: int) -> np.ndarray:
    if rows.size == 0:
        return np.zeros((size, size), dtype=complex)
    return rows.T @ rows.conj()


@dataclass(frozen=True)
class DistinguishedBasis:
    """Independent sections ``f``, ``g`` with ``P = sum |f_i|^2 - sum |g_j|^2``.

    ``exact`` optionally carries the same decomposition with rational weights
    and exact sections, ``P = sum w |s|^2``, in which case ``f_i = sqrt(w) s``.
    """

    n: int
    d: int
    f: tuple[FloatSection, ...]
    g: tuple[FloatSection, ...]
    source_norm: float
    exact: tuple[tuple[Fraction, HoloSection], ...] | None = field(default=None, compare=False)

    @property
    def k(self) -> int:
        return len(self.f)

    @property
    def l(self) -> int:
        return len(self.g)

    @property
    def signature(self) -> tuple[int, int]:
        return self.k, self.l

    def _rows(self, which) -> np.ndarray:
        size = len(basis_enumerate(self.n, self.d))
        if not which:
            return np.zeros((0, size), dtype=complex)
        return np.array([s.coeffs for s in which])

    @property
    def F(self) -> np.ndarray:
        return self._rows(self.f)

    @property
    def G(self) -> np.ndarray:
        return self._rows(self.g)

    def reexpand(self) -> np.ndarray:
        """Coefficient matrix of ``sum |f|^2 - sum |g|^2``."""
        size = len(basis_enumerate(self.n, self.d))
        return _gram(self.F, size) - _gram(self.G, size)

    def diagonal_value(self, v: Sequence) -> float:
        mv = _monomial_values(self.n, self.d, v)
        fv = self.F @ mv if self.f else np.zeros(0)
        gv = self.G @ mv if self.g else np.zeros(0)
        return float(np.sum(np.abs(fv) ** 2) - np.sum(np.abs(gv) ** 2))


def distinguished_basis(P: HermitianForm) -> DistinguishedBasis:
    """Eigenvector basis: ``f_i = sqrt(lambda_i) u_i``, ``g_j = sqrt(mu_j) u_j``."""
    if P.is_zero():
        raise ValueError("the zero form has no distinguished basis")
    M = to_float(P)
    norm = float(np.linalg.norm(M))
    eig = jacobi_eigh(M)
    cutoff = EIGEN_CUTOFF * norm
    f, g = [], []
    for lam, u in zip(eig.eigenvalues, eig.eigenvectors.T):
        if lam > cutoff:
            f.append(FloatSection(P.n, P.d, math.sqrt(lam) * u))
        elif lam < -cutoff:
            g.append(FloatSection(P.n, P.d, math.sqrt(-lam) * u))
    return DistinguishedBasis(P.n, P.d, tuple(f), tuple(g), norm)


def rational_distinguished_basis(P: HermitianForm) -> DistinguishedBasis:
    """Distinguished basis from the exact LDL* congruence, ``P = sum w |s|^2``.

    Its modulus ``sum |w| |s|^2`` has rational coefficients, so moduli and
    modulus ratios can be evaluated exactly.
    """
    if P.is_zero():
        raise ValueError("the zero form has no distinguished basis")
    squares = exact_squares(P)
    f, g = [], []
    for w, s in squares:
        fs = FloatSection.from_exact(s, math.sqrt(abs(float(w))))
        (f if w > 0 else g).append(fs)
    norm = float(np.linalg.norm(to_float(P)))
    return DistinguishedBasis(P.n, P.d, tuple(f), tuple(g), norm, exact=tuple(squares))


def _check_basis(P: HermitianForm, basis: DistinguishedBasis, rtol: float = 1e-8):
    if (P.n, P.d) != (basis.n, basis.d):
        raise ValueError("distinguished basis belongs to a form of a different shape")
    M = to_float(P)
    err = np.linalg.norm(basis.reexpand() - M)
    if err > rtol * max(np.linalg.norm(M), 1e-300):
        raise ValueError(f"distinguished basis does not reproduce the form (residual {err:.3e})")


def modulus(P: HermitianForm, basis: DistinguishedBasis) -> FloatForm:
    """``sum |f|^2 + sum |g|^2`` for the given distinguished basis."""
    _check_basis(P, basis)
    size = len(basis_enumerate(P.n, P.d))
    return FloatForm(P.n, P.d, _gram(basis.F, size) + _gram(basis.G, size))


def exact_modulus(P: HermitianForm, basis: DistinguishedBasis) -> HermitianForm:
    """Exact modulus for a basis built by :func:`rational_distinguished_basis`."""
    if basis.exact is None:
        raise ValueError("basis carries no exact decomposition")
    if from_squares(basis.exact) != P:
        raise ValueError("distinguished basis does not reproduce the form")
    return from_squares([(abs(w), s) for w, s in basis.exact])


def sos_decomposition(P: HermitianForm) -> list[FloatSection] | None:
    """Sections ``s_j`` with ``P = sum |s_j|^2`` if the matrix is PSD, else ``None``."""
    if P.is_zero():
        return []
    if not psd_exact(P):
        return None
    return list(distinguished_basis(P).f)


def hyperbolic_rotation(
    basis: DistinguishedBasis, i: int, j: int, cosh: float, sinh: float, phase: float = 0.0
) -> DistinguishedBasis:
    """Mix ``f_i`` with ``g_j``: ``f' = c f + s e^{i phase} g``, ``g' = s e^{-i phase} f + c g``."""
    if abs(cosh * cosh - sinh * sinh - 1.0) > 1e-12:
        raise ValueError("need cosh^2 - sinh^2 = 1")
    F, G = basis.F.copy(), basis.G.copy()
    e = complex(math.cos(phase), math.sin(phase))
    fi, gj = F[i].copy(), G[j].copy()
    F[i] = cosh * fi + sinh * e * gj
    G[j] = sinh * e.conjugate() * fi + cosh * gj
    return _with_rows(basis, F, G)


def _with_rows(basis: DistinguishedBasis, F: np.ndarray, G: np.ndarray) -> DistinguishedBasis:
    f = tuple(FloatSection(basis.n, basis.d, r) for r in F)
    g = tuple(FloatSection(basis.n, basis.d, r) for r in G)
    return replace(basis, f=f, g=g, exact=None)


def _random_unitary(rng: np.random.Generator, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((0, 0), dtype=complex)
    Z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def rebase_distinguished(
    basis: DistinguishedBasis, seed: int, n_hyperbolic: int = 2, max_rapidity: float = 1.0
) -> DistinguishedBasis:
    """Pseudo-random change of distinguished basis preserving ``P`` and ``V_P``.

    Applies block unitaries on the ``f`` and ``g`` blocks, then (when both are
    nonempty) ``n_hyperbolic`` hyperbolic rotations of rapidity at most
    ``max_rapidity`` mixing one ``f`` with one ``g``.
    """
    rng = np.random.default_rng(seed)
    F = _random_unitary(rng, basis.k) @ basis.F if basis.k else basis.F
    G = _random_unitary(rng, basis.l) @ basis.G if basis.l else basis.G
    out = _with_rows(basis, F, G)
    if basis.k and basis.l:
        for _ in range(n_hyperbolic):
            i = int(rng.integers(basis.k))
            j = int(rng.integers(basis.l))
            t = float(rng.uniform(-max_rapidity, max_rapidity))
            phase = float(rng.uniform(0, 2 * math.pi))
            out = hyperbolic_rotation(out, i, j, math.cosh(t), math.sinh(t), phase)
    return out


def basis_signature_matches(P: HermitianForm, basis: DistinguishedBasis) -> bool:
    return signature(P) == basis.signature
