"""Hermitian linear algebra: exact inertia by LDL* and floating Jacobi eigensolves."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import ZERO, GaussianRational, as_scalar
from .hermform import HermitianForm, HoloSection

__all__ = [
    "ConvergenceError",
    "EigenDecomposition",
    "LDLResult",
    "to_float",
    "jacobi_eigh",
    "ldl_exact",
    "psd_exact",
    "psd_matrix_exact",
    "signature",
    "inertia_matrix_exact",
    "exact_squares",
    "check_hermitian",
]


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # real, descending
    eigenvectors: np.ndarray  # unitary, columns
    sweeps: int

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T


def to_float(P: HermitianForm) -> np.ndarray:
    """Dense complex coefficient matrix in graded-lex order."""
    basis = P.basis
    M = np.zeros((len(basis), len(basis)), dtype=complex)
    for (a, b), c in P.C.items():
        try:
            M[basis.rank(a), basis.rank(b)] = complex(float(c.re), float(c.im))
        except OverflowError as exc:
            raise OverflowError(f"coefficient at {(a, b)} does not fit a float: {c}") from exc
    return M


def check_hermitian(M: np.ndarray, rtol: float = 1e-14) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    scale = np.max(np.abs(M)) if M.size else 0.0
    if M.size and np.max(np.abs(M - M.conj().T)) > rtol * max(scale, np.finfo(float).tiny):
        raise ValueError("matrix is not Hermitian")
    return M


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint index pairs covering every pair once (circle method)."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            a, b = players[k], players[m - 1 - k]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(M, tol: float = 1e-12, max_sweeps: int = 100) -> EigenDecomposition:
    """Cyclic complex Jacobi eigensolver.

    Each sweep visits every off-diagonal pair once, in round-robin order so
    that the rotations of one round act on disjoint index pairs and can be
    applied together. Iterates until the off-diagonal Frobenius norm is at
    most ``tol * ||M||_F``.
    """
    A = check_hermitian(M).copy()
    n = A.shape[0]
    A = 0.5 * (A + A.conj().T)
    V = np.eye(n, dtype=complex)
    norm = np.linalg.norm(A)
    if n == 0 or norm == 0.0:
        return EigenDecomposition(np.zeros(n), V, 0)
    rounds = _round_robin(n)
    offmask = ~np.eye(n, dtype=bool)
    sweeps = 0
    while True:
        off = math.sqrt(float(np.sum(np.abs(A[offmask]) ** 2)))
        if off <= tol * norm:
            break
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge after {max_sweeps} sweeps (off-norm {off:.3e}, target {tol * norm:.3e})"
            )
        sweeps += 1
        for p, q in rounds:
            if p.size == 0:
                continue
            apq = A[p, q]
            mag = np.abs(apq)
            active = mag > 1e-300
            if not active.any():
                continue
            app = A[p, p].real
            aqq = A[q, q].real
            safe = np.where(active, mag, 1.0)
            theta = (aqq - app) / (2.0 * safe)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.hypot(t, 1.0)
            s = t * c
            e = np.where(active, apq / safe, 1.0)
            c = np.where(active, c, 1.0)
            s = np.where(active, s, 0.0)
            ec = e.conj()
            # rotation block on (p, q): [[c, s], [-s*conj(e), c*conj(e)]]
            jpp, jpq, jqp, jqq = c, s, -s * ec, c * ec
            Ap, Aq = A[:, p].copy(), A[:, q].copy()
            A[:, p] = Ap * jpp + Aq * jqp
            A[:, q] = Ap * jpq + Aq * jqq
            Ap, Aq = A[p, :].copy(), A[q, :].copy()
            A[p, :] = np.conj(jpp)[:, None] * Ap + np.conj(jqp)[:, None] * Aq
            A[q, :] = np.conj(jpq)[:, None] * Ap + np.conj(jqq)[:, None] * Aq
            A[p, q] = 0.0
            A[q, p] = 0.0
            Vp, Vq = V[:, p].copy(), V[:, q].copy()
            V[:, p] = Vp * jpp + Vq * jqp
            V[:, q] = Vp * jpq + Vq * jqq
    w = A.diagonal().real.copy()
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], V[:, order], sweeps)


# --------------------------------------------------------------------------
# exact LDL*


@dataclass
class LDLResult:
    """Exact congruence diagonalization ``A = sum_k w_k v_k v_k^*``.

    ``terms`` pairs a nonzero rational weight with a sparse column vector
    (dict index -> Gaussian rational). The vectors are linearly independent;
    the number of positive and negative weights is the inertia of ``A``.
    """

    terms: list[tuple[Fraction, dict[int, GaussianRational]]]
    positive: int
    negative: int
    zero: int
    psd_failure: tuple[str, int] | None = None


def _sparse_rows(M: Sequence[Sequence]) -> dict[int, dict[int, GaussianRational]]:
    rows: dict[int, dict[int, GaussianRational]] = {}
    for i, r in enumerate(M):
        for j, x in enumerate(r):
            x = as_scalar(x)
            if x:
                rows.setdefault(i, {})[j] = x
    return rows


def _form_rows(P: HermitianForm) -> tuple[dict, int]:
    basis = P.basis
    rows: dict[int, dict[int, GaussianRational]] = {}
    for (a, b), c in P.C.items():
        rows.setdefault(basis.rank(a), {})[basis.rank(b)] = c
    return rows, len(basis)


def _ldl_rows(rows: dict[int, dict[int, GaussianRational]], size: int, psd_only: bool = False) -> LDLResult:
    A = {i: dict(r) for i, r in rows.items() if r}
    terms: list = []
    pos = neg = 0
    while A:
        pivot = None
        for i in sorted(A):
            d = A[i].get(i)
            if d is not None:
                if psd_only and (d.im or d.re < 0):
                    return LDLResult(terms, pos, neg, 0, ("negative-pivot", i))
                pivot = i
                break
        if pivot is not None:
            k = pivot
            d = A[k][k].re
            col = {i: x for i, x in A[k].items()}  # A[k][i] = conj(A[i][k])
            vec = {i: (x.conj() / d) for i, x in col.items()}  # v[i] = A[i][k] / d
            terms.append((d, vec))
            if d > 0:
                pos += 1
            else:
                neg += 1
            del A[k]
            others = [i for i in col if i != k]
            for i in others:
                row = A.get(i)
                if row is None:
                    continue
                row.pop(k, None)
            for i in others:
                aik = col[i].conj()
                row = A.setdefault(i, {})
                f = aik / d
                for j in others:
                    delta = f * col[j]  # A[i][k] * A[k][j] / d
                    v = row.get(j, ZERO) - delta
                    if v:
                        row[j] = v
                    else:
                        row.pop(j, None)
                if not row:
                    del A[i]
            continue
        # every active diagonal entry vanishes: use a 2x2 pivot on some nonzero A[i][j]
        if psd_only:
            i = min(A)
            return LDLResult(terms, pos, neg, 0, ("zero-diagonal-with-offdiagonal", i))
        i = min(A)
        j = min(A[i])
        b = A[i][j]
        x = {r: A[r][i] for r in A if i in A[r]}
        y = {r: A[r][j] for r in A if j in A[r]}
        # A = ... + x (1/conj b) y^* + y (1/b) x^*; with p = x, q = y / b this is p q^* + q p^*
        p = x
        q = {r: v / b for r, v in y.items()}
        plus = dict(p)
        minus = dict(p)
        for r, v in q.items():
            plus[r] = plus.get(r, ZERO) + v
            minus[r] = minus.get(r, ZERO) - v
        plus = {r: v for r, v in plus.items() if v}
        minus = {r: v for r, v in minus.items() if v}
        half = Fraction(1, 2)
        terms.append((half, plus))
        terms.append((-half, minus))
        pos += 1
        neg += 1
        for vec, w in ((plus, half), (minus, -half)):
            for r, vr in vec.items():
                row = A.setdefault(r, {})
                for s, vs in vec.items():
                    val = row.get(s, ZERO) - vr * vs.conj() * w
                    if val:
                        row[s] = val
                    else:
                        row.pop(s, None)
        for r in [r for r in A if not A[r]]:
            del A[r]
        assert i not in A and j not in A, "2x2 pivot failed to eliminate its block"
    return LDLResult(terms, pos, neg, size - pos - neg)


def ldl_exact(P: HermitianForm) -> LDLResult:
    rows, size = _form_rows(P)
    return _ldl_rows(rows, size)


def psd_exact(P: HermitianForm) -> bool:
    """Exact positive-semidefiniteness of the coefficient matrix (no tolerance)."""
    rows, size = _form_rows(P)
    return _ldl_rows(rows, size, psd_only=True).psd_failure is None


def psd_matrix_exact(M: Sequence[Sequence]) -> bool:
    return _ldl_rows(_sparse_rows(M), len(M), psd_only=True).psd_failure is None


def inertia_matrix_exact(M: Sequence[Sequence]) -> tuple[int, int, int]:
    r = _ldl_rows(_sparse_rows(M), len(M))
    return r.positive, r.negative, r.zero


def signature(P: HermitianForm) -> tuple[int, int]:
    """(number of positive, number of negative) eigenvalues, decided exactly."""
    r = ldl_exact(P)
    return r.positive, r.negative


def exact_squares(P: HermitianForm) -> list[tuple[Fraction, HoloSection]]:
    """``P = sum w * |s|^2`` with rational weights and independent exact sections."""
    basis = P.basis
    out = []
    for w, vec in ldl_exact(P).terms:
        out.append((w, HoloSection(P.n, P.d, {basis[i]: c for i, c in vec.items()})))
    return out
