"""Quotient-of-squared-norms certificates.

Exact Quillen-exponent search, sampled modulus ratios, checks for the
strong positivity conditions a weight form must satisfy, and the complete
decision procedure for forms on P^1.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .algebra import ONE, ZERO, GaussianRational, as_scalar, basis_enumerate
from .curves import base_divisor_factor, jet_check, local_expansion
from .decomp import DistinguishedBasis, FloatForm, exact_modulus, modulus
from .hermform import HermitianForm, HoloSection, eval_pair, from_squares, norm_power, product
from .polys import exact_point
from .spectra import exact_squares, jacobi_eigh, psd_exact, to_float

__all__ = [
    "CertificateReport",
    "SamplingPlan",
    "RatioEstimate",
    "ConditionResult",
    "SGCSReport",
    "quillen_minimal_exponent",
    "modulus_ratio_estimate",
    "modulus_ratio_at",
    "sgcs_check",
    "qsn_decide_p1",
    "chart_hessian_min_eigenvalue",
]

CERTIFIED = "certified-qsn"
NOT_QSN = "certified-not-qsn"
INCONCLUSIVE = "inconclusive"


@dataclass
class CertificateReport:
    verdict: str
    minimal_exponent: int | None
    search_bound: int
    witness_sections: list[tuple[Fraction, HoloSection]] | None = None
    obstruction: dict | None = None
    diagnostics: dict = field(default_factory=dict)

    def verify(self, P: HermitianForm, R: HermitianForm | None = None) -> bool:
        """Re-check a certified verdict exactly."""
        if self.verdict == CERTIFIED:
            R = R if R is not None else norm_power(P.n, 1)
            m = self.minimal_exponent
            target = _power_product(R, P, m)
            ok = psd_exact(target)
            if self.witness_sections:
                ok = ok and from_squares(self.witness_sections) == target
            return ok
        if self.verdict == NOT_QSN:
            ob = self.obstruction or {}
            pt = ob.get("point")
            if pt is None:
                return False
            val = eval_pair(ob["form"], pt, pt)
            return (val.re == 0) if ob["kind"] == "exact-zero" else (val.re < 0)
        return True


def _power_product(R: HermitianForm, P: HermitianForm, m: int) -> HermitianForm:
    out = P
    for _ in range(m):
        out = product(R, out)
    return out


def _min_eigenvalue(F: HermitianForm) -> float:
    M = to_float(F)
    if F.is_diagonal():
        return float(np.min(M.diagonal().real))
    return float(jacobi_eigh(M).eigenvalues[-1])


def quillen_minimal_exponent(
    P: HermitianForm,
    R: HermitianForm | None = None,
    m_max: int = 10,
    workers: int = 1,
    trace: bool = True,
) -> CertificateReport:
    """Least ``m <= m_max`` with ``R^m * P`` positive semidefinite, decided exactly.

    With ``workers > 1`` consecutive exponents are tested concurrently in
    batches; the smallest passing exponent of the first successful batch is
    returned, so the answer does not depend on completion order.
    """
    if R is None:
        R = norm_power(P.n, 1)
    if R.is_zero():
        raise ValueError("R must be nonzero")
    if R.n != P.n:
        raise ValueError("R and P live on different projective spaces")
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    workers = max(1, int(workers))
    eig_trace: list[tuple[int, float]] = []
    current = P
    m = 0
    found = None
    while m <= m_max and found is None:
        batch = []
        for _ in range(min(workers, m_max - m + 1)):
            batch.append((m, current))
            current = product(R, current)
            m += 1
        if workers > 1 and len(batch) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda item: psd_exact(item[1]), batch))
        else:
            results = [psd_exact(F) for _, F in batch]
        for (mm, F), ok in zip(batch, results):
            if trace:
                eig_trace.append((mm, _min_eigenvalue(F)))
            if ok:
                found = (mm, F)
                break
    diagnostics = {"min_eigenvalue_trace": eig_trace}
    if found is None:
        return CertificateReport(INCONCLUSIVE, None, m_max, diagnostics=diagnostics)
    mm, F = found
    witness = exact_squares(F)
    return CertificateReport(CERTIFIED, mm, m_max, witness_sections=witness, diagnostics=diagnostics)


# --------------------------------------------------------------------------
# modulus ratios


@dataclass
class SamplingPlan:
    """Points at which to probe a form.

    ``n_samples`` random points on the unit sphere (seeded), explicit
    ``points`` (exact coordinates are evaluated exactly), and refinement
    ``families``: pairs ``(curve, params)`` with ``curve(t)`` a point.
    """

    n_samples: int = 2000
    seed: int = 0
    points: list[Sequence] = field(default_factory=list)
    families: list[tuple[Callable[[float], Sequence], Sequence[float]]] = field(default_factory=list)

    def is_empty(self) -> bool:
        return self.n_samples <= 0 and not self.points and not self.families

    def random_points(self, n: int) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        Z = rng.standard_normal((self.n_samples, n + 1)) + 1j * rng.standard_normal((self.n_samples, n + 1))
        return Z / np.linalg.norm(Z, axis=1, keepdims=True)


@dataclass
class RatioEstimate:
    sup_estimate: float | Fraction | None
    arg_max: tuple | None
    n_used: int
    n_filtered: int
    exact: bool = False
    ratios: np.ndarray | None = field(default=None, repr=False)  # floating samples only

    @property
    def degenerate(self) -> bool:
        return self.n_used == 0


def _monomial_matrix(n: int, d: int, pts: np.ndarray) -> np.ndarray:
    exps = np.array(basis_enumerate(n, d).elements, dtype=int).reshape(-1, n + 1)
    out = np.ones((pts.shape[0], exps.shape[0]), dtype=complex)
    for i in range(n + 1):
        out *= pts[:, i : i + 1] ** exps[None, :, i]
    return out


def _diag_values(M: np.ndarray, n: int, d: int, pts: np.ndarray) -> np.ndarray:
    V = _monomial_matrix(n, d, pts)
    return np.einsum("si,ij,sj->s", V, M, V.conj()).real


def modulus_ratio_at(P: HermitianForm, basis: DistinguishedBasis, v: Sequence):
    """``|P|(v) / P(v)``; an exact Fraction when the basis and the point are exact."""
    ev = exact_point(v)
    if basis.exact is not None and ev is not None:
        num = eval_pair(exact_modulus(P, basis), ev, ev).re
        den = eval_pair(P, ev, ev).re
        if den == 0:
            raise ZeroDivisionError("P vanishes at the point")
        return num / den
    mod = modulus(P, basis)
    den = P(v)
    return mod(v) / float(den)


def modulus_ratio_estimate(P: HermitianForm, basis: DistinguishedBasis, samples: SamplingPlan) -> RatioEstimate:
    """Largest ``|P|/P`` over a sampling plan, with its maximizer.

    Points where ``P <= 0`` are filtered out and counted; if nothing is left
    the estimate is reported as degenerate (``sup_estimate`` is ``None``).
    """
    if samples.is_empty():
        raise ValueError("sampling plan is empty")
    best, arg, exact_best = None, None, False
    used = filtered = 0
    sampled = None
    mod: FloatForm = modulus(P, basis)
    Mp = to_float(P)

    def consider(val, pt, is_exact):
        nonlocal best, arg, exact_best
        if best is None or val > best:
            best, arg, exact_best = val, pt, is_exact

    float_pts = []
    if samples.n_samples > 0:
        float_pts.extend(samples.random_points(P.n))
    for fam, params in samples.families:
        float_pts.extend(np.asarray([complex(x) for x in fam(t)]) for t in params)
    for pt in samples.points:
        ev = exact_point(pt)
        if ev is not None and basis.exact is not None:
            den = eval_pair(P, ev, ev).re
            if den <= 0:
                filtered += 1
                continue
            used += 1
            consider(eval_pair(exact_modulus(P, basis), ev, ev).re / den, tuple(pt), True)
        else:
            float_pts.append(np.asarray([complex(x) for x in pt]))
    if float_pts:
        pts = np.vstack(float_pts)
        pv = _diag_values(Mp, P.n, P.d, pts)
        mv = _diag_values(mod.matrix, P.n, P.d, pts)
        ok = pv > 0
        filtered += int(np.count_nonzero(~ok))
        used += int(np.count_nonzero(ok))
        if ok.any():
            ratios = np.where(ok, mv / np.where(ok, pv, 1.0), -np.inf)
            sampled = ratios[ok]
            k = int(np.argmax(ratios))
            consider(float(ratios[k]), tuple(complex(x) for x in pts[k]), False)
    return RatioEstimate(best, arg, used, filtered, exact_best, sampled)


# --------------------------------------------------------------------------
# positivity conditions for weight forms


@dataclass
class ConditionResult:
    passed: bool
    worst: float
    witness: object = None
    note: str = ""


@dataclass
class SGCSReport:
    s1: ConditionResult
    s2: ConditionResult
    s3: ConditionResult

    @property
    def passed(self) -> bool:
        return self.s1.passed and self.s2.passed and self.s3.passed


def _chart_derivatives(R: HermitianForm, chart: int):
    from .blowup import dehomogenize

    r = dehomogenize(R, chart)
    k = r.n_vars
    first = [r.diff(i) for i in range(k)]
    second = [[first[i].diff(j, anti=True) for j in range(k)] for i in range(k)]
    return r, first, second


def chart_hessian_min_eigenvalue(R: HermitianForm, v: Sequence[complex], cache: dict | None = None) -> float:
    """Smallest eigenvalue of the complex Hessian of ``log r`` at ``[v]``.

    The chart is the one where ``|v_i|`` is largest; ``r`` and its first and
    second derivatives are differentiated exactly, then evaluated in floating
    point.
    """
    v = [complex(x) for x in v]
    chart = int(np.argmax(np.abs(v)))
    key = chart
    if cache is None:
        cache = {}
    if key not in cache:
        cache[key] = _chart_derivatives(R, chart)
    r, first, second = cache[key]
    t = [v[j] / v[chart] for j in range(len(v)) if j != chart]
    if not t:
        return float("inf")
    rv = r.evaluate(t).real
    if rv <= 0:
        return float("-inf")
    g = np.array([f.evaluate(t) for f in first])
    H = np.array([[s.evaluate(t) for s in row] for row in second])
    hess = H / rv - np.outer(g, g.conj()) / rv**2
    hess = 0.5 * (hess + hess.conj().T)
    return float(np.linalg.eigvalsh(hess)[0])


def sgcs_check(R: HermitianForm, pair_samples: int = 200, seed: int = 0) -> SGCSReport:
    """Sampled checks of the three positivity conditions on a weight form ``R``.

    S1: ``R > 0`` on sampled points and coordinate points, and the 2x2 matrix
    ``[R(v_i, v_j)]`` is positive semidefinite on sampled pairs.
    S2: its determinant is positive for pairs in distinct fibers and vanishes
    (to 1e-9 relative) for pairs ``w = c v``.
    S3: the complex Hessian of ``log r`` in an affine chart is positive definite.
    """
    if R.is_zero():
        raise ValueError("the zero form is rejected")
    if pair_samples < 1:
        raise ValueError("pair_samples must be at least 1")
    rng = np.random.default_rng(seed)
    n = R.n
    M = to_float(R)
    scale = max(float(np.linalg.norm(M)), 1e-300)

    def sphere(k):
        Z = rng.standard_normal((k, n + 1)) + 1j * rng.standard_normal((k, n + 1))
        return Z / np.linalg.norm(Z, axis=1, keepdims=True)

    special = [np.eye(n + 1)[i] for i in range(n + 1)] + [np.ones(n + 1) / math.sqrt(n + 1)]
    V = np.vstack([np.array(special, dtype=complex), sphere(pair_samples)])
    W = sphere(pair_samples)

    diag_v = _diag_values(M, n, R.d, V)
    k = int(np.argmin(diag_v))
    s1 = ConditionResult(bool(diag_v[k] > 1e-12 * scale), float(diag_v[k] / scale), tuple(V[k]))

    Vm = _monomial_matrix(n, R.d, V[-pair_samples:])
    Wm = _monomial_matrix(n, R.d, W)
    rv = np.einsum("si,ij,sj->s", Vm, M, Vm.conj()).real
    rw = np.einsum("si,ij,sj->s", Wm, M, Wm.conj()).real
    rvw = np.einsum("si,ij,sj->s", Vm, M, Wm.conj())
    det = rv * rw - np.abs(rvw) ** 2
    rel = det / np.maximum(rv * rw, 1e-300)
    j = int(np.argmin(rel))
    if s1.passed and rel[j] < -1e-9:
        s1 = ConditionResult(False, float(rel[j]), (tuple(V[-pair_samples:][j]), tuple(W[j])), "G-curvature not PSD")

    # same-fiber pairs
    lam = rng.standard_normal(pair_samples) + 1j * rng.standard_normal(pair_samples)
    Lm = _monomial_matrix(n, R.d, V[-pair_samples:] * lam[:, None])
    rl = np.einsum("si,ij,sj->s", Lm, M, Lm.conj()).real
    rvl = np.einsum("si,ij,sj->s", Vm, M, Lm.conj())
    det_same = rv * rl - np.abs(rvl) ** 2
    rel_same = np.abs(det_same) / np.maximum(np.abs(rv * rl), 1e-300)
    js = int(np.argmax(rel_same))
    s2_ok = bool(rel[j] > 1e-9) and bool(rel_same[js] <= 1e-9)
    if not rel[j] > 1e-9:
        s2 = ConditionResult(False, float(rel[j]), (tuple(V[-pair_samples:][j]), tuple(W[j])), "distinct fibers")
    else:
        s2 = ConditionResult(s2_ok, float(rel_same[js]), tuple(V[-pair_samples:][js]), "same fiber")

    cache: dict = {}
    worst, wpt = float("inf"), None
    for pt in V:
        val = chart_hessian_min_eigenvalue(R, pt, cache)
        if val < worst:
            worst, wpt = val, tuple(pt)
    s3 = ConditionResult(bool(worst > 1e-12), worst, wpt)
    return SGCSReport(s1, s2, s3)


# --------------------------------------------------------------------------
# the decision procedure on P^1


def _probe_points(height: int = 3) -> list[tuple[GaussianRational, GaussianRational]]:
    vals = {ZERO}
    for q in range(1, height + 1):
        for p in range(-height, height + 1):
            vals.add(as_scalar(Fraction(p, q)))
    gauss = set()
    for a in vals:
        for b in (ZERO, ONE, -ONE):
            gauss.add(a + b * GaussianRational(0, 1))
    pts = [(ONE, ZERO)] + [(t, ONE) for t in sorted(gauss, key=lambda z: (abs(complex(z)), z.re < 0, z.im != 0, z.im < 0, abs(z.re)))]
    return pts


def _chart_arrays(F: HermitianForm):
    """Coefficient arrays for ``F(t, 1)`` and ``F(1, u)`` as functions of ``t``."""
    d = F.d
    A = np.zeros((d + 1, d + 1), dtype=complex)
    B = np.zeros((d + 1, d + 1), dtype=complex)
    for (a, b), c in F.C.items():
        A[a[0], b[0]] += complex(c)
        B[a[1], b[1]] += complex(c)
    return A, B


def _normalized_value(coef: np.ndarray, t: complex) -> float:
    d = coef.shape[0] - 1
    pw = t ** np.arange(d + 1)
    val = (pw @ coef @ pw.conj()).real
    return float(val / (1.0 + abs(t) ** 2) ** d)


def _snap(t: complex, bound: int) -> GaussianRational:
    return GaussianRational(
        Fraction(float(t.real)).limit_denominator(bound), Fraction(float(t.imag)).limit_denominator(bound)
    )


def _obstruction(F: HermitianForm, pt, kind: str) -> dict:
    return {
        "kind": kind,
        "point": pt,
        "form": F,
        "value": eval_pair(F, pt, pt).re,
        "jet": jet_check(local_expansion(F, pt)) if kind == "exact-zero" else None,
    }


def qsn_decide_p1(
    P: HermitianForm,
    m_max: int = 50,
    zero_search: SamplingPlan | None = None,
    workers: int = 1,
) -> CertificateReport:
    """Decide whether a form on P^1 is a quotient of squared norms.

    Divides out the base divisor, then looks for an exact rational zero (or
    negative value) of the free residual, runs the exponent search against
    ``(|z0|^2 + |z1|^2)^m`` and finally a multi-start numeric zero search
    whose candidates count only after exact confirmation.
    """
    if P.n != 1:
        raise ValueError("qsn_decide_p1 handles forms on P^1 only")
    if P.is_zero():
        raise ValueError("the zero form is rejected")
    plan = zero_search if zero_search is not None else SamplingPlan(n_samples=64)
    div = base_divisor_factor(P)
    res = div.residual
    diagnostics: dict = {"base_divisor": div.s_D, "residual": res}

    def certified(m: int, witness) -> CertificateReport:
        lifted = [(w, div.s_D * s) for w, s in witness] if witness else witness
        return CertificateReport(CERTIFIED, m, m_max, witness_sections=lifted, diagnostics=diagnostics)

    # exact probe of small-height points
    for pt in _probe_points():
        val = eval_pair(res, pt, pt).re
        if val <= 0:
            kind = "exact-zero" if val == 0 else "negative-value"
            return CertificateReport(NOT_QSN, None, m_max, obstruction=_obstruction(res, pt, kind), diagnostics=diagnostics)

    report = quillen_minimal_exponent(res, norm_power(1, 1), m_max, workers=workers)
    diagnostics.update(report.diagnostics)
    if report.verdict == CERTIFIED:
        return certified(report.minimal_exponent, report.witness_sections)

    # numeric zero search on the chart-normalized diagonal
    A, B = _chart_arrays(res)
    rng = np.random.default_rng(plan.seed)
    n_starts = 64
    best = (float("inf"), None, None)
    for k in range(n_starts):
        coef, chart = (A, "finite") if k % 2 == 0 else (B, "infinity")
        r = math.sqrt(rng.uniform())
        th = rng.uniform(0, 2 * math.pi)
        x0 = [r * math.cos(th), r * math.sin(th)]
        out = minimize(
            lambda x: _normalized_value(coef, complex(x[0], x[1])),
            x0,
            method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-16, "maxiter": 2000},
        )
        if out.fun < best[0]:
            best = (float(out.fun), complex(out.x[0], out.x[1]), chart)
        for bound in (10, 100, 1000, 10**4):
            s = _snap(complex(out.x[0], out.x[1]), bound)
            pt = (s, ONE) if chart == "finite" else (ONE, s)
            val = eval_pair(res, pt, pt).re
            if val <= 0:
                kind = "exact-zero" if val == 0 else "negative-value"
                return CertificateReport(
                    NOT_QSN, None, m_max, obstruction=_obstruction(res, pt, kind), diagnostics=diagnostics
                )
    diagnostics["zero_search_min"] = best[0]
    diagnostics["zero_search_argmin"] = (best[1], best[2])
    return CertificateReport(INCONCLUSIVE, None, m_max, diagnostics=diagnostics)
