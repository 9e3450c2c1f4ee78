"""Weighted Bergman kernels for sections of O(N) on P^1.

The inner product of two sections is ``int f * conj(g) * w`` over P^1, where
the weight is ``1 / (r^m p)`` times the volume form of ``(i/2pi) ddbar log r``.
Both unit disks ``|z0/z1| <= 1`` and ``|z1/z0| <= 1`` are integrated; together
they cover P^1. Radial integrals use Gauss-Legendre nodes, angular integrals
a uniform grid whose FFT gives every rotational mode at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .algebra import basis_enumerate
from .blowup import dehomogenize
from .certify import _probe_points, sgcs_check
from .hermform import HermitianForm, HoloSection, eval_pair, norm_power, product, unit_form
from .polys import MixedHermPoly
from .spectra import jacobi_eigh, to_float

__all__ = [
    "QuadratureError",
    "WeightSpec",
    "QuadraturePlan",
    "KernelData",
    "AsymptoticsTable",
    "OnsetTable",
    "gram_matrix",
    "kernel_eval",
    "reproducing_error",
    "diagonal_asymptotics",
    "coefficient_matrix_onset",
]


class QuadratureError(RuntimeError):
    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved relative change {achieved:.3e})")
        self.achieved = achieved


@lru_cache(maxsize=64)
def _validate(R: HermitianForm, P: HermitianForm) -> None:
    rep = sgcs_check(R, pair_samples=100, seed=0)
    if not rep.passed:
        failed = [name for name, c in (("S1", rep.s1), ("S2", rep.s2), ("S3", rep.s3)) if not c.passed]
        raise ValueError(f"weight form R fails the positivity conditions {failed}")
    rng = np.random.default_rng(1)
    Z = rng.standard_normal((1000, 2)) + 1j * rng.standard_normal((1000, 2))
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    vals = np.array([P(tuple(z)) for z in Z], dtype=float) if P.d else np.full(1000, float(P((1, 0))))
    if not np.all(vals > 0):
        raise ValueError("weight form P is not strictly positive on the probe")
    # random points miss measure-zero zero sets such as circles; probe small rational points exactly
    for pt in _probe_points():
        if eval_pair(P, pt, pt).re <= 0:
            raise ValueError(f"weight form P vanishes or is negative at {[str(c) for c in pt]}")


@dataclass(frozen=True)
class WeightSpec:
    """Weight data ``(R, P, m)`` on P^1; sections have degree ``m * deg R + deg P``."""

    R: HermitianForm
    P: HermitianForm
    m: int

    def __post_init__(self):
        if self.R.n != 1 or self.P.n != 1:
            raise ValueError("weights are supported on P^1 only")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.R.d < 1:
            raise ValueError("R must have positive degree")

    @property
    def degree(self) -> int:
        return self.m * self.R.d + self.P.d

    def validate(self) -> None:
        _validate(self.R, self.P)


@dataclass(frozen=True)
class QuadraturePlan:
    rtol: float = 1e-10
    n_radial: int = 48
    n_angular: int | None = None  # default: a power of two above 4N + 16
    max_levels: int = 6


def _eval_grid(poly: MixedHermPoly, T: np.ndarray) -> np.ndarray:
    out = np.zeros(T.shape, dtype=complex)
    Tc = T.conj()
    for (a, b), c in poly.coeffs.items():
        out += complex(c) * T ** a[0] * Tc ** b[0]
    return out


@dataclass(frozen=True)
class _Chart:
    r: MixedHermPoly
    r_t: MixedHermPoly
    r_tt: MixedHermPoly
    p: MixedHermPoly

    @classmethod
    def build(cls, R: HermitianForm, P: HermitianForm, chart: int) -> "_Chart":
        r = dehomogenize(R, chart)
        rt = r.diff(0)
        return cls(r, rt, rt.diff(0, anti=True), dehomogenize(P, chart))

    def weight(self, T: np.ndarray, m: int) -> np.ndarray:
        r = _eval_grid(self.r, T).real
        rt = _eval_grid(self.r_t, T)
        rtt = _eval_grid(self.r_tt, T).real
        density = (r * rtt - np.abs(rt) ** 2) / (math.pi * r * r)
        return density / (r**m * _eval_grid(self.p, T).real)


def _charts(spec: WeightSpec) -> tuple[_Chart, _Chart]:
    # chart "A": z1 = 1, coordinate z0; chart "B": z0 = 1, coordinate z1
    return _Chart.build(spec.R, spec.P, 1), _Chart.build(spec.R, spec.P, 0)


def _gram_at(spec: WeightSpec, nr: int, na: int) -> np.ndarray:
    N = spec.degree
    expo = np.array(basis_enumerate(1, N).elements).reshape(-1, 2)
    x, wx = np.polynomial.legendre.leggauss(nr)
    rho = 0.5 * (x + 1.0)
    wr = 0.5 * wx
    theta = 2.0 * math.pi * np.arange(na) / na
    T = rho[:, None] * np.exp(1j * theta)[None, :]
    G = np.zeros((len(expo), len(expo)), dtype=complex)
    for chart, col in zip(_charts(spec), (0, 1)):
        W = chart.weight(T, spec.m)
        modes = 2.0 * math.pi * np.fft.ifft(W, axis=1)  # modes[:, q] = int w e^{i q theta} dtheta
        k = expo[:, col]
        for a in range(len(k)):
            for b in range(len(k)):
                q = (k[b] - k[a]) % na
                terms = wr * rho ** (k[a] + k[b] + 1) * modes[:, q]
                G[a, b] += complex(math.fsum(terms.real), math.fsum(terms.imag))
    return G


@dataclass
class KernelData:
    spec: WeightSpec
    gram: np.ndarray
    orthonormal_coeffs: np.ndarray
    quadrature_error_estimate: float
    resolution: tuple[int, int]
    inverse_gram: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return self.spec.m

    @property
    def basis_dim(self) -> int:
        return self.gram.shape[0]

    def orthonormality_residual(self) -> float:
        S = self.orthonormal_coeffs
        return float(np.linalg.norm(S.conj().T @ self.gram @ S - np.eye(self.basis_dim)))


def gram_matrix(spec: WeightSpec, quad: QuadraturePlan | None = None, validate: bool = True) -> KernelData:
    """Gram matrix ``G[a, b] = int conj(e_a) e_b w`` of the monomials, with ``S^* G S = I``."""
    quad = quad or QuadraturePlan()
    if validate:
        spec.validate()
    N = spec.degree
    nr = quad.n_radial
    na = quad.n_angular or 1 << max(6, math.ceil(math.log2(4 * N + 16)))
    prev = _gram_at(spec, nr, na)
    change = float("inf")
    for _ in range(quad.max_levels):
        nr, na = 2 * nr, 2 * na
        G = _gram_at(spec, nr, na)
        change = float(np.max(np.abs(G - prev)) / np.max(np.abs(G)))
        prev = G
        if change <= quad.rtol:
            break
    else:
        raise QuadratureError("Gram quadrature did not reach the requested tolerance", change)
    G = 0.5 * (prev + prev.conj().T)
    if spec.R.is_diagonal() and spec.P.is_diagonal():
        off = np.max(np.abs(G - np.diag(np.diag(G))))
        if off > 1e-10 * np.max(np.abs(G)):
            raise QuadratureError("off-diagonal Gram entries of a diagonal weight are not negligible", off)
    L = np.linalg.cholesky(G)
    Linv = solve_triangular(L, np.eye(len(G)), lower=True)
    S = Linv.conj().T
    data = KernelData(spec, G, S, change, (nr, na), S @ S.conj().T)
    res = data.orthonormality_residual()
    if res > 1e-8:
        raise QuadratureError("orthonormal basis failed its residual check", res)
    return data


def _point(x) -> tuple[complex, complex]:
    if isinstance(x, (tuple, list, np.ndarray)):
        if len(x) != 2:
            raise ValueError("points on P^1 have two coordinates")
        return complex(x[0]), complex(x[1])
    return complex(x), 1.0 + 0j  # affine coordinate z0/z1


def _monomials(N: int, x) -> np.ndarray:
    x0, x1 = _point(x)
    return np.array([x0**a * x1**b for a, b in basis_enumerate(1, N)], dtype=complex)


def kernel_eval(K: KernelData, x, y) -> complex:
    """``sum_a s_a(x) conj(s_a(y))`` over the orthonormal basis."""
    N = K.spec.degree
    ex, ey = _monomials(N, x), _monomials(N, y)
    return complex(ex @ K.inverse_gram @ ey.conj())


def _weight_value(spec: WeightSpec, x) -> float:
    v = _point(x)
    return float(spec.R(v)) ** spec.m * float(spec.P(v))


def reproducing_error(K: KernelData, spec: WeightSpec, s: HoloSection, probes: Sequence | None = None, seed: int = 0) -> float:
    """Largest ``|(proj s)(x) - s(x)| / ||s||`` over unit-sphere probes.

    The projection integral uses a Gram matrix from a finer, independent
    quadrature grid than the one that built the kernel.
    """
    if s.n != 1 or s.d != spec.degree:
        raise ValueError(f"section must have degree {spec.degree} on P^1, got {s.d}")
    c = np.array([complex(x) for x in s.vector()], dtype=complex)
    nr, na = K.resolution
    G_fine = _gram_at(spec, 2 * nr + 1, 2 * na)
    b = G_fine @ c
    norm = math.sqrt(max((c.conj() @ K.gram @ c).real, 1e-300))
    if probes is None:
        rng = np.random.default_rng(seed)
        Z = rng.standard_normal((20, 2)) + 1j * rng.standard_normal((20, 2))
        probes = [tuple(z / np.linalg.norm(z)) for z in Z]
    worst = 0.0
    for x in probes:
        e = _monomials(spec.degree, x)
        proj = e @ K.inverse_gram @ b
        worst = max(worst, abs(proj - e @ c) / norm)
    return float(worst)


@dataclass
class AsymptoticsTable:
    m_values: list[int]
    probes: list
    rho: np.ndarray  # rho[i, j] at m_values[i], probes[j]
    b1: np.ndarray  # fitted per probe
    C_estimate: float
    quadrature_error: float

    @property
    def b1_mean(self) -> float:
        return float(np.mean(self.b1))


def diagonal_asymptotics(
    R: HermitianForm, P: HermitianForm, m_list: Sequence[int], probes: Sequence, quad: QuadraturePlan | None = None
) -> AsymptoticsTable:
    """``rho_m(x) = K_m(x, x) / (R(x)^m P(x) m)`` and a least-squares fit of ``rho_m = 1 - b1/m``."""
    m_list = list(m_list)
    if len(m_list) < 2 or any(b <= a for a, b in zip(m_list, m_list[1:])):
        raise ValueError("m_list must be increasing with at least two values")
    rho = np.zeros((len(m_list), len(probes)))
    qerr = 0.0
    for i, m in enumerate(m_list):
        spec = WeightSpec(R, P, m)
        K = gram_matrix(spec, quad)
        qerr = max(qerr, K.quadrature_error_estimate)
        for j, x in enumerate(probes):
            rho[i, j] = kernel_eval(K, x, x).real / _weight_value(spec, x) / m
    inv_m = 1.0 / np.array(m_list, dtype=float)
    A = -inv_m[:, None]
    b1 = np.linalg.lstsq(A, rho - 1.0, rcond=None)[0][0]
    C = float(np.max(np.abs(rho - 1.0) * np.array(m_list)[:, None]))
    return AsymptoticsTable(m_list, list(probes), rho, b1, C, qerr)


@dataclass
class OnsetTable:
    rows: list[dict]
    onset: int | None


def coefficient_matrix_onset(
    R: HermitianForm, P: HermitianForm, m_values: Sequence[int], quad: QuadraturePlan | None = None
) -> OnsetTable:
    """Diagonal of the matrix of ``R^m * P`` in the orthonormal basis, for each ``m``.

    The orthonormal basis comes from the weight ``R^m (|z0|^2 + |z1|^2)^deg P``,
    so its sections have the same degree as ``R^m * P``. ``onset`` is the first
    ``m`` whose diagonal is entrywise nonnegative (to 1e-9 relative).
    """
    if P.n != 1 or R.n != 1:
        raise ValueError("forms must live on P^1")
    weight_p = norm_power(1, P.d) if P.d else unit_form(1)
    rows, onset = [], None
    target = P
    last_m = 0
    for m in m_values:
        for _ in range(m - last_m):
            target = product(R, target)
        last_m = m
        K = gram_matrix(WeightSpec(R, weight_p, m))
        GS = K.gram @ K.orthonormal_coeffs
        Mtx = GS.conj().T @ to_float(target) @ GS
        diag = Mtx.diagonal().real
        scale = float(np.max(np.abs(diag)))
        min_diag = float(np.min(diag))
        min_eig = float(jacobi_eigh(0.5 * (Mtx + Mtx.conj().T)).eigenvalues[-1])
        ok = min_diag >= -1e-9 * scale
        rows.append({"m": m, "min_diagonal": min_diag, "max_abs_diagonal": scale, "min_eigenvalue": min_eig, "nonnegative": ok})
        if ok and onset is None:
            onset = m
    return OnsetTable(rows, onset)
