"""Command-line entry point: ``hermcert <command> [flags]``.

Every command prints one JSON report on stdout; errors go to stderr.
Exit codes: 0 certified or pass, 2 certified-not or fail, 3 inconclusive,
1 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .algebra import GaussianRational
from .blowup import blowup_chain, dehomogenize
from .certify import (
    SamplingPlan,
    _chart_arrays,
    _normalized_value,
    modulus_ratio_estimate,
    qsn_decide_p1,
    quillen_minimal_exponent,
    sgcs_check,
)
from .curves import RationalCurve, jpp_scan, pullback
from .decomp import exact_modulus, rational_distinguished_basis, rebase_distinguished
from .hermform import HermitianForm, HoloSection, gcurvature, norm_power, unit_form
from .parser import ParseError, parse, parse_affine, parse_holo, parse_scalar, tokenize
from .report import Report, dumps
from .spectra import inertia_matrix_exact, jacobi_eigh, signature, to_float

__all__ = ["main", "build_parser", "UsageError", "EXIT_CODES"]

EXIT_CODES = {"pass": 0, "certified-qsn": 0, "fail": 2, "certified-not-qsn": 2, "inconclusive": 3}
COMMANDS = ("diagonalize", "certify-quillen", "ratio-estimate", "qsn-p1", "pullback", "jet-scan", "blowup", "bergman", "gcurv")
FIGURE_COMMANDS = ("certify-quillen", "ratio-estimate", "qsn-p1", "bergman")


class UsageError(Exception):
    pass


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _ArgParser(prog="hermcert", description="Certificates for Hermitian algebraic functions on P^n.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--form", help="expression, or a file containing one")
    ap.add_argument("--matrix", help="JSON file of [alpha, beta, re, im] coefficient entries")
    ap.add_argument("--weight", help="weight form R (default: the Fubini-Study form normK(1))")
    ap.add_argument("--mmax", type=int, default=None)
    ap.add_argument("--mlist", default=None, help="comma-separated exponents for bergman")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=None)
    ap.add_argument("--curve", action="append", default=[], help='"h0; h1; ..." in variables x, y')
    ap.add_argument("--chain", help='blowup steps, e.g. "x1=y1*y2,x2=y2 | y1=t1,y2=t1*t2"')
    ap.add_argument("--chart", type=int, default=None, help="coordinate set to 1 before a blowup")
    ap.add_argument("--probe", action="append", default=[], help='point, e.g. "1/100,1/10,1"')
    ap.add_argument("--rebase", type=int, default=None, help="seed for a random change of distinguished basis")
    ap.add_argument("--threshold", type=float, default=None, help="ratio-estimate fails above this value")
    ap.add_argument("--sgcs", action="store_true", help="gcurv: also run the sampled weight-form checks")
    ap.add_argument("--json-out", help="also write the report to this path")
    ap.add_argument("--figure", help="write a figure to this path (png, pdf or svg)")
    ap.add_argument("--tol", type=float, default=None)
    ap.add_argument("--reproducible", action="store_true", help="report timing_ms as 0 for byte-identical output")
    return ap


# --------------------------------------------------------------------------
# input helpers


def _text_arg(value: str) -> str:
    p = Path(value)
    try:
        if p.is_file():
            return p.read_text().strip()
    except OSError:
        pass
    return value


def load_matrix_file(path: str) -> HermitianForm:
    """Entries ``[alpha, beta, "re", "im"]``; missing conjugate entries are filled in."""
    try:
        entries = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read matrix file {path}: {exc}") from exc
    if not isinstance(entries, list) or not entries:
        raise UsageError("matrix file must hold a nonempty list of entries")
    C: dict = {}
    for e in entries:
        if not (isinstance(e, list) and len(e) == 4):
            raise UsageError(f"bad matrix entry {e!r}")
        a, b = tuple(int(x) for x in e[0]), tuple(int(x) for x in e[1])
        c = GaussianRational(Fraction(str(e[2])), Fraction(str(e[3])))
        C[(a, b)] = c
    for (a, b), c in list(C.items()):
        if (b, a) not in C:
            C[(b, a)] = c.conj()
    a0 = next(iter(C))[0]
    return HermitianForm(len(a0) - 1, sum(a0), C)


def _form(args, n: int | None = None, required: bool = True) -> HermitianForm | None:
    if args.matrix:
        return load_matrix_file(args.matrix)
    if args.form:
        return parse(_text_arg(args.form), n).elaborate()
    if required:
        raise UsageError("--form or --matrix is required")
    return None


def _probe_dim(args) -> int | None:
    """Coordinate count implied by ``--probe`` points, used as the form's ``n``."""
    if not args.probe:
        return None
    return len(args.probe[0].split(",")) - 1


def _weight(args, n: int) -> HermitianForm:
    if args.weight:
        R = parse(_text_arg(args.weight), n).elaborate()
        if R.n != n:
            raise UsageError(f"weight lives on P^{R.n}, form on P^{n}")
        return R
    return norm_power(n, 1)


def parse_curve(text: str) -> RationalCurve:
    parts = [p.strip() for p in text.split(";") if p.strip()]
    if not parts:
        raise UsageError("empty --curve")
    return RationalCurve(tuple(parse_holo(p, ("x", "y")) for p in parts))


def parse_point(text: str) -> tuple[GaussianRational, ...]:
    return tuple(parse_scalar(p) for p in text.split(","))


_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def _natural(name: str):
    m = re.match(r"([A-Za-z_]+)(\d*)$", name)
    return (m.group(1), int(m.group(2) or 0)) if m else (name, 0)


def parse_chain(text: str, variables: Sequence[str]) -> tuple[list[list[tuple[int, ...]]], list[list[str]]]:
    """Monomial images per step, and the variable names after each step."""
    steps, names_after = [], []
    current = list(variables)
    for raw in text.split("|"):
        assigns: dict[str, str] = {}
        for item in raw.split(","):
            if not item.strip():
                continue
            if "=" not in item:
                raise UsageError(f"chain item {item.strip()!r} is not an assignment")
            lhs, rhs = (s.strip() for s in item.split("=", 1))
            if lhs not in current:
                raise UsageError(f"chain assigns unknown variable {lhs!r} (current: {', '.join(current)})")
            assigns[lhs] = rhs
        new_names = set(v for v in current if v not in assigns)
        for rhs in assigns.values():
            new_names.update(_NAME.findall(rhs))
        new = sorted(new_names, key=_natural)
        idx = {v: i for i, v in enumerate(new)}
        images = []
        for v in current:
            e = [0] * len(new)
            if v not in assigns:
                e[idx[v]] = 1
            else:
                for factor in assigns[v].split("*"):
                    m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z_0-9]*)\s*(?:\^\s*(\d+))?\s*", factor)
                    if not m:
                        raise UsageError(f"chain image {assigns[v]!r} is not a monomial")
                    e[idx[m.group(1)]] += int(m.group(2) or 1)
            images.append(tuple(e))
        steps.append(images)
        names_after.append(new)
        current = new
    return steps, names_after


def _threads() -> int:
    raw = os.environ.get("HERMCERT_THREADS")
    if raw is None:
        return 1
    try:
        k = int(raw)
    except ValueError:
        raise UsageError("HERMCERT_THREADS must be a positive integer") from None
    if k < 1:
        raise UsageError("HERMCERT_THREADS must be a positive integer")
    return k


def _echo(args) -> dict:
    keys = ("form", "matrix", "weight", "mmax", "mlist", "seed", "samples", "curve", "chain", "chart", "probe", "rebase", "threshold", "sgcs", "tol")
    out = {}
    for k in keys:
        v = getattr(args, k)
        if v not in (None, [], False):
            out[k] = v
    return out


def _squares_data(squares) -> list[dict]:
    return [{"weight": w, "section": s.format()} for w, s in squares]


# --------------------------------------------------------------------------
# commands


def cmd_diagonalize(args, rep: Report):
    P = _form(args)
    basis = rational_distinguished_basis(P)
    rep.signature = basis.signature
    rep.add_witness("squares", _squares_data(basis.exact))
    rep.add_witness("modulus", exact_modulus(P, basis))
    M = to_float(P)
    rep.diagnostics["eigenvalues"] = jacobi_eigh(M).eigenvalues
    rep.diagnostics["degree"] = P.d
    rep.diagnostics["n"] = P.n
    rep.verdict = "pass"


def cmd_certify_quillen(args, rep: Report):
    P = _form(args)
    R = _weight(args, P.n)
    m_max = 10 if args.mmax is None else args.mmax
    res = quillen_minimal_exponent(P, R, m_max, workers=_threads())
    rep.verdict = res.verdict
    rep.minimal_exponent = res.minimal_exponent
    rep.signature = signature(P)
    rep.diagnostics["min_eigenvalue_trace"] = res.diagnostics["min_eigenvalue_trace"]
    rep.diagnostics["search_bound"] = m_max
    if res.witness_sections:
        rep.add_witness("squares", _squares_data(res.witness_sections))
    if args.figure:
        from .plotting import eigenvalue_trace_figure

        rep.diagnostics["figure"] = str(eigenvalue_trace_figure(res.diagnostics["min_eigenvalue_trace"], args.figure))


def cmd_ratio_estimate(args, rep: Report):
    P = _form(args, _probe_dim(args))
    basis = rational_distinguished_basis(P)
    if args.rebase is not None:
        basis = rebase_distinguished(basis, args.rebase)
    plan = SamplingPlan(
        n_samples=2000 if args.samples is None else args.samples,
        seed=args.seed,
        points=[parse_point(p) for p in args.probe],
    )
    for p in plan.points:
        if len(p) != P.n + 1:
            raise UsageError(f"probe {p} needs {P.n + 1} coordinates")
    est = modulus_ratio_estimate(P, basis, plan)
    rep.signature = basis.signature
    rep.diagnostics.update(
        {"sup_ratio": est.sup_estimate, "arg_max": est.arg_max, "n_used": est.n_used, "n_filtered": est.n_filtered, "exact": est.exact}
    )
    if est.degenerate:
        rep.verdict = "inconclusive"
        rep.diagnostics["note"] = "degenerate plan: every sample is a zero of the form"
    elif args.threshold is not None and float(est.sup_estimate) > args.threshold:
        rep.verdict = "fail"
    else:
        rep.verdict = "pass"
    if args.figure:
        from .plotting import ratio_figure

        ratios = est.ratios if est.ratios is not None else np.array([])
        rep.diagnostics["figure"] = str(ratio_figure(ratios, est.sup_estimate, args.figure))


def cmd_qsn_p1(args, rep: Report):
    P = _form(args, None if args.curve else 1)
    if args.curve:
        if len(args.curve) != 1:
            raise UsageError("qsn-p1 takes at most one --curve")
        P = pullback(P, parse_curve(args.curve[0]))
        rep.diagnostics["pulled_back"] = P
    if P.n != 1:
        raise UsageError("qsn-p1 needs a form on P^1 (or a --curve to pull back along)")
    m_max = 50 if args.mmax is None else args.mmax
    plan = SamplingPlan(n_samples=64, seed=args.seed)
    res = qsn_decide_p1(P, m_max, plan, workers=_threads())
    rep.verdict = res.verdict
    rep.minimal_exponent = res.minimal_exponent
    rep.signature = signature(P)
    d = res.diagnostics
    rep.diagnostics["base_divisor"] = d["base_divisor"]
    rep.diagnostics["residual"] = d["residual"]
    rep.diagnostics["min_eigenvalue_trace"] = d.get("min_eigenvalue_trace")
    rep.diagnostics["search_bound"] = m_max
    if "zero_search_min" in d:
        rep.diagnostics["zero_search_min"] = d["zero_search_min"]
    if res.witness_sections:
        rep.add_witness("squares", _squares_data(res.witness_sections))
    if res.obstruction:
        ob = res.obstruction
        data = {"kind": ob["kind"], "point": list(ob["point"]), "value": ob["value"]}
        if ob.get("jet") is not None:
            j = ob["jet"]
            data["jet"] = {"passed": j.passed, "mu": j.mu, "lowest_block": [[jk[0], jk[1], c] for jk, c in j.lowest_block.items()]}
        rep.add_witness("obstruction", data)
    if args.figure:
        from .plotting import chart_profile_figure

        A, _ = _chart_arrays(d["residual"])
        grid = np.linspace(-2.0, 2.0, 161)
        vals = np.array([[_normalized_value(A, complex(x, y)) for x in grid] for y in grid])
        marks = []
        if res.obstruction and res.obstruction["point"][1]:
            a, b = res.obstruction["point"]
            marks.append(complex(a / b))
        rep.diagnostics["figure"] = str(chart_profile_figure(np.abs(vals), 2.0, args.figure, marks))


def cmd_pullback(args, rep: Report):
    P = _form(args)
    if len(args.curve) != 1:
        raise UsageError("pullback needs exactly one --curve")
    Q = pullback(P, parse_curve(args.curve[0]))
    rep.add_witness("form", Q)
    rep.signature = signature(Q) if not Q.is_zero() else (0, 0)
    rep.diagnostics["degree"] = Q.d
    rep.verdict = "pass"


def cmd_jet_scan(args, rep: Report):
    P = _form(args)
    if not args.curve:
        raise UsageError("jet-scan needs at least one --curve")
    curves = [parse_curve(c) for c in args.curve]
    centers = [parse_point(p) for p in args.probe]
    for c in centers:
        if len(c) != 2:
            raise UsageError("jet centers are points [a:b] of P^1")
    res = jpp_scan(P, curves, centers or None)
    rep.verdict = "pass" if res.passed else "fail"
    rep.diagnostics["checked"] = [
        {"curve": i, "center": list(c), "passed": r.passed, "mu": r.mu} for i, c, r in res.checked
    ]
    rep.diagnostics["base_divisors"] = [d.s_D for d in res.divisors]
    if res.failure:
        f = res.failure
        rep.add_witness(
            "jet-failure",
            {
                "curve": f.curve_index,
                "center": list(f.center),
                "mu": f.result.mu,
                "lowest_block": [[jk[0], jk[1], c] for jk, c in f.result.lowest_block.items()],
            },
        )
    else:
        rep.diagnostics["note"] = "no jet failure found on the tested curves and centers"


def _is_homogeneous_input(text: str) -> bool:
    names = [t.text for t in tokenize(text) if t.kind == "name" and t.text not in ("sq", "normK", "norm", "i")]
    return all(re.fullmatch(r"z\d+", n) for n in names)


def cmd_blowup(args, rep: Report):
    if not args.chain:
        raise UsageError("blowup needs --chain")
    if args.matrix or (args.form and _is_homogeneous_input(_text_arg(args.form))):
        P = _form(args)
        chart = P.n if args.chart is None else args.chart
        if not 0 <= chart <= P.n:
            raise UsageError(f"--chart must be in 0..{P.n}")
        q = dehomogenize(P, chart)
        names = [f"x{i + 1}" for i in range(P.n)]
        rep.diagnostics["dehomogenization"] = (
            f"P = |z{chart}|^{2 * P.d} * p(" + ", ".join(f"z{j}/z{chart}" for j in range(P.n + 1) if j != chart) + ")"
        )
    else:
        if not args.form:
            raise UsageError("blowup needs --form")
        first = args.chain.split("|")[0]
        names = sorted({item.split("=")[0].strip() for item in first.split(",") if "=" in item}, key=_natural)
        text = _text_arg(args.form)
        extra = [t.text for t in tokenize(text) if t.kind == "name" and t.text not in ("sq", "normK", "norm", "i")]
        names = sorted(set(names) | set(extra), key=_natural)
        q = parse_affine(text, names)
    steps, names_after = parse_chain(args.chain, names)
    probes = [parse_point(p) for p in args.probe]
    final_names = names_after[-1] if names_after else names
    for p in probes:
        if len(p) != len(final_names):
            raise UsageError(f"probe {p} needs {len(final_names)} coordinates ({', '.join(final_names)})")
    trace = blowup_chain(q, steps, probes)
    rep.diagnostics["start"] = q.format(names)
    for k, (st, nm) in enumerate(zip(trace.steps, names_after)):
        rep.add_witness(
            "blowup-step",
            {
                "step": k + 1,
                "variables": nm,
                "images": [list(e) for e in st.images],
                "gamma": list(st.gamma),
                "total_gamma": list(st.total_gamma),
                "reduced": st.reduced.format(nm),
                "transform": trace.full_transform(k).format(nm),
            },
        )
    rep.diagnostics["probe_values"] = [{"point": list(pt), "value": val} for pt, val in trace.probes]
    rep.diagnostics["residual_zeros"] = [list(pt) for pt in trace.residual_zeros]
    rep.verdict = "pass"


def cmd_bergman(args, rep: Report):
    from .bergman import WeightSpec, diagonal_asymptotics, gram_matrix, reproducing_error

    R = _weight(args, 1)
    P = _form(args, 1, required=False) or unit_form(1)
    if R.n != 1 or P.n != 1:
        raise UsageError("bergman works on P^1")
    try:
        m_list = [int(x) for x in (args.mlist or "8,12,16,20").split(",") if x.strip()]
    except ValueError:
        raise UsageError("--mlist must be comma-separated integers") from None
    n_probe = 20 if args.samples is None else args.samples
    rng = np.random.default_rng(args.seed)
    Z = rng.standard_normal((n_probe, 2)) + 1j * rng.standard_normal((n_probe, 2))
    probes = [tuple(z / np.linalg.norm(z)) for z in Z]
    tab = diagonal_asymptotics(R, P, m_list, probes)
    top = m_list[-1]
    spec = WeightSpec(R, P, top)
    K = gram_matrix(spec)
    N = spec.degree
    coeffs = {(N - j, j): Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10))) for j in range(N + 1)}
    s = HoloSection(1, N, coeffs)
    if s.is_zero():
        s = HoloSection.monomial((N, 0))
    rerr = reproducing_error(K, spec, s, seed=args.seed)
    tol = 1e-7 if args.tol is None else args.tol
    rep.verdict = "pass" if rerr <= tol else "fail"
    rep.diagnostics.update(
        {
            "quadrature_error": max(tab.quadrature_error, K.quadrature_error_estimate),
            "m_values": m_list,
            "rho": tab.rho,
            "b1": tab.b1,
            "b1_mean": tab.b1_mean,
            "C_estimate": tab.C_estimate,
            "reproducing_error": rerr,
            "orthonormality_residual": K.orthonormality_residual(),
            "gram_diagonal": K.gram.diagonal().real,
        }
    )
    if args.figure:
        from .plotting import asymptotics_figure

        rep.diagnostics["figure"] = str(asymptotics_figure(m_list, tab.rho, args.figure))


def cmd_gcurv(args, rep: Report):
    P = _form(args, _probe_dim(args))
    pts = [parse_point(p) for p in args.probe]
    if not pts and not args.sgcs:
        raise UsageError("gcurv needs --probe points (or --sgcs)")
    ok = True
    if pts:
        for p in pts:
            if len(p) != P.n + 1:
                raise UsageError(f"probe {p} needs {P.n + 1} coordinates")
        M = gcurvature(P, pts)
        pos, neg, zero = inertia_matrix_exact(M)
        rep.witnesses.append({"type": "g-curvature", "data": M})
        rep.diagnostics["inertia"] = [pos, neg, zero]
        ok = neg == 0
    if args.sgcs:
        sg = sgcs_check(P, 200 if args.samples is None else args.samples, args.seed)
        rep.diagnostics["sgcs"] = {
            name: {"passed": c.passed, "worst": c.worst, "witness": c.witness, "note": c.note}
            for name, c in (("S1", sg.s1), ("S2", sg.s2), ("S3", sg.s3))
        }
        ok = ok and sg.passed
    rep.verdict = "pass" if ok else "fail"


HANDLERS = {
    "diagonalize": cmd_diagonalize,
    "certify-quillen": cmd_certify_quillen,
    "ratio-estimate": cmd_ratio_estimate,
    "qsn-p1": cmd_qsn_p1,
    "pullback": cmd_pullback,
    "jet-scan": cmd_jet_scan,
    "blowup": cmd_blowup,
    "bergman": cmd_bergman,
    "gcurv": cmd_gcurv,
}


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    """Run a command; returns ``(exit code, JSON text)``. Errors print to stderr."""
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        if args.figure and args.command not in FIGURE_COMMANDS:
            raise UsageError(f"--figure is available for {', '.join(FIGURE_COMMANDS)}")
        rep = Report(args.command, _echo(args), "inconclusive")
        HANDLERS[args.command](args, rep)
    except (UsageError, ParseError) as exc:
        print(f"hermcert: error: {exc}", file=sys.stderr)
        return 1, ""
    except (ValueError, ArithmeticError, OverflowError) as exc:
        print(f"hermcert: error: {exc}", file=sys.stderr)
        return 1, ""
    rep.timing_ms = 0.0 if args.reproducible else round((time.perf_counter() - t0) * 1000.0, 3)
    text = dumps(rep)
    if args.json_out:
        Path(args.json_out).write_text(text)
    return EXIT_CODES[rep.verdict], text


def main(argv: Sequence[str] | None = None) -> int:
    code, text = run(argv)
    if text:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
