"""Figures written next to CLI reports (Agg backend, files only)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["eigenvalue_trace_figure", "ratio_figure", "asymptotics_figure", "chart_profile_figure"]

_STYLE = {
    "figure.figsize": (5.5, 3.6),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
    "savefig.dpi": 150,
    "svg.hashsalt": "hermcert",
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # fixed metadata keeps repeated runs byte-identical
    meta = {".png": {"Software": None}, ".svg": {"Date": None}, ".pdf": {"CreationDate": None}}
    fig.savefig(path, metadata=meta.get(path.suffix.lower()))
    plt.close(fig)
    return path


def eigenvalue_trace_figure(trace: Sequence[tuple[int, float]], path, title: str = "") -> Path:
    """Smallest eigenvalue of the coefficient matrix against the exponent."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ms = [m for m, _ in trace]
        vals = np.array([v for _, v in trace], dtype=float)
        ax.plot(ms, np.sign(vals) * np.log10(1.0 + np.abs(vals)), marker="o", ms=3, lw=1)
        ax.axhline(0.0, color="k", lw=0.6)
        ax.set_xlabel("exponent m")
        ax.set_ylabel("sign(λ) log10(1+|λ|)")
        ax.set_title(title or "minimum eigenvalue")
        return _save(fig, path)


def ratio_figure(ratios: np.ndarray, sup: float | None, path) -> Path:
    """Histogram of sampled modulus ratios on a log scale."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        r = np.asarray(ratios, dtype=float)
        r = r[np.isfinite(r) & (r > 0)]
        if r.size:
            ax.hist(np.log10(r), bins=40, color="0.4")
        if sup is not None and float(sup) > 0:
            ax.axvline(np.log10(float(sup)), color="C3", lw=1, label="sup")
            ax.legend(frameon=False)
        ax.set_xlabel("log10 ratio")
        ax.set_ylabel("samples")
        return _save(fig, path)


def asymptotics_figure(m_values: Sequence[int], rho: np.ndarray, path) -> Path:
    """Normalized kernel diagonal against 1/m, one line per probe point."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        inv = 1.0 / np.asarray(m_values, dtype=float)
        for j in range(rho.shape[1]):
            ax.plot(inv, rho[:, j], marker="o", ms=3, lw=1)
        ax.axhline(1.0, color="k", lw=0.6)
        ax.set_xlabel("1/m")
        ax.set_ylabel("normalized kernel diagonal")
        return _save(fig, path)


def chart_profile_figure(values: np.ndarray, extent: float, path, marks: Sequence[complex] = ()) -> Path:
    """Chart-normalized diagonal on a square grid in the affine coordinate."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        im = ax.imshow(
            np.log10(np.maximum(values, 1e-16)),
            origin="lower",
            extent=(-extent, extent, -extent, extent),
            cmap="viridis",
        )
        fig.colorbar(im, ax=ax, label="log10 normalized value")
        for z in marks:
            ax.plot([z.real], [z.imag], "r+", ms=10)
        ax.set_xlabel("Re t")
        ax.set_ylabel("Im t")
        return _save(fig, path)
