"""JSON reports: value serialization and the versioned report layout."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import numpy as np

from .algebra import GaussianRational, format_rational
from .hermform import HermitianForm, HoloSection
from .polys import MixedHermPoly

__all__ = ["REPORT_VERSION", "Report", "to_jsonable", "load_schema", "dumps"]

REPORT_VERSION = "hermcert-report/1"


def _float(x: float):
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def to_jsonable(obj):
    """Rationals become ``"num/den"`` strings, floats stay shortest round-trip."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, GaussianRational):
        if not obj.im:
            return format_rational(obj.re)
        return {"re": format_rational(obj.re), "im": format_rational(obj.im)}
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return {"re": _float(z.real), "im": _float(z.imag)}
    if isinstance(obj, HermitianForm):
        from .parser import to_expression

        return to_expression(obj)
    if isinstance(obj, HoloSection):
        return obj.format()
    if isinstance(obj, MixedHermPoly):
        return obj.format()
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass
class Report:
    command: str
    input_echo: dict
    verdict: str
    minimal_exponent: int | None = None
    signature: tuple[int, int] | None = None
    witnesses: list[dict] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    timing_ms: float = 0.0

    def add_witness(self, kind: str, data) -> None:
        self.witnesses.append({"type": kind, "data": data})

    def as_dict(self) -> dict:
        diag = {"sup_ratio": None, "min_eigenvalue_trace": None, "quadrature_error": None}
        diag.update(self.diagnostics)
        return to_jsonable(
            {
                "version": REPORT_VERSION,
                "command": self.command,
                "input_echo": self.input_echo,
                "verdict": self.verdict,
                "minimal_exponent": self.minimal_exponent,
                "signature": list(self.signature) if self.signature is not None else None,
                "witnesses": self.witnesses,
                "diagnostics": diag,
                "timing_ms": self.timing_ms,
            }
        )


def dumps(report: Report) -> str:
    return json.dumps(report.as_dict(), indent=2, ensure_ascii=False) + "\n"


def load_schema() -> dict:
    return json.loads(resources.files("hermcert").joinpath("report_schema.json").read_text())
