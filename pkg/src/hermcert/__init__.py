"""Exact and numerical tools for Hermitian algebraic functions on projective space."""

from .algebra import GaussianRational, MonomialBasis, basis_enumerate, multiindex_combine
from .hermform import (
    HermitianForm,
    HoloSection,
    eval_pair,
    from_squares,
    gcurvature,
    norm_power,
    product,
    support_space_basis,
    unit_form,
)
from .polys import MixedHermPoly
from .spectra import jacobi_eigh, psd_exact, signature

__version__ = "0.1.0"

__all__ = [
    "GaussianRational",
    "MonomialBasis",
    "basis_enumerate",
    "multiindex_combine",
    "HermitianForm",
    "HoloSection",
    "MixedHermPoly",
    "eval_pair",
    "from_squares",
    "gcurvature",
    "norm_power",
    "product",
    "support_space_basis",
    "unit_form",
    "jacobi_eigh",
    "psd_exact",
    "signature",
]
