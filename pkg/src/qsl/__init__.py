"""Numerical laboratory for exponential-sum zero sets on a horizontal strip
and the pure-point spectra of their counting measures."""

__version__ = "0.1.0"

from . import errors
from .apcheck import (AlmostPeriodReport, almost_periods, ap_function_periods,
                      density, diophantine_displacement_bound,
                      translation_bound)
from .cfourier import (GrowthDiagnostics, TestFunction, decay_check, growth,
                       hat_c, hat_c_many, pair_atoms, pair_zeros)
from .presets import PRESETS, preset
from .reconstruct import (ReconstructionResult, canonical_product, from_atoms,
                          log_series, verify_roundtrip)
from .spectral import (AtomMeasure, atoms, check_conditions, choose_line,
                       normalize, verify_der, verify_duality)
from .strip_zeros import (Rect, Strip, ZeroSet, count_zeros, enumerate_zeros,
                          find_zeros, lindelof_diag, separation, strip_bound)
from .wiener import ExpSum, add, derivative, exp, log1p, mul, shift_line

__all__ = [
    "__version__", "errors",
    "ExpSum", "add", "mul", "shift_line", "derivative", "log1p", "exp",
    "Rect", "Strip", "ZeroSet", "strip_bound", "count_zeros", "find_zeros",
    "enumerate_zeros", "separation", "lindelof_diag",
    "TestFunction", "hat_c", "hat_c_many", "decay_check", "pair_zeros",
    "pair_atoms", "growth", "GrowthDiagnostics",
    "AtomMeasure", "normalize", "choose_line", "atoms", "verify_der",
    "verify_duality", "check_conditions",
    "ReconstructionResult", "log_series", "from_atoms", "canonical_product",
    "verify_roundtrip",
    "AlmostPeriodReport", "translation_bound", "almost_periods",
    "ap_function_periods", "density", "diophantine_displacement_bound",
    "PRESETS", "preset",
]
