"""Transference of multilinear Fourier multipliers between the line and the torus.

The subpackages follow the objects of the theory: exponent tuples and grids
(:mod:`spaces`), trigonometric polynomials and sampled functions
(:mod:`functions`), periodic weights (:mod:`weights`), quasi-norms
(:mod:`norms`), symbols (:mod:`symbols`), operators (:mod:`operators`) and
norm estimation (:mod:`estimation`). :mod:`harness` and :mod:`cli` drive
reproducible experiments.
"""

from .errors import AliasingError, DomainError, HypothesisViolation, InvariantViolation
from .estimation import (NormEstimate, SearchConfig, deperiodization_check, estimate_norm,
                         mz_test, transference_report)
from .functions import GridFunction, TrigPolynomial, fourier_coefficients, synthesize, translate
from .norms import kolmogorov_norm, lp_norm, weak_norm
from .operators import apply_kernel, apply_line, apply_periodic, maximal, mollification_domination
from .spaces import (ExponentTuple, FrequencyBox, LineGrid, TorusGrid, kolmogorov_constant,
                     make_exponents, weak_constant)
from .symbols import (LatticeSymbol, SymbolFamily, SymbolSpec, classify, cm_check, hs_norm,
                      normalized_check, restrict_lattice)
from .weights import WeightSpec, a_vec_p_check, ap_constant, power_weight, step_weight, unit_weight

__version__ = "0.1.0"

__all__ = [
    "AliasingError", "DomainError", "HypothesisViolation", "InvariantViolation",
    "NormEstimate", "SearchConfig", "deperiodization_check", "estimate_norm", "mz_test",
    "transference_report", "GridFunction", "TrigPolynomial", "fourier_coefficients", "synthesize",
    "translate", "kolmogorov_norm", "lp_norm", "weak_norm", "apply_kernel", "apply_line",
    "apply_periodic", "maximal", "mollification_domination", "ExponentTuple", "FrequencyBox",
    "LineGrid", "TorusGrid", "kolmogorov_constant", "make_exponents", "weak_constant",
    "LatticeSymbol", "SymbolFamily", "SymbolSpec", "classify", "cm_check", "hs_norm",
    "normalized_check", "restrict_lattice", "WeightSpec", "a_vec_p_check", "ap_constant",
    "power_weight", "step_weight", "unit_weight",
]
