"""Permutation-invariant multi-qubit codes under amplitude damping, in exact arithmetic."""

from permcodes.code_builder import CodeParameters, DickeVector, gram_matrix, logical_state, overlap, validate
from permcodes.exact_poly import GammaPolynomial
from permcodes.fidelity import fidelity_lower_bound, taylor_comparison

__all__ = [
    "CodeParameters",
    "DickeVector",
    "GammaPolynomial",
    "fidelity_lower_bound",
    "gram_matrix",
    "logical_state",
    "overlap",
    "taylor_comparison",
    "validate",
]
