"""Certified computations on presented compact metric spaces.

Exact values are returned as strings "p/q"; the helpers here turn them into
fractions.Fraction.
"""

from fractions import Fraction

from ._core import (
    ContractViolation,
    EmptyResult,
    ParseError,
    SearchExhausted,
    canonical_expr,
    covering_check,
    discrete_frechet,
    eval_expr,
    eval_from_graph,
    frechet,
    hausdorff,
    hull,
    isoperimetric,
    maximize,
    surface,
    volume,
    worst_rounding_error,
)


def bounds(result):
    """(lo, hi) of an enclosure dict as Fractions."""
    return Fraction(result["lo"]), Fraction(result["hi"])


__all__ = [
    "ContractViolation",
    "EmptyResult",
    "ParseError",
    "SearchExhausted",
    "bounds",
    "canonical_expr",
    "covering_check",
    "discrete_frechet",
    "eval_expr",
    "eval_from_graph",
    "frechet",
    "hausdorff",
    "hull",
    "isoperimetric",
    "maximize",
    "surface",
    "volume",
    "worst_rounding_error",
]
