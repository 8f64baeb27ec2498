"""Exact local equations for the closure of a unipotent local system.

Given commuting unipotent integer monodromy ``T_1..T_n`` on ``Z^d`` and a
fiber vector ``h``, compute the stabilizer lattice, adapted coordinates,
inverse polynomials, the polynomial and twisted binomial equations of the
sheet closure, its limit set over the origin and verification arcs.
"""

__version__ = "0.1.0"

from .exact import LatticeBasis, Matrix, hnf, kernel_lattice, positive_lattice_point, snf, unimodular_completion
from .monodromy import (
    MonodromyModel,
    NumericPoint,
    exp_action_poly,
    exp_nilpotent,
    log_unipotent,
    model_from_json,
    model_from_logs,
    orbit_equal,
    sample_sheet,
    validate_model,
)
from .poly import Binomial, MonomialOrder, MultiPoly, buchberger, normal_form, substitute, toric_ideal_binomials
from .sheet import (
    LimitSet,
    SheetPresentation,
    TwistedBinomial,
    adapted_coordinates,
    arc_point,
    boundary_contact,
    components_through_point,
    equations_A,
    equations_B,
    inverse_polynomials,
    limit_set,
    present_sheet,
    stabilizer_lattice,
    verify_point,
    verify_sheet,
)

__all__ = [
    "adapted_coordinates",
    "arc_point",
    "Binomial",
    "boundary_contact",
    "buchberger",
    "components_through_point",
    "equations_A",
    "equations_B",
    "exp_action_poly",
    "exp_nilpotent",
    "hnf",
    "inverse_polynomials",
    "kernel_lattice",
    "LatticeBasis",
    "limit_set",
    "LimitSet",
    "log_unipotent",
    "Matrix",
    "model_from_json",
    "model_from_logs",
    "MonodromyModel",
    "MonomialOrder",
    "MultiPoly",
    "normal_form",
    "NumericPoint",
    "orbit_equal",
    "positive_lattice_point",
    "present_sheet",
    "sample_sheet",
    "SheetPresentation",
    "snf",
    "stabilizer_lattice",
    "substitute",
    "toric_ideal_binomials",
    "TwistedBinomial",
    "unimodular_completion",
    "validate_model",
    "verify_point",
    "verify_sheet",
]
