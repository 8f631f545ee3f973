"""Weighted rooted trees, their local equation systems and blowup charts."""

from .blowup import blowup_charts, pi_locus, run_pipeline, singularity_type
from .enumeration import lambda_staged, lambda_trees, oracle_lambda, sim_classes
from .equations import phi_bracket, phi_direct, phi_inductive
from .ops import (
    DualGraph,
    advance,
    collapse,
    collapse_at_support,
    is_collapse_of,
    mon,
    prune,
    reduce_dual_graph,
    terminalize,
)
from .poly import Poly, PolySystem, Var, is_monomial_times_unit_linear, substitute
from .tree import (
    WeightedTree,
    canonical_form,
    classify,
    parse,
    to_bracket,
    unweighted_canonical_form,
)

__version__ = "0.1.0"

__all__ = [
    "WeightedTree",
    "parse",
    "to_bracket",
    "classify",
    "canonical_form",
    "unweighted_canonical_form",
    "prune",
    "terminalize",
    "collapse",
    "advance",
    "is_collapse_of",
    "mon",
    "collapse_at_support",
    "DualGraph",
    "reduce_dual_graph",
    "lambda_trees",
    "lambda_staged",
    "sim_classes",
    "oracle_lambda",
    "Var",
    "Poly",
    "PolySystem",
    "substitute",
    "is_monomial_times_unit_linear",
    "phi_direct",
    "phi_inductive",
    "phi_bracket",
    "pi_locus",
    "blowup_charts",
    "singularity_type",
    "run_pipeline",
]
