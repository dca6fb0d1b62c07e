"""Reference implementations and random instance generators for validating the checker."""

from eslcheck.oracle.differential import (
    CaseResult, CoalitionResult, DifferentialReport, coalition_cross_check, compare,
    draw_instance, run_differential, vertex_signature,
)
from eslcheck.oracle.generators import FormulaBounds, GenBounds, random_environment, random_formula
from eslcheck.oracle.naive import (
    NaiveSystem, NaiveVerdict, OracleSizeError, build_naive_system, gfp_relativized_ck,
    in_class, naive_check, naive_sat, prefix_eval, relativized_coalition_ck, run_prefixes,
)

__all__ = [
    "CaseResult", "CoalitionResult", "DifferentialReport", "FormulaBounds", "GenBounds",
    "NaiveSystem", "NaiveVerdict", "OracleSizeError", "build_naive_system",
    "coalition_cross_check", "compare", "draw_instance", "gfp_relativized_ck", "in_class",
    "naive_check", "naive_sat", "prefix_eval", "random_environment", "random_formula",
    "relativized_coalition_ck", "run_differential", "run_prefixes", "vertex_signature",
]
