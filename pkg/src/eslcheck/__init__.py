"""Explicit-state model checking of epistemic strategy logic over strategy-space systems."""

from eslcheck.checker import (
    ModelChecker, UnboundVariableError, Verdict, check, check_product, common_closure, sat_set,
)
from eslcheck.envmodel import (
    Environment, ValidationReport, dump_environment, load_environment, observation_classes,
    validate_environment,
)
from eslcheck.formula import (
    check_well_formed, expand_derived, free_variables, parse_formula, unparse,
)
from eslcheck.stratspace import (
    ProductSystem, build_product, count_agent_strategies, enumerate_agent_strategies,
    enumerate_profiles,
)

__version__ = "0.1.0"

__all__ = [
    "Environment", "ModelChecker", "ProductSystem", "UnboundVariableError", "ValidationReport",
    "Verdict", "build_product", "check", "check_product", "check_well_formed", "common_closure",
    "count_agent_strategies", "dump_environment", "enumerate_agent_strategies",
    "enumerate_profiles", "expand_derived", "free_variables", "load_environment",
    "observation_classes", "parse_formula", "sat_set", "unparse", "validate_environment",
]
