from eslcheck.formula.nodes import (
    AF, AG, AU, AX, CORE_TYPES, EF, EG, EU, EX, And, Base, C, Coalition, D, Env, Everyone,
    ExistsG, ExtendedAgent, FalseF, ForallG, Formula, Implies, Knows, LocEq, LocGroup,
    Not, Or, Prop, Sigma, TrueF, conjunction, sorted_group, subformulas,
)
from eslcheck.formula.parser import (
    FormulaSyntaxError, parse_formula, parse_formula_file, tokenize, unparse,
)
from eslcheck.formula.transform import (
    check_well_formed, expand_derived, free_variables, is_core,
)

__all__ = [
    "AF", "AG", "AU", "AX", "CORE_TYPES", "EF", "EG", "EU", "EX", "And", "Base", "C",
    "Coalition", "D", "Env", "Everyone", "ExistsG", "ExtendedAgent", "FalseF", "ForallG",
    "Formula", "FormulaSyntaxError", "Implies", "Knows", "LocEq", "LocGroup", "Not", "Or",
    "Prop", "Sigma", "TrueF", "check_well_formed", "conjunction", "expand_derived",
    "free_variables", "is_core", "parse_formula", "parse_formula_file", "sorted_group",
    "subformulas", "tokenize", "unparse",
]
