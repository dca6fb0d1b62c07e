"""Derived-form expansion, free variables and well-formedness checks."""

from __future__ import annotations

import itertools
import warnings

from eslcheck.envmodel import Environment, ValidationReport
from eslcheck.formula.nodes import (
    AF, AG, AU, AX, CORE_TYPES, EF, EG, EU, EX, And, Base, C, Coalition, D, Everyone,
    ExistsG, FalseF, ForallG, Formula, Implies, Knows, LocEq, LocGroup, Not, Or, Prop,
    Sigma, TrueF, conjunction, sorted_group, subformulas,
)

DERIVED_TYPES = (EF, AF, EG, AG, Knows, Everyone, ForallG, LocGroup, Coalition)


def free_variables(f: Formula) -> frozenset[str]:
    if isinstance(f, (LocEq, LocGroup)):
        return frozenset({f.var})
    if isinstance(f, (ExistsG, ForallG)):
        return free_variables(f.sub) - {f.var}
    out: frozenset[str] = frozenset()
    for c in f.children():
        out |= free_variables(c)
    return out


def all_variables(f: Formula) -> set[str]:
    return {n.var for n in subformulas(f) if isinstance(n, (LocEq, LocGroup, ExistsG, ForallG))}


def is_core(f: Formula) -> bool:
    return all(isinstance(n, CORE_TYPES) for n in subformulas(f))


class _Expander:
    def __init__(self, f: Formula):
        self.used = all_variables(f)
        self.counter = itertools.count()

    def fresh(self) -> str:
        while True:
            name = f"_x{next(self.counter)}"
            if name not in self.used:
                self.used.add(name)
                return name

    def everyone(self, group, sub: Formula) -> Formula:
        if not group:
            warnings.warn("E{} over the empty group is vacuously true", stacklevel=4)
        return conjunction([D(frozenset({w}), sub) for w in sorted_group(group)])

    def run(self, f: Formula) -> Formula:
        x = self.run
        if isinstance(f, (Prop, TrueF, FalseF, LocEq)):
            return f
        if isinstance(f, Not):
            return Not(x(f.sub))
        if isinstance(f, (And, Or, Implies, AU, EU)):
            return type(f)(x(f.left), x(f.right))
        if isinstance(f, (AX, EX)):
            return type(f)(x(f.sub))
        if isinstance(f, (D, C)):
            return type(f)(f.group, x(f.sub))
        if isinstance(f, ExistsG):
            return ExistsG(f.var, x(f.sub))
        if isinstance(f, EF):
            return EU(TrueF(), x(f.sub))
        if isinstance(f, AF):
            return AU(TrueF(), x(f.sub))
        if isinstance(f, AG):
            return Not(EU(TrueF(), Not(x(f.sub))))
        if isinstance(f, EG):
            return Not(AU(TrueF(), Not(x(f.sub))))
        if isinstance(f, Knows):
            return D(frozenset({f.who}), x(f.sub))
        if isinstance(f, Everyone):
            return self.everyone(f.group, x(f.sub))
        if isinstance(f, ForallG):
            return Not(ExistsG(f.var, Not(x(f.sub))))
        if isinstance(f, LocGroup):
            return conjunction([LocEq(w, f.var) for w in sorted_group(f.group)])
        if isinstance(f, Coalition):
            var = self.fresh()
            guard = conjunction([LocEq(Sigma(h), var) for h in f.coalition])
            body = Implies(guard, x(f.sub))
            if f.kind == "C":
                return ExistsG(var, C(f.group, body))
            if f.kind == "D":
                return ExistsG(var, D(f.group, body))
            return ExistsG(var, self.everyone(f.group, body))
        raise TypeError(f"not a formula node: {f!r}")


def expand_derived(f: Formula) -> Formula:
    """Rewrite every derived form into core nodes.

    Coalition macros bind a fresh variable (``_x0``, ``_x1``, ...) chosen to
    avoid every variable already occurring in ``f``.
    """
    return _Expander(f).run(f)


def check_well_formed(f: Formula, env: Environment) -> ValidationReport:
    report = ValidationReport()
    agents = set(env.agents)
    seen: set = set()

    def agent(name: str) -> None:
        if name not in agents and ("agent", name) not in seen:
            seen.add(("agent", name))
            report.add("agent", f"unknown agent {name}", name)

    for n in subformulas(f):
        if not isinstance(n, CORE_TYPES + DERIVED_TYPES):
            report.add("fragment", f"node {type(n).__name__} is outside the CTL-based fragment", n)
            continue
        if isinstance(n, Prop) and n.name not in env.propositions and ("prop", n.name) not in seen:
            seen.add(("prop", n.name))
            report.add("proposition", f"undeclared proposition {n.name}", n.name)
        whos = []
        if isinstance(n, (LocEq, Knows)):
            whos = [n.who]
        elif isinstance(n, (D, C, Everyone, LocGroup)):
            whos = list(n.group)
        elif isinstance(n, Coalition):
            whos = list(n.group) + [Base(h) for h in n.coalition]
            if n.kind not in ("C", "D", "E"):
                report.add("fragment", f"unknown coalition kind {n.kind}", n)
        for w in whos:
            if isinstance(w, (Base, Sigma)):
                agent(w.name)
    return report
