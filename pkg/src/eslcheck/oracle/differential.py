"""Differential comparison of the checker against the brute-force oracle."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

import numpy as np

from eslcheck.checker import ModelChecker, check_product
from eslcheck.envmodel import Environment, dump_environment
from eslcheck.formula import Base, Coalition, Formula, expand_derived, unparse
from eslcheck.oracle.generators import FormulaBounds, GenBounds, random_environment, random_formula
from eslcheck.oracle.naive import (
    build_naive_system, naive_check, relativized_coalition_ck,
)
from eslcheck.stratspace import CLASSES, ProductSystem, build_product, count_profiles, normalize_class

# Keeps the quadratic-per-operator oracle fast enough for suites of hundreds.
DEFAULT_POINT_BUDGET = 400


def vertex_signature(ps: ProductSystem, v: int) -> tuple:
    """``(state, profile)`` of a checker vertex in the oracle's name-based form."""
    prof = ps.profile(v)
    return ps.env.states[ps.vertex_state[v]], tuple(s.choice for s in prof.strategies)


def sat_signatures(ps: ProductSystem, sat: np.ndarray) -> frozenset:
    return frozenset(vertex_signature(ps, int(v)) for v in np.flatnonzero(sat))


@dataclass
class CaseResult:
    index: int
    cls: str
    env: Environment
    formula: Formula
    checker_holds: bool
    oracle_holds: bool
    checker_counterexample: tuple | None
    oracle_counterexample: tuple | None

    @property
    def agree(self) -> bool:
        return (
            self.checker_holds == self.oracle_holds
            and self.checker_counterexample == self.oracle_counterexample
        )


@dataclass
class DifferentialReport:
    cases: list[CaseResult] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def failures(self) -> list[CaseResult]:
        return [c for c in self.cases if not c.agree]

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        lines = [
            f"differential: {len(self.cases) - len(self.failures)}/{len(self.cases)} cases agree "
            f"in {self.seconds:.2f}s"
        ]
        if self.failures:
            bad = self.failures[0]
            lines += [
                f"first failure: case {bad.index}, class {bad.cls}",
                f"formula: {unparse(bad.formula)}",
                f"checker holds={bad.checker_holds} counterexample={bad.checker_counterexample}",
                f"oracle  holds={bad.oracle_holds} counterexample={bad.oracle_counterexample}",
                "environment:",
                dump_environment(bad.env),
            ]
        return "\n".join(lines)


def compare(env: Environment, cls: str, f: Formula, index: int = 0) -> CaseResult:
    ps = build_product(env, cls)
    verdict = check_product(ps, f)
    oracle = naive_check(env, cls, None, f)
    cex = None if verdict.counterexample is None else vertex_signature(ps, verdict.counterexample)
    return CaseResult(index, normalize_class(cls), env, f, verdict.holds, oracle.holds, cex, oracle.counterexample)


def draw_instance(
    rng: random.Random,
    cls: str,
    env_bounds: GenBounds,
    max_depth: int = 4,
    point_budget: int = DEFAULT_POINT_BUDGET,
    max_quantifiers: int = 2,
) -> tuple[Environment, Formula]:
    """Random environment whose full state-profile space fits ``point_budget``,
    with a closed formula of depth at most ``max_depth``."""
    while True:
        bounds = GenBounds(**{**env_bounds.__dict__, "seed": rng.getrandbits(64)})
        env = random_environment(bounds)
        if count_profiles(env, cls) * len(env.states) <= point_budget:
            break
    fb = FormulaBounds(
        depth=rng.randint(1, max_depth), max_quantifiers=max_quantifiers, seed=rng.getrandbits(64)
    )
    return env, random_formula(env, fb)


def run_differential(
    seed: int = 0,
    cases: int = 200,
    classes=CLASSES,
    env_bounds: GenBounds | None = None,
    max_depth: int = 4,
    point_budget: int = DEFAULT_POINT_BUDGET,
) -> DifferentialReport:
    """Compare verdicts and counterexamples on ``cases`` random closed instances,
    cycling through ``classes``."""
    env_bounds = env_bounds or GenBounds(max_states=4, max_agents=2, max_actions_per_agent=2)
    classes = [normalize_class(c) for c in classes]
    rng = random.Random(seed)
    report = DifferentialReport()
    started = time.perf_counter()
    for k in range(cases):
        cls = classes[k % len(classes)]
        env, f = draw_instance(rng, cls, env_bounds, max_depth, point_budget)
        report.cases.append(compare(env, cls, f, k))
    report.seconds = time.perf_counter() - started
    return report


@dataclass
class CoalitionResult:
    env: Environment
    cls: str
    G: tuple[str, ...]
    H: tuple[str, ...]
    formula: Formula
    macro: frozenset
    fixpoint: frozenset

    @property
    def discrepancies(self) -> frozenset:
        return self.macro ^ self.fixpoint

    @property
    def single_initial(self) -> bool:
        return len(self.env.initial) == 1

    @property
    def all_initial(self) -> bool:
        return set(self.env.initial) == set(self.env.states)


def coalition_cross_check(env: Environment, cls: str, G, H, f: Formula) -> CoalitionResult:
    """Compare the existential common-knowledge macro with the relativised fixpoint.

    Macro side: ``exists x . C{G}(loc({sigma(H)}, x) -> f)`` on the checker.
    Fixpoint side: points g such that, for some strategy value v of H, every
    point an agent of G cannot tell from g that has H playing v lies in the
    greatest fixpoint of ``X = AND_i D_{i, sigma(H)}(X & f)`` and satisfies f.
    """
    ps = build_product(env, cls)
    macro = expand_derived(Coalition(tuple(H), "C", frozenset(Base(i) for i in G), f))
    macro_sat = sat_signatures(ps, ModelChecker(ps).sat(macro, {}))
    system = build_naive_system(env, cls)
    fixpoint = relativized_coalition_ck(system, list(G), list(H), f)
    return CoalitionResult(env, normalize_class(cls), tuple(G), tuple(H), f, macro_sat, fixpoint)
