"""Seeded random environments and formulas for differential testing."""

from __future__ import annotations

import random
from dataclasses import dataclass

from eslcheck.envmodel import Environment, Transition
from eslcheck.formula.nodes import (
    AF, AG, AU, AX, EF, EG, EU, EX, And, Base, C, Coalition, D, Env, Everyone, ExistsG,
    FalseF, ForallG, Formula, Implies, Knows, LocEq, LocGroup, Not, Or, Prop, Sigma, TrueF,
)

AGENT_NAMES = ("a", "b", "c", "d")
PROP_NAMES = ("p", "q", "r", "s")


@dataclass(frozen=True)
class GenBounds:
    max_states: int = 3
    max_agents: int = 2
    max_actions_per_agent: int = 2
    max_props: int = 2
    max_obs_classes: int = 2
    seed: int = 0

    def __post_init__(self):
        for name in ("max_states", "max_agents", "max_actions_per_agent", "max_props", "max_obs_classes"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.max_agents > len(AGENT_NAMES) or self.max_props > len(PROP_NAMES):
            raise ValueError("too many agents or propositions requested")


def random_environment(bounds: GenBounds) -> Environment:
    """A valid, serial environment within ``bounds``; a pure function of ``bounds``."""
    rng = random.Random(bounds.seed)
    n_states = rng.randint(1, bounds.max_states)
    states = tuple(f"s{k}" for k in range(n_states))
    agents = AGENT_NAMES[: rng.randint(1, bounds.max_agents)]
    actions = {a: tuple(f"{a}{k}" for k in range(rng.randint(1, bounds.max_actions_per_agent))) for a in agents}

    observations = {}
    for a in agents:
        # small observation alphabets keep uniform strategies interesting
        n_obs = min(rng.choice([1, 2, 2, bounds.max_obs_classes]), bounds.max_obs_classes, n_states)
        observations[a] = {s: f"o{rng.randrange(n_obs)}" for s in states}

    props = PROP_NAMES[: rng.randint(1, bounds.max_props)]
    propositions = {p: frozenset(s for s in states if rng.random() < 0.5) for p in props}

    if rng.random() < 0.5:
        initial = (rng.choice(states),)
    else:
        chosen = [s for s in states if rng.random() < 0.5] or [states[0]]
        initial = tuple(chosen)

    joints = [()]
    for a in agents:
        joints = [j + (act,) for j in joints for act in actions[a]]
    transitions = []
    for s in states:
        for joint in joints:
            targets = rng.sample(states, k=min(len(states), rng.choice([1, 1, 2])))
            transitions.extend(Transition(s, joint, t) for t in targets)
    return Environment(agents, states, initial, actions, observations, propositions, tuple(transitions))


@dataclass(frozen=True)
class FormulaBounds:
    depth: int = 3
    max_quantifiers: int = 2
    mode: str = "closed"  # "closed" or "open"
    free_vars: tuple[str, ...] = ("y",)
    seed: int = 0


class _FormulaGen:
    def __init__(self, env: Environment, bounds: FormulaBounds):
        self.env = env
        self.b = bounds
        self.rng = random.Random(bounds.seed)
        self.quantifiers = 0
        self.names = 0

    def agent(self):
        r = self.rng.random()
        name = self.rng.choice(self.env.agents)
        if r < 0.5:
            return Base(name)
        if r < 0.85:
            return Sigma(name)
        return Env()

    def group(self, allow_empty: bool = True) -> frozenset:
        size = self.rng.choice([0, 1, 1, 2] if allow_empty else [1, 1, 2])
        return frozenset(self.agent() for _ in range(size))

    def leaf(self, scope: list[str]) -> Formula:
        r = self.rng.random()
        if scope and r < 0.3:
            var = self.rng.choice(scope)
            if self.rng.random() < 0.7:
                return LocEq(self.agent(), var)
            return LocGroup(self.group(allow_empty=False), var)
        if r < 0.85:
            return Prop(self.rng.choice(sorted(self.env.propositions)))
        return TrueF() if self.rng.random() < 0.5 else FalseF()

    def fresh_var(self) -> str:
        self.names += 1
        return f"x{self.names}"

    def gen(self, depth: int, scope: list[str]) -> Formula:
        if depth == 0 or self.rng.random() < 0.15:
            return self.leaf(scope)
        d = depth - 1
        choices = ["not", "and", "or", "imp", "AX", "EX", "AF", "EF", "AG", "EG", "AU", "EU",
                   "K", "D", "C", "E"]
        if self.quantifiers < self.b.max_quantifiers:
            choices += ["exists", "exists", "forall", "coalition"]
        op = self.rng.choice(choices)
        g = self.gen
        if op == "not":
            return Not(g(d, scope))
        if op in ("and", "or", "imp"):
            cls = {"and": And, "or": Or, "imp": Implies}[op]
            return cls(g(d, scope), g(d, scope))
        if op in ("AX", "EX", "AF", "EF", "AG", "EG"):
            return {"AX": AX, "EX": EX, "AF": AF, "EF": EF, "AG": AG, "EG": EG}[op](g(d, scope))
        if op in ("AU", "EU"):
            return (AU if op == "AU" else EU)(g(d, scope), g(d, scope))
        if op == "K":
            return Knows(self.agent(), g(d, scope))
        if op == "D":
            return D(self.group(), g(d, scope))
        if op == "C":
            return C(self.group(), g(d, scope))
        if op == "E":
            return Everyone(self.group(allow_empty=False), g(d, scope))
        self.quantifiers += 1
        if op == "coalition":
            size = self.rng.randint(1, len(self.env.agents))
            coalition = tuple(sorted(self.rng.sample(self.env.agents, size)))
            kind = self.rng.choice("CCDE")
            return Coalition(coalition, kind, self.group(allow_empty=(kind != "E")), g(d, scope))
        var = self.fresh_var()
        body = g(d, scope + [var])
        return ExistsG(var, body) if op == "exists" else ForallG(var, body)


def random_formula(env: Environment, bounds: FormulaBounds) -> Formula:
    """A well-formed formula over ``env``; closed unless ``bounds.mode == "open"``."""
    scope = list(bounds.free_vars) if bounds.mode == "open" else []
    return _FormulaGen(env, bounds).gen(bounds.depth, scope)
