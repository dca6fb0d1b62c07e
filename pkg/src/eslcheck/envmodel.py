"""Finite strategic environments and their JSON interchange format.

An environment is the tuple ``<S, I, Acts, ->, {O_i}, pi>``: states, initial
states, per-agent action sets, a transition relation over joint actions,
per-agent observation functions and a propositional assignment.  Local states
of the agents are the observation symbols themselves.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Any, Iterator

IDENTIFIER = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

# Words with a fixed meaning in formula syntax; agents and propositions may
# not use them because formulas could not refer to them unambiguously.
RESERVED_WORDS = frozenset(
    {
        "true", "false", "A", "E", "U", "AX", "EX", "AF", "EF", "AG", "EG",
        "K", "D", "C", "exists", "forall", "loc", "sigma", "env",
    }
)

FILE_KEYS = ("agents", "states", "initial", "actions", "observations", "propositions", "transitions")
TRANSITION_KEYS = ("from", "action", "to")


class EnvironmentFileError(ValueError):
    """Base class for problems found while loading an environment file."""


class EnvironmentSyntaxError(EnvironmentFileError):
    def __init__(self, msg: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + msg)


class EnvironmentReferenceError(EnvironmentFileError):
    def __init__(self, msg: str, name: str):
        self.name = name
        super().__init__(msg)


class DuplicateNameError(EnvironmentFileError):
    def __init__(self, kind: str, name: str):
        self.name = name
        super().__init__(f"duplicate {kind} name {name!r}")


class UnknownAgentError(LookupError):
    def __init__(self, agent: str):
        self.agent = agent
        super().__init__(f"unknown agent {agent!r}")


@dataclass(frozen=True)
class Transition:
    source: str
    action: tuple[str, ...]  # one action per agent, in agent order
    target: str


@dataclass(frozen=True)
class Violation:
    rule: str
    detail: str
    element: Any = None


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule: str, detail: str, element: Any = None) -> None:
        self.violations.append(Violation(rule, detail, element))

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(f"[{v.rule}] {v.detail}" for v in self.violations)


@dataclass(frozen=True, eq=True)
class Environment:
    agents: tuple[str, ...]
    states: tuple[str, ...]
    initial: tuple[str, ...]
    actions: dict[str, tuple[str, ...]]
    observations: dict[str, dict[str, str]]
    propositions: dict[str, frozenset[str]]
    transitions: tuple[Transition, ...]

    __hash__ = None  # type: ignore[assignment]

    def joint_actions(self) -> Iterator[tuple[str, ...]]:
        """All joint actions, first agent varying slowest."""
        return itertools.product(*(self.actions[a] for a in self.agents))

    def observe(self, agent: str, state: str) -> str:
        return self.observations[agent][state]

    def state_index(self, state: str) -> int:
        return self.states.index(state)

    def successors(self) -> dict[tuple[str, tuple[str, ...]], list[str]]:
        """Index the transition relation by (source, joint action)."""
        out: dict[tuple[str, tuple[str, ...]], list[str]] = {}
        for tr in self.transitions:
            targets = out.setdefault((tr.source, tr.action), [])
            if tr.target not in targets:
                targets.append(tr.target)
        return out


def _names(raw: Any, key: str, kind: str) -> tuple[str, ...]:
    if not isinstance(raw, list) or not all(isinstance(x, str) for x in raw):
        raise EnvironmentFileError(f"{key} must be a list of strings")
    seen: set[str] = set()
    for name in raw:
        if not IDENTIFIER.match(name):
            raise EnvironmentFileError(f"invalid {kind} name {name!r}")
        if name in seen:
            raise DuplicateNameError(kind, name)
        seen.add(name)
    return tuple(raw)


def _check_keys(obj: Any, expected: tuple[str, ...], where: str) -> None:
    if not isinstance(obj, dict):
        raise EnvironmentFileError(f"{where} must be a JSON object")
    unknown = [k for k in obj if k not in expected]
    if unknown:
        raise EnvironmentFileError(f"unknown key {unknown[0]!r} in {where}")
    missing = [k for k in expected if k not in obj]
    if missing:
        raise EnvironmentFileError(f"missing key {missing[0]!r} in {where}")


def _ref(name: Any, pool, kind: str) -> str:
    if not isinstance(name, str) or name not in pool:
        raise EnvironmentReferenceError(f"unknown {kind} {name!r}", str(name))
    return name


def load_environment(text: str, complete_self_loops: bool = False) -> Environment:
    """Parse environment JSON text.

    Structural and naming problems raise :class:`EnvironmentFileError`
    subclasses.  Semantic invariants (seriality, totality of observations)
    are left to :func:`validate_environment`, except that missing
    ``(state, joint action)`` successors are filled with self-loops when
    ``complete_self_loops`` is set.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise EnvironmentSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    _check_keys(data, FILE_KEYS, "environment")

    agents = _names(data["agents"], "agents", "agent")
    if not agents:
        raise EnvironmentFileError("agents must be nonempty")
    for a in agents:
        if a in RESERVED_WORDS:
            raise EnvironmentFileError(f"agent name {a!r} is a reserved word")
    states = _names(data["states"], "states", "state")
    if not states:
        raise EnvironmentFileError("states must be nonempty")
    initial = _names(data["initial"], "initial", "state")
    if not initial:
        raise EnvironmentFileError("initial must be nonempty")
    for s in initial:
        _ref(s, states, "state")

    raw_actions = data["actions"]
    _check_keys(raw_actions, agents, "actions")
    actions = {}
    for a in agents:
        acts = _names(raw_actions[a], f"actions of agent {a!r}", "action")
        if not acts:
            raise EnvironmentFileError(f"actions of agent {a!r} must be nonempty")
        actions[a] = acts

    raw_obs = data["observations"]
    if not isinstance(raw_obs, dict):
        raise EnvironmentFileError("observations must be a JSON object")
    observations: dict[str, dict[str, str]] = {}
    for a, table in raw_obs.items():
        _ref(a, agents, "agent")
        if not isinstance(table, dict):
            raise EnvironmentFileError(f"observations of agent {a!r} must be a JSON object")
        for s, o in table.items():
            _ref(s, states, "state")
            if not isinstance(o, str):
                raise EnvironmentFileError(f"observation of {a!r} at {s!r} must be a string")
        observations[a] = dict(table)

    raw_props = data["propositions"]
    if not isinstance(raw_props, dict):
        raise EnvironmentFileError("propositions must be a JSON object")
    propositions = {}
    for p, where in raw_props.items():
        if not IDENTIFIER.match(p):
            raise EnvironmentFileError(f"invalid proposition name {p!r}")
        if p in RESERVED_WORDS:
            raise EnvironmentFileError(f"proposition name {p!r} is a reserved word")
        if not isinstance(where, list):
            raise EnvironmentFileError(f"proposition {p!r} must map to a list of states")
        for s in where:
            _ref(s, states, "state")
        if len(set(where)) != len(where):
            raise DuplicateNameError("state", next(s for s in where if where.count(s) > 1))
        propositions[p] = frozenset(where)

    raw_trans = data["transitions"]
    if not isinstance(raw_trans, list):
        raise EnvironmentFileError("transitions must be a list")
    transitions = []
    for obj in raw_trans:
        _check_keys(obj, TRANSITION_KEYS, "transition")
        src = _ref(obj["from"], states, "state")
        dst = _ref(obj["to"], states, "state")
        joint = obj["action"]
        if not isinstance(joint, dict):
            raise EnvironmentFileError("transition action must be a JSON object")
        for a in joint:
            _ref(a, agents, "agent")
        missing = [a for a in agents if a not in joint]
        if missing:
            raise EnvironmentFileError(f"joint action misses agent {missing[0]!r}")
        for a in agents:
            _ref(joint[a], actions[a], f"action of agent {a!r}")
        transitions.append(Transition(src, tuple(joint[a] for a in agents), dst))

    env = Environment(agents, states, initial, actions, observations, propositions, tuple(transitions))
    if complete_self_loops:
        env = add_self_loops(env)
    return env


def add_self_loops(env: Environment) -> Environment:
    succ = env.successors()
    extra = [
        Transition(s, joint, s)
        for s in env.states
        for joint in env.joint_actions()
        if (s, joint) not in succ
    ]
    return Environment(
        env.agents, env.states, env.initial, env.actions, env.observations,
        env.propositions, env.transitions + tuple(extra),
    )


def environment_to_dict(env: Environment) -> dict:
    return {
        "agents": list(env.agents),
        "states": list(env.states),
        "initial": list(env.initial),
        "actions": {a: list(env.actions[a]) for a in env.agents},
        "observations": {a: dict(table) for a, table in env.observations.items()},
        "propositions": {p: [s for s in env.states if s in where] for p, where in env.propositions.items()},
        "transitions": [
            {"from": t.source, "action": dict(zip(env.agents, t.action)), "to": t.target}
            for t in env.transitions
        ],
    }


def dump_environment(env: Environment, indent: int | None = 2) -> str:
    return json.dumps(environment_to_dict(env), indent=indent)


def validate_environment(env: Environment) -> ValidationReport:
    """Report every violated environment invariant; never raises."""
    report = ValidationReport()
    states = set(env.states)
    if not env.initial:
        report.add("initial", "initial must be nonempty")
    for s in env.initial:
        if s not in states:
            report.add("initial", f"initial state {s!r} is not a state", s)
    for a in env.agents:
        if not env.actions.get(a):
            report.add("actions", f"agent {a!r} has no actions", a)
    for t in env.transitions:
        if t.source not in states or t.target not in states:
            report.add("transition endpoint", f"transition {t} names an unknown state", t)
        if len(t.action) != len(env.agents) or any(
            act not in env.actions.get(a, ()) for a, act in zip(env.agents, t.action)
        ):
            report.add("joint action", f"transition {t} has an invalid joint action", t)
    for a in env.agents:
        table = env.observations.get(a, {})
        for s in env.states:
            if s not in table:
                report.add("observation totality", f"agent {a!r} has no observation at state {s!r}", (a, s))
    for p, where in env.propositions.items():
        for s in sorted(where - states):
            report.add("proposition", f"proposition {p!r} names unknown state {s!r}", (p, s))
    succ = env.successors()
    for s in env.states:
        for joint in env.joint_actions():
            if (s, joint) not in succ:
                label = ",".join(joint)
                report.add("seriality", f"state {s!r} has no successor under joint action ({label})", (s, joint))
    return report


def observation_classes(env: Environment, agent: str) -> list[tuple[str, ...]]:
    """Partition the states by the agent's observation, ordered by first state."""
    if agent not in env.agents:
        raise UnknownAgentError(agent)
    table = env.observations[agent]
    classes: dict[str, list[str]] = {}
    for s in env.states:
        classes.setdefault(table[s], []).append(s)
    return [tuple(c) for c in classes.values()]
