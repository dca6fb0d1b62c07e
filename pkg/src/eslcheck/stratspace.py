"""Strategy classes and the reachable product of environment states and profiles.

A global state of the strategy-space system is an environment state paired
with a strategy profile.  The agents' observation components are functions of
the environment state, so they are derived on demand instead of stored.
Profiles never change along a run, which makes every vertex of the product
``(state, profile)`` and every edge profile-preserving.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

import numpy as np

from eslcheck.envmodel import Environment, UnknownAgentError, observation_classes, validate_environment
from eslcheck.formula.nodes import Base, Env, ExtendedAgent, Sigma

CLASSES = ("all", "det", "unif", "unif_det")
DEFAULT_VERTEX_CAP = 10**7


class StrategyClassError(ValueError):
    pass


class ProductTooLarge(RuntimeError):
    def __init__(self, vertices: int, profiles: int, cap: int):
        self.vertices = vertices
        self.profiles = profiles
        self.cap = cap
        super().__init__(
            f"product exceeds the vertex cap of {cap} (at least {vertices} vertices, {profiles} profiles)"
        )


def normalize_class(tag: str) -> str:
    norm = tag.replace("-", "_")
    if norm not in CLASSES:
        raise StrategyClassError(f"unknown strategy class {tag!r}; expected one of all, det, unif, unif-det")
    return norm


@dataclass(frozen=True)
class Strategy:
    """A memoryless strategy: the set of enabled actions at each state."""

    agent: str
    states: tuple[str, ...]
    choice: tuple[frozenset[str], ...]

    def enabled(self, state: str) -> frozenset[str]:
        return self.choice[self.states.index(state)]

    def as_dict(self) -> dict[str, frozenset[str]]:
        return dict(zip(self.states, self.choice))

    def is_deterministic(self) -> bool:
        return all(len(c) == 1 for c in self.choice)

    def is_uniform(self, env: Environment) -> bool:
        seen: dict[str, frozenset[str]] = {}
        for s, c in zip(self.states, self.choice):
            if seen.setdefault(env.observe(self.agent, s), c) != c:
                return False
        return True


@dataclass(frozen=True)
class StrategyProfile:
    agents: tuple[str, ...]
    strategies: tuple[Strategy, ...]

    def __getitem__(self, agent: str) -> Strategy:
        try:
            return self.strategies[self.agents.index(agent)]
        except ValueError:
            raise UnknownAgentError(agent) from None


@dataclass(frozen=True)
class GlobalState:
    env_state: str
    profile: StrategyProfile


def _subset_masks(n_actions: int, deterministic: bool) -> list[int]:
    if deterministic:
        return [1 << k for k in range(n_actions)]
    return list(range(1, 1 << n_actions))


def _mask_to_set(mask: int, actions: tuple[str, ...]) -> frozenset[str]:
    return frozenset(a for k, a in enumerate(actions) if mask >> k & 1)


def _mask_rows(env: Environment, agent: str, cls: str) -> Iterator[tuple[int, ...]]:
    """Per-state action bitmasks of each strategy, in canonical order."""
    if agent not in env.agents:
        raise UnknownAgentError(agent)
    cls = normalize_class(cls)
    masks = _subset_masks(len(env.actions[agent]), cls in ("det", "unif_det"))
    if cls in ("unif", "unif_det"):
        classes = observation_classes(env, agent)
        which = {s: k for k, c in enumerate(classes) for s in c}
        for combo in itertools.product(masks, repeat=len(classes)):
            yield tuple(combo[which[s]] for s in env.states)
    else:
        yield from itertools.product(masks, repeat=len(env.states))


def enumerate_agent_strategies(env: Environment, agent: str, cls: str) -> Iterator[Strategy]:
    """Yield each strategy of ``agent`` in class ``cls`` exactly once.

    Order is lexicographic over the states in file order, comparing the
    enabled action sets by their bitmask over the agent's action list.
    """
    actions = env.actions.get(agent, ())
    for row in _mask_rows(env, agent, cls):
        yield Strategy(agent, env.states, tuple(_mask_to_set(m, actions) for m in row))


def count_agent_strategies(env: Environment, agent: str, cls: str) -> int:
    if agent not in env.agents:
        raise UnknownAgentError(agent)
    cls = normalize_class(cls)
    per_slot = len(_subset_masks(len(env.actions[agent]), cls in ("det", "unif_det")))
    slots = len(observation_classes(env, agent)) if cls in ("unif", "unif_det") else len(env.states)
    return per_slot**slots


def count_profiles(env: Environment, cls: str) -> int:
    return math.prod(count_agent_strategies(env, a, cls) for a in env.agents)


def enumerate_profiles(env: Environment, cls: str) -> Iterator[StrategyProfile]:
    """Cartesian product of the per-agent classes, first agent varying slowest."""
    cls = normalize_class(cls)
    per_agent = [list(enumerate_agent_strategies(env, a, cls)) for a in env.agents]
    for combo in itertools.product(*per_agent):
        yield StrategyProfile(env.agents, combo)


@dataclass
class ProductSystem:
    """Reachable part of ``states x profiles`` with its temporal edges.

    Vertices are numbered in breadth-first discovery order.  ``profiles``
    holds interned profiles as tuples of per-agent strategy indices into
    ``strategies[agent]``.
    """

    env: Environment
    class_tag: str
    strategies: dict[str, list[Strategy]]
    masks: dict[str, np.ndarray]  # agent -> (n_strategies, n_states) action bitmasks
    profiles: np.ndarray  # (n_profiles, n_agents)
    vertex_state: np.ndarray
    vertex_profile: np.ndarray
    initial_vertices: np.ndarray
    succ_indptr: np.ndarray
    succ_indices: np.ndarray
    parent: np.ndarray  # BFS parent, -1 for initial vertices
    _labels: dict = field(default_factory=dict, repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_state)

    @property
    def n_edges(self) -> int:
        return len(self.succ_indices)

    @property
    def n_profiles(self) -> int:
        return len(self.profiles)

    def successors(self, v: int) -> np.ndarray:
        return self.succ_indices[self.succ_indptr[v]:self.succ_indptr[v + 1]]

    def edges(self) -> list[tuple[int, int]]:
        return [(v, int(w)) for v in range(self.n_vertices) for w in self.successors(v)]

    @cached_property
    def edge_sources(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_vertices), np.diff(self.succ_indptr))

    @cached_property
    def index(self) -> dict[tuple[int, int], int]:
        return {(int(s), int(p)): v for v, (s, p) in enumerate(zip(self.vertex_state, self.vertex_profile))}

    def find(self, state: str, profile: tuple[int, ...]) -> int | None:
        """Vertex index of ``state`` under the profile given by strategy indices."""
        hits = np.flatnonzero((self.profiles == np.asarray(profile)).all(axis=1))
        if not len(hits):
            return None
        return self.index.get((self.env.state_index(state), int(hits[0])))

    def profile(self, v: int) -> StrategyProfile:
        row = self.profiles[self.vertex_profile[v]]
        return StrategyProfile(
            self.env.agents, tuple(self.strategies[a][k] for a, k in zip(self.env.agents, row))
        )

    def global_state(self, v: int) -> GlobalState:
        return GlobalState(self.env.states[self.vertex_state[v]], self.profile(v))

    def local_labels(self, who: ExtendedAgent) -> np.ndarray:
        """Integer label per vertex; equal labels mean equal local states of ``who``."""
        if who in self._labels:
            return self._labels[who]
        env = self.env
        if isinstance(who, Env):
            out = self.vertex_state
        elif isinstance(who, Base):
            if who.name not in env.agents:
                raise UnknownAgentError(who.name)
            table = env.observations[who.name]
            symbols: dict[str, int] = {}
            per_state = np.array([symbols.setdefault(table[s], len(symbols)) for s in env.states])
            out = per_state[self.vertex_state]
        elif isinstance(who, Sigma):
            if who.name not in env.agents:
                raise UnknownAgentError(who.name)
            out = self.profiles[self.vertex_profile, env.agents.index(who.name)]
        else:
            raise TypeError(f"not an agent: {who!r}")
        self._labels[who] = out
        return out

    def group_labels(self, group) -> np.ndarray:
        """Labels whose classes are the intersection of the members' classes."""
        key = ("group", frozenset(group))
        if key not in self._labels:
            cols = [self.local_labels(w) for w in group]
            if not cols:
                lab = np.zeros(self.n_vertices, dtype=np.int64)
            else:
                _, lab = np.unique(np.stack(cols, axis=1), axis=0, return_inverse=True)
            self._labels[key] = lab.reshape(-1)
        return self._labels[key]

    def locals_equal(self, g: int, h: int, who: ExtendedAgent) -> bool:
        lab = self.local_labels(who)
        return bool(lab[g] == lab[h])

    def path_to(self, v: int) -> list[int]:
        """Vertices of a path from an initial vertex to ``v``."""
        path = [v]
        while self.parent[path[-1]] >= 0:
            path.append(int(self.parent[path[-1]]))
        return path[::-1]

    def describe(self, v: int) -> str:
        state = self.env.states[self.vertex_state[v]]
        parts = [f"{a}:{describe_strategy(self.env, s)}" for a, s in zip(self.env.agents, self.profile(v).strategies)]
        return f"({state}, {', '.join(parts)})"


def locals_equal(ps: ProductSystem, g: int, h: int, who: ExtendedAgent) -> bool:
    return ps.locals_equal(g, h, who)


def _render_set(actions: frozenset[str], order: tuple[str, ...]) -> str:
    names = [a for a in order if a in actions]
    return names[0] if len(names) == 1 else "{" + ",".join(names) + "}"


def describe_strategy(env: Environment, strategy: Strategy) -> str:
    """Compact text: one action set if constant, else per observation or per state."""
    order = env.actions[strategy.agent]
    if strategy.is_uniform(env):
        by_obs = {}
        for s, c in zip(strategy.states, strategy.choice):
            by_obs.setdefault(env.observe(strategy.agent, s), c)
        if len(set(by_obs.values())) == 1:
            return _render_set(strategy.choice[0], order)
        return "[" + ",".join(f"{o}:{_render_set(c, order)}" for o, c in by_obs.items()) + "]"
    return "[" + ",".join(f"{s}:{_render_set(c, order)}" for s, c in zip(strategy.states, strategy.choice)) + "]"


def strategy_to_json(env: Environment, strategy: Strategy) -> dict:
    order = env.actions[strategy.agent]
    if strategy.is_uniform(env):
        choice = {}
        for s, c in zip(strategy.states, strategy.choice):
            choice.setdefault(env.observe(strategy.agent, s), [a for a in order if a in c])
        return {"by": "observation", "choice": choice}
    return {"by": "state", "choice": {s: [a for a in order if a in c] for s, c in zip(strategy.states, strategy.choice)}}


def build_product(
    env: Environment, cls: str, vertex_cap: int = DEFAULT_VERTEX_CAP, check_valid: bool = True
) -> ProductSystem:
    """Breadth-first construction of the reachable (state, profile) vertices.

    Seeds are ``(s0, p)`` for each initial state ``s0`` (outer loop) and each
    profile ``p`` in canonical order (inner loop).  A vertex ``(s, p)`` steps
    to ``(t, p)`` when some joint action enabled by ``p`` at ``s`` leads to
    ``t``.
    """
    cls = normalize_class(cls)
    if check_valid:
        report = validate_environment(env)
        if not report.ok:
            raise ValueError(f"invalid environment:\n{report}")
    agents = env.agents
    n_profiles = count_profiles(env, cls)
    if n_profiles * len(env.initial) > vertex_cap:
        raise ProductTooLarge(n_profiles * len(env.initial), n_profiles, vertex_cap)

    strategies = {a: list(enumerate_agent_strategies(env, a, cls)) for a in agents}
    masks = {a: np.array(list(_mask_rows(env, a, cls)), dtype=np.int64).reshape(-1, len(env.states)) for a in agents}
    profiles = np.array(list(itertools.product(*(range(len(strategies[a])) for a in agents))), dtype=np.int64)
    profiles = profiles.reshape(-1, len(agents))

    succ_table = {
        (env.state_index(s), joint): [env.state_index(t) for t in targets]
        for (s, joint), targets in env.successors().items()
    }
    step_cache: dict[tuple[int, tuple[int, ...]], list[int]] = {}

    def step(s: int, p: int) -> list[int]:
        enabled = tuple(int(masks[a][profiles[p, k], s]) for k, a in enumerate(agents))
        key = (s, enabled)
        if key not in step_cache:
            options = [_mask_to_set(m, env.actions[a]) for m, a in zip(enabled, agents)]
            targets: dict[int, None] = {}
            for joint in itertools.product(*(sorted(o, key=env.actions[a].index) for o, a in zip(options, agents))):
                for t in succ_table.get((s, joint), ()):
                    targets.setdefault(t)
            step_cache[key] = list(targets)
        return step_cache[key]

    index: dict[tuple[int, int], int] = {}
    vstate: list[int] = []
    vprof: list[int] = []
    parent: list[int] = []
    queue: deque[int] = deque()

    def visit(s: int, p: int, par: int) -> int:
        key = (s, p)
        v = index.get(key)
        if v is None:
            v = len(vstate)
            if v >= vertex_cap:
                raise ProductTooLarge(v + 1, n_profiles, vertex_cap)
            index[key] = v
            vstate.append(s)
            vprof.append(p)
            parent.append(par)
            queue.append(v)
        return v

    initial = [visit(env.state_index(s0), p, -1) for s0 in env.initial for p in range(len(profiles))]
    initial = list(dict.fromkeys(initial))
    indptr = [0]
    indices: list[int] = []
    while queue:
        v = queue.popleft()
        # vertices are dequeued in index order, so CSR rows are appended in order
        succ = [visit(t, vprof[v], v) for t in step(vstate[v], vprof[v])]
        indices.extend(succ)
        indptr.append(len(indices))

    return ProductSystem(
        env=env,
        class_tag=cls,
        strategies=strategies,
        masks=masks,
        profiles=profiles,
        vertex_state=np.array(vstate, dtype=np.int64),
        vertex_profile=np.array(vprof, dtype=np.int64),
        initial_vertices=np.array(initial, dtype=np.int64),
        succ_indptr=np.array(indptr, dtype=np.int64),
        succ_indices=np.array(indices, dtype=np.int64),
        parent=np.array(parent, dtype=np.int64),
    )


def product_to_json(ps: ProductSystem) -> dict:
    env = ps.env
    vertices = []
    for v in range(ps.n_vertices):
        prof = ps.profile(v)
        vertices.append(
            {
                "index": v,
                "state": env.states[ps.vertex_state[v]],
                "strategies": {a: strategy_to_json(env, prof[a]) for a in env.agents},
            }
        )
    return {
        "class": ps.class_tag.replace("_", "-"),
        "vertices": vertices,
        "edges": [list(e) for e in ps.edges()],
        "initial": [int(v) for v in ps.initial_vertices],
    }


def dump_product(ps: ProductSystem, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(product_to_json(ps), fh, indent=2)
