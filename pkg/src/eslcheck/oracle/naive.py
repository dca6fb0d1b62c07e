"""Brute-force reference semantics, written independently of the checker.

Everything here works on names: a global state is ``(state, profile)`` where
a profile is a tuple (one entry per agent) of tuples (one entry per state) of
frozensets of enabled actions.  Strategy classes are obtained by filtering the
set of all strategies through membership predicates, reachability by closing
the initial points under literal run steps, and each formula clause is
evaluated directly from its semantic definition.  No memoisation, no
interning, no shared code with the checker beyond the environment type and
the formula AST.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from eslcheck.envmodel import Environment
from eslcheck.formula.nodes import (
    AF, AG, AU, AX, EF, EG, EU, EX, And, Base, C, Coalition, D, Env, Everyone, ExistsG,
    FalseF, ForallG, Formula, Implies, Knows, LocEq, LocGroup, Not, Or, Prop, Sigma, TrueF,
)

SIZE_GUARD = 10**4


class OracleSizeError(RuntimeError):
    pass


def _nonempty_subsets(actions):
    return [
        frozenset(c) for r in range(1, len(actions) + 1) for c in itertools.combinations(actions, r)
    ]


def _is_deterministic(strategy) -> bool:
    return all(len(c) == 1 for c in strategy)


def _is_uniform(env: Environment, agent: str, strategy) -> bool:
    for (s, cs), (t, ct) in itertools.combinations(zip(env.states, strategy), 2):
        if env.observations[agent][s] == env.observations[agent][t] and cs != ct:
            return False
    return True


def in_class(env: Environment, agent: str, strategy, cls: str) -> bool:
    """Polynomial membership test for the four strategy classes."""
    cls = cls.replace("-", "_")
    if cls == "all":
        return True
    if cls == "det":
        return _is_deterministic(strategy)
    if cls == "unif":
        return _is_uniform(env, agent, strategy)
    if cls == "unif_det":
        return _is_deterministic(strategy) and _is_uniform(env, agent, strategy)
    raise ValueError(f"unknown strategy class {cls!r}")


def class_strategies(env: Environment, agent: str, cls: str) -> list[tuple]:
    everything = itertools.product(_nonempty_subsets(env.actions[agent]), repeat=len(env.states))
    return [st for st in everything if in_class(env, agent, st, cls)]


def _mask(actions, chosen) -> int:
    return sum(1 << k for k, a in enumerate(actions) if a in chosen)


def profile_order_key(env: Environment, profile) -> tuple:
    """Lexicographic key over agents, then states, then action bitmask."""
    return tuple(
        _mask(env.actions[a], chosen) for a, strategy in zip(env.agents, profile) for chosen in strategy
    )


@dataclass
class NaiveSystem:
    env: Environment
    cls: str
    points: list = field(default_factory=list)
    initial: list = field(default_factory=list)
    _local: dict = field(default_factory=dict, repr=False)

    def local(self, g, who):
        key = (g, who)
        if key not in self._local:
            self._local[key] = self._compute_local(g, who)
        return self._local[key]

    def _compute_local(self, g, who):
        state, profile = g
        if isinstance(who, Env):
            return state
        if isinstance(who, Base):
            return self.env.observations[who.name][state]
        if isinstance(who, Sigma):
            return profile[self.env.agents.index(who.name)]
        raise TypeError(who)

    def next_points(self, g) -> list:
        state, profile = g
        k = self.env.states.index(state)
        out = []
        for tr in self.env.transitions:
            if tr.source != state:
                continue
            if all(act in strategy[k] for act, strategy in zip(tr.action, profile)):
                nxt = (tr.target, profile)
                if nxt not in out:
                    out.append(nxt)
        return out


def build_naive_system(env: Environment, cls: str, guard: int = SIZE_GUARD) -> NaiveSystem:
    per_agent = [class_strategies(env, a, cls) for a in env.agents]
    profiles = list(itertools.product(*per_agent))
    if len(profiles) * len(env.initial) > guard:
        raise OracleSizeError(f"{len(profiles) * len(env.initial)} initial points exceed the guard {guard}")
    sys = NaiveSystem(env, cls)
    sys.initial = [(s0, p) for s0 in env.initial for p in profiles]
    seen = set(sys.initial)
    frontier = list(sys.initial)
    while frontier:
        new = []
        for g in frontier:
            for h in sys.next_points(g):
                if h not in seen:
                    seen.add(h)
                    new.append(h)
                    if len(seen) > guard:
                        raise OracleSizeError(f"more than {guard} reachable points")
        frontier = new
    sys.points = sorted(seen, key=lambda g: (env.states.index(g[0]), profile_order_key(env, g[1])))
    return sys


class NaiveEvaluator:
    def __init__(self, system: NaiveSystem):
        self.sys = system
        self.all = frozenset(system.points)
        self.succ = {g: system.next_points(g) for g in system.points}

    def exists_path_until(self, g, left, right) -> bool:
        stack, seen = [g], {g}
        while stack:
            x = stack.pop()
            if x in right:
                return True
            if x not in left:
                continue
            for y in self.succ[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return False

    def all_paths_until(self, g, left, right) -> bool:
        """No path from ``g`` avoids ``right`` forever or leaves ``left`` before it."""
        if g in right:
            return True
        if g not in left:
            return False
        region, stack = {g}, [g]
        while stack:
            x = stack.pop()
            for y in self.succ[x]:
                if y in right:
                    continue
                if y not in left:
                    return False
                if y not in region:
                    region.add(y)
                    stack.append(y)
        # an infinite path staying in the region exists iff the region has a cycle
        indeg = {x: 0 for x in region}
        for x in region:
            for y in self.succ[x]:
                if y in region:
                    indeg[y] += 1
        queue = [x for x, d in indeg.items() if d == 0]
        removed = 0
        while queue:
            x = queue.pop()
            removed += 1
            for y in self.succ[x]:
                if y in region:
                    indeg[y] -= 1
                    if indeg[y] == 0:
                        queue.append(y)
        return removed == len(region)

    def exists_forever(self, g, inside) -> bool:
        """Some infinite path from ``g`` stays in ``inside``."""
        if g not in inside:
            return False
        region, stack = {g}, [g]
        while stack:
            x = stack.pop()
            for y in self.succ[x]:
                if y in inside and y not in region:
                    region.add(y)
                    stack.append(y)
        # prune points with no successor left in the region
        changed = True
        while changed:
            changed = False
            for x in list(region):
                if not any(y in region for y in self.succ[x]):
                    region.discard(x)
                    changed = True
        return g in region

    def same(self, g, h, group) -> bool:
        return all(self.sys.local(g, w) == self.sys.local(h, w) for w in group)

    def common_reach(self, g, group) -> set:
        """Points reachable from ``g`` by chains of single-member indistinguishability."""
        reach, stack = {g}, [g]
        while stack:
            x = stack.pop()
            for h in self.sys.points:
                if h not in reach and any(self.sys.local(x, w) == self.sys.local(h, w) for w in group):
                    reach.add(h)
                    stack.append(h)
        return reach

    def sat(self, f: Formula, ctx: dict) -> frozenset:
        pts, sat = self.sys.points, self.sat
        if isinstance(f, Prop):
            where = self.sys.env.propositions[f.name]
            return frozenset(g for g in pts if g[0] in where)
        if isinstance(f, TrueF):
            return self.all
        if isinstance(f, FalseF):
            return frozenset()
        if isinstance(f, Not):
            return self.all - sat(f.sub, ctx)
        if isinstance(f, And):
            return sat(f.left, ctx) & sat(f.right, ctx)
        if isinstance(f, Or):
            return sat(f.left, ctx) | sat(f.right, ctx)
        if isinstance(f, Implies):
            return (self.all - sat(f.left, ctx)) | sat(f.right, ctx)
        if isinstance(f, EX):
            s = sat(f.sub, ctx)
            return frozenset(g for g in pts if any(h in s for h in self.succ[g]))
        if isinstance(f, AX):
            s = sat(f.sub, ctx)
            return frozenset(g for g in pts if all(h in s for h in self.succ[g]))
        if isinstance(f, (EU, AU, EF, AF)):
            left = sat(f.left, ctx) if isinstance(f, (EU, AU)) else self.all
            right = sat(f.right if isinstance(f, (EU, AU)) else f.sub, ctx)
            test = self.exists_path_until if isinstance(f, (EU, EF)) else self.all_paths_until
            return frozenset(g for g in pts if test(g, left, right))
        if isinstance(f, AG):
            s = sat(f.sub, ctx)
            return frozenset(g for g in pts if not self.exists_path_until(g, self.all, self.all - s))
        if isinstance(f, EG):
            s = sat(f.sub, ctx)
            return frozenset(g for g in pts if self.exists_forever(g, s))
        if isinstance(f, (D, Knows)):
            group = f.group if isinstance(f, D) else {f.who}
            return self.distributed(group, sat(f.sub, ctx))
        if isinstance(f, Everyone):
            return self.everyone(f.group, sat(f.sub, ctx))
        if isinstance(f, C):
            return self.common(f.group, sat(f.sub, ctx))
        if isinstance(f, (ExistsG, ForallG)):
            results = [sat(f.sub, {**ctx, f.var: h}) for h in pts]
            if isinstance(f, ExistsG):
                return frozenset(g for g in pts if any(g in r for r in results))
            return frozenset(g for g in pts if all(g in r for r in results))
        if isinstance(f, LocEq):
            ref = ctx[f.var]
            return frozenset(g for g in pts if self.sys.local(g, f.who) == self.sys.local(ref, f.who))
        if isinstance(f, LocGroup):
            ref = ctx[f.var]
            return frozenset(g for g in pts if self.same(g, ref, f.group))
        if isinstance(f, Coalition):
            return self.coalition(f, ctx)
        raise TypeError(f"unsupported formula node {f!r}")

    def distributed(self, group, s) -> frozenset:
        pts = self.sys.points
        return frozenset(g for g in pts if all(h in s for h in pts if self.same(g, h, group)))

    def everyone(self, group, s) -> frozenset:
        out = self.all
        for w in group:
            out = out & self.distributed({w}, s)
        return out

    def common(self, group, s) -> frozenset:
        if not group:
            return frozenset(s)
        out: set = set()
        done: set = set()
        for g in self.sys.points:
            if g in done:
                continue
            reach = self.common_reach(g, group)
            done |= reach
            if reach <= s:
                out |= reach
        return frozenset(out)

    def coalition(self, f: Coalition, ctx: dict) -> frozenset:
        """Some H-strategy v, played somewhere, makes G know ``sub`` wherever H plays v."""
        pts = self.sys.points
        s = self.sat(f.sub, ctx)
        members = [Sigma(h) for h in f.coalition]
        know = {"C": self.common, "D": self.distributed, "E": self.everyone}[f.kind]
        out: set = set()
        seen = set()
        for ref in pts:
            value = tuple(self.sys.local(ref, m) for m in members)
            if value in seen:
                continue
            seen.add(value)
            plays_ref = frozenset(g for g in pts if self.same(g, ref, members))
            out |= know(f.group, (self.all - plays_ref) | s)
        return frozenset(out)


@dataclass
class NaiveVerdict:
    holds: bool
    counterexample: tuple | None = None
    failing: list = field(default_factory=list)


def naive_check(env: Environment, cls: str, ctx: dict | None, f: Formula, guard: int = SIZE_GUARD) -> NaiveVerdict:
    """Decide ``f`` at every initial point; ``ctx`` maps variables to ``(state, profile)``."""
    system = build_naive_system(env, cls, guard)
    sat = NaiveEvaluator(system).sat(f, dict(ctx or {}))
    failing = [g for g in system.initial if g not in sat]
    failing.sort(key=lambda g: (env.initial.index(g[0]), profile_order_key(env, g[1])))
    return NaiveVerdict(holds=not failing, counterexample=failing[0] if failing else None, failing=failing)


def naive_sat(system: NaiveSystem, f: Formula, ctx: dict | None = None) -> frozenset:
    return NaiveEvaluator(system).sat(f, dict(ctx or {}))


def gfp_relativized_ck(system: NaiveSystem, G, H, f: Formula, ctx: dict | None = None) -> frozenset:
    """Greatest X with X = AND over i in G of D_{i, sigma(H)} (X and f).

    Computed by downward iteration from the full point set.
    """
    if not G:
        raise ValueError("gfp_relativized_ck needs a nonempty group G")
    pts = system.points
    fs = naive_sat(system, f, ctx)
    strategic = [Sigma(h) for h in H]
    ev = NaiveEvaluator(system)
    x = frozenset(pts)
    while True:
        good = x & fs
        nxt = frozenset(
            g for g in pts
            if all(h in good for i in G for h in pts if ev.same(g, h, [Base(i)] + strategic))
        )
        if nxt == x:
            return x
        x = nxt


def relativized_coalition_ck(system: NaiveSystem, G, H, f: Formula, ctx: dict | None = None) -> frozenset:
    """Points g for which some H-strategy v, played somewhere in the system,
    has every i-indistinguishable (i in G) point playing v inside the greatest
    fixpoint and satisfying ``f``."""
    pts = system.points
    fs = naive_sat(system, f, ctx)
    gfp = gfp_relativized_ck(system, G, H, f, ctx)
    ev = NaiveEvaluator(system)
    strategic = [Sigma(h) for h in H]
    values = {tuple(system.local(g, w) for w in strategic) for g in pts}
    out = set()
    for g in pts:
        for v in values:
            if all(
                h in gfp and h in fs
                for i in G
                for h in pts
                if ev.same(g, h, [Base(i)]) and tuple(system.local(h, w) for w in strategic) == v
            ):
                out.add(g)
                break
    return frozenset(out)


def run_prefixes(system: NaiveSystem, g, length: int) -> list[tuple]:
    """All run fragments of ``length`` points starting at ``g``."""
    out = [(g,)]
    for _ in range(length - 1):
        out = [p + (h,) for p in out for h in system.next_points(p[-1])]
    return out


def prefix_eval(system: NaiveSystem, g, f: Formula, depth: int) -> bool:
    """Evaluate a next-time formula at ``g`` over explicitly enumerated run prefixes.

    ``f`` may use propositions, boolean connectives, AX and EX with nesting at
    most ``depth``.  Path quantification ranges over the enumerated prefixes
    sharing the current fragment.
    """
    prefixes = run_prefixes(system, g, depth + 1)

    def holds(h: Formula, pos: int, prefix: tuple) -> bool:
        if isinstance(h, Prop):
            return prefix[pos][0] in system.env.propositions[h.name]
        if isinstance(h, TrueF):
            return True
        if isinstance(h, FalseF):
            return False
        if isinstance(h, Not):
            return not holds(h.sub, pos, prefix)
        if isinstance(h, And):
            return holds(h.left, pos, prefix) and holds(h.right, pos, prefix)
        if isinstance(h, Or):
            return holds(h.left, pos, prefix) or holds(h.right, pos, prefix)
        if isinstance(h, Implies):
            return not holds(h.left, pos, prefix) or holds(h.right, pos, prefix)
        if isinstance(h, (AX, EX)):
            runs = [p for p in prefixes if p[: pos + 1] == prefix[: pos + 1]]
            results = (holds(h.sub, pos + 1, p) for p in runs)
            return all(results) if isinstance(h, AX) else any(results)
        raise TypeError(f"prefix evaluation does not support {h!r}")

    return all(holds(f, 0, p) for p in prefixes[:1])
