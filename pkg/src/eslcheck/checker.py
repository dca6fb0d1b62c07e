"""Fixpoint-labelling model checker over the reachable product.

Satisfaction sets are boolean vectors indexed by product vertex.  Results of
``sat_set`` are memoised under ``(node, context restricted to the node's free
variables)``; structurally equal subformulas hash equal, so repeated subtrees
share cache entries.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from eslcheck.envmodel import Environment
from eslcheck.formula import (
    AU, AX, EU, EX, And, C, D, ExistsG, FalseF, Formula, Implies, LocEq, Not, Or, Prop,
    TrueF, check_well_formed, expand_derived, free_variables, is_core, parse_formula,
)
from eslcheck.stratspace import DEFAULT_VERTEX_CAP, ProductSystem, build_product

Context = Mapping[str, int]


class UnboundVariableError(ValueError):
    def __init__(self, names):
        self.names = sorted(names)
        super().__init__(f"unbound variables: {', '.join(self.names)}")


class IllFormedFormulaError(ValueError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"ill-formed formula:\n{report}")


@dataclass
class Verdict:
    holds: bool
    counterexample: int | None = None
    witness_bindings: dict[str, int] | None = None
    stats: dict = field(default_factory=dict)
    product: ProductSystem | None = field(default=None, repr=False, compare=False)

    def describe(self, v: int) -> str:
        """Resolve a vertex index of this verdict's product to ``(state, profile)`` text."""
        return self.product.describe(v)


def memo_key(f: Formula, ctx: Context, free=None) -> tuple:
    """Cache key: the node itself plus ``ctx`` restricted to its free variables."""
    free = free_variables(f) if free is None else free
    return f, tuple(sorted((x, ctx[x]) for x in free if x in ctx))


class ModelChecker:
    """Evaluates core formulas on one product system.

    ``fixpoint_trace`` collects, per EU/AU evaluation, the sizes of the
    successive approximations; tests use it to check monotone convergence.
    """

    def __init__(self, ps: ProductSystem, memo: bool = True, fixpoint_trace: bool = False):
        self.ps = ps
        self.n = ps.n_vertices
        self.memo = memo
        self.cache: dict[tuple, np.ndarray] = {}
        self.hits = 0
        self.misses = 0
        self._free: dict[Formula, frozenset[str]] = {}
        self._components: dict[frozenset, np.ndarray] = {}
        self.fixpoint_trace: list[list[int]] | None = [] if fixpoint_trace else None
        env = ps.env
        self._prop_by_state = {
            p: np.array([s in where for s in env.states], dtype=bool) for p, where in env.propositions.items()
        }
        self._starts = ps.succ_indptr[:-1]

    # helpers -----------------------------------------------------------------

    def free(self, f: Formula) -> frozenset[str]:
        out = self._free.get(f)
        if out is None:
            out = self._free[f] = free_variables(f)
        return out

    def pre_exists(self, target: np.ndarray) -> np.ndarray:
        """Vertices with at least one successor in ``target``."""
        return np.logical_or.reduceat(target[self.ps.succ_indices], self._starts)

    def pre_forall(self, target: np.ndarray) -> np.ndarray:
        """Vertices all of whose successors lie in ``target``."""
        return np.logical_and.reduceat(target[self.ps.succ_indices], self._starts)

    def _lfp(self, base: np.ndarray, guard: np.ndarray, step) -> np.ndarray:
        current = base.copy()
        trace = [int(current.sum())]
        while True:
            nxt = base | (guard & step(current))
            if np.array_equal(nxt, current):
                break
            current = nxt
            trace.append(int(current.sum()))
        if self.fixpoint_trace is not None:
            self.fixpoint_trace.append(trace)
        return current

    def components(self, group) -> np.ndarray:
        """Component label per vertex of the union of the members' relations."""
        group = frozenset(group)
        if group not in self._components:
            n = self.n
            rows, cols, offset = [], [], n
            for w in group:
                lab = self.ps.local_labels(w)
                _, lab = np.unique(lab, return_inverse=True)
                rows.append(np.arange(n))
                cols.append(offset + lab.reshape(-1))
                offset += int(lab.max()) + 1 if n else 0
            r = np.concatenate(rows)
            c = np.concatenate(cols)
            graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(offset, offset))
            _, labels = connected_components(graph, directed=False)
            self._components[group] = labels[:n]
        return self._components[group]

    def distributed(self, group, target: np.ndarray) -> np.ndarray:
        if not group:
            return np.full(self.n, bool(target.all()))
        lab = self.ps.group_labels(group)
        bad = np.bincount(lab, weights=~target, minlength=int(lab.max()) + 1)
        return bad[lab] == 0

    def common(self, group, target: np.ndarray) -> np.ndarray:
        if not group:
            return target.copy()
        comp = self.components(group)
        bad = np.bincount(comp, weights=~target, minlength=int(comp.max()) + 1)
        return bad[comp] == 0

    # evaluation --------------------------------------------------------------

    def sat(self, f: Formula, ctx: Context | None = None) -> np.ndarray:
        """Boolean vector of the vertices satisfying core formula ``f`` under ``ctx``."""
        ctx = ctx or {}
        free = self.free(f)
        missing = [x for x in free if x not in ctx]
        if missing:
            raise UnboundVariableError(missing)
        if not self.memo:
            return self._eval(f, ctx)
        key = memo_key(f, ctx, free)
        hit = self.cache.get(key)
        if hit is not None:
            self.hits += 1
            return hit
        self.misses += 1
        out = self._eval(f, ctx)
        out.setflags(write=False)
        self.cache[key] = out
        return out

    def _eval(self, f: Formula, ctx: Context) -> np.ndarray:
        ps, n, sat = self.ps, self.n, self.sat
        if isinstance(f, Prop):
            if f.name not in self._prop_by_state:
                raise KeyError(f"undeclared proposition {f.name!r}")
            return self._prop_by_state[f.name][ps.vertex_state]
        if isinstance(f, TrueF):
            return np.ones(n, dtype=bool)
        if isinstance(f, FalseF):
            return np.zeros(n, dtype=bool)
        if isinstance(f, Not):
            return ~sat(f.sub, ctx)
        if isinstance(f, And):
            return sat(f.left, ctx) & sat(f.right, ctx)
        if isinstance(f, Or):
            return sat(f.left, ctx) | sat(f.right, ctx)
        if isinstance(f, Implies):
            return ~sat(f.left, ctx) | sat(f.right, ctx)
        if isinstance(f, EX):
            return self.pre_exists(sat(f.sub, ctx))
        if isinstance(f, AX):
            return self.pre_forall(sat(f.sub, ctx))
        if isinstance(f, EU):
            return self._lfp(sat(f.right, ctx), sat(f.left, ctx), self.pre_exists)
        if isinstance(f, AU):
            return self._lfp(sat(f.right, ctx), sat(f.left, ctx), self.pre_forall)
        if isinstance(f, D):
            return self.distributed(f.group, sat(f.sub, ctx))
        if isinstance(f, C):
            return self.common(f.group, sat(f.sub, ctx))
        if isinstance(f, LocEq):
            lab = ps.local_labels(f.who)
            return lab == lab[ctx[f.var]]
        if isinstance(f, ExistsG):
            out = np.zeros(n, dtype=bool)
            for body in self.bindings(f, ctx).values():
                out |= body
            return out
        raise TypeError(f"not a core formula node: {f!r}")

    def binding_signature(self, f: ExistsG):
        """Agents through which the body of ``f`` observes its bound variable.

        Two bindings with equal local states for all of these agents give the
        body identical satisfaction sets, so only one needs evaluating.
        """
        whos = set()

        def walk(g: Formula) -> None:
            if isinstance(g, LocEq) and g.var == f.var:
                whos.add(g.who)
            elif isinstance(g, ExistsG) and g.var == f.var:
                return
            for c in g.children():
                walk(c)

        walk(f.sub)
        return sorted(whos, key=str)

    def bindings(self, f: ExistsG, ctx: Context) -> dict[int, np.ndarray]:
        """Body satisfaction set per representative binding (least vertex of its class)."""
        whos = self.binding_signature(f)
        if whos:
            labels = np.stack([self.ps.local_labels(w) for w in whos], axis=1)
            _, reps = np.unique(labels, axis=0, return_index=True)
            reps = sorted(int(r) for r in reps)
        else:
            reps = [0] if self.n else []
        out = {}
        for h in reps:
            inner = dict(ctx)
            inner[f.var] = h
            out[h] = self.sat(f.sub, inner)
        return out

    def witness(self, f: ExistsG, ctx: Context, required: np.ndarray) -> int | None:
        """Least vertex whose binding makes the body true on all of ``required``."""
        whos = self.binding_signature(f)
        reps = self.bindings(f, ctx)
        if whos:
            labels = np.stack([self.ps.local_labels(w) for w in whos], axis=1)
            rep_of = {tuple(labels[h]): h for h in reps}
        for h in range(self.n):
            body = reps[rep_of[tuple(labels[h])]] if whos else reps[0]
            if body[required].all():
                return h
        return None

    @property
    def stats(self) -> dict:
        lookups = self.hits + self.misses
        return {
            "cache_entries": len(self.cache),
            "cache_hits": self.hits,
            "cache_misses": self.misses,
            "cache_hit_rate": self.hits / lookups if lookups else 0.0,
        }


def sat_set(ps: ProductSystem, f: Formula, ctx: Context | None = None, memo: bool = True) -> set[int]:
    """Indices of the vertices of ``ps`` satisfying ``f`` (derived forms allowed)."""
    if not is_core(f):
        f = expand_derived(f)
    return {int(v) for v in np.flatnonzero(ModelChecker(ps, memo=memo).sat(f, ctx or {}))}


def common_closure(ps: ProductSystem, group, seed) -> set[int]:
    """Least superset of ``seed`` closed under every member's indistinguishability."""
    if not group:
        raise ValueError("common_closure needs a nonempty group")
    comp = ModelChecker(ps).components(group)
    hit = {int(comp[v]) for v in seed}
    return {int(v) for v in np.flatnonzero(np.isin(comp, list(hit)))} if hit else set()


def check_product(
    ps: ProductSystem, f: Formula, ctx: Context | None = None, checker: ModelChecker | None = None
) -> Verdict:
    """Decide whether ``f`` holds at every initial vertex of ``ps``."""
    ctx = dict(ctx or {})
    started = time.perf_counter()
    if not is_core(f):
        f = expand_derived(f)
    mc = checker or ModelChecker(ps)
    sat = mc.sat(f, ctx)
    init = ps.initial_vertices
    failing = init[~sat[init]]
    verdict = Verdict(holds=not len(failing), product=ps)
    if len(failing):
        verdict.counterexample = int(failing.min())
    elif isinstance(f, ExistsG):
        required = np.zeros(ps.n_vertices, dtype=bool)
        required[init] = True
        h = mc.witness(f, ctx, required)
        if h is not None:
            verdict.witness_bindings = {f.var: h}
    verdict.stats = {
        "profiles": ps.n_profiles,
        "vertices": ps.n_vertices,
        "edges": ps.n_edges,
        **mc.stats,
        "eval_seconds": time.perf_counter() - started,
    }
    return verdict


def check(
    env: Environment,
    cls: str,
    ctx: Context | None,
    f: Formula | str,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> Verdict:
    """Decide whether ``f`` holds at time 0 of every run of the strategy space.

    ``ctx`` maps free variables to vertex indices of the product built for
    ``(env, cls)``; it may be empty when ``f`` is a sentence.
    """
    if isinstance(f, str):
        f = parse_formula(f)
    report = check_well_formed(f, env)
    if not report.ok:
        raise IllFormedFormulaError(report)
    missing = free_variables(f) - set(ctx or {})
    if missing:
        raise UnboundVariableError(missing)
    started = time.perf_counter()
    ps = build_product(env, cls, vertex_cap=vertex_cap)
    built = time.perf_counter() - started
    verdict = check_product(ps, f, ctx)
    verdict.stats["build_seconds"] = built
    verdict.stats["wall_seconds"] = time.perf_counter() - started
    return verdict


__all__ = [
    "Context", "IllFormedFormulaError", "ModelChecker", "UnboundVariableError", "Verdict",
    "check", "check_product", "common_closure", "memo_key", "sat_set",
]
