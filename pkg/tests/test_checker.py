import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eslcheck import check, common_closure, parse_formula, sat_set
from eslcheck.checker import IllFormedFormulaError, ModelChecker, UnboundVariableError, memo_key
from eslcheck.formula import (
    AG, AX, EF, EX, And, Base, C, D, Everyone, ExistsG, Implies, Knows, LocEq, LocGroup, Not, Prop,
    Sigma, expand_derived,
)
from eslcheck.oracle import FormulaBounds, GenBounds, random_environment, random_formula
from eslcheck.stratspace import CLASSES, build_product


def S(ps, text, ctx=None):
    return sat_set(ps, parse_formula(text), ctx)


def test_e_bit_sat_sets(bit_product):
    ps = bit_product
    assert S(ps, "p") == {2}
    assert S(ps, "EF p") == {1, 2}
    assert S(ps, "K a p") == set()
    assert S(ps, "exists x . D{}(loc({sigma(a)},x) -> AG ~p)") == {0, 1, 2}
    assert S(ps, "C{} p") == {2}
    assert S(ps, "D{} EF true") == {0, 1, 2}
    assert S(ps, "loc(sigma(a), x)", {"x": 1}) == {1, 2}


def test_common_closure(bit_product):
    assert common_closure(bit_product, {Base("a")}, {0}) == {0, 1, 2}
    assert common_closure(bit_product, {Sigma("a")}, {1}) == {1, 2}
    with pytest.raises(ValueError):
        common_closure(bit_product, set(), {0})


def test_e_bit_verdicts(e_bit):
    v = check(e_bit, "unif_det", None, "EF p")
    assert not v.holds and v.describe(v.counterexample) == "(s0, a:stay)"
    v = check(e_bit, "unif_det", None, "exists x . D{}(loc({sigma(a)},x) -> EF p)")
    assert v.holds and v.describe(v.witness_bindings["x"]) in {"(s0, a:flip)", "(s1, a:flip)"}
    assert check(e_bit, "unif_det", None, "exists x . loc(sigma(a), x)").holds
    assert v.stats["profiles"] == 2 and v.stats["vertices"] == 3 and v.stats["edges"] == 3


def test_check_errors(e_bit):
    with pytest.raises(UnboundVariableError):
        check(e_bit, "all", None, "loc(a, x)")
    with pytest.raises(IllFormedFormulaError):
        check(e_bit, "all", None, "q")


def test_context_argument(e_bit):
    # x bound to (s0, flip): every flip vertex shares sigma(a) with it
    assert check(e_bit, "unif_det", {"x": 1}, "loc(sigma(a), x) | AG ~p").holds
    assert not check(e_bit, "unif_det", {"x": 1}, "loc(sigma(a), x)").holds


def test_memo_keys():
    p, lx = parse_formula("p"), parse_formula("loc(a, x)")
    assert memo_key(p, {"x": 3}) == (p, ())
    assert memo_key(lx, {"x": 3, "y": 5}) == (lx, (("x", 3),))


def test_shared_subformulas_hit_cache(bit_product):
    mc = ModelChecker(bit_product)
    mc.sat(expand_derived(parse_formula("EF p & (EF p | AX EF p)")))
    assert mc.hits >= 2


def _instance(seed, cls, depth=3):
    env = random_environment(GenBounds(max_states=3, max_agents=2, seed=seed))
    ps = build_product(env, cls)
    f = expand_derived(random_formula(env, FormulaBounds(depth=depth, max_quantifiers=1, seed=seed + 1)))
    return env, ps, f


INSTANCES = settings(max_examples=60, deadline=None)
SEEDS = st.integers(0, 2**32)


@INSTANCES
@given(SEEDS, st.sampled_from(CLASSES))
def test_dualities(seed, cls):
    _, ps, f = _instance(seed, cls)
    mc = ModelChecker(ps)
    allv = np.ones(ps.n_vertices, dtype=bool)
    sat = lambda g: mc.sat(expand_derived(g))
    assert np.array_equal(sat(AX(f)), allv & ~sat(EX(Not(f))))
    assert np.array_equal(sat(AG(f)), allv & ~sat(EF(Not(f))))


@INSTANCES
@given(SEEDS, st.sampled_from(CLASSES), st.data())
def test_d_redundancy(seed, cls, data):
    env, ps, f = _instance(seed, cls)
    pool = [Base(a) for a in env.agents] + [Sigma(a) for a in env.agents]
    group = frozenset(data.draw(st.lists(st.sampled_from(pool), min_size=1, max_size=3)))
    lhs = expand_derived(D(group, f))
    rhs = expand_derived(ExistsG("_g", And(LocGroup(group, "_g"), D(frozenset(), Implies(LocGroup(group, "_g"), f)))))
    mc = ModelChecker(ps)
    assert np.array_equal(mc.sat(lhs), mc.sat(rhs))


@INSTANCES
@given(SEEDS, st.sampled_from(CLASSES))
def test_knowledge_axioms(seed, cls):
    env, ps, f = _instance(seed, cls)
    mc = ModelChecker(ps)
    sat = lambda g: mc.sat(expand_derived(g))
    group = frozenset([Base(env.agents[0]), Sigma(env.agents[-1])])
    truth = sat(f)
    c, e = sat(C(group, f)), sat(Everyone(group, f))
    for w in group:
        k = sat(Knows(w, f))
        assert not (k & ~truth).any()  # veridicality
        assert not (e & ~k).any()
    assert not (c & ~e).any()
    # C is the greatest fixpoint of X = E(f & X)
    assert np.array_equal(c, sat(Everyone(group, And(f, C(group, f)))))


@INSTANCES
@given(SEEDS, st.sampled_from(CLASSES))
def test_exists_monotone(seed, cls):
    env, ps, f = _instance(seed, cls)
    body = And(f, LocEq(Sigma(env.agents[0]), "z"))
    mc = ModelChecker(ps)
    ex = mc.sat(ExistsG("z", body))
    for h in range(ps.n_vertices):
        assert not (mc.sat(body, {"z": h}) & ~ex).any()
    assert np.array_equal(mc.sat(ExistsG("z", f)), mc.sat(f))


@INSTANCES
@given(SEEDS, st.sampled_from(CLASSES))
def test_memo_transparent(seed, cls):
    _, ps, f = _instance(seed, cls, depth=4)
    assert np.array_equal(ModelChecker(ps, memo=True).sat(f), ModelChecker(ps, memo=False).sat(f))


@INSTANCES
@given(SEEDS, st.sampled_from(CLASSES))
def test_fixpoint_traces(seed, cls):
    _, ps, f = _instance(seed, cls, depth=4)
    mc = ModelChecker(ps, fixpoint_trace=True)
    mc.sat(f)
    for trace in mc.fixpoint_trace:
        assert all(a < b for a, b in zip(trace, trace[1:]))
        assert len(trace) <= ps.n_vertices + 1


def test_witness_is_none_without_uniform_binding(e_bit):
    v = check(e_bit, "unif_det", None, "exists x . loc(sigma(a), x)")
    assert v.holds and v.witness_bindings is None


def test_counterexample_is_failing_initial_vertex(grid):
    v = check(grid, "unif_det", None, "AF done")
    ps = v.product
    assert not v.holds
    assert v.counterexample in ps.initial_vertices
    assert v.counterexample not in sat_set(ps, parse_formula("AF done"))
    assert v.counterexample == min(set(ps.initial_vertices.tolist()) - sat_set(ps, parse_formula("AF done")))


def test_prop_lookup_uses_state(grid):
    ps = build_product(grid, "unif_det")
    got = sat_set(ps, Prop("done"))
    assert got == {v for v in range(ps.n_vertices) if grid.states[ps.vertex_state[v]] == "s11"}
