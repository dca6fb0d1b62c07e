import json
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eslcheck.formula import Base, Env, Sigma
from eslcheck.oracle import GenBounds, random_environment
from eslcheck.stratspace import (
    CLASSES, ProductTooLarge, StrategyClassError, build_product, count_agent_strategies,
    count_profiles, enumerate_agent_strategies, enumerate_profiles, locals_equal, normalize_class,
    product_to_json,
)


@pytest.mark.parametrize("cls, n", [("unif_det", 2), ("unif-det", 2), ("det", 4), ("unif", 3), ("all", 9)])
def test_e_bit_counts(e_bit, cls, n):
    assert count_agent_strategies(e_bit, "a", cls) == n
    assert len(list(enumerate_agent_strategies(e_bit, "a", cls))) == n
    assert count_profiles(e_bit, cls) == n


def test_unif_det_strategies_are_constant(e_bit):
    got = [s.choice for s in enumerate_agent_strategies(e_bit, "a", "unif_det")]
    assert got == [(frozenset({"stay"}),) * 2, (frozenset({"flip"}),) * 2]


def test_canonical_order(e_obs):
    rows = [s.choice for s in enumerate_agent_strategies(e_obs, "a", "det")]
    stay, flip = frozenset({"stay"}), frozenset({"flip"})
    assert rows == [(stay, stay), (stay, flip), (flip, stay), (flip, flip)]


def test_bad_class(e_bit):
    with pytest.raises(StrategyClassError):
        normalize_class("uniform")


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_enumeration_matches_counts_and_inclusions(seed):
    env = random_environment(GenBounds(max_states=3, max_agents=2, max_actions_per_agent=3, seed=seed))
    for a in env.agents:
        by_class = {}
        for cls in CLASSES:
            strategies = list(enumerate_agent_strategies(env, a, cls))
            assert len(strategies) == count_agent_strategies(env, a, cls)
            assert len(set(strategies)) == len(strategies)
            by_class[cls] = {s.choice for s in strategies}
        assert by_class["unif_det"] <= by_class["unif"] & by_class["det"]
        assert by_class["unif"] <= by_class["all"]
        assert by_class["det"] <= by_class["all"]
    assert sum(1 for _ in enumerate_profiles(env, "unif_det")) == count_profiles(env, "unif_det")


def test_e_bit_product(bit_product):
    ps = bit_product
    assert [ps.describe(v) for v in range(ps.n_vertices)] == [
        "(s0, a:stay)", "(s0, a:flip)", "(s1, a:flip)",
    ]
    assert sorted(ps.edges()) == [(0, 0), (1, 2), (2, 1)]
    assert ps.n_profiles == 2
    assert ps.find("s1", (0,)) is None


def test_e_bit_locals(bit_product):
    ps = bit_product
    g, h = ps.find("s0", (0,)), ps.find("s1", (1,))
    assert locals_equal(ps, g, h, Base("a"))
    assert not locals_equal(ps, g, h, Sigma("a"))
    assert not locals_equal(ps, g, h, Env())


def test_vertex_cap(e_bit):
    with pytest.raises(ProductTooLarge):
        build_product(e_bit, "all", vertex_cap=4)


def test_invalid_env_rejected(e_bit_doc):
    from eslcheck import load_environment

    e_bit_doc["transitions"] = e_bit_doc["transitions"][:2]
    with pytest.raises(ValueError, match="seriality"):
        build_product(load_environment(json.dumps(e_bit_doc)), "all")


def test_product_json(bit_product):
    doc = product_to_json(bit_product)
    assert doc["initial"] == [0, 1]
    assert len(doc["vertices"]) == 3 and len(doc["edges"]) == 3


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(CLASSES))
def test_product_invariants(seed, cls):
    env = random_environment(GenBounds(max_states=3, max_agents=2, seed=seed))
    ps = build_product(env, cls)
    n = ps.n_vertices
    # serial and profile preserving
    assert all(len(ps.successors(v)) for v in range(n))
    for g, h in ps.edges():
        assert ps.vertex_profile[g] == ps.vertex_profile[h]
    # no duplicate vertices
    assert len(ps.index) == n
    # initial vertices cover every (initial state, profile) pair
    assert len(ps.initial_vertices) == len(env.initial) * ps.n_profiles
    # every vertex replays from an initial one along real moves
    succ = env.successors()
    initial = set(ps.initial_vertices.tolist())
    for v in range(n):
        path = ps.path_to(v)
        assert path[0] in initial
        for x, y in zip(path, path[1:]):
            assert y in ps.successors(x)
            prof = ps.profile(x)
            state = env.states[ps.vertex_state[x]]
            joints = [j for j in env.joint_actions()
                      if all(act in prof[a].enabled(state) for a, act in zip(env.agents, j))]
            assert any(env.states[ps.vertex_state[y]] in succ[(state, j)] for j in joints)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_locals_equal_is_equivalence(seed):
    env = random_environment(GenBounds(max_states=3, max_agents=2, seed=seed))
    ps = build_product(env, "det")
    rng = random.Random(seed)
    whos = [Env()] + [Base(a) for a in env.agents] + [Sigma(a) for a in env.agents]
    for _ in range(30):
        g, h, k = (rng.randrange(ps.n_vertices) for _ in range(3))
        for w in whos:
            assert locals_equal(ps, g, g, w)
            assert locals_equal(ps, g, h, w) == locals_equal(ps, h, g, w)
            if locals_equal(ps, g, h, w) and locals_equal(ps, h, k, w):
                assert locals_equal(ps, g, k, w)


def test_grid_scale(grid):
    ps = build_product(grid, "unif-det")
    assert ps.n_profiles == 16
    assert ps.n_vertices <= 64
    assert np.all(np.diff(ps.succ_indptr) > 0)
