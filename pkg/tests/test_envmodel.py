import json

import pytest
from hypothesis import given, settings, strategies as st

from eslcheck.envmodel import (
    DuplicateNameError, EnvironmentFileError, EnvironmentReferenceError, EnvironmentSyntaxError,
    UnknownAgentError, add_self_loops, dump_environment, load_environment, observation_classes,
    validate_environment,
)
from eslcheck.oracle import GenBounds, random_environment


def test_load_e_bit(e_bit):
    assert e_bit.states == ("s0", "s1")
    assert len(e_bit.actions["a"]) == 2
    assert e_bit.initial == ("s0",)
    assert e_bit.propositions["p"] == frozenset({"s1"})
    assert e_bit.successors()[("s0", ("flip",))] == ["s1"]


def test_empty_initial_rejected(e_bit_doc):
    e_bit_doc["initial"] = []
    with pytest.raises(EnvironmentFileError, match="initial must be nonempty"):
        load_environment(json.dumps(e_bit_doc))


@pytest.mark.parametrize(
    "mutate, exc",
    [
        (lambda d: d["agents"].append("a"), DuplicateNameError),
        (lambda d: d["transitions"].append({"from": "s0", "action": {"a": "jump"}, "to": "s1"}),
         EnvironmentReferenceError),
        (lambda d: d["transitions"].append({"from": "s9", "action": {"a": "stay"}, "to": "s1"}),
         EnvironmentReferenceError),
        (lambda d: d["observations"].update({"z": {"s0": "o"}}), EnvironmentReferenceError),
        (lambda d: d.update({"extra": 1}), EnvironmentFileError),
        (lambda d: d.pop("propositions"), EnvironmentFileError),
        (lambda d: d["propositions"].update({"AX": []}), EnvironmentFileError),
        (lambda d: d["transitions"].append({"from": "s0", "action": {}, "to": "s1"}),
         EnvironmentFileError),
    ],
)
def test_structural_errors(e_bit_doc, mutate, exc):
    mutate(e_bit_doc)
    with pytest.raises(exc):
        load_environment(json.dumps(e_bit_doc))


def test_syntax_error_has_position():
    with pytest.raises(EnvironmentSyntaxError) as info:
        load_environment('{"agents": [}')
    assert info.value.line == 1


def test_round_trip(e_bit, grid):
    for env in (e_bit, grid):
        again = load_environment(dump_environment(env))
        assert again == env
        assert json.loads(dump_environment(again)) == json.loads(dump_environment(env))


def test_validate_ok(e_bit):
    assert validate_environment(e_bit).ok


def test_missing_transition_is_seriality_violation(e_bit_doc):
    e_bit_doc["transitions"] = [t for t in e_bit_doc["transitions"]
                                if not (t["from"] == "s0" and t["action"]["a"] == "flip")]
    report = validate_environment(load_environment(json.dumps(e_bit_doc)))
    assert [(v.rule, v.element) for v in report.violations] == [("seriality", ("s0", ("flip",)))]


def test_self_loop_completion(e_bit_doc):
    e_bit_doc["transitions"] = e_bit_doc["transitions"][:1]
    env = load_environment(json.dumps(e_bit_doc), complete_self_loops=True)
    assert validate_environment(env).ok
    assert env.successors()[("s1", ("flip",))] == ["s1"]
    assert add_self_loops(env) == env


def test_missing_observation(e_bit_doc):
    del e_bit_doc["observations"]["a"]["s1"]
    report = validate_environment(load_environment(json.dumps(e_bit_doc)))
    assert [(v.rule, v.element) for v in report.violations] == [("observation totality", ("a", "s1"))]


def test_observation_classes(e_bit, e_obs):
    assert observation_classes(e_bit, "a") == [("s0", "s1")]
    assert observation_classes(e_obs, "a") == [("s0",), ("s1",)]
    with pytest.raises(UnknownAgentError):
        observation_classes(e_bit, "z")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 4), st.integers(1, 3))
def test_generated_envs_valid_and_serial(seed, n_states, n_agents):
    env = random_environment(GenBounds(max_states=n_states, max_agents=n_agents, seed=seed))
    assert validate_environment(env).ok
    # seriality, re-checked by brute force
    for s in env.states:
        for joint in env.joint_actions():
            assert any(t.source == s and t.action == joint for t in env.transitions)
    for a in env.agents:
        classes = observation_classes(env, a)
        flat = [s for c in classes for s in c]
        assert sorted(flat) == sorted(env.states)
        assert all(len({env.observe(a, s) for s in c}) == 1 for c in classes)
        assert len({env.observe(a, c[0]) for c in classes}) == len(classes)
