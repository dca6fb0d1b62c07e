import json

import pytest

from eslcheck import build_product, load_environment

E_BIT = {
    "agents": ["a"],
    "states": ["s0", "s1"],
    "initial": ["s0"],
    "actions": {"a": ["stay", "flip"]},
    "observations": {"a": {"s0": "o", "s1": "o"}},
    "propositions": {"p": ["s1"]},
    "transitions": [
        {"from": "s0", "action": {"a": "stay"}, "to": "s0"},
        {"from": "s0", "action": {"a": "flip"}, "to": "s1"},
        {"from": "s1", "action": {"a": "stay"}, "to": "s1"},
        {"from": "s1", "action": {"a": "flip"}, "to": "s0"},
    ],
}

# same dynamics, but a sees the state
E_OBS = {**E_BIT, "observations": {"a": {"s0": "s0", "s1": "s1"}}}


def two_agent_grid() -> dict:
    """2 agents, 4 states, 2 observation classes and 2 actions each.

    The state is a pair of bits; agent a observes and controls the first bit,
    b the second.  ``go`` sets an agent's bit, ``wait`` keeps it.
    """
    states = ["s00", "s01", "s10", "s11"]
    trans = []
    for s in states:
        for act_a in ("wait", "go"):
            for act_b in ("wait", "go"):
                x = "1" if act_a == "go" else s[1]
                y = "1" if act_b == "go" else s[2]
                trans.append({"from": s, "action": {"a": act_a, "b": act_b}, "to": f"s{x}{y}"})
    return {
        "agents": ["a", "b"],
        "states": states,
        "initial": ["s00"],
        "actions": {"a": ["wait", "go"], "b": ["wait", "go"]},
        "observations": {
            "a": {s: f"x{s[1]}" for s in states},
            "b": {s: f"y{s[2]}" for s in states},
        },
        "propositions": {"p": ["s10", "s11"], "q": ["s01", "s11"], "done": ["s11"]},
        "transitions": trans,
    }


@pytest.fixture
def e_bit_doc():
    return json.loads(json.dumps(E_BIT))


@pytest.fixture
def e_bit():
    return load_environment(json.dumps(E_BIT))


@pytest.fixture
def e_obs():
    return load_environment(json.dumps(E_OBS))


@pytest.fixture
def grid():
    return load_environment(json.dumps(two_agent_grid()))


@pytest.fixture
def bit_product(e_bit):
    return build_product(e_bit, "unif_det")


@pytest.fixture
def e_bit_path(tmp_path):
    path = tmp_path / "e_bit.json"
    path.write_text(json.dumps(E_BIT))
    return path


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
