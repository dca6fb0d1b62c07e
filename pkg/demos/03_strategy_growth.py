"""How fast the strategy space grows.

Profiles multiply across agents, and per agent the count is exponential in
the number of states (or observation classes, for uniform strategies).
"""

# %%
import time

import numpy as np

from eslcheck import build_product, check
from eslcheck.envmodel import Environment, Transition
from eslcheck.stratspace import CLASSES, count_profiles


def ring(n_states: int, n_agents: int, n_obs: int = 2) -> Environment:
    """Agents jointly push a token around a ring; any ``go`` advances it."""
    states = tuple(f"s{k}" for k in range(n_states))
    agents = tuple("abcd"[:n_agents])
    actions = {a: ("idle", "go") for a in agents}
    observations = {a: {s: f"o{k % n_obs}" for k, s in enumerate(states)} for a in agents}
    joints = [()]
    for a in agents:
        joints = [j + (x,) for j in joints for x in actions[a]]
    trans = tuple(
        Transition(s, j, states[(k + ("go" in j)) % n_states])
        for k, s in enumerate(states) for j in joints
    )
    return Environment(agents, states, ("s0",), actions, observations, {"home": frozenset({"s0"})}, trans)


# %% [markdown]
# Closed-form profile counts for two agents.

# %%
print("states " + " ".join(f"{c:>12s}" for c in CLASSES))
for n in range(1, 6):
    env = ring(n, 2)
    print(f"{n:6d} " + " ".join(f"{count_profiles(env, c):12d}" for c in CLASSES))

# %% [markdown]
# Building and checking the unif-det product is cheap while the profile
# count stays small.  The vertex count is bounded by states times profiles.

# %%
rows = []
for n_agents in (1, 2, 3):
    for n in (2, 4, 6):
        env = ring(n, n_agents, n_obs=2)
        started = time.perf_counter()
        v = check(env, "unif-det", None, "exists x . AG (loc(sigma(a), x) -> EF home)")
        rows.append((n_agents, n, v.stats["profiles"], v.stats["vertices"], time.perf_counter() - started))
rows = np.array(rows)
for agents, n, prof, verts, secs in rows:
    print(f"agents={int(agents)} states={int(n)} profiles={int(prof):4d} vertices={int(verts):5d} {secs * 1e3:7.1f} ms")

# %% [markdown]
# Unrestricted strategies blow up first.

# %%
env = ring(3, 2, n_obs=1)
for cls in CLASSES:
    ps = build_product(env, cls)
    print(f"{cls:9s} profiles={ps.n_profiles:5d} vertices={ps.n_vertices:6d}")
