"""A one-bit environment, end to end.

Agent ``a`` can keep a bit (``stay``) or toggle it (``flip``) but cannot see
it.  We build the strategy space, look at its states, and ask a few questions.
"""

# %%
from pathlib import Path

from eslcheck import build_product, check, load_environment, parse_formula, sat_set

HERE = Path(__file__).parent
env = load_environment((HERE / "data" / "e_bit.json").read_text())
print("agents:", env.agents, "states:", env.states, "initial:", env.initial)

# %% [markdown]
# Since ``a`` observes the same symbol everywhere, a uniform deterministic
# strategy picks one action for the whole run.  The product pairs each
# environment state with the profile in force; only reachable pairs are kept.

# %%
ps = build_product(env, "unif-det")
for v in range(ps.n_vertices):
    print(v, ps.describe(v), "->", [int(w) for w in ps.successors(v)])

# %% [markdown]
# ``(s1, stay)`` never shows up: staying in ``s0`` keeps you there.

# %%
for text in ["p", "EF p", "K a p", "exists x . D{}(loc({sigma(a)},x) -> AG ~p)"]:
    got = sorted(sat_set(ps, parse_formula(text)))
    print(f"{text:48s} {[ps.describe(v) for v in got]}")

# %% [markdown]
# Model checking asks whether a formula holds at every initial vertex.  ``EF p``
# fails because the ``stay`` strategy never reaches ``p``; the counterexample
# names that vertex.  Quantifying over global states lets us say instead that
# *some* strategy of ``a`` guarantees ``EF p``.

# %%
v = check(env, "unif-det", None, "EF p")
print("EF p:", v.holds, "counterexample", v.describe(v.counterexample))

v = check(env, "unif-det", None, "exists x . D{}(loc({sigma(a)},x) -> EF p)")
print("some strategy reaches p:", v.holds, "witness", v.describe(v.witness_bindings["x"]))

# %% [markdown]
# Richer classes allow nondeterministic choices.  Under ``{stay,flip}`` a run
# may flip or not, so ``p`` is reached on some paths but not on all of them.

# %%
big = build_product(env, "all")
print("profiles:", big.n_profiles, "vertices:", big.n_vertices, "edges:", big.n_edges)
print("AF p holds at", len(sat_set(big, parse_formula("AF p"))), "of", big.n_vertices, "vertices")
