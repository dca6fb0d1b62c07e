"""Knowledge about strategies in a two-agent grid.

The state is a pair of bits.  Agent ``a`` sees and drives the first bit,
``b`` the second; ``go`` sets an agent's bit for good.  We ask what each agent
knows, what becomes common knowledge, and what a coalition can guarantee.
"""

# %%
from pathlib import Path

from eslcheck import build_product, check, load_environment, parse_formula, sat_set
from eslcheck.formula import expand_derived, unparse

env = load_environment((Path(__file__).parent / "data" / "grid.json").read_text())
ps = build_product(env, "unif-det")
print(ps.n_profiles, "profiles,", ps.n_vertices, "reachable vertices")

# %% [markdown]
# ``K a p`` asks whether ``a`` knows its own bit is set.  Agent ``a`` sees its
# bit, so knowledge and truth coincide.  ``K a q`` is about ``b``'s bit, which
# ``a`` cannot see, so ``a`` never knows it.

# %%
for text in ["p", "K a p", "q", "K a q", "K sigma(b) AF q"]:
    print(f"{text:18s}", len(sat_set(ps, parse_formula(text))), "vertices")

# %% [markdown]
# ``sigma(b)`` is a strategic agent whose local state is ``b``'s strategy.
# Knowing the strategy is enough to know whether ``q`` will eventually hold.

# %%
print(check(env, "unif-det", None, "K sigma(b) AF q | K sigma(b) AG ~q").holds)

# %% [markdown]
# Coalition operators wrap a quantifier over strategies.  ``<<a>>_C{a,b} AF p``
# says: a has a strategy such that, among everyone, it is common knowledge
# that playing it yields ``AF p``.  Its expansion is plain ESL.

# %%
f = parse_formula("<<a>>_C{a,b} AF p")
print(unparse(expand_derived(f)))
v = check(env, "unif-det", None, f)
print("holds:", v.holds)

# %%
for text in ["<<a>>_C{b} AF p", "<<a>>_C{b} AF q", "<<a,b>>_D{} AF done", "<<a>>_D{} AF done"]:
    print(f"{text:22s}", check(env, "unif-det", None, text).holds)

# %% [markdown]
# The last line fails: ``a`` alone cannot make ``done`` happen, because it
# needs ``b`` to set its own bit as well.
