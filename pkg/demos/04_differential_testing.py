"""Cross-checking the checker against a brute-force oracle.

The oracle rebuilds the strategy space from scratch on name-based points
and evaluates every operator literally.  Random environments and formulas
are drawn from a seed, so any disagreement replays exactly.
"""

# %%
import collections

from eslcheck.formula import unparse
from eslcheck.oracle import (
    FormulaBounds, GenBounds, coalition_cross_check, random_environment, random_formula,
    run_differential,
)

report = run_differential(seed=1, cases=120)
print(report.summary())

# %% [markdown]
# A few of the generated instances, with both verdicts.

# %%
for case in report.cases[:6]:
    print(f"{case.cls:9s} {len(case.env.states)} states  checker={case.checker_holds!s:5s} "
          f"oracle={case.oracle_holds!s:5s}  {unparse(case.formula)}")

print(collections.Counter(c.checker_holds for c in report.cases))

# %% [markdown]
# The coalition macro ``exists x . C{G}(loc(sigma(H), x) -> f)`` can also be
# characterised as a greatest fixpoint.  The cross-check compares both
# characterisations point by point.

# %%
tally = collections.Counter()
for seed in range(40):
    env = random_environment(GenBounds(max_states=3, max_agents=2, seed=seed))
    f = random_formula(env, FormulaBounds(depth=2, max_quantifiers=0, seed=seed))
    r = coalition_cross_check(env, "unif-det", env.agents[:1], env.agents, f)
    tally["single initial" if r.single_initial else "several initial", bool(r.discrepancies)] += 1
for (kind, bad), n in sorted(tally.items()):
    print(f"{kind:16s} discrepancies={bad!s:5s} instances={n}")
