"""
If it were to rain, would I take an umbrella?
=============================================

Three present situations, five remembered pictures.  The engine retrieves
pictures that mention the query, drops the ones that clash with the
situation, ranks the rest by the goals, composes the winner with the
situation and lets the network settle.
"""

# %%
from presem import evaluate, load, scenarios

umbrella = load(scenarios.path("umbrella"))
print([p.id for p in umbrella.memory()])

# %%
# Case 1: calm, hands free.  P5 (a raven with cheese) is never considered,
# P3 and P4 clash with the weather or the hands, P1 loses to P2 on goals.
v = evaluate(umbrella, case="1")
print(v.status.value, v.chosen)
for step in v.explanation:
    print(step)

# %%
# Case 2: strong wind.  Only the torn-umbrella picture fits, and its goal
# score is negative, so the conditional fails even though the umbrella is used.
v = evaluate(umbrella, case="2")
print(v.status.value, next(s for s in v.explanation if s["step"] == "goal-check"))

# %%
# Case 3: hands full.  The only fitting picture leaves the umbrella at home.
v = evaluate(umbrella, case="3")
print(v.status.value, sorted(str(f) for f in v.outcome_features))

# %%
# The final firing record, tick by tick.
for tick, firing in enumerate(v.trace.snapshots):
    print(tick, sorted(firing))
