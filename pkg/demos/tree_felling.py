"""
Cutting and composing pictures: felling a tree
==============================================

No single memory shows how to fell a tree safely.  The pole comes from
the tent picture, the rope from the hammock picture; both are cut out and
composed with the situation, in either order.
"""

# %%
from presem import compare_orders, evaluate, load, scenarios

trees = load(scenarios.path("tree_felling"))
v = evaluate(trees)
print(v.status.value, v.chosen, v.order)
print([s for s in v.explanation if s["step"] in ("cut", "compose")])

# %%
print(v.plan.find("pole-part"), v.plan.find("rope-part"))

# %%
# Both orders give the same result here.
c = compare_orders(trees)
print(c.agree, [(order, r.status.value) for order, r in c.results])

# %%
# Now the pole stands in sand and the rope's tree on firm forest floor.
# Whichever fragment is composed first decides what the ground is like.
soft = compare_orders(load(scenarios.path("tree_felling_soft")))
print(soft.agree)
for order, r in soft.results:
    print(order, sorted(str(f) for f in r.outcome_features if "soft" in f.name))
