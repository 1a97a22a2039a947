"""
Learning an association, hiding a contradiction
===============================================

Hearing a roar while seeing a tiger strengthens roar -> tiger until the
roar alone calls up the tiger.  Attention, separately, can make an
impossible picture look coherent.
"""

# %%
from presem import (ALL_ON, Episode, PlasticityConfig, accessibility, consistency_report,
                    delta_update, episodes_to_activation, group_activation, load, run, scenarios)

tiger = load(scenarios.path("tiger"))
g = tiger.graph()
cfg = PlasticityConfig(eta=0.2)
print("predicted episodes:", episodes_to_activation(g.theta, 0.5, cfg.eta))

n = 0
while not group_activation(run(g, {"roar"}).final, g.group("tiger")):
    g = delta_update(g, Episode({"roar", "tiger"}), cfg)
    n += 1
print("observed episodes:", n, "weight now", g.weight("roar", "tiger"))

# %%
# The trained cue now ranks the tiger picture above the monkeys.
cue = tiger.picture_index()["roar"]
print([(p.id, round(s, 3)) for p, s in accessibility(tiger.memory(), g, cue)])

# %%
# A flying elefant: heavy bodies and flight inhibit each other.
fe = load(scenarios.path("flying_elefant"))
fg = fe.graph()
pic = fe.picture_index()["flying-elefant"]
print(consistency_report(pic, ALL_ON, fg))
print(consistency_report(pic, fe.mask(fg), fg))
