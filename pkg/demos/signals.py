"""
Paths, amplification and the Tweety diamond
===========================================

Signals are sums over paths.  Two weak routes can beat a direct inhibitory
link, and nothing prefers the "more specific" edge.
"""

# %%
from presem import effective_signal, enumerate_paths, load, run, scenarios
from presem.paths import steady_state_equivalence_check

amp = load(scenarios.path("amplifier")).graph()
for p in enumerate_paths(amp, "N1", "N4", 3):
    print(p, p.sign * p.strength)

r = effective_signal(amp, "N1", "N4")
print(r.direct_contribution, r.indirect_contribution, r.total)

# %%
# Dynamically N4 needs two ticks: N2 and N3 must fire first.
trace = run(amp, {"N1"})
for tick, firing in enumerate(trace.snapshots):
    print(tick, sorted(firing))
print(steady_state_equivalence_check(amp, "N1", "N4").value)

# %%
# Penguins are birds, birds fly, penguins do not fly: the paths cancel.
tweety = load(scenarios.path("tweety")).graph()
print(effective_signal(tweety, "penguin", "fly").total)
print("fly" in run(tweety, {"penguin"}).final)

# %%
# Tweety reaches "bird" only through the 0.6 detour, so is less of a bird.
print(effective_signal(tweety, "tweety", "bird").total,
      effective_signal(tweety, "raven", "bird").total)

# %%
# Where the static sum and the dynamics part ways: c fires once however
# many routes reach it, so d sees 1 - 1 although two paths arrive.
from presem import NeuronGraph, Polarity, Synapse
from presem.substrate import Neuron

E, I = Polarity.EXCITATORY, Polarity.INHIBITORY
g = NeuronGraph([Neuron(x) for x in "sacd"],
                [Synapse("s", "a", E, 1), Synapse("a", "c", E, 1), Synapse("s", "c", E, 1),
                 Synapse("c", "d", E, 1), Synapse("s", "d", I, 1)])
print(effective_signal(g, ["s"], ["d"]).total, "d" in run(g, {"s"}).final)
print(steady_state_equivalence_check(g, ["s"], ["d"]).value)
