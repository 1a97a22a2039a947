"""Acceptance criteria 1-10, one test each.

Every test records a one-line PASS/FAIL verdict; the lines are printed in
the terminal summary of a pytest run, and by running this file directly::

    python3 tests/test_acceptance.py
"""
import hashlib
import itertools
import json
import random
import shutil
import subprocess
import sys
import time

from presem import scenarios
from presem.counterfactual import evaluate
from presem.dsl import load, parse, serialize
from presem.learning import Episode, PlasticityConfig, delta_update, episodes_to_activation
from presem.paths import (Equivalence, effective_signal, enumerate_paths, in_equivalence_class,
                          steady_state_equivalence_check)
from presem.pictures import Feature, Picture, consistency_report, focus_ids
from presem.scenario import ScenarioError
from presem.substrate import (ALL_ON, GroupSpec, LinkSpec, Neuron, NeuronGraph, Polarity,
                              Synapse, build_graph, group_activation, run)

from scenario_gen import mutate, random_scenario, shuffled_declarations

EXC, INH = Polarity.EXCITATORY, Polarity.INHIBITORY
F = Feature.parse

RESULTS: dict[int, str] = {}


def record(n, ok, detail, started):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'} ({time.perf_counter() - started:.2f}s) {detail}"
    RESULTS[n] = line
    print(line)
    return ok


def presem_cmd():
    exe = shutil.which("presem")
    return [exe] if exe else [sys.executable, "-m", "presem.cli"]


def run_cli(*args):
    return subprocess.run([*presem_cmd(), *args], capture_output=True, check=False)


def amplifier(with_n3=True):
    links = [LinkSpec("N1", "N2", EXC, 1), LinkSpec("N2", "N4", EXC, 1),
             LinkSpec("N1", "N4", INH, 1)]
    if with_n3:
        links += [LinkSpec("N1", "N3", EXC, 1), LinkSpec("N3", "N4", EXC, 1)]
    return build_graph([GroupSpec(n) for n in ("N1", "N2", "N3", "N4")], links)


def indexed_graph(n, edges):
    ids = [f"n{i}" for i in range(n)]
    return NeuronGraph([Neuron(x, x) for x in ids],
                       [Synapse(ids[a], ids[b], p, w) for a, b, p, w in edges])


# -- 1 ---------------------------------------------------------------------------------

def check_umbrella():
    docs = {}
    for case in "123":
        out = run_cli("run", "umbrella.psm", "--case", case)
        assert out.returncode == 0, out.stderr
        docs[case] = json.loads(out.stdout)
    problems = []
    want = {"1": "holds", "2": "fails", "3": "fails"}
    for case, doc in docs.items():
        if doc["status"] != want[case]:
            problems.append(f"case {case} status {doc['status']}")
        p5 = [s for s in doc["explanation"] if s.get("picture") == "P5"]
        if not any(s.get("reason") == "irrelevant" for s in p5):
            problems.append(f"case {case}: P5 not irrelevant")
    if not {"use-umbrella", "dry"} <= set(docs["1"]["outcome_features"]):
        problems.append("case 1 outcome lacks use-umbrella/dry")
    if "wet" not in docs["3"]["outcome_features"]:
        problems.append("case 3 outcome lacks wet")
    far = {s["picture"]: s["distance"] for s in docs["1"]["explanation"]
           if s.get("reason") == "too-distant"}
    if far != {"P3": 1, "P4": 2}:
        problems.append(f"case 1 too-distant {far}")
    return not problems, "; ".join(problems) or "holds/fails/fails, P5 irrelevant, P3@1 P4@2"


def test_criterion_1_umbrella():
    t = time.perf_counter()
    ok, detail = check_umbrella()
    assert record(1, ok, detail, t), detail


# -- 2 ---------------------------------------------------------------------------------

def check_amplifier():
    r = effective_signal(amplifier(), "N1", "N4")
    static = (r.direct_contribution, r.indirect_contribution, r.total) == (-1, 2, 1)
    t = run(amplifier(), {"N1"}, max_ticks=10)
    by_two = "N4" in t.snapshots[2]
    cut = run(amplifier(with_n3=False), {"N1"}, max_ticks=10)
    never = all("N4" not in s for s in cut.snapshots)
    net = effective_signal(amplifier(with_n3=False), "N1", "N4").total
    ok = static and by_two and never and net == 0
    return ok, (f"direct {r.direct_contribution:g}, indirect {r.indirect_contribution:g}, "
                f"total {r.total:g}; N4 at tick 2: {by_two}; without N3 never fires: {never}, "
                f"net {net:g}")


def test_criterion_2_amplifier():
    t = time.perf_counter()
    ok, detail = check_amplifier()
    assert record(2, ok, detail, t), detail


# -- 3 ---------------------------------------------------------------------------------

def check_interruption(graphs=1000, seed=20260101):
    rng = random.Random(seed)
    audited = 0
    for _ in range(graphs):
        n = rng.randint(2, 8)
        edges = [(a, b, rng.choice((EXC, INH)), 1.0)
                 for a in range(n) for b in range(n) if a != b and rng.random() < 0.35]
        g = indexed_graph(n, edges)
        for src, dst in itertools.permutations(g.neurons, 2):
            for p in enumerate_paths(g, [src], [dst], 8):
                audited += 1
                if any(not e.excitatory for e in p.edges[:-1]):
                    return False, f"path {p} passes an inhibitory edge"
                if len(set(p.nodes)) != len(p.nodes):
                    return False, f"path {p} is not simple"
    return True, f"{graphs} graphs, {audited} paths audited, none passes an inhibitory edge"


def test_criterion_3_interruption():
    t = time.perf_counter()
    ok, detail = check_interruption()
    assert record(3, ok, detail, t), detail


# -- 4 ---------------------------------------------------------------------------------

def diamond(specific="penguin"):
    other = "bird" if specific == "penguin" else "penguin"
    return build_graph([GroupSpec("penguin"), GroupSpec("bird"), GroupSpec("fly")],
                       [LinkSpec(specific, other, EXC, 1), LinkSpec(other, "fly", EXC, 1),
                        LinkSpec(specific, "fly", INH, 1)])


def check_inheritance_contrasts():
    rng = random.Random(4)
    failures = []
    # (1) direct links do not necessarily win
    r = effective_signal(amplifier(), "N1", "N4")
    if not (r.indirect_contribution > abs(r.direct_contribution)
            and "N4" in run(amplifier(), {"N1"}).final):
        failures.append("(1)")
    # (2) longer is weaker below unit weight; length alone costs nothing at unit weight
    for _ in range(100):
        k = rng.randint(2, 6)
        ws = [rng.uniform(0.05, 0.95) for _ in range(k)]
        g = indexed_graph(k + 1, [(i, i + 1, EXC, w) for i, w in enumerate(ws)])
        full = enumerate_paths(g, ["n0"], [f"n{k}"], k)[0].strength
        if not all(full < enumerate_paths(g, ["n0"], [f"n{j}"], j)[0].strength for j in range(1, k)):
            failures.append("(2a)")
            break
        unit = indexed_graph(k + 1, [(i, i + 1, EXC, 1.0) for i in range(k)])
        if effective_signal(unit, ["n0"], [f"n{k}"], k).total != 1.0:
            failures.append("(2b)")
            break
    # (3) with unit weights, positive contribution counts positive paths
    for _ in range(200):
        n = rng.randint(2, 6)
        g = indexed_graph(n, [(a, b, rng.choice((EXC, INH)), 1.0) for a in range(n)
                              for b in range(n) if a != b and rng.random() < 0.35])
        paths = enumerate_paths(g, ["n0"], ["n1"], 6)
        pos = sum(p.strength for p in paths if p.sign > 0)
        rep = effective_signal(g, ["n0"], ["n1"], 6)
        if pos != rep.path_count_positive:
            failures.append("(3)")
            break
    # (4) no specificity: the diamond nets 0 whichever node is the specific one
    a = effective_signal(diamond("penguin"), "penguin", "fly")
    b = effective_signal(diamond("bird"), "bird", "fly")
    if not (a.total == 0 == b.total and a == b and "fly" not in run(diamond(), {"penguin"}).final):
        failures.append("(4)")
    # (5) an inhibitory edge ends a path
    g = indexed_graph(3, [(0, 1, INH, 1), (1, 2, EXC, 1)])
    if enumerate_paths(g, ["n0"], ["n2"], 4):
        failures.append("(5)")
    # (6) one report per analysis, one verdict per evaluation
    umbrella = load(scenarios.path("umbrella"))
    reports = [effective_signal(diamond(), "penguin", "fly")]
    verdicts = [evaluate(umbrella, case="1")]
    if len(reports) != 1 or len(verdicts) != 1 or not hasattr(verdicts[0], "status"):
        failures.append("(6)")
    detail = f"failed {' '.join(failures)}" if failures else \
        "six contrasts hold; diamond total 0 under either specificity labelling"
    return not failures, detail


def test_criterion_4_inheritance_contrasts():
    t = time.perf_counter()
    ok, detail = check_inheritance_contrasts()
    assert record(4, ok, detail, t), detail


# -- 5 ---------------------------------------------------------------------------------

def in_class_graphs(n):
    """Every in-class graph on n neurons, nodes in a fixed topological order.

    Each pair i < j may carry an excitatory edge, an inhibitory edge, both,
    or neither; an inhibitory edge is only allowed into a neuron with no
    outgoing edges.
    """
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for exc in itertools.product((0, 1), repeat=len(pairs)):
        e_edges = [p for p, on in zip(pairs, exc) if on]
        free = [p for p in pairs if p[1] not in {a for a, _ in e_edges}]
        for inh in itertools.product((0, 1), repeat=len(free)):
            i_edges = [p for p, on in zip(free, inh) if on]
            sources = {a for a, _ in e_edges} | {a for a, _ in i_edges}
            if any(b in sources for _, b in i_edges):
                continue
            yield indexed_graph(n, [(a, b, EXC, 1.0) for a, b in e_edges]
                                + [(a, b, INH, 1.0) for a, b in i_edges])


def check_equivalence(max_n=6):
    """Exhaustive in size order; stops after the first size that has a disagreement.

    Neuron 0 is the source.  Neurons not reachable from the source never
    fire and lie on no path, so fixing the source first loses no case.
    """
    checked = 0
    for n in range(2, max_n + 1):
        bad = []
        for g in in_class_graphs(n):
            assert in_equivalence_class(g)
            for d in range(1, n):
                checked += 1
                if steady_state_equivalence_check(g, ["n0"], [f"n{d}"]) is Equivalence.DISAGREE:
                    bad.append((g, d))
        if bad:
            g, d = min(bad, key=lambda b: len(b[0].synapses))
            edges = ", ".join(f"{k.source}{Polarity(k.polarity).arrow}{k.target}"
                              for k in g.synapses)
            total = effective_signal(g, ["n0"], [f"n{d}"]).total
            return False, (f"{len(bad)} disagreements at {n} neurons ({checked} checks so far); "
                           f"smallest: [{edges}] n0 to n{d}: static total {total:g} >= theta "
                           f"but n{d} stays silent")
    return True, f"{checked} (graph, destination) checks up to {max_n} neurons all agree"


def test_criterion_5_static_dynamic_equivalence():
    t = time.perf_counter()
    ok, detail = check_equivalence()
    assert record(5, ok, detail, t), detail


# -- 6 ---------------------------------------------------------------------------------

def check_delta_rule():
    notes, ok = [], True
    for w0, eta, expect in ((0.5, 0.6, 1), (0.1, 0.3, 3)):
        g = build_graph([GroupSpec("roar"), GroupSpec("tiger")],
                        [LinkSpec("roar", "tiger", EXC, w0)], theta=1.0)
        cfg = PlasticityConfig(eta=eta)

        def active(graph):
            return group_activation(run(graph, {"roar"}).final, graph.group("tiger"))

        before = active(g)
        observed = 0
        while not active(g) and observed < 50:
            g = delta_update(g, Episode({"roar", "tiger"}), cfg)
            observed += 1
        predicted = episodes_to_activation(1.0, w0, eta)
        good = (not before) and observed == predicted == expect
        ok &= good
        notes.append(f"w0={w0} eta={eta}: N={observed} (closed form {predicted})")
    return ok, "; ".join(notes)


def test_criterion_6_delta_rule():
    t = time.perf_counter()
    ok, detail = check_delta_rule()
    assert record(6, ok, detail, t), detail


# -- 7 ---------------------------------------------------------------------------------

def check_tree_felling():
    s = load(scenarios.path("tree_felling"))
    v = evaluate(s)
    has_pole = v.plan.find("pole-part") is not None
    has_rope = v.plan.find("rope-part") is not None
    origins = {st["picture"]: st["fragments"] for st in v.explanation if st["step"] == "cut"}
    from_right = origins.get("P1") == ["pole-part"] and origins.get("P2") == ["rope-part"]
    out = run_cli("compare-orders", "tree_felling")
    doc = json.loads(out.stdout)
    explicit = isinstance(doc.get("agree"), bool) and len(doc["orders"]) == 2
    soft = json.loads(run_cli("compare-orders", "tree_felling_soft").stdout)
    ok = has_pole and has_rope and from_right and explicit and soft["agree"] is False
    return ok, (f"plan has pole (P1) {has_pole}, rope (P2) {has_rope}; "
                f"both orders agree={doc['agree']}; soft-ground variant agree={soft['agree']}")


def test_criterion_7_tree_felling():
    t = time.perf_counter()
    ok, detail = check_tree_felling()
    assert record(7, ok, detail, t), detail


# -- 8 ---------------------------------------------------------------------------------

def random_inhibition_picture(rng):
    k = rng.randint(2, 6)
    names = [f"q{i}" for i in range(k)]
    sizes = [rng.randint(1, 2) for _ in names]
    links = [LinkSpec(a, b, INH, rng.choice((0.5, 1, 2)))
             for a in names for b in names if a != b and rng.random() < 0.4]
    g = build_graph([GroupSpec(n, z) for n, z in zip(names, sizes)], links)
    parts = [Picture.leaf(n, g.group(n)) for n in names]
    return g, Picture.of_parts("pic", parts), names


def check_attention(pictures=1000):
    s = load(scenarios.path("flying_elefant"))
    g = s.graph()
    pic = s.picture_index()["flying-elefant"]
    full = len(consistency_report(pic, ALL_ON, g))
    masked = len(consistency_report(pic, s.mask(g), g))
    rng = random.Random(8)
    for _ in range(pictures):
        g2, p, names = random_inhibition_picture(rng)
        idx = {q.id: q for q in p.parts}
        small = rng.sample(names, rng.randint(0, len(names)))
        large = sorted(set(small) | set(rng.sample(names, rng.randint(0, len(names)))))
        lo = consistency_report(p, focus_ids(idx, small, g2), g2)
        hi = consistency_report(p, focus_ids(idx, large, g2), g2)
        if len(lo) > len(hi):
            return False, f"mask monotonicity broken: {small} -> {large}"
    ok = full == 1 and masked == 0
    return ok, f"flying elefant: {full} contradiction(s) unmasked, {masked} masked; " \
               f"monotone on {pictures} random pictures"


def test_criterion_8_attention():
    t = time.perf_counter()
    ok, detail = check_attention()
    assert record(8, ok, detail, t), detail


# -- 9 ---------------------------------------------------------------------------------

def check_determinism(tmp):
    runs = 0
    for name in scenarios.NAMES:
        cases = load(scenarios.path(name)).cases() or [None]
        for case in cases:
            digests = []
            for i in range(2):
                out = tmp / f"{name}-{case}-{i}.json"
                args = ["run", name, "--trace", str(out)] + (["--case", case] if case else [])
                r = run_cli(*args)
                if r.returncode != 0:
                    return False, f"{name} case {case}: exit {r.returncode} {r.stderr.decode()}"
                digests.append(hashlib.sha256(out.read_bytes()).hexdigest())
                runs += 1
            if digests[0] != digests[1]:
                return False, f"{name} case {case}: traces differ"
    return True, f"{runs} runs over {len(scenarios.NAMES)} scenarios, digests pairwise identical"


def test_criterion_9_determinism(tmp_path):
    t = time.perf_counter()
    ok, detail = check_determinism(tmp_path)
    assert record(9, ok, detail, t), detail


# -- 10 --------------------------------------------------------------------------------

def check_parser(generated=500, mutations=300):
    golden = {name: load(scenarios.path(name)) for name in scenarios.NAMES}
    for name, s in golden.items():
        if parse(serialize(s)) != s:
            return False, f"round trip broke on {name}"
    rng = random.Random(10)
    for i in range(generated):
        s = random_scenario(rng)
        text = serialize(s)
        if parse(text) != s or parse(shuffled_declarations(text, rng)) != s:
            return False, f"round trip broke on generated scenario {i}"
    located = 0
    bases = [serialize(s) for s in golden.values()]
    for i in range(mutations):
        base = bases[i % len(bases)] if i % 2 == 0 else serialize(random_scenario(rng))
        m = mutate(base, rng)
        if m is None:
            continue
        text, line, col, kind = m
        try:
            parse(text)
        except ScenarioError as e:
            if not any((d.line, d.column, d.kind) == (line, col, kind) for d in e.diagnostics):
                return False, f"mutation at {line}:{col} ({kind}) reported as {e.diagnostics[0]}"
            located += 1
        else:
            return False, f"mutation at {line}:{col} ({kind}) was accepted"
    return True, (f"{len(golden)} golden + {generated} generated round trips equal; "
                  f"{located} mutated files each flagged at the mutated token")


def test_criterion_10_parser():
    t = time.perf_counter()
    ok, detail = check_parser()
    assert record(10, ok, detail, t), detail


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    checks = [check_umbrella, check_amplifier, check_interruption, check_inheritance_contrasts,
              check_equivalence, check_delta_rule, check_tree_felling, check_attention]
    failed = 0
    for n, check in enumerate(checks, 1):
        t = time.perf_counter()
        failed += not record(n, *check(), t)
    with tempfile.TemporaryDirectory() as d:
        t = time.perf_counter()
        failed += not record(9, *check_determinism(Path(d)), t)
    t = time.perf_counter()
    failed += not record(10, *check_parser(), t)
    sys.exit(1 if failed else 0)
