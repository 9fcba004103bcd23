import random

import pytest

from msml.core import App, implies, substitute
from msml.gen import random_formula
from msml.proof import instantiate_scheme
from msml.semantics import Evaluator
from msml.smc import (
    SmcConfig,
    build_term_model,
    check_coherence,
    mem_countermodel,
    parse_program,
    pbox,
    scheme_instances,
    smc_axioms,
    to_term,
)
from msml.smc.machine import config_term
from msml.smc.prover import pgm_final_memory
from msml.smc.syntax import nat
from msml.smc.termmodel import TermEvaluator


@pytest.fixture(scope="module")
def model():
    return build_term_model()


@pytest.fixture(scope="module")
def tm(model):
    return model.metadata["term_model"]


def test_world_counts(tm):
    sizes = {s: len(ws) for s, ws in tm.worlds.items()}
    assert sizes["Nat"] == 4 and sizes["Var"] == 3 and sizes["Bool"] == 2
    assert sizes["Mem"] == 4 ** 3  # every total function from 3 variables to 0..3
    assert sizes["Config"] == len({c for c, _ in tm.run.states})


def test_constructor_relations_are_graphs(tm):
    for name, decl in tm.sig.ops.items():
        if name in ("exec", "get"):
            continue
        for tup in tm.rels[name]:
            assert tm.denote(App(name, list(tup[1:]))) == tup[0]


def test_exec_agrees_with_interpreter(tm):
    start = tm.denote(config_term(SmcConfig.of()))
    ctrl = tm.denote(App("cs", [tm.term]))
    # exec w p w' reads: w' reached from w under p, with the result world first
    got = {t[2] for t in tm.rels["exec"] if t[0] == start and t[1] == ctrl}
    final = tm.denote(config_term(tm.run.final))
    assert got == {final}


def test_aint_instances_hold(model, tm):
    rep = check_coherence(model, names=["Aint"])
    assert rep.ok and rep.per_scheme["Aint"][0] > 0


def test_athen_instance_at_start(model, tm):
    sig = tm.sig
    ax = smc_axioms(sig)
    c1 = App("ca", [App("nat2aexp", [nat(1)])])
    f = instantiate_scheme(sig, ax["Athen"], {"PI": c1, "PI2": App("asgn", [App("i1")]),
                                              "G": config_term(SmcConfig.of((), {"i1": 1}))})
    ev = TermEvaluator(model, tm)
    assert tm.denote(config_term(SmcConfig.of())) in ev.truth(f)
    # the right-hand side is a real fact, not a vacuous one
    rhs = pbox(c1, pbox(App("asgn", [App("i1")]), config_term(SmcConfig.of((), {"i1": 1}))))
    assert tm.denote(config_term(SmcConfig.of())) in ev.truth(rhs)


def test_term_evaluator_agrees_with_pointwise(model, tm):
    rng = random.Random(5)
    ev, fast = Evaluator(model), TermEvaluator(model, tm)
    sig = tm.sig
    for _ in range(120):
        s = rng.choice(["Config", "Mem", "ValStack"])
        phi = random_formula(sig, rng, s, 3, var_pool=[])
        for w in tm.worlds[s][:10]:
            assert ev.holds(w, phi) == (w in fast.truth(phi))


def test_instances_enumerated_stably(tm):
    ax = smc_axioms(tm.sig)
    a = [tuple(sorted(b.items(), key=lambda kv: kv[0])) for b in scheme_instances(tm, ax["Aasgn"])]
    b = [tuple(sorted(b.items(), key=lambda kv: kv[0])) for b in scheme_instances(tm, ax["Aasgn"])]
    assert a == b and a


def test_skipped_instances_reported_for_loops():
    prog = to_term(parse_program("x := 0; while x <= 2 do x := x + 1"))
    runs = []
    for _ in range(2):
        m = build_term_model(prog, exec_budget=8)
        rep = check_coherence(m, names=["Astar", "Dwhile", "Athen"])
        runs.append(rep)
        assert rep.ok
    assert runs[0].skipped and runs[0].skipped == runs[1].skipped
    full = check_coherence(build_term_model(prog), names=["Astar"])
    assert full.ok and not full.skipped


def test_mem_get_countermodel(tm):
    memf = substitute(tm.sig, pgm_final_memory(), {})
    bad = implies(memf, App("get", [App("m"), nat(2)]))
    found = mem_countermodel(tm, bad)
    assert found is not None
    m, w = found
    assert not Evaluator(m).holds(w, bad)
    good = implies(memf, App("get", [App("m"), nat(1)]))
    assert mem_countermodel(tm, good) is None
