"""The ten acceptance criteria, each at its stated tolerance and runtime.
Every test records one PASS/FAIL line, printed in the terminal summary."""
import itertools
import random
import time


from msml.algebra import (
    check_bao,
    complex_algebra,
    evaluate,
    jt_embedding,
    random_bao,
    ultrafilters,
)
from msml.cli import main
from msml.core import Var, box, implies, land, lor, Not, parse_formula, parse_signature, sort_of
from msml.gen import globally_true_formulas, random_formula, random_global_proof, random_signature
from msml.proof import (
    AxiomSet,
    Hyp,
    LocalMode,
    ProofBuilder,
    check_proof,
    cited_instances,
    derive_box_conj,
    derive_cong,
    derive_dia_disj,
    derive_mono,
    dt_global,
    dt_local,
    dt_local_inverse,
    globalize,
)
from msml.proof.builder import _import
from msml.semantics import (
    enumerate_frames,
    enumerate_models,
    find_countermodel,
    generated_submodel,
    random_frame,
    random_model,
    satisfies,
    truth_set,
)
from msml.smc import (
    build_term_model,
    check_coherence,
    elaborate_pgm_proof,
    mem_get_theorem,
    mutation_check,
    parse_program,
    pgm_conclusion,
    smc_axioms,
    smc_signature,
    to_term,
)
from msml.smc.prover import mem_get_goal

from conftest import ACCEPTANCE_LINES, fixture_path

AX = AxiomSet()


def record(label, ok, elapsed=None, limit=None, detail=""):
    timing = ""
    if elapsed is not None:
        timing = f" [{elapsed:.2f}s" + (f" < {limit}s" if limit else "") + "]"
        if limit is not None and elapsed >= limit:
            ok = False
    line = f"{'PASS' if ok else 'FAIL'} {label}{timing}" + (f" {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


# 1 ---------------------------------------------------------------------------------------


def test_c1_smc_end_to_end(capsys):
    t0 = time.perf_counter()
    code = main(["--format", "json", "smc", "run", fixture_path("pgm.smc")])
    elapsed = time.perf_counter() - t0
    out = capsys.readouterr().out
    import json

    recs = [json.loads(x) for x in out.splitlines()]
    finals = [r for r in recs if r["record"] == "final"]
    ok = code == 0 and len(finals) == 1 and finals[0]["memory"] == {"i1": 1, "i2": 2, "m": 1} \
        and finals[0]["stack"] == []
    assert record("C1 smc run pgm.smc -> {i1=1, i2=2, m=1}, empty stack", ok, elapsed, 0.1)


# 2 ---------------------------------------------------------------------------------------


def test_c2_pgm_proof_and_mutants():
    t0 = time.perf_counter()
    sig = smc_signature()
    ax = smc_axioms(sig)
    el = elaborate_pgm_proof(sig)
    v = check_proof(sig, ax, el.proof)
    mg = mem_get_theorem(sig)
    v2 = check_proof(sig, ax, mg)
    m1 = mutation_check(sig, ax, el.proof, el.conclusion)
    m2 = mutation_check(sig, ax, mg, mem_get_goal())
    elapsed = time.perf_counter() - t0
    ok = (v.ok and v.conclusion == pgm_conclusion() and v2.ok and v2.conclusion == mem_get_goal()
          and m1.ok and m2.ok)
    detail = f"({len(el.proof.steps)} steps; mutants rejected {m1.rejected}/{m1.total} and {m2.rejected}/{m2.total})"
    assert record("C2 pgm proof accepted, conclusion exact, all single-step mutants rejected", ok, elapsed, 1.0,
                  detail)


# 3 ---------------------------------------------------------------------------------------


def test_c3_soundness_fuzz():
    t0 = time.perf_counter()
    rng = random.Random(2024)
    violations = nonvacuous = total = 0
    for _ in range(200):
        sig = random_signature(rng, max_sorts=3, max_ops=4, max_arity=2)
        model = random_model(sig, rng, 4)
        memo = {}

        def holds(f):
            return truth_set(model, f, memo) == frozenset(model.worlds[sort_of(sig, f)])

        pool = []
        for s in sig.sorts:
            pool += globally_true_formulas(model, rng, s, 2, max_depth=2)
        pool += [random_formula(sig, rng, rng.choice(sig.sorts), 2) for _ in range(2)]
        for _ in range(100):
            hyps = rng.sample(pool, min(len(pool), rng.randint(0, 3)))
            proof = random_global_proof(sig, rng, hyps=hyps, max_depth=6)
            v = check_proof(sig, AX, proof)
            assert v.ok, v.reason
            total += 1
            used = [s.formula for s in proof.steps if isinstance(s.just, Hyp)]
            if all(holds(f) for f in used + cited_instances(proof)):
                nonvacuous += 1
                if not holds(v.conclusion):
                    violations += 1
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and total == 20000
    assert record("C3 soundness fuzz: 200 models x 100 proofs, zero violations", ok, elapsed, 60,
                  f"({nonvacuous} non-vacuous cases)")


# 4 ---------------------------------------------------------------------------------------

BAO_SIG = """
sort s
sort t
op f : t -> s
op c : -> t
var p : s
var u : t
"""


def test_c4_bao_laws():
    t0 = time.perf_counter()
    sig = parse_signature(BAO_SIG)
    frames = 0
    ok = True
    for frame in enumerate_frames(sig, 3):
        frames += 1
        if not check_bao(sig, complex_algebra(sig, frame)).ok:
            ok = False
            break
    # planted defects, each caught with a witness
    base = complex_algebra(sig, next(f for f in enumerate_frames(sig, 2) if len(f.worlds["s"]) == 2
                                     and len(f.worlds["t"]) == 2 and len(f.rels["f"]) == 4))
    t_els = base.elements("t")
    bad_n = complex_algebra(sig, base_frame(sig))
    bad_n.tables["f"][(frozenset(),)] = frozenset(bad_n.atoms["s"][:1])
    vn = check_bao(sig, bad_n)
    bad_a = complex_algebra(sig, base_frame(sig))
    top = bad_a.top("t")
    bad_a.tables["f"][(top,)] = frozenset()
    va = check_bao(sig, bad_a)
    planted = vn.law == "N" and vn.witness is not None and va.law == "A" and va.witness is not None
    elapsed = time.perf_counter() - t0
    assert record("C4 (N)/(A) hold on complex algebras of all frames <= 3 worlds/sort; planted defects caught",
                  ok and planted and len(t_els) == 4, elapsed, 30, f"({frames} frames)")


def base_frame(sig):
    from msml.semantics import Frame

    return Frame({"s": ("a", "b"), "t": ("x", "y")},
                 {"f": frozenset({("a", "x"), ("b", "y")}), "c": frozenset({("x",)})})


# 5 ---------------------------------------------------------------------------------------


def test_c5_jonsson_tarski():
    t0 = time.perf_counter()
    rng = random.Random(55)
    ok = True
    count = 0
    for k in range(200):
        sig = random_signature(rng, max_sorts=3, max_ops=4, max_arity=2)
        if k < 100:
            bao = complex_algebra(sig, random_frame(sig, rng, 3))
        else:
            bao = random_bao(sig, rng, max_atoms=3)
        res = jt_embedding(sig, bao)
        counts = all(len(ultrafilters(bao, s)) == len(bao.atoms[s]) == len(res.frame.worlds[s]) for s in sig.sorts)
        ok = ok and res.ok and counts
        count += 1
    elapsed = time.perf_counter() - t0
    assert record("C5 representation embedding ok on 100 complex algebras + 100 random BAOs", ok and count == 200,
                  elapsed, 60)


# 6 ---------------------------------------------------------------------------------------


def test_c6_algebra_kripke_bridge():
    t0 = time.perf_counter()
    rng = random.Random(66)
    mismatches = 0
    for _ in range(100):
        sig = random_signature(rng)
        m = random_model(sig, rng, 3)
        s = rng.choice(sig.sorts)
        phi = random_formula(sig, rng, s, 4)
        got = evaluate(sig, complex_algebra(sig, m.frame), dict(m.valuation), phi)
        want = frozenset(w for w in m.worlds[s] if satisfies(m, w, phi))
        mismatches += got != want
    elapsed = time.perf_counter() - t0
    assert record("C6 algebraic value equals satisfaction set on 100 (model, formula) pairs", mismatches == 0,
                  elapsed, 10)


# 7 ---------------------------------------------------------------------------------------


def _random_local(sig, rng):
    pr = random_global_proof(sig, rng, steps=8)
    s = sort_of(sig, pr.last)
    hyps = tuple(dict.fromkeys(random_formula(sig, rng, s, 2) for _ in range(3)))
    b = ProofBuilder(sig)
    last = _import(b, pr)
    k = rng.randint(1, len(hyps))
    from msml.core import guarded

    last = b.prop(guarded(list(hyps[:k]), b.f(last)), [last])
    return b.proof(mode=LocalMode(s, hyps, tuple(range(1, k + 1))), last=last)


def test_c7_transform_round_trips():
    t0 = time.perf_counter()
    rng = random.Random(77)
    ok = True
    for _ in range(50):
        sig = random_signature(rng)
        hyps = [random_formula(sig, rng, rng.choice(sig.sorts), 2) for _ in range(2)]
        pr = random_global_proof(sig, rng, hyps=hyps, max_depth=6)
        g = globalize(sig, AX, pr)
        vg = check_proof(sig, AX, g.proof)
        ok &= vg.ok and vg.conclusion == pr.last and all(w.verify(sig, set(hyps)) for w in g.witnesses)
        d = dt_global(sig, AX, pr, hyps[0])
        vd = check_proof(sig, AX, d.proof)
        ok &= vd.ok and all(w.verify(sig, {hyps[0]}) for w in d.witnesses)
        lp = _random_local(sig, rng)
        v0 = check_proof(sig, AX, lp)
        phi = lp.mode.witness_formulas()[-1]
        out = dt_local(sig, AX, lp, phi)
        vo = check_proof(sig, AX, out)
        back = dt_local_inverse(sig, AX, out)
        vb = check_proof(sig, AX, back)
        ok &= v0.ok and vo.ok and vo.conclusion == implies(phi, v0.conclusion) and vb.ok \
            and vb.conclusion == v0.conclusion
    elapsed = time.perf_counter() - t0
    assert record("C7 globalize / dt_global / dt_local round trips on 50 random proofs", bool(ok), elapsed, 30)


# 8 ---------------------------------------------------------------------------------------


def _closure_pairs(m, sub, depth, pool):
    """Every pair (truth set in m, truth set in sub) realized by some formula
    of depth <= depth over the pool, built level by level."""
    sig = m.sig

    def image(model, op, args):
        return frozenset(t[0] for t in model.rels[op] if all(u in a for u, a in zip(t[1:], args)))

    level = {s: set() for s in sig.sorts}
    for p in pool:
        s = sig.var_sort[p]
        level[s].add((m.valuation[p], sub.valuation[p]))
    for op, decl in sig.ops.items():
        if not decl.arity:
            level[decl.result_sort].add((image(m, op, ()), image(sub, op, ())))
    for _ in range(depth):
        nxt = {s: set(v) for s, v in level.items()}
        for s, vals in level.items():
            wm, ws = frozenset(m.worlds[s]), frozenset(sub.worlds[s])
            for a, b in vals:
                nxt[s].add((wm - a, ws - b))
            for (a, b), (c, d) in itertools.product(vals, repeat=2):
                nxt[s].add((a | c, b | d))
        for op, decl in sig.ops.items():
            if decl.arity:
                for args in itertools.product(*(level[x] for x in decl.arg_sorts)):
                    nxt[decl.result_sort].add((image(m, op, [a for a, _ in args]), image(sub, op, [b for _, b in args])))
        level = nxt
    return level


INVARIANCE_SIGS = [
    "sort s\nop f : s -> s\nvar p : s\nvar q : s",
    "sort s\nsort t\nop h : s -> t\nop k : t -> s\nvar p : s\nvar u : t",
]


def test_c8_generated_submodel_invariance():
    t0 = time.perf_counter()
    violations = checked = 0
    for text in INVARIANCE_SIGS:
        sig = parse_signature(text)
        pool = [sig.vars[s][0] for s in sig.sorts]
        if len(pool) < 2:
            pool = list(sig.vars[sig.sorts[0]][:2])
        for m in enumerate_models(sig, 2, pool):
            for s in sig.sorts:
                for w in m.worlds[s]:
                    sub = generated_submodel(m, {s: [w]})
                    padded = sub.metadata["padded"]
                    for s2, pairs in _closure_pairs(m, sub, 3, pool).items():
                        keep = frozenset(x for x in sub.worlds[s2] if padded.get(s2) != x)
                        for a, b in pairs:
                            checked += 1
                            if a & keep != b & keep:
                                violations += 1
    # cross-check the closure against explicit formulas on a sample
    rng = random.Random(8)
    sig = parse_signature(INVARIANCE_SIGS[0])
    for m in itertools.islice(enumerate_models(sig, 2, ["p", "q"]), 0, None, 23):
        sub = generated_submodel(m, {"s": [m.worlds["s"][0]]})
        pairs = _closure_pairs(m, sub, 3, ["p", "q"])["s"]
        for _ in range(20):
            phi = random_formula(sig, rng, "s", 3, ["p", "q"])
            assert (truth_set(m, phi), truth_set(sub, phi)) in pairs
    elapsed = time.perf_counter() - t0
    assert record("C8 generated submodels preserve satisfaction (bound 2, all depth <= 3 formulas)",
                  violations == 0, elapsed, None, f"({checked} truth-set pairs checked)")


# 9 ---------------------------------------------------------------------------------------


def test_c9_term_model_coherence():
    t0 = time.perf_counter()
    rep = check_coherence(build_term_model())
    loop = to_term(parse_program("x := 0; while x <= 2 do x := x + 1"))
    runs = [check_coherence(build_term_model(loop, exec_budget=8)) for _ in range(2)]
    full_loop = check_coherence(build_term_model(loop))
    elapsed = time.perf_counter() - t0
    ok = (rep.ok and not rep.skipped and rep.checked > 0 and all(r.ok for r in runs) and full_loop.ok
          and runs[0].skipped == runs[1].skipped and len(runs[0].skipped) > 0)
    assert record("C9 every instantiable axiom instance holds in the pgm term model", ok, elapsed, None,
                  f"({rep.checked} instances; loop with tight budget: {len(runs[0].skipped)} skipped, stable)")


# 10 --------------------------------------------------------------------------------------

NON_THEOREMS = [
    "f(p) -> [f](p)",
    "p -> [f](p)",
    "[f](p) -> p",
    "p -> f(p)",
    "[f](p) -> f(p)",
    "f(p) -> p",
    "[f](p | q) -> [f](p) | [f](q)",
    "f(p) & f(q) -> f(p & q)",
    "[f](p) -> [f]([f](p))",
    "p -> [f](f(p))",
]


def _k_theorems(sig):
    p, q = Var("p"), Var("q")
    taut = lambda f: _one_step(sig, f)  # noqa: E731
    return [
        derive_box_conj(sig, "f", 1, [], p, q),
        derive_box_conj(sig, "f", 1, [], q, Not(p)),
        derive_dia_disj(sig, "f", 1, [], p, q),
        derive_dia_disj(sig, "f", 1, [], p, Not(p)),
        derive_mono(sig, "f", 1, [], taut(implies(land(p, q), p))),
        derive_mono(sig, "f", 1, [], taut(implies(p, lor(p, q))), dual=True),
        derive_mono(sig, "f", 1, [], taut(implies(land(p, q), q)), dual=True),
        derive_cong(sig, "f", 1, [], taut(parse_formula(sig, "p & q <-> q & p"))),
        derive_cong(sig, "f", 1, [], taut(parse_formula(sig, "!(p | q) <-> !p & !q"))),
        derive_box_conj(sig, "f", 1, [], box("f", [p]), q),
    ]


def _one_step(sig, f):
    b = ProofBuilder(sig)
    return b.proof(last=b.taut(f))


def test_c10_countermodel_search(tmp_path, capsys):
    t0 = time.perf_counter()
    sig_path = tmp_path / "k.msig"
    sig_path.write_text("sort s\nop f : s -> s\nvar p : s\nvar q : s\n")
    sig = parse_signature(sig_path.read_text())
    refuted = 0
    for text in NON_THEOREMS:
        code = main(["enumerate", "--sig", str(sig_path), "--refute", text, "--max-worlds", "2"])
        found = find_countermodel(sig, parse_formula(sig, text), 2)
        refuted += code == 1 and found is not None and len(found[0].worlds["s"]) <= 2
    capsys.readouterr()
    clean = 0
    theorems = _k_theorems(sig)
    for pr in theorems:
        v = check_proof(sig, AX, pr)
        assert v.ok
        clean += find_countermodel(sig, v.conclusion, 3) is None
    elapsed = time.perf_counter() - t0
    ok = refuted == len(NON_THEOREMS) == 10 and clean == len(theorems) == 10
    assert record("C10 countermodels for 10 non-theorems (<= 2 worlds), none for 10 derived theorems (bound 3)", ok,
                  elapsed, None, f"({refuted}/10 refuted, {clean}/10 clean)")
