import itertools
import random

import pytest

from msml.algebra import (
    Bao,
    BaoError,
    check_bao,
    complex_algebra,
    complex_dual,
    evaluate,
    jt_embedding,
    parse_bao,
    powerset,
    print_bao,
    random_bao,
    ultrafilter_frame,
    ultrafilters,
)
from msml.core import Var, box, lor, mk_top, Not, parse_formula, parse_signature
from msml.gen import random_formula, random_signature
from msml.semantics import enumerate_frames, random_model, truth_set

from conftest import fixture_path


def _fs(*xs):
    return frozenset(xs)


def test_complex_algebra_of_two_world_frame(usig, two_world):
    ca = complex_algebra(usig, two_world.frame)
    assert ca.apply("f", [_fs("w1")]) == _fs("w0")
    assert ca.apply("f", [_fs()]) == _fs()
    full = ca.apply("f", [_fs("w0", "w1")])
    assert full == {t[0] for t in two_world.rels["f"]}
    assert check_bao(usig, ca).ok


def test_planted_normality_defect(usig):
    ca = complex_algebra(usig, _two_world_frame(usig))
    ca.tables["f"][(_fs(),)] = _fs("w0")
    v = check_bao(usig, ca)
    assert not v.ok and v.law == "N" and v.op == "f" and v.witness == ((),)


def test_planted_additivity_defect(usig):
    ca = complex_algebra(usig, _two_world_frame(usig))
    ca.tables["f"][(_fs("w0", "w1"),)] = _fs()
    v = check_bao(usig, ca)
    assert not v.ok and v.law == "A" and v.witness is not None


def test_partial_table_reported(usig):
    ca = complex_algebra(usig, _two_world_frame(usig))
    del ca.tables["f"][(_fs("w0"),)]
    v = check_bao(usig, ca)
    assert not v.ok and v.law == "total"


def _two_world_frame(usig):
    from msml.semantics import Frame

    return Frame({"s": ("w0", "w1")}, {"f": frozenset({("w0", "w1")})})


def test_eval_examples(usig, two_world):
    ca = complex_algebra(usig, two_world.frame)
    e = dict(two_world.valuation)
    assert evaluate(usig, ca, e, mk_top(usig, "s")) == ca.top("s")
    assert evaluate(usig, ca, e, parse_formula(usig, "f(p)")) == _fs("w0")
    p = Var("p")
    for a in ca.elements("s"):
        assert evaluate(usig, ca, {"p": a}, lor(p, Not(p))) == ca.top("s")
    with pytest.raises(BaoError):
        evaluate(usig, ca, {}, p)


def _filters_by_brute_force(elements, top):
    """All proper filters of a finite powerset algebra, found by checking
    every family of elements."""
    out = []
    for mask in range(1, 1 << len(elements)):
        fam = {e for i, e in enumerate(elements) if mask >> i & 1}
        if top not in fam or frozenset() in fam:
            continue
        up = all(b in fam for a in fam for b in elements if a <= b)
        meet = all(a & b in fam for a in fam for b in fam)
        if up and meet:
            out.append(frozenset(fam))
    return out


def test_ultrafilter_counts_match_brute_force():
    for n in (1, 2, 3):
        sig = parse_signature("sort s\nvar p : s")
        bao = Bao(sig, {"s": tuple(f"a{k}" for k in range(n))}, {})
        filters = _filters_by_brute_force(bao.elements("s"), bao.top("s"))
        maximal = [f for f in filters if not any(f < g for g in filters)]
        assert len(maximal) == n
        assert set(maximal) == set(ultrafilters(bao, "s"))


def test_one_atom_jt():
    sig = parse_signature("sort s\nop f : s -> s\nvar p : s")
    bao = Bao.from_atom_table(sig, {"s": ("a",)}, {"f": {("a",): _fs("a")}})
    assert bao.apply("f", [_fs("a")]) == _fs("a") and bao.apply("f", [_fs()]) == _fs()
    res = jt_embedding(sig, bao)
    assert res.ok
    assert len(res.frame.worlds["s"]) == 1


def test_jt_on_two_world_complex_algebra(usig, two_world):
    ca = complex_algebra(usig, two_world.frame)
    res = jt_embedding(usig, ca)
    assert res.ok
    assert len(set(res.r["s"].values())) == len(ca.elements("s"))


def test_jt_refuses_non_bao(usig):
    ca = complex_algebra(usig, _two_world_frame(usig))
    ca.tables["f"][(_fs("w0", "w1"),)] = _fs()
    with pytest.raises(BaoError):
        jt_embedding(usig, ca)


def test_ultrafilter_frame_methods_agree():
    rng = random.Random(5)
    for _ in range(30):
        sig = random_signature(rng)
        bao = random_bao(sig, rng)
        a = ultrafilter_frame(sig, bao, "quantified")
        b = ultrafilter_frame(sig, bao, "atoms")
        assert a.rels == b.rels


def test_complex_algebras_of_enumerated_frames(tsig):
    for n, frame in enumerate(enumerate_frames(tsig, 2)):
        if n % 50:
            continue
        ca = complex_algebra(tsig, frame)
        assert check_bao(tsig, ca).ok
        for s in tsig.sorts:
            assert len(ultrafilters(ca, s)) == len(frame.worlds[s])


def test_dual_coherence(tsig):
    rng = random.Random(6)
    for _ in range(30):
        m = random_model(tsig, rng, 2)
        ca = complex_algebra(tsig, m.frame)
        for op, decl in tsig.ops.items():
            for args in ca.arg_tuples(op):
                assert ca.dual_apply(op, args) == complex_dual(m.frame, tsig, op, args)
        e = dict(m.valuation)
        for op, decl in tsig.ops.items():
            fs = [random_formula(tsig, rng, s, 2) for s in decl.arg_sorts]
            vals = [evaluate(tsig, ca, e, f) for f in fs]
            assert evaluate(tsig, ca, e, box(op, fs)) == ca.dual_apply(op, vals)


def test_bridge_random(tsig):
    rng = random.Random(7)
    for _ in range(100):
        m = random_model(tsig, rng, 3)
        ca = complex_algebra(tsig, m.frame)
        s = rng.choice(tsig.sorts)
        phi = random_formula(tsig, rng, s, 4)
        assert evaluate(tsig, ca, dict(m.valuation), phi) == truth_set(m, phi)


def test_random_baos_satisfy_laws_and_embed():
    rng = random.Random(8)
    for _ in range(40):
        sig = random_signature(rng)
        bao = random_bao(sig, rng)
        assert check_bao(sig, bao).ok
        assert jt_embedding(sig, bao).ok


def test_mba_round_trip_and_fixtures():
    sig = parse_signature(open(fixture_path("unary.msig")).read())
    bao = parse_bao(sig, open(fixture_path("two_atoms.mba")).read())
    assert check_bao(sig, bao).ok
    again = parse_bao(sig, print_bao(sig, bao))
    assert again.tables == bao.tables
    bad = parse_bao(sig, open(fixture_path("not_normal.mba")).read())
    v = check_bao(sig, bad)
    assert not v.ok and v.law == "N"


def test_powerset_order():
    assert powerset(["a", "b"]) == [_fs(), _fs("a"), _fs("b"), _fs("a", "b")]
    assert list(itertools.islice(powerset("abc"), 2)) == [_fs(), _fs("a")]
