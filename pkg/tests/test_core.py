import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msml.core import (
    App,
    Not,
    Or,
    ParseError,
    SignatureError,
    SortError,
    Var,
    box,
    depth,
    implies,
    land,
    lor,
    mk_bot,
    mk_dual,
    mk_top,
    parse_formula,
    parse_signature,
    print_formula,
    print_signature,
    sort_of,
    substitute,
)
from msml.gen import random_formula, random_signature
from msml.smc import smc_signature


def test_minimal_signature():
    sig = parse_signature("sort s\nvar p : s")
    assert sig.sorts == ("s",)
    assert sig.vars["s"] == ("p",)
    assert not sig.ops


def test_signature_rejects_undeclared_sort_and_duplicate_var():
    with pytest.raises(SignatureError):
        parse_signature("sort s\nvar p : s\nvar p : t")
    with pytest.raises(SignatureError):
        parse_signature("sort s\nvar p : s\nvar p : s")


def test_signature_needs_a_variable_per_sort():
    with pytest.raises(SignatureError):
        parse_signature("sort s\nsort t\nvar p : s")


def test_signature_comments_and_nullary_ops():
    sig = parse_signature("# header\nsort s  # the only sort\nop c : -> s\nvar p : s\n")
    assert sig.ops["c"].arity == 0
    assert sort_of(sig, App("c")) == "s"


def test_signature_print_round_trip(tsig):
    assert parse_signature(print_signature(tsig)) == tsig


def test_smc_grammar_as_signature_round_trips():
    sig = smc_signature()
    again = parse_signature(print_signature(sig))
    assert again == sig
    assert len(sig.sorts) == 11


def test_sort_of(tsig):
    assert sort_of(tsig, Var("p")) == "s"
    assert sort_of(tsig, App("h", [Var("p")])) == "t"
    assert sort_of(tsig, App("g", [Var("p"), Var("u")])) == "s"
    with pytest.raises(SortError):
        sort_of(tsig, Or(Var("p"), Var("u")))
    with pytest.raises(SortError):
        sort_of(tsig, App("g", [Var("u"), Var("p")]))
    with pytest.raises(SortError):
        sort_of(tsig, App("f", []))
    with pytest.raises(SortError):
        sort_of(tsig, Var("nope"))


def test_smc_expression_sort():
    sig = smc_signature()
    e = App("add", [App("nat2aexp", [App("1")]), App("var2aexp", [Var("xv")])])
    assert sort_of(sig, e) == "AExp"


def test_mk_dual(usig, tsig):
    assert mk_dual(usig, "f", [Var("p")]) == Not(App("f", [Not(Var("p"))]))
    d = mk_dual(tsig, "g", [Var("p"), Var("u")])
    assert sort_of(tsig, d) == "s"
    with pytest.raises(SortError):
        mk_dual(tsig, "g", [Var("u"), Var("p")])
    sig = parse_signature("sort s\nop c : -> s\nvar p : s")
    with pytest.raises(SortError):
        mk_dual(sig, "c", [])


def test_bot_and_top_use_first_variable(usig):
    p = Var("p")
    assert mk_bot(usig, "s") == land(p, Not(p))
    assert mk_bot(usig, "s") == Not(Or(Not(p), Not(Not(p))))
    assert mk_top(usig, "s") == Not(mk_bot(usig, "s"))
    with pytest.raises(SortError):
        mk_bot(usig, "zz")


def test_substitute(usig, tsig):
    p, q = Var("p"), Var("q")
    assert substitute(usig, p, {"p": p}) == p
    phi = box("g", [p, Var("u")])
    assert substitute(tsig, phi, {"p": mk_bot(tsig, "s")}) == box("g", [mk_bot(tsig, "s"), Var("u")])
    with pytest.raises(SortError):
        substitute(tsig, p, {"p": Var("u")})
    with pytest.raises(SortError):
        substitute(tsig, p, {"zz": p})
    # simultaneous, not sequential
    assert substitute(usig, implies(p, q), {"p": q, "q": p}) == implies(q, p)


def test_parse_precedence(usig):
    p, q, r = Var("p"), Var("q"), Var("r")
    assert parse_formula(usig, "p -> q | r") == implies(p, lor(q, r))
    assert parse_formula(usig, "p -> q -> r") == implies(p, implies(q, r))
    assert parse_formula(usig, "!p & q | r") == lor(land(Not(p), q), r)
    assert parse_formula(usig, "p <-> q -> r") == parse_formula(usig, "p <-> (q -> r)")
    assert parse_formula(usig, "bot@s") == mk_bot(usig, "s")
    assert parse_formula(usig, "top@s") == mk_top(usig, "s")


def test_parse_dual_application():
    sig = smc_signature()
    f = parse_formula(sig, "[exec](pi, gamma)")
    assert f == box("exec", [Var("pi"), Var("gamma")])


def test_parse_errors(usig):
    with pytest.raises(ParseError) as e:
        parse_formula(usig, "p & (q")
    assert e.value.pos is not None
    with pytest.raises(ParseError):
        parse_formula(usig, "p q")
    with pytest.raises(ParseError):
        parse_formula(usig, "zz")


def test_printer_resugars(usig):
    for text in ["p -> q", "[f](p)", "p & q", "p <-> q", "bot@s", "top@s", "f(p) | !q"]:
        f = parse_formula(usig, text)
        assert print_formula(usig, f) == text


def test_round_trip_1000_random_formulas():
    rng = random.Random(7)
    count = 0
    while count < 1000:
        sig = random_signature(rng)
        for _ in range(20):
            s = rng.choice(sig.sorts)
            f = random_formula(sig, rng, s, 6)
            assert depth(f) <= 6
            text = print_formula(sig, f)
            assert parse_formula(sig, text) == f, text
            assert print_formula(sig, parse_formula(sig, text)) == text
            count += 1


def test_smc_proof_formulas_round_trip():
    from msml.smc import elaborate_pgm_proof

    sig = smc_signature()
    for step in elaborate_pgm_proof(sig).proof.steps:
        text = print_formula(sig, step.formula)
        assert parse_formula(sig, text) == step.formula


@st.composite
def sig_and_formula(draw):
    seed = draw(st.integers(0, 10**6))
    rng = random.Random(seed)
    sig = random_signature(rng)
    s = rng.choice(sig.sorts)
    return sig, random_formula(sig, rng, s, 5), rng


@given(sig_and_formula())
@settings(max_examples=200, deadline=None)
def test_substitution_preserves_sort(data):
    sig, phi, rng = data
    theta = {p: random_formula(sig, rng, sig.var_sort[p], 2) for p in sig.var_sort if rng.random() < 0.5}
    assert sort_of(sig, substitute(sig, phi, theta)) == sort_of(sig, phi)


@given(sig_and_formula())
@settings(max_examples=200, deadline=None)
def test_substitution_is_homomorphic(data):
    sig, phi, rng = data
    theta = {p: random_formula(sig, rng, sig.var_sort[p], 2) for p in sig.var_sort}
    sub = substitute(sig, phi, theta)
    if isinstance(phi, Not):
        assert sub == Not(substitute(sig, phi.child, theta))
    elif isinstance(phi, Or):
        assert sub == Or(substitute(sig, phi.left, theta), substitute(sig, phi.right, theta))
    elif isinstance(phi, App):
        assert sub == App(phi.op, [substitute(sig, a, theta) for a in phi.args])


@given(sig_and_formula())
@settings(max_examples=200, deadline=None)
def test_dual_keeps_result_sort(data):
    sig, _, rng = data
    for op in sig.ops.values():
        if op.arity:
            args = [random_formula(sig, rng, s, 2) for s in op.arg_sorts]
            assert sort_of(sig, mk_dual(sig, op.name, args)) == op.result_sort
