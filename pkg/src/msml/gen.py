"""Seeded random signatures, formulas and proofs for the property and fuzz
harnesses."""
from __future__ import annotations

import random

from .core.formula import App, Formula, Not, Or, Var, as_implication, box, depth, implies, land, lor
from .core.signature import Signature, sort_of
from .proof.builder import ProofBuilder
from .proof.checker import DualInst, GlobalMode, KInst, Proof, instance_formula
from .proof.schemes import AxiomSet, dual_binding, k_binding
from .semantics import Evaluator, Model


def random_signature(rng: random.Random, max_sorts=3, max_ops=4, max_arity=2, vars_per_sort=2) -> Signature:
    """Sorts s0.., operations f0.. with at least one non-nullary operation."""
    sorts = [f"s{i}" for i in range(rng.randint(1, max_sorts))]
    ops = []
    for k in range(rng.randint(1, max_ops)):
        n = rng.randint(1 if k == 0 else 0, max_arity)
        ops.append((f"f{k}", tuple(rng.choice(sorts) for _ in range(n)), rng.choice(sorts)))
    vars_ = [(f"p{i}{s}", s) for s in sorts for i in range(vars_per_sort)]
    return Signature.build(sorts, ops, vars_)


def random_formula(sig: Signature, rng: random.Random, sort: str, max_depth: int, var_pool=None) -> Formula:
    """A well-sorted formula of the given sort and depth at most max_depth."""
    return _formula(sig, rng, sort, max_depth, _pool(sig, var_pool))


def _pool(sig, var_pool):
    pool = {}
    for p in (sig.var_sort if var_pool is None else var_pool):
        pool.setdefault(sig.var_sort[p], []).append(p)
    return pool


def _formula(sig, rng, sort, d, pool):
    ops = [op for op in sig.ops.values() if op.result_sort == sort]
    leaves = [Var(p) for p in pool.get(sort, ())] + [App(op.name) for op in ops if not op.arity]
    if not leaves:
        leaves = [Var(sig.canonical_var(sort))]
    if d <= 0 or rng.random() < 0.25:
        return rng.choice(leaves)
    kind = rng.random()
    if kind < 0.25:
        return Not(_formula(sig, rng, sort, d - 1, pool))
    if kind < 0.5:
        return Or(_formula(sig, rng, sort, d - 1, pool), _formula(sig, rng, sort, d - 1, pool))
    apps = [op for op in ops if op.arity]
    if not apps:
        return rng.choice(leaves)
    op = rng.choice(apps)
    return App(op.name, [_formula(sig, rng, s, d - 1, pool) for s in op.arg_sorts])


def globally_true_formulas(model: Model, rng: random.Random, sort: str, count: int, max_depth=3, tries=200):
    """Random formulas that hold at every world of `sort` in the model."""
    ev = Evaluator(model)
    out = []
    pool = _pool(model.sig, None)
    for _ in range(tries):
        f = _formula(model.sig, rng, sort, max_depth, pool)
        if f not in out and all(ev.holds(w, f) for w in model.worlds[sort]):
            out.append(f)
            if len(out) >= count:
                break
    return out


def random_global_proof(sig: Signature, rng: random.Random, hyps=(), steps=12, max_depth=6,
                        axioms: AxiomSet | None = None) -> Proof:
    """A checker-valid global proof mixing Taut, K, Dual, MP, UG and Hyp steps.
    Every formula has depth at most max_depth; the last step is the last
    formula derived."""
    b = ProofBuilder(sig, axioms or AxiomSet(), hyps)
    proven = []
    pool = _pool(sig, None)

    def fresh(sort, d=2):
        return _formula(sig, rng, sort, d, pool)

    def add(idx):
        if idx is not None and idx not in proven:
            proven.append(idx)
        return idx

    def ok(f):
        return depth(f) <= max_depth

    boxable = [op for op in sig.ops.values() if op.arity]
    hyps = list(hyps)
    for _ in range(steps * 4):
        if len(b.steps) >= steps:
            break
        r = rng.random()
        try:
            if r < 0.15 and hyps:
                add(b.hyp(rng.choice(hyps)))
            elif r < 0.3 or not proven:
                s = rng.choice(sig.sorts)
                a = fresh(s) if not proven or rng.random() < 0.5 else b.f(rng.choice(proven))
                if sort_of(sig, a) != s:
                    s = sort_of(sig, a)
                c = fresh(s)
                t = rng.choice([implies(a, lor(a, c)), implies(a, implies(c, a)), lor(a, Not(a)),
                                implies(land(a, c), c)])
                if ok(t):
                    add(b.taut(t))
            elif r < 0.45:
                op = rng.choice(boxable)
                i = rng.randint(1, op.arity)
                sides = [fresh(s, 1) for k, s in enumerate(op.arg_sorts, 1) if k != i]
                s = op.arg_sorts[i - 1]
                imps = [j for j in proven if as_implication(b.f(j)) and sort_of(sig, b.f(j)) == s]
                if imps and rng.random() < 0.7:
                    phi, chi = as_implication(b.f(rng.choice(imps)))
                else:
                    phi, chi = fresh(s), fresh(s)
                just = KInst.of(op.name, i, k_binding(sides, i, phi, chi))
                if ok(instance_formula(sig, b.axioms, just)):
                    add(b.k(op.name, i, sides, phi, chi))
            elif r < 0.55:
                op = rng.choice(boxable)
                args = [fresh(s, 1) for s in op.arg_sorts]
                if ok(instance_formula(sig, b.axioms, DualInst.of(op.name, dual_binding(args)))):
                    add(b.dual(op.name, args))
            elif r < 0.75:
                j = rng.choice(proven)
                f = b.f(j)
                cands = [(op, i) for op in boxable for i, s in enumerate(op.arg_sorts, 1) if s == sort_of(sig, f)]
                if cands:
                    op, i = rng.choice(cands)
                    sides = [fresh(s, 1) for k, s in enumerate(op.arg_sorts, 1) if k != i]
                    if ok(box(op.name, sides[: i - 1] + [f] + sides[i - 1:])):
                        add(b.ug(op.name, i, j, sides))
            else:
                pairs = []
                for k in proven:
                    imp = as_implication(b.f(k))
                    if imp is not None and imp[0] in b.index:
                        pairs.append((b.index[imp[0]], k))
                if pairs:
                    j, k = rng.choice(pairs)
                    add(b.mp(j, k))
        except ValueError:
            continue
    if not b.steps:
        s = sig.sorts[0]
        p = Var(sig.canonical_var(s))
        b.taut(lor(p, Not(p)))
    return b.proof(mode=GlobalMode(tuple(hyps)))
