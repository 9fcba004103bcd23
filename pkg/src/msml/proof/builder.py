"""Incremental construction of checker-valid proofs, and the derived rules
for monotonicity, box/conjunction, diamond/disjunction and congruence."""
from __future__ import annotations

from ..core.formula import App, Formula, Not, as_iff, as_implication, box, iff, implies, land, lor
from ..core.signature import Signature
from .checker import (
    MP,
    UG,
    Axiom,
    DualInst,
    GlobalMode,
    Hyp,
    KInst,
    Mono,
    Proof,
    Step,
    Taut,
    instance_formula,
)
from .schemes import AxiomSet, dual_binding, k_binding, plug
from .taut import taut_check


class BuildError(ValueError):
    pass


def chain_implication(premises, target) -> Formula:
    """p1 -> (p2 -> ... -> target)"""
    out = target
    for p in reversed(premises):
        out = implies(p, out)
    return out


class ProofBuilder:
    """Appends steps, reusing any formula already proven. Every method returns
    the 1-based index of the step holding the requested formula."""

    def __init__(self, sig: Signature, axioms: AxiomSet | None = None, hyps=()):
        self.sig = sig
        self.axioms = axioms or AxiomSet()
        self.hyps = tuple(hyps)
        self.steps: list[Step] = []
        self.index: dict = {}

    def f(self, i) -> Formula:
        return self.steps[i - 1].formula

    def _add(self, formula, just) -> int:
        hit = self.index.get(formula)
        if hit is not None:
            return hit
        self.steps.append(Step(formula, just))
        n = len(self.steps)
        self.index[formula] = n
        return n

    # primitive rules

    def taut(self, formula) -> int:
        if formula in self.index:
            return self.index[formula]
        if not taut_check(self.sig, formula):
            raise BuildError(f"not a tautology: {formula!r}")
        return self._add(formula, Taut())

    def axiom(self, name, binding) -> int:
        just = Axiom.of(name, binding)
        return self._add(instance_formula(self.sig, self.axioms, just), just)

    def k(self, op, i, sides, phi, chi) -> int:
        just = KInst.of(op, i, k_binding(sides, i, phi, chi))
        return self._add(instance_formula(self.sig, self.axioms, just), just)

    def dual(self, op, args) -> int:
        just = DualInst.of(op, dual_binding(args))
        return self._add(instance_formula(self.sig, self.axioms, just), just)

    def hyp(self, formula) -> int:
        if formula not in self.hyps:
            raise BuildError("not a hypothesis")
        return self._add(formula, Hyp())

    def mp(self, j, k) -> int:
        imp = as_implication(self.f(k))
        if imp is None or imp[0] != self.f(j):
            raise BuildError(f"step {k} does not take step {j} to a conclusion")
        return self._add(imp[1], MP(j, k))

    def ug(self, op, i, j, sides) -> int:
        sides = tuple(sides)
        return self._add(box(op, plug(sides, i, self.f(j))), UG(op, i, j, sides))

    def mono(self, op, i, j, sides) -> int:
        sides = tuple(sides)
        a, b = as_implication(self.f(j))
        return self._add(implies(App(op, plug(sides, i, a)), App(op, plug(sides, i, b))), Mono(op, i, j, sides))

    # propositional glue

    def prop(self, target, premises=()) -> int:
        """Derive `target` from the cited steps by one tautology and MPs."""
        if target in self.index:
            return self.index[target]
        premises = list(premises)
        if not premises:
            return self.taut(target)
        cur = self.taut(chain_implication([self.f(p) for p in premises], target))
        for p in premises:
            cur = self.mp(p, cur)
        return cur

    def tranz(self, a, b) -> int:
        """From X -> Y and Y -> Z derive X -> Z."""
        x, _ = as_implication(self.f(a))
        _, z = as_implication(self.f(b))
        return self.prop(implies(x, z), [a, b])

    def restate(self, i) -> int:
        """Make step i's formula also the newest step (for final steps)."""
        if i == len(self.steps):
            return i
        f = self.f(i)
        t = implies(f, f)
        j = self.taut(t)
        self.steps.append(Step(f, MP(i, j)))
        return len(self.steps)

    # derived modal rules

    def box_mono(self, op, i, j, sides) -> int:
        """From step j = a -> b derive box(.., a, ..) -> box(.., b, ..)."""
        a, b = as_implication(self.f(j))
        g = self.ug(op, i, j, sides)
        k = self.k(op, i, sides, a, b)
        return self.mp(g, k)

    def dia_mono(self, op, i, j, sides) -> int:
        """From step j = a -> b derive op(.., a, ..) -> op(.., b, ..)."""
        if self.axioms.basis == "alternative":
            return self.mono(op, i, j, sides)
        a, b = as_implication(self.f(j))
        contra = self.prop(implies(Not(b), Not(a)), [j])
        nsides = [Not(s) for s in sides]
        m = self.box_mono(op, i, contra, nsides)
        d1 = self.dual(op, plug(sides, i, a))
        d2 = self.dual(op, plug(sides, i, b))
        return self.prop(implies(App(op, plug(sides, i, a)), App(op, plug(sides, i, b))), [m, d1, d2])

    def dia_cong(self, op, i, j, sides) -> int:
        """From step j = a <-> b derive op(.., a, ..) <-> op(.., b, ..)."""
        a, b = as_iff(self.f(j))
        fw = self.dia_mono(op, i, self.prop(implies(a, b), [j]), sides)
        bw = self.dia_mono(op, i, self.prop(implies(b, a), [j]), sides)
        return self.prop(iff(App(op, plug(sides, i, a)), App(op, plug(sides, i, b))), [fw, bw])

    def box_conj_intro(self, op, i, sides, a, b) -> int:
        """box(.., a, ..) & box(.., b, ..) -> box(.., a & b, ..)"""
        ab = land(a, b)
        t = self.taut(implies(a, implies(b, ab)))
        m = self.box_mono(op, i, t, sides)
        k = self.k(op, i, sides, b, ab)
        ba, bb, bab = (box(op, plug(sides, i, x)) for x in (a, b, ab))
        return self.prop(implies(land(ba, bb), bab), [m, k])

    def box_conj(self, op, i, sides, a, b) -> int:
        """box(.., a & b, ..) <-> box(.., a, ..) & box(.., b, ..)"""
        ab = land(a, b)
        l1 = self.box_mono(op, i, self.taut(implies(ab, a)), sides)
        l2 = self.box_mono(op, i, self.taut(implies(ab, b)), sides)
        r = self.box_conj_intro(op, i, sides, a, b)
        ba, bb, bab = (box(op, plug(sides, i, x)) for x in (a, b, ab))
        return self.prop(iff(bab, land(ba, bb)), [l1, l2, r])

    def dia_disj(self, op, i, sides, a, b) -> int:
        """op(.., a | b, ..) <-> op(.., a, ..) | op(.., b, ..)"""
        ab = lor(a, b)
        r1 = self.dia_mono(op, i, self.taut(implies(a, ab)), sides)
        r2 = self.dia_mono(op, i, self.taut(implies(b, ab)), sides)
        nsides = [Not(s) for s in sides]
        na, nb = Not(a), Not(b)
        c = self.box_conj_intro(op, i, nsides, na, nb)
        m = self.box_mono(op, i, self.taut(implies(land(na, nb), Not(ab))), nsides)
        ds = [self.dual(op, plug(sides, i, x)) for x in (a, b, ab)]
        oa, ob, oab = (App(op, plug(sides, i, x)) for x in (a, b, ab))
        return self.prop(iff(oab, lor(oa, ob)), [r1, r2, c, m, *ds])

    def box_conj_list(self, op, i, sides, items) -> int:
        """box(w1) & (box(w2) & ...) -> box(w1 & (w2 & ...)) for a right-nested
        conjunction of `items` (at least one)."""
        from ..core.formula import conj

        items = list(items)
        if len(items) == 1:
            f = box(op, plug(sides, i, items[0]))
            return self.taut(implies(f, f))
        rest = self.box_conj_list(op, i, sides, items[1:])
        head = self.box_conj_intro(op, i, sides, items[0], conj(items[1:]))
        boxes = [box(op, plug(sides, i, w)) for w in items]
        target = implies(conj(boxes), box(op, plug(sides, i, conj(items))))
        return self.prop(target, [rest, head])

    def proof(self, mode=None, last=None) -> Proof:
        steps = list(self.steps)
        if last is not None and last != len(steps):
            self.restate(last)
            steps = list(self.steps)
        return Proof(tuple(steps), mode if mode is not None else GlobalMode(self.hyps))


# --- generators ---------------------------------------------------------------------


def _import(b: ProofBuilder, proof: Proof) -> int:
    """Copy a theorem proof's steps into b; returns the index of its last step."""
    offset = {}
    for n, s in enumerate(proof.steps, 1):
        j = s.just
        t = type(j)
        if t is MP:
            idx = b.mp(offset[j.j], offset[j.k])
        elif t is UG:
            idx = b.ug(j.op, j.i, offset[j.j], j.sides)
        elif t is Mono:
            idx = b.mono(j.op, j.i, offset[j.j], j.sides)
        elif t is Hyp:
            idx = b.hyp(s.formula)
        elif t is Taut:
            idx = b.taut(s.formula)
        else:
            if instance_formula(b.sig, b.axioms, j) != s.formula:
                raise BuildError(f"supplied step {n} is not the stated instance")
            idx = b._add(s.formula, j)
        offset[n] = idx
    return offset[len(proof.steps)]


def _check_sub(sig, axioms, sub: Proof):
    from .checker import check_proof

    v = check_proof(sig, axioms, sub)
    if not v.ok:
        raise BuildError(f"supplied proof rejected at step {v.step}: {v.reason}")
    return v


def _new(sig, axioms, sub=None):
    hyps = sub.mode.hyps if sub is not None and isinstance(sub.mode, GlobalMode) else ()
    return ProofBuilder(sig, axioms, hyps)


def derive_mono(sig, op, i, sides, sub: Proof, axioms=None, dual=False) -> Proof:
    """From a proof of a -> b, a proof of box(.., a, ..) -> box(.., b, ..)
    (or of op(.., a, ..) -> op(.., b, ..) with dual=True)."""
    axioms = axioms or AxiomSet()
    _check_sub(sig, axioms, sub)
    b = _new(sig, axioms, sub)
    j = _import(b, sub)
    if as_implication(b.f(j)) is None:
        raise BuildError("supplied proof does not prove an implication")
    k = b.dia_mono(op, i, j, sides) if dual else b.box_mono(op, i, j, sides)
    return b.proof(last=k)


def derive_box_conj(sig, op, i, sides, a, c, axioms=None) -> Proof:
    b = ProofBuilder(sig, axioms)
    return b.proof(last=b.box_conj(op, i, sides, a, c))


def derive_dia_disj(sig, op, i, sides, a, c, axioms=None) -> Proof:
    b = ProofBuilder(sig, axioms)
    return b.proof(last=b.dia_disj(op, i, sides, a, c))


def derive_cong(sig, op, i, sides, sub: Proof, axioms=None) -> Proof:
    """From a proof of a <-> b, a proof of op(.., a, ..) <-> op(.., b, ..)."""
    axioms = axioms or AxiomSet()
    _check_sub(sig, axioms, sub)
    b = _new(sig, axioms, sub)
    j = _import(b, sub)
    if as_iff(b.f(j)) is None:
        raise BuildError("supplied proof does not prove an equivalence")
    return b.proof(last=b.dia_cong(op, i, j, sides))
