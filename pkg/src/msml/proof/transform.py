"""Proof transformations: the local deduction theorem (both directions), the
global-to-local transfer and the global deduction theorem, plus the finite
closure of a hypothesis set under boxes."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..core.formula import Formula, as_implication, box, conj, guarded, implies
from ..core.signature import Signature, SortError, mk_top, sort_of
from .builder import ProofBuilder
from .checker import (
    MP,
    UG,
    GlobalMode,
    Hyp,
    LocalMode,
    Mono,
    Proof,
    Taut,
    check_proof,
    instance_formula,
)
from .schemes import AxiomSet, plug


class TransformError(ValueError):
    pass


@dataclass(frozen=True)
class Witness:
    """A member of the box closure: `base` wrapped by the boxes in `chain`,
    innermost first; each link is (op, position, side formulas)."""

    formula: Formula
    base: Formula
    chain: tuple = ()

    def wrap(self, op, i, sides) -> "Witness":
        sides = tuple(sides)
        return Witness(box(op, plug(sides, i, self.formula)), self.base, self.chain + ((op, i, sides),))

    def rebuild(self) -> Formula:
        f = self.base
        for op, i, sides in self.chain:
            f = box(op, plug(sides, i, f))
        return f

    def verify(self, sig: Signature, bases) -> bool:
        if self.base not in bases or self.rebuild() != self.formula:
            return False
        try:
            sort_of(sig, self.formula)
        except SortError:
            return False
        return True


def _require(sig, axioms, proof, kind):
    v = check_proof(sig, axioms, proof)
    if not v.ok:
        raise TransformError(f"input {kind} proof rejected at step {v.step}: {v.reason}")
    return v


def _merge(a, b):
    out = list(a)
    seen = {w.formula for w in a}
    for w in b:
        if w.formula not in seen:
            seen.add(w.formula)
            out.append(w)
    return out


def _lift(sig, axioms, proof: Proof, is_witness, keep_hyps=()):
    """Rebuild `proof` so that each step k becomes conj(W_k) -> phi_k, where
    W_k lists the witness hypotheses (pushed through boxes) the step depends
    on. Hypotheses accepted by `is_witness` become witnesses, others stay Hyp
    steps (they must be in keep_hyps)."""
    if axioms.basis != "standard":
        raise TransformError("transformations are implemented for the standard basis")
    b = ProofBuilder(sig, axioms, keep_hyps)
    at = {}  # input step -> (builder index, witnesses)
    for n, step in enumerate(proof.steps, 1):
        phi, just = step.formula, step.just
        t = type(just)
        if t is Hyp and is_witness(phi):
            w = [Witness(phi, phi)]
            at[n] = (b.taut(implies(phi, phi)), w)
        elif t is Hyp:
            at[n] = (b.hyp(phi), [])
        elif t is Taut:
            at[n] = (b.taut(phi), [])
        elif t is MP:
            ia, wa = at[just.j]
            ib, wb = at[just.k]
            w = _merge(wa, wb)
            if not w:
                at[n] = (b.mp(ia, ib), [])
            else:
                at[n] = (b.prop(guarded([x.formula for x in w], phi), [ia, ib]), w)
        elif t is UG:
            ia, wa = at[just.j]
            op, i, sides = just.op, just.i, just.sides
            if not wa:
                at[n] = (b.ug(op, i, ia, sides), [])
                continue
            g = b.box_mono(op, i, ia, sides)  # box(c) -> box(phi_j)
            gather = b.box_conj_list(op, i, sides, [x.formula for x in wa])
            w = [x.wrap(op, i, sides) for x in wa]
            at[n] = (b.prop(implies(conj([x.formula for x in w]), phi), [gather, g]), w)
        elif t is Mono:
            raise TransformError("monotonicity steps are not supported by the transformations")
        else:
            f = instance_formula(sig, axioms, just)
            if f != phi:
                raise TransformError(f"step {n} is not the stated instance")
            at[n] = (b._add(phi, just), [])
    last, wits = at[len(proof.steps)]
    return b, last, wits


@dataclass
class GlobalizeResult:
    witnesses: list  # Witness objects, members of the box closure of the hypotheses
    proof: Proof  # local proof from the witnesses


def globalize(sig, axioms: AxiomSet, proof: Proof) -> GlobalizeResult:
    if not isinstance(proof.mode, GlobalMode):
        raise TransformError("globalize expects a global-mode proof")
    _require(sig, axioms, proof, "global")
    b, last, wits = _lift(sig, axioms, proof, lambda f: True)
    s = sort_of(sig, proof.last)
    forms = tuple(w.formula for w in wits)
    mode = LocalMode(s, forms, tuple(range(1, len(forms) + 1)))
    return GlobalizeResult(wits, b.proof(mode=mode, last=last))


@dataclass
class DeductionResult:
    witnesses: list  # members of the box closure of {phi}
    proof: Proof  # global proof from the remaining hypotheses


def dt_global(sig, axioms: AxiomSet, proof: Proof, phi: Formula) -> DeductionResult:
    """From a global proof using hypotheses G + {phi}, a global proof from G
    of (w1 & ... & wn) -> psi with each wi a boxed copy of phi; with no
    witnesses the conclusion is top -> psi."""
    if not isinstance(proof.mode, GlobalMode):
        raise TransformError("dt_global expects a global-mode proof")
    _require(sig, axioms, proof, "global")
    rest = tuple(h for h in proof.mode.hyps if h != phi)
    b, last, wits = _lift(sig, axioms, proof, lambda f: f == phi, keep_hyps=rest)
    psi = proof.last
    if not wits:
        top = mk_top(sig, sort_of(sig, psi))
        last = b.prop(implies(top, psi), [last])
    return DeductionResult(wits, b.proof(mode=GlobalMode(rest), last=last))


def dt_local(sig, axioms: AxiomSet, proof: Proof, phi: Formula) -> Proof:
    """From a local proof of psi from hyps + {phi}, a local proof of
    phi -> psi from the hyps without phi."""
    mode = proof.mode
    if not isinstance(mode, LocalMode):
        raise TransformError("dt_local expects a local-mode proof")
    v = _require(sig, axioms, proof, "local")
    if sort_of(sig, phi) != mode.sort:
        raise TransformError("phi has the wrong sort")
    psi = v.conclusion
    hyps = tuple(h for h in mode.hyps if h != phi)
    wits = [w for w in mode.witness_formulas() if w != phi]
    seen, keep = set(), []
    for w in wits:
        if w not in seen:
            seen.add(w)
            keep.append(w)
    b = ProofBuilder(sig, axioms)
    last = _import_local(b, proof)
    last = b.prop(guarded(keep, implies(phi, psi)), [last])
    idx = tuple(hyps.index(w) + 1 for w in keep)
    return b.proof(mode=LocalMode(mode.sort, hyps, idx), last=last)


def dt_local_inverse(sig, axioms: AxiomSet, proof: Proof) -> Proof:
    """From a local proof of phi -> psi, a local proof of psi with phi added
    to the hypotheses and the witnesses."""
    mode = proof.mode
    if not isinstance(mode, LocalMode):
        raise TransformError("expects a local-mode proof")
    v = _require(sig, axioms, proof, "local")
    imp = as_implication(v.conclusion)
    if imp is None:
        raise TransformError("conclusion is not an implication")
    phi, psi = imp
    hyps = mode.hyps if phi in mode.hyps else mode.hyps + (phi,)
    wits = list(mode.witness_formulas())
    if phi not in wits:
        wits.append(phi)
    b = ProofBuilder(sig, axioms)
    last = _import_local(b, proof)
    last = b.prop(guarded(wits, psi), [last])
    idx = tuple(hyps.index(w) + 1 for w in wits)
    return b.proof(mode=LocalMode(mode.sort, hyps, idx), last=last)


def _import_local(b: ProofBuilder, proof: Proof) -> int:
    from .builder import _import

    return _import(b, Proof(proof.steps, GlobalMode()))


# --- closure -------------------------------------------------------------------


def gamma_closure(sig: Signature, gamma, k: int, side_pool) -> dict:
    """Gamma^k: k rounds of prefixing a box at every argument position, side
    formulas drawn from side_pool (sort -> formulas)."""
    if k < 0:
        raise ValueError("depth must be non-negative")
    cur = {s: [] for s in sig.sorts}
    for s, fs in dict(gamma).items():
        for f in fs:
            if sort_of(sig, f) != s:
                raise SortError(f"member of gamma at {s} has another sort")
            if f not in cur[s]:
                cur[s].append(f)
    pool = {s: list(fs) for s, fs in dict(side_pool).items()}
    for _ in range(k):
        nxt = {s: list(fs) for s, fs in cur.items()}
        for op in sig.ops.values():
            n = op.arity
            for i in range(1, n + 1):
                inner = cur[op.arg_sorts[i - 1]]
                if not inner:
                    continue
                other = [op.arg_sorts[j - 1] for j in range(1, n + 1) if j != i]
                for s in other:
                    if not pool.get(s):
                        raise TransformError(f"side pool has no formulas of sort {s} needed by {op.name}")
                for sides in itertools.product(*(pool[s] for s in other)):
                    for g in inner:
                        f = box(op.name, plug(sides, i, g))
                        if f not in nxt[op.result_sort]:
                            nxt[op.result_sort].append(f)
        cur = nxt
    return cur
