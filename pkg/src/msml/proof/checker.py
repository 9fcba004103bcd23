"""Hilbert-style proofs and their checker, in local and global mode."""
from __future__ import annotations

from dataclasses import dataclass

from ..core.formula import App, Formula, as_implication, box, conj, guarded
from ..core.signature import Signature, SortError, sort_of
from .schemes import (
    AxiomSet,
    SchemeError,
    add_instance,
    dual_instance,
    instantiate_scheme,
    k_instance,
    norm_instance,
    plug,
)
from .taut import TooManyAtoms, taut_check


# --- justifications --------------------------------------------------------------


def _frozen_binding(binding):
    return tuple(sorted(dict(binding).items()))


@dataclass(frozen=True)
class Taut:
    pass


@dataclass(frozen=True)
class Axiom:
    name: str
    binding: tuple  # sorted ((M, formula), ...)

    @classmethod
    def of(cls, name, binding):
        return cls(name, _frozen_binding(binding))


@dataclass(frozen=True)
class KInst:
    op: str
    i: int
    binding: tuple

    @classmethod
    def of(cls, op, i, binding):
        return cls(op, i, _frozen_binding(binding))


@dataclass(frozen=True)
class DualInst:
    op: str
    binding: tuple

    @classmethod
    def of(cls, op, binding):
        return cls(op, _frozen_binding(binding))


@dataclass(frozen=True)
class NormInst:
    op: str
    i: int
    binding: tuple

    @classmethod
    def of(cls, op, i, binding):
        return cls(op, i, _frozen_binding(binding))


@dataclass(frozen=True)
class AddInst:
    op: str
    i: int
    binding: tuple

    @classmethod
    def of(cls, op, i, binding):
        return cls(op, i, _frozen_binding(binding))


@dataclass(frozen=True)
class Hyp:
    pass


@dataclass(frozen=True)
class MP:
    j: int  # the antecedent
    k: int  # the implication


@dataclass(frozen=True)
class UG:
    op: str
    i: int
    j: int
    sides: tuple = ()


@dataclass(frozen=True)
class Mono:
    op: str
    i: int
    j: int
    sides: tuple = ()


INSTANCE_RULES = (Axiom, KInst, DualInst, NormInst, AddInst)


@dataclass(frozen=True)
class Step:
    formula: Formula
    just: object


@dataclass(frozen=True)
class GlobalMode:
    hyps: tuple = ()


@dataclass(frozen=True)
class LocalMode:
    sort: str
    hyps: tuple = ()
    witnesses: tuple = ()  # 1-based indices into hyps

    def witness_formulas(self):
        return tuple(self.hyps[i - 1] for i in self.witnesses)


@dataclass(frozen=True)
class Proof:
    steps: tuple
    mode: object = GlobalMode()

    def __len__(self):
        return len(self.steps)

    @property
    def last(self) -> Formula:
        return self.steps[-1].formula


@dataclass
class Verdict:
    ok: bool
    conclusion: Formula | None = None
    step: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


class StepError(ValueError):
    pass


# --- checking ------------------------------------------------------------------


def instance_formula(sig: Signature, axioms: AxiomSet, just) -> Formula:
    """The formula a scheme-instance justification stands for."""
    t = type(just)
    if t is Axiom:
        return instantiate_scheme(sig, axioms[just.name], dict(just.binding))
    alt = axioms.basis == "alternative"
    if t in (KInst, DualInst) and alt:
        raise StepError("K and Dual are not part of the alternative basis")
    if t in (NormInst, AddInst) and not alt:
        raise StepError("Norm and Add belong to the alternative basis only")
    if t is KInst:
        return k_instance(sig, just.op, just.i, dict(just.binding))
    if t is DualInst:
        return dual_instance(sig, just.op, dict(just.binding))
    if t is NormInst:
        return norm_instance(sig, just.op, just.i, dict(just.binding))
    if t is AddInst:
        return add_instance(sig, just.op, just.i, dict(just.binding))
    raise StepError(f"{t.__name__} is not an instance rule")


def _cited(idx, j):
    if not 1 <= j < idx:
        raise StepError(f"cites step {j}, which is not an earlier step")


def _sides_ok(sig, op, i, sides, inner):
    decl = sig.op(op)
    if decl.arity == 0:
        raise StepError(f"{op} is nullary")
    if not 1 <= i <= decl.arity:
        raise StepError(f"position {i} out of range for {op}")
    if len(sides) != decl.arity - 1:
        raise StepError(f"{op} needs {decl.arity - 1} side formulas, got {len(sides)}")
    args = plug(sides, i, inner)
    for k, (a, s) in enumerate(zip(args, decl.arg_sorts), 1):
        got = sort_of(sig, a)
        if got != s:
            raise StepError(f"argument {k} of {op} has sort {got}, expected {s}")
    return args


class Checker:
    """Validates steps; results for (formula, justification, cited formulas)
    are cached, which is sound because the check is a pure function."""

    def __init__(self, sig: Signature, axioms: AxiomSet):
        self.sig = sig
        self.axioms = axioms
        self.cache = {}

    def check_step(self, idx, step: Step, formulas, mode):
        sig, just = self.sig, step.just
        f = step.formula
        sort_of(sig, f)
        t = type(just)
        if t is Hyp:
            if isinstance(mode, LocalMode):
                raise StepError("hypothesis steps are not allowed in local mode")
            if f not in mode.hyps:
                raise StepError("formula is not among the hypotheses")
            return
        if t is Taut:
            key = (f, just)
        elif t in INSTANCE_RULES:
            key = (f, just)
        elif t is MP:
            _cited(idx, just.j)
            _cited(idx, just.k)
            key = (f, t, formulas[just.j - 1], formulas[just.k - 1])
        elif t in (UG, Mono):
            _cited(idx, just.j)
            key = (f, just, formulas[just.j - 1])
        else:
            raise StepError(f"unknown justification {just!r}")
        hit = self.cache.get(key)
        if hit is None:
            try:
                self._check(f, just, formulas)
                hit = ""
            except (StepError, SchemeError, SortError, TooManyAtoms) as e:
                hit = str(e) or type(e).__name__
            self.cache[key] = hit
        if hit:
            raise StepError(hit)

    def _check(self, f, just, formulas):
        sig, t = self.sig, type(just)
        if t is Taut:
            if not taut_check(sig, f):
                raise StepError("not a tautology")
        elif t in INSTANCE_RULES:
            if instance_formula(sig, self.axioms, just) != f:
                raise StepError("formula differs from the scheme instance")
        elif t is MP:
            imp = as_implication(formulas[just.k - 1])
            if imp is None:
                raise StepError(f"step {just.k} is not an implication")
            if imp[0] != formulas[just.j - 1]:
                raise StepError(f"antecedent of step {just.k} is not step {just.j}")
            if imp[1] != f:
                raise StepError(f"consequent of step {just.k} is not this formula")
        elif t is UG:
            if self.axioms.basis == "alternative":
                raise StepError("UG is replaced by the monotonicity rule in the alternative basis")
            args = _sides_ok(sig, just.op, just.i, just.sides, formulas[just.j - 1])
            if box(just.op, args) != f:
                raise StepError("formula is not the generalized box")
        elif t is Mono:
            if self.axioms.basis != "alternative":
                raise StepError("the monotonicity rule belongs to the alternative basis")
            imp = as_implication(formulas[just.j - 1])
            if imp is None:
                raise StepError(f"step {just.j} is not an implication")
            a = _sides_ok(sig, just.op, just.i, just.sides, imp[0])
            b = _sides_ok(sig, just.op, just.i, just.sides, imp[1])
            from ..core.formula import implies

            if implies(App(just.op, a), App(just.op, b)) != f:
                raise StepError("formula is not the monotone image of the premise")


def check_proof(sig: Signature, axioms: AxiomSet, proof: Proof, checker: Checker | None = None,
                start: int = 1) -> Verdict:
    """Steps before `start` are taken as already checked (used for mutants
    that share a checked prefix with the original)."""
    checker = checker or Checker(sig, axioms)
    mode = proof.mode
    if not proof.steps:
        return Verdict(False, None, None, "empty proof")
    if isinstance(mode, LocalMode):
        try:
            for h in mode.hyps:
                if sort_of(sig, h) != mode.sort:
                    return Verdict(False, None, None, f"hypothesis is not of sort {mode.sort}")
        except SortError as e:
            return Verdict(False, None, None, str(e))
        for w in mode.witnesses:
            if not 1 <= w <= len(mode.hyps):
                return Verdict(False, None, None, f"witness {w} does not name a hypothesis")
    formulas = [s.formula for s in proof.steps]
    for idx in range(max(start, 1), len(formulas) + 1):
        step = proof.steps[idx - 1]
        try:
            checker.check_step(idx, step, formulas, mode)
        except (StepError, SortError) as e:
            return Verdict(False, None, idx, str(e))
    last = formulas[-1]
    if isinstance(mode, LocalMode):
        if sort_of(sig, last) != mode.sort:
            return Verdict(False, None, len(formulas), f"final formula is not of sort {mode.sort}")
        wits = mode.witness_formulas()
        if not wits:
            return Verdict(True, last)
        imp = as_implication(last)
        if imp is None or imp[0] != conj(list(wits)):
            return Verdict(False, None, len(formulas), "final formula is not the witness conjunction implication")
        return Verdict(True, imp[1])
    return Verdict(True, last)


def local_target(witnesses, phi) -> Formula:
    return guarded(list(witnesses), phi)


def cited_instances(proof: Proof):
    """Formulas of steps justified by a scheme instance."""
    return [s.formula for s in proof.steps if type(s.just) in INSTANCE_RULES]


def lambda_instances(proof: Proof):
    """Instances of user schemes only (K/Dual/Norm/Add are valid everywhere)."""
    return [s.formula for s in proof.steps if type(s.just) is Axiom]


def prune(proof: Proof) -> Proof:
    """Drop steps the last step does not depend on, renumbering citations."""
    steps = proof.steps
    need = set()
    stack = [len(steps)]
    while stack:
        i = stack.pop()
        if i in need:
            continue
        need.add(i)
        j = steps[i - 1].just
        if type(j) is MP:
            stack.extend((j.j, j.k))
        elif type(j) in (UG, Mono):
            stack.append(j.j)
    order = sorted(need)
    renum = {old: new for new, old in enumerate(order, 1)}
    out = []
    for old in order:
        s = steps[old - 1]
        out.append(Step(s.formula, renumber(s.just, renum.__getitem__)))
    return Proof(tuple(out), proof.mode)


def renumber(just, f):
    t = type(just)
    if t is MP:
        return MP(f(just.j), f(just.k))
    if t is UG:
        return UG(just.op, just.i, f(just.j), just.sides)
    if t is Mono:
        return Mono(just.op, just.i, f(just.j), just.sides)
    return just


def delete_step(proof: Proof, t: int) -> Proof:
    """Mutant with step t removed. Citations of later steps shift down by one;
    citations of t itself now land on whatever follows it."""
    shift = lambda c: c - 1 if c > t else c
    # steps before t only cite earlier steps, so they are unchanged
    tail = [Step(s.formula, renumber(s.just, shift)) for s in proof.steps[t:]]
    return Proof(tuple(proof.steps[: t - 1]) + tuple(tail), proof.mode)
