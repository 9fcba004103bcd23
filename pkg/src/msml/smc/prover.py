"""Proof construction for straight-line SMC programs: a symbolic executor
that emits, for a start configuration term and a control term, a kernel
proof of  pre -> [ctrl] post  over the SMC axioms."""
from __future__ import annotations

from dataclasses import dataclass

from ..core.formula import App, Formula, Not, Var, as_implication, iff, implies
from ..proof.builder import ProofBuilder
from ..proof.checker import Checker, GlobalMode, Proof, check_proof, delete_step, prune
from ..proof.schemes import numeral_value, truth_value
from .axioms import pbox, smc_axioms
from .syntax import PGM_TEXT, SmcError, canon_ctrl, expand, nat, parse_program, smc_signature, to_term

MAX_DEPTH = 2_000


def as_pbox(f: Formula):
    """(ctrl, gamma) when f is !exec(ctrl, !gamma), else None."""
    if type(f) is Not and type(f.child) is App and f.child.op == "exec":
        p, ng = f.child.args
        if type(ng) is Not:
            return p, ng.child
    return None


def _config(stack, mem):
    return App("config", [stack, mem])


def _cons(v, rest):
    return App("cons", [v, rest])


def _nval(n):
    return App("nat2val", [nat(n)])


def _top(stack):
    if stack.op != "cons":
        raise SmcError(f"value stack {stack!r} has no known top")
    return stack.args[0], stack.args[1]


def _top_nat(stack):
    v, rest = _top(stack)
    n = numeral_value(v.args[0]) if v.op == "nat2val" else None
    if n is None:
        raise SmcError(f"expected a natural on top of {stack!r}")
    return v.args[0], rest


def _ground_val(v):
    return v.op in ("nat2val", "bool2val") and (
        numeral_value(v.args[0]) is not None or truth_value(v.args[0]) is not None
    )


_D_RULES = {
    ("cs", "seq"): ("CStmt", ("S1", "S2")),
    ("cs", "assign"): ("Dasgn", ("X", "A1")),
    ("cs", "ite"): ("Dif", ("B", "S1", "S2")),
    ("cs", "while"): ("Dwhile", ("B", "S")),
    ("ca", "add"): ("Dplus", ("A1", "A2")),
    ("cb", "le"): ("Dleq", ("A1", "A2")),
}


class PgmProver:
    def __init__(self, sig=None, axioms=None):
        self.sig = sig or smc_signature()
        self.axioms = axioms or smc_axioms(self.sig)
        self.b = ProofBuilder(self.sig, self.axioms)
        self.depth = 0

    # --- program simplification ---------------------------------------------------

    def unfold(self, term: Formula):
        """Step index of  term <-> canon(term), or None when they coincide."""
        canon = canon_ctrl(term)
        if canon == term:
            return None
        b = self.b
        e = expand(term)
        if e is not None:
            name, metas = _D_RULES[(term.op, term.args[0].op)]
            d = b.axiom(name, dict(zip(metas, term.args[0].args)))
            rest = self.unfold(e)
            return d if rest is None else b.prop(iff(term, canon), [d, rest])
        # a combinator: rewrite each argument in turn
        cur, acc = list(term.args), None
        for i, a in enumerate(term.args, 1):
            k = self.unfold(a)
            if k is None:
                continue
            sides = cur[: i - 1] + cur[i:]
            step = b.dia_cong(term.op, i, k, sides)
            cur[i - 1] = canon_ctrl(a)
            acc = step if acc is None else b.prop(iff(term, App(term.op, cur)), [acc, step])
        return acc

    # --- boxes ------------------------------------------------------------------------

    def box_mono(self, p, j):
        """From step j = a -> b derive [p]a -> [p]b."""
        b = self.b
        a, c = as_implication(b.f(j))
        contra = b.prop(implies(Not(c), Not(a)), [j])
        m = b.dia_mono("exec", 2, contra, [p])
        return b.prop(implies(pbox(p, a), pbox(p, c)), [m])

    def to_target(self, x, gamma):
        """Step index of x -> gamma, or None when x == gamma."""
        if x == gamma:
            return None
        pb = as_pbox(gamma)
        if pb is None:
            raise SmcError(f"cannot reach {gamma!r} from {x!r}")
        return self.prove(x, *pb)

    def prove(self, pre, ctrl, gamma):
        """Step index of  pre -> [ctrl] gamma  for a configuration term pre."""
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise SmcError("proof search depth exceeded")
        try:
            return self._prove(pre, ctrl, gamma)
        finally:
            self.depth -= 1

    def _prove(self, pre, ctrl, gamma):
        b = self.b
        target = implies(pre, pbox(ctrl, gamma))
        if target in b.index:
            return b.index[target]
        op = ctrl.op
        if op == "then":
            p1, p2 = ctrl.args
            j = self.prove(pre, p1, pbox(p2, gamma))
            ax = b.axiom("Athen", {"PI": p1, "PI2": p2, "G": gamma})
            return b.prop(target, [j, ax])
        if op == "choice":
            p1, p2 = ctrl.args
            j1 = self.prove(pre, p1, gamma)
            j2 = self.prove(pre, p2, gamma)
            ax = b.axiom("Achoice", {"PI": p1, "PI2": p2, "G": gamma})
            return b.prop(target, [j1, j2, ax])
        if op == "star":
            p = ctrl.args[0]
            here = self.to_target(pre, gamma)
            again = self.prove(pre, p, pbox(ctrl, gamma))
            ax = b.axiom("Astar", {"PI": p, "G": gamma})
            return b.prop(target, [x for x in (here, again, ax) if x is not None])
        if expand(ctrl) is not None:
            k = self.unfold(ctrl)
            j = self.prove(pre, canon_ctrl(ctrl), gamma)
            cong = b.dia_cong("exec", 1, k, [Not(gamma)])
            return b.prop(target, [j, cong])
        return self._primitive(pre, ctrl, gamma, target)

    def _primitive(self, pre, ctrl, gamma, target):
        b = self.b
        if pre.op != "config":
            raise SmcError(f"not a configuration term: {pre!r}")
        stack, mem = pre.args
        op = ctrl.op
        lead = None  # step turning pre into the axiom's premise
        if op == "ca" and ctrl.args[0].op == "nat2aexp":
            n = ctrl.args[0].args[0]
            ax = b.axiom("Aint", {"VS": stack, "MEM": mem, "N": n})
            post = _config(_cons(App("nat2val", [n]), stack), mem)
        elif op == "ca" and ctrl.args[0].op == "var2aexp":
            x = ctrl.args[0].args[0]
            k, mem2 = self.bring_up(mem, x)
            if k is not None:
                lead = b.dia_cong("config", 2, k, [stack])
            inner, _, n = mem2.args
            ax = b.axiom("Aid", {"VS": stack, "MEM": inner, "X": x, "N": n})
            post = _config(_cons(App("nat2val", [n]), stack), mem2)
        elif op == "asgn":
            n, rest = _top_nat(stack)
            x = ctrl.args[0]
            ax = b.axiom("Aasgn", {"VS": rest, "MEM": mem, "X": x, "N": n})
            post = _config(rest, App("set", [mem, x, n]))
        elif op == "plus":
            n2, rest = _top_nat(stack)
            n1, rest = _top_nat(rest)
            n = nat(numeral_value(n1) + numeral_value(n2))
            if n.op not in self.sig.ops:
                raise SmcError(f"numeral {n.op} is missing from the signature")
            ax = b.axiom("Aplus", {"VS": rest, "MEM": mem, "N": n, "N1": n1, "N2": n2})
            post = _config(_cons(App("nat2val", [n]), rest), mem)
        elif op == "leq":
            n1, rest = _top_nat(stack)
            n2, rest = _top_nat(rest)
            t = App("true" if numeral_value(n1) <= numeral_value(n2) else "false")
            ax = b.axiom("Aleq", {"VS": rest, "MEM": mem, "N1": n1, "N2": n2, "T": t})
            post = _config(_cons(App("bool2val", [t]), rest), mem)
        elif op == "test":
            v, rest = _top(stack)
            want = ctrl.args[0]
            if v == want:
                ax = b.axiom("Atest", {"V": v, "VS": rest, "MEM": mem})
                post = _config(rest, mem)
            elif _ground_val(v) and _ground_val(want):
                return b.axiom("Antest", {"V": v, "V2": want, "VS": rest, "MEM": mem, "G": gamma})
            else:
                raise SmcError(f"cannot decide test {want!r} against {v!r}")
        elif op == "cs" and ctrl.args[0].op == "skip":
            ax = b.axiom("Askip", {"G": pre})
            post = pre
        else:
            raise SmcError(f"no axiom executes {ctrl!r}")
        first = ax if lead is None else b.prop(implies(pre, pbox(ctrl, post)), [lead, ax])
        rest = self.to_target(post, gamma)
        if rest is None:
            return first
        return b.tranz(first, self.box_mono(ctrl, rest))

    def bring_up(self, mem, x):
        """(step of mem <-> mem2 or None, mem2) with mem2 = set(_, x, _)."""
        b = self.b
        if mem.op != "set":
            raise SmcError(f"the value of {x.op} in {mem!r} is unknown")
        inner, y, n = mem.args
        if y == x:
            return None, mem
        k, inner2 = self.bring_up(inner, x)
        m0, _, n0 = inner2.args
        swap = b.axiom("AMem2", {"MEM": m0, "X": x, "N": n0, "Y": y, "N2": n})
        mem2 = App("set", [App("set", [m0, y, n]), x, n0])
        if k is None:
            return swap, mem2
        cong = b.dia_cong("set", 1, k, [y, n])
        return b.prop(iff(mem, mem2), [cong, swap]), mem2


# --- symbolic run -------------------------------------------------------------------------


def symbolic_finals(pre, ctrl, budget=10_000):
    """Final configuration terms of a symbolic run from the term `pre`; the
    stack and memory may have variable bases but every value read must be
    determined."""
    out, work, steps = [], [(pre, canon_ctrl(ctrl))], 0
    while work:
        cfg, k = work.pop()
        if k is None:
            if cfg not in out:
                out.append(cfg)
            continue
        steps += 1
        if steps > budget:
            raise SmcError("symbolic run exceeded its budget")
        for nxt in _sym_step(cfg, k):
            work.append(nxt)
    return out


def _sym_step(cfg, k):
    op = k.op
    if op == "then":
        a, c = k.args
        return [(x, c if r is None else App("then", [r, c])) for x, r in _sym_step(cfg, a)]
    if op == "choice":
        return [(cfg, k.args[1]), (cfg, k.args[0])]
    if op == "star":
        return [(cfg, None), (cfg, App("then", [k.args[0], k]))]
    e = expand(k)
    if e is not None:
        return [(cfg, canon_ctrl(e))]
    stack, mem = cfg.args
    if op == "ca" and k.args[0].op == "nat2aexp":
        return [(_config(_cons(App("nat2val", [k.args[0].args[0]]), stack), mem), None)]
    if op == "ca" and k.args[0].op == "var2aexp":
        x = k.args[0].args[0]
        m = mem
        while m.op == "set" and m.args[1] != x:
            m = m.args[0]
        if m.op != "set":
            raise SmcError(f"the value of {x.op} is unknown")
        return [(_config(_cons(App("nat2val", [m.args[2]]), stack), _moved(mem, x)), None)]
    if op == "asgn":
        n, rest = _top_nat(stack)
        return [(_config(rest, App("set", [mem, k.args[0], n])), None)]
    if op == "plus":
        n2, rest = _top_nat(stack)
        n1, rest = _top_nat(rest)
        return [(_config(_cons(_nval(numeral_value(n1) + numeral_value(n2)), rest), mem), None)]
    if op == "leq":
        n1, rest = _top_nat(stack)
        n2, rest = _top_nat(rest)
        t = App("true" if numeral_value(n1) <= numeral_value(n2) else "false")
        return [(_config(_cons(App("bool2val", [t]), rest), mem), None)]
    if op == "test":
        v, rest = _top(stack)
        if v == k.args[0]:
            return [(_config(rest, mem), None)]
        if _ground_val(v) and _ground_val(k.args[0]):
            return []
        raise SmcError("undecidable test")
    if op == "cs" and k.args[0].op == "skip":
        return [(cfg, None)]
    raise SmcError(f"cannot execute {k!r}")


def _moved(mem, x):
    """The memory term after bring_up moves x's outermost entry to the top."""
    if mem.args[1] == x:
        return mem
    inner, y, n = mem.args
    inner2 = _moved(inner, x)
    m0, _, n0 = inner2.args
    return App("set", [App("set", [m0, y, n]), x, n0])


# --- the worked example ------------------------------------------------------------------


def pgm_term():
    return to_term(parse_program(PGM_TEXT))


def pgm_start():
    return _config(Var("vs"), Var("mem"))


def pgm_final_memory():
    def s(m, x, n):
        return App("set", [m, App(x), nat(n)])

    return s(s(s(Var("mem"), "i2", 2), "i1", 1), "m", 1)


def pgm_conclusion(sig=None):
    """config(vs, mem) -> [cs(pgm)] config(vs, set(set(set(mem, i2, 2), i1, 1), m, 1))"""
    return implies(pgm_start(), pbox(App("cs", [pgm_term()]), _config(Var("vs"), pgm_final_memory())))


@dataclass
class Elaboration:
    proof: Proof
    conclusion: Formula
    step_map: dict  # worked-example step label -> kernel step number


def prove_program(stmt: Formula, sig=None, axioms=None, pre=None):
    """Global proof of  pre -> [cs(stmt)] final  with the unique symbolic final."""
    pv = PgmProver(sig, axioms)
    pre = pre if pre is not None else pgm_start()
    ctrl = App("cs", [stmt])
    finals = symbolic_finals(pre, ctrl)
    if len(finals) != 1:
        raise SmcError(f"expected one final configuration, found {len(finals)}")
    final = finals[0]
    canon = canon_ctrl(ctrl)
    k = pv.unfold(ctrl)
    j = pv.prove(pre, canon, final)
    b = pv.b
    goal = implies(pre, pbox(ctrl, final))
    if k is not None:
        cong = b.dia_cong("exec", 1, k, [Not(final)])
        j = b.prop(goal, [j, cong])
    proof = prune(b.proof(mode=GlobalMode(), last=j))
    return proof, goal, pv


def _example_labels(sig):
    """Instance formulas of the axiom steps in the worked example, by label."""
    from ..core.parser import parse_formula

    vs = "vs"
    m1 = "set(mem, i1, 1)"
    m12 = f"set({m1}, i2, 2)"
    m21 = "set(set(mem, i2, 2), i1, 1)"
    mf = f"set({m21}, m, 1)"
    n = lambda k: f"nat2val({k})"  # noqa: E731
    tv = "bool2val(true)"

    def box(p, g):
        return f"!exec({p}, !{g})"

    raw = {
        "(1) Aint": f"config({vs}, mem) -> {box('ca(nat2aexp(1))', f'config(cons({n(1)}, {vs}), mem)')}",
        "(2) Aasgn": f"config(cons({n(1)}, {vs}), mem) -> {box('asgn(i1)', f'config({vs}, {m1})')}",
        "(6) Aint": f"config({vs}, {m1}) -> {box('ca(nat2aexp(2))', f'config(cons({n(2)}, {vs}), {m1})')}",
        "(7) Aasgn": f"config(cons({n(2)}, {vs}), {m1}) -> {box('asgn(i2)', f'config({vs}, {m12})')}",
        "(10) Aid": f"config({vs}, {m12}) -> {box('ca(var2aexp(i2))', f'config(cons({n(2)}, {vs}), {m12})')}",
        "(11) AMem2": f"{m12} <-> {m21}",
        "(12) Aid": f"config(cons({n(2)}, {vs}), {m21}) -> "
        + box("ca(var2aexp(i1))", f"config(cons({n(1)}, cons({n(2)}, {vs})), {m21})"),
        "(15) Aleq": f"config(cons({n(1)}, cons({n(2)}, {vs})), {m21}) -> "
        + box("leq", f"config(cons({tv}, {vs}), {m21})"),
        "(17) Atest": f"config(cons({tv}, {vs}), {m21}) -> {box(f'test({tv})', f'config({vs}, {m21})')}",
        "(18) Aid": f"config({vs}, {m21}) -> {box('ca(var2aexp(i1))', f'config(cons({n(1)}, {vs}), {m21})')}",
        "(19) Aasgn": f"config(cons({n(1)}, {vs}), {m21}) -> {box('asgn(m)', f'config({vs}, {mf})')}",
    }
    return {k: parse_formula(sig, v) for k, v in raw.items()}


def elaborate_pgm_proof(sig=None) -> Elaboration:
    sig = sig or smc_signature()
    proof, goal, _ = prove_program(pgm_term(), sig)
    want = pgm_conclusion()
    if goal != want:
        raise SmcError("the symbolic run did not reach the expected final memory")
    index = {s.formula: n for n, s in enumerate(proof.steps, 1)}
    step_map = {}
    for label, f in _example_labels(sig).items():
        if f in index:
            step_map[label] = index[f]
    for n, s in enumerate(proof.steps, 1):
        just = s.just
        name = getattr(just, "name", None)
        if name == "Antest" and "(21) Antest" not in step_map:
            step_map["(21) Antest"] = n
        if name == "Achoice" and "(22') Achoice" not in step_map:
            step_map["(22') Achoice"] = n
    step_map["(23) conclusion"] = len(proof.steps)
    return Elaboration(proof, want, step_map)


def mem_get_goal():
    return implies(pgm_final_memory(), App("get", [App("m"), nat(1)]))


def mem_get_theorem(sig=None) -> Proof:
    """set(set(set(mem, i2, 2), i1, 1), m, 1) -> get(m, 1), one AMem1 instance."""
    sig = sig or smc_signature()
    b = ProofBuilder(sig, smc_axioms(sig))
    inner = pgm_final_memory().args[0]
    j = b.axiom("AMem1", {"MEM": inner, "X": App("m"), "N": nat(1)})
    return b.proof(mode=GlobalMode(), last=j)


@dataclass
class MutationReport:
    total: int
    rejected: int
    survivors: list  # deleted step numbers whose mutant still proved the goal

    @property
    def ok(self):
        return self.total == self.rejected


def mutation_check(sig, axioms, proof: Proof, goal: Formula) -> MutationReport:
    """Delete each step in turn; a mutant survives if it still checks with
    conclusion `goal`."""
    survivors = []
    checker = Checker(sig, axioms)
    # the prefix before a deleted step is shared with the original, so it
    # needs checking only once
    prefix_ok = check_proof(sig, axioms, proof, checker).ok
    for t in range(1, len(proof.steps) + 1):
        mutant = delete_step(proof, t)
        v = check_proof(sig, axioms, mutant, checker, start=t if prefix_ok else 1)
        if v.ok and v.conclusion == goal:
            survivors.append(t)
    n = len(proof.steps)
    return MutationReport(n, n - len(survivors), survivors)
