"""A finite term model for the SMC axioms, built from a program run.

World ids are canonical ground terms. Constructors are interpreted as the
graphs of canonical construction, `get` by memory lookup, and `exec` by the
interpreter restricted to paths whose configurations are all worlds."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..core.formula import App, Formula, Not, Or, Var, subformulas
from ..core.signature import sort_of, substitute
from ..proof.schemes import GUARDS, numeral_value, scheme_signature
from ..semantics import Evaluator, Frame, Model, enumerate_valuations
from .axioms import smc_axioms
from .machine import (
    DEFAULT_BUDGET,
    SmcConfig,
    config_term,
    mem_term,
    smc_step,
    stack_term,
    term_memory,
)
from .syntax import PGM_TEXT, SmcError, canon_ctrl, parse_program, smc_signature, to_term, val_term
from .machine import smc_run

MODAL_OPS = ("exec", "get")
_MISSING = object()
SYNTAX_SORTS = ("AExp", "BExp", "Stmt")


def _subterms(t):
    yield t
    for a in t.args:
        yield from _subterms(a)


def _ctrl_subterms(t):
    yield t
    if t.op in ("then", "choice", "star"):
        for a in t.args:
            yield from _ctrl_subterms(a)


class TermModel:
    """Builds worlds and relations; `model` is the resulting Model."""

    def __init__(self, program=None, budget: int = DEFAULT_BUDGET, memory=None, sig=None, exec_budget=None):
        self.program = parse_program(PGM_TEXT) if program is None else program
        self.budget = budget
        self.exec_budget = budget if exec_budget is None else exec_budget
        self.term = self.program if isinstance(self.program, Formula) else to_term(self.program)
        self.run = smc_run(self.term, memory, budget)
        if self.run.status == "budget-exceeded":
            raise SmcError(f"program run exceeded the budget of {budget} steps")
        self.sig = sig or self._signature()
        self.var_order = tuple(x for x, d in self.sig.ops.items() if d.result_sort == "Var" and not d.arg_sorts)
        self.nats = tuple(x for x, d in self.sig.ops.items() if d.result_sort == "Nat" and not d.arg_sorts)
        self.incomplete = set()  # (config, ctrl) pairs whose exec run hit the budget
        self._den = {}
        self._build_worlds()
        self._build_relations()
        self.model = Model(self.sig, Frame(self.worlds, self.rels), {}, metadata={"incomplete": self.incomplete},
                           check=False)

    def _signature(self):
        from .syntax import program_vars

        top = 3
        for cfg, _ in self.run.states:
            for v in cfg.stack:
                if type(v) is int:
                    top = max(top, v)
            for _, n in cfg.memory:
                top = max(top, n)
        for t in _subterms(self.term):
            n = numeral_value(t)
            if n is not None:
                top = max(top, n)
        names = [] if isinstance(self.program, Formula) else list(program_vars(self.program))
        if isinstance(self.program, Formula):
            for t in _subterms(self.term):
                if t.op == "var2aexp" or t.op == "assign":
                    x = t.args[0].op
                    if x not in names:
                        names.append(x)
        return smc_signature(top, tuple(names) or ("x",))

    # --- worlds ------------------------------------------------------------------------

    def _build_worlds(self):
        sig = self.sig
        w = {s: [] for s in sig.sorts}

        def add(s, t):
            if t not in seen[s]:
                seen[s].add(t)
                w[s].append(t)

        seen = {s: set() for s in sig.sorts}
        for n in self.nats:
            add("Nat", App(n))
        for x in self.var_order:
            add("Var", App(x))
        add("Bool", App("true"))
        add("Bool", App("false"))
        for t in _subterms(self.term):
            s = sort_of(sig, t)
            if s in SYNTAX_SORTS:
                add(s, t)
        for n in self.nats:
            add("AExp", App("nat2aexp", [App(n)]))
        for x in self.var_order:
            add("AExp", App("var2aexp", [App(x)]))
        if not w["BExp"]:
            zero = App("nat2aexp", [App("0")])
            add("BExp", App("le", [zero, zero]))
        add("Stmt", App("skip"))
        vals = [val_term(int(n)) for n in self.nats] + [val_term(True), val_term(False)]
        for v in vals:
            add("Val", v)
        add("ValStack", App("nil"))
        for cfg, _ in sorted(self.run.states, key=repr):
            for k in range(len(cfg.stack) + 1):
                add("ValStack", stack_term(cfg.stack[k:]))
        for values in itertools.product(range(len(self.nats)), repeat=len(self.var_order)):
            add("Mem", mem_term(dict(zip(self.var_order, values)), self.var_order))
        # control terms: canonical forms from the run and the syntax, their
        # parts, every primitive instruction and its iteration
        ctrl = []
        for _, k in sorted(self.run.states, key=repr):
            if k is not None:
                ctrl.append(canon_ctrl(k))
        for s, wrap in (("AExp", "ca"), ("BExp", "cb"), ("Stmt", "cs")):
            for t in w[s]:
                ctrl.append(canon_ctrl(App(wrap, [t])))
        prims = [App("ca", [a]) for a in w["AExp"] if a.op in ("nat2aexp", "var2aexp")]
        prims += [App("cs", [App("skip")]), App("plus"), App("leq")]
        prims += [App("asgn", [App(x)]) for x in self.var_order]
        prims += [App("test", [v]) for v in vals]
        ctrl += prims + [App("star", [p]) for p in prims]
        for c in ctrl:
            for t in _ctrl_subterms(c):
                add("CtrlStack", t)
        for cfg, _ in sorted(self.run.states, key=repr):
            add("Config", config_term(cfg, self.var_order))
        self.worlds = {s: tuple(ws) for s, ws in w.items()}
        self.member = {s: set(ws) for s, ws in self.worlds.items()}

    # --- denotation ----------------------------------------------------------------------

    def denote(self, t: Formula):
        """World named by a ground constructor term, or None."""
        hit = self._den.get(t, _MISSING)
        if hit is not _MISSING:
            return hit
        out = self._denote(t)
        self._den[t] = out
        return out

    def _denote(self, t):
        if type(t) is not App or t.op in MODAL_OPS:
            return None
        s = self.sig.op(t.op).result_sort
        args = [self.denote(a) for a in t.args]
        if None in args:
            return None
        c = App(t.op, args) if args else t
        if s == "Mem":
            try:
                d = mem_term(dict(term_memory(c)), self.var_order)
            except SmcError:
                return None
        elif s == "CtrlStack":
            d = canon_ctrl(c)
        else:
            d = c
        return d if d in self.member[s] else None

    # --- relations ------------------------------------------------------------------------

    def _build_relations(self):
        sig = self.sig
        rels = {}
        for name, op in sig.ops.items():
            if name in MODAL_OPS:
                continue
            tuples = set()
            for args in itertools.product(*(self.worlds[s] for s in op.arg_sorts)):
                d = self.denote(App(name, args))
                if d is not None:
                    tuples.add((d, *args))
            rels[name] = frozenset(tuples)
        get = set()
        for m in self.worlds["Mem"]:
            mem = dict(term_memory(m))
            for x in self.var_order:
                get.add((m, App(x), App(str(mem.get(x, 0)))))
        rels["get"] = frozenset(get)
        rels["exec"] = frozenset(self._exec_tuples())
        self.rels = rels

    def _exec_tuples(self):
        by_term = {t: SmcConfig(*_config_parts(t)) for t in self.worlds["Config"]}
        by_cfg = {c: t for t, c in by_term.items()}
        out = []
        for start in self.worlds["Config"]:
            for p in self.worlds["CtrlStack"]:
                ends, complete = _reach(by_term[start], p, by_cfg, self.exec_budget)
                if not complete:
                    self.incomplete.add((start, p))
                out.extend((start, p, by_cfg[c]) for c in ends)
        return out


def _config_parts(t):
    from .machine import term_stack

    return term_stack(t.args[0]), term_memory(t.args[1])


def _reach(cfg, ctrl, allowed, budget):
    """Configurations reached with empty control along paths that stay in
    `allowed`; ill-formed steps block. Returns (ends, finished in budget)."""
    seen = {(cfg, ctrl)}
    work = [(cfg, ctrl)]
    ends, steps = set(), 0
    while work:
        c, k = work.pop()
        if k is None:
            ends.add(c)
            continue
        if steps >= budget:
            return ends, False
        steps += 1
        try:
            succ = smc_step(c, k)
        except SmcError:
            continue
        for c2, k2 in succ:
            if c2 in allowed and (c2, k2) not in seen:
                seen.add((c2, k2))
                work.append((c2, k2))
    return ends, True


def build_term_model(program=None, budget: int = DEFAULT_BUDGET, memory=None, exec_budget=None) -> Model:
    """Term model of a program run (default: the worked example). Each exec
    run is bounded by exec_budget steps (default: budget); pairs that hit it
    are listed in metadata["incomplete"]."""
    tm = TermModel(program, budget, memory, exec_budget=exec_budget)
    model = tm.model
    model.metadata["term_model"] = tm
    return model


# --- evaluation ---------------------------------------------------------------------------


class TermEvaluator:
    """Truth sets with a shortcut for ground constructor terms: in a model
    whose constructor relations are graphs, such a term holds exactly at the
    world it names."""

    def __init__(self, model: Model, tm: TermModel):
        self.model = model
        self.tm = tm
        self.memo = {}
        self.all = {s: frozenset(ws) for s, ws in model.worlds.items()}

    def truth(self, phi) -> frozenset:
        hit = self.memo.get(phi)
        if hit is not None:
            return hit
        t = type(phi)
        if t is Not:
            out = self.all[sort_of(self.model.sig, phi)] - self.truth(phi.child)
        elif t is Or:
            out = self.truth(phi.left) | self.truth(phi.right)
        elif t is Var:
            out = self.model.valuation[phi.name]
        elif phi.op not in MODAL_OPS and _ground_constructor(phi):
            d = self.tm.denote(phi)
            out = frozenset() if d is None else frozenset([d])
        else:
            args = [self.truth(x) for x in phi.args]
            out = frozenset(
                w
                for w, tups in self.model.succ[phi.op].items()
                if any(all(u in x for u, x in zip(tup, args)) for tup in tups)
            )
        self.memo[phi] = out
        return out

    def holds(self, w, phi) -> bool:
        return w in self.truth(phi)


def _ground_constructor(t):
    return all(type(g) is App and g.op not in MODAL_OPS for g in subformulas(t))


# --- coherence -------------------------------------------------------------------------------


@dataclass
class CoherenceReport:
    checked: int = 0
    failures: list = field(default_factory=list)  # (scheme, number, binding, world)
    skipped: list = field(default_factory=list)  # (scheme, number) over incomplete exec runs
    per_scheme: dict = field(default_factory=dict)  # scheme -> (instances, skipped)

    @property
    def ok(self):
        return not self.failures


def _constraints(template, metas):
    """Maximal subterms built from constructors and metavariables that
    contain at least one operation symbol."""
    out = []

    def visit(f):
        if type(f) is App and f.op not in MODAL_OPS and _constructor_meta(f, metas):
            out.append(f)
            return
        for c in _children(f):
            visit(c)

    visit(template)
    return out


def _children(f):
    t = type(f)
    if t is Not:
        return (f.child,)
    if t is Or:
        return (f.left, f.right)
    if t is App:
        return f.args
    return ()


def _constructor_meta(f, metas):
    for g in subformulas(f):
        if type(g) is Var:
            if g.name not in metas:
                return False
        elif type(g) is not App or g.op in MODAL_OPS:
            return False
    return True


def scheme_instances(tm: TermModel, scheme):
    """Guard-satisfying bindings of the metavariables to world names under
    which every constructor subterm of the template names a world, in a fixed
    order."""
    meta = scheme.meta_sorts()
    ext = scheme_signature(tm.sig, scheme.metavars)
    cons = _constraints(scheme.template, meta)
    names = [m for m, _ in scheme.metavars]
    need = [{g.name for g in subformulas(c) if type(g) is Var} for c in cons]
    gneed = [set(args) for _, args in scheme.guards]

    def rec(i, binding):
        if i == len(names):
            yield dict(binding)
            return
        m = names[i]
        bound = set(names[: i + 1])
        for w in tm.worlds[meta[m]]:
            binding[m] = w
            ok = True
            for c, nd in zip(cons, need):
                if m in nd and nd <= bound:
                    if tm.denote(substitute(ext, c, binding)) is None:
                        ok = False
                        break
            if ok:
                for (pred, args), nd in zip(scheme.guards, gneed):
                    if m in nd and nd <= bound:
                        if not GUARDS[pred][1](tm.sig, *(binding[a] for a in args)):
                            ok = False
                            break
            if ok:
                yield from rec(i + 1, binding)
        binding.pop(m, None)

    yield from rec(0, {})


def _exec_ctrls(tm, f):
    for g in subformulas(f):
        if type(g) is App and g.op == "exec":
            d = tm.denote(g.args[0]) if _ground_constructor(g.args[0]) else None
            if d is not None:
                yield d


def check_coherence(model: Model, axioms=None, names=None) -> CoherenceReport:
    """Model-check every instantiable instance of the SMC schemes. Instances
    touching an exec run that exceeded the budget are skipped and reported."""
    tm = model.metadata["term_model"]
    axioms = axioms or smc_axioms(tm.sig)
    incomplete_ctrl = {p for _, p in tm.incomplete}
    ev = TermEvaluator(model, tm)
    rep = CoherenceReport()
    for name, scheme in axioms.schemes.items():
        if names is not None and name not in names:
            continue
        ext = scheme_signature(tm.sig, scheme.metavars)
        count = skipped = 0
        for binding in scheme_instances(tm, scheme):
            count += 1
            f = substitute(ext, scheme.template, binding)
            if any(p in incomplete_ctrl for p in _exec_ctrls(tm, f)):
                skipped += 1
                rep.skipped.append((name, count))
                continue
            rep.checked += 1
            s = sort_of(tm.sig, f)
            bad = ev.all[s] - ev.truth(f)
            if bad:
                w = next(w for w in tm.worlds[s] if w in bad)
                rep.failures.append((name, count, binding, w))
        rep.per_scheme[name] = (count, skipped)
    return rep


# --- the memory fragment ------------------------------------------------------------------------

MEM_SORTS = ("Mem", "Var", "Nat")


def mem_fragment(tm: TermModel):
    """The term model restricted to memories: sorts Mem, Var, Nat with
    empty, set, get, the numerals and the program variables."""
    ops = [n for n, d in tm.sig.ops.items() if d.result_sort in MEM_SORTS and all(s in MEM_SORTS for s in d.arg_sorts)]
    sig = tm.sig.restrict(MEM_SORTS, ops)
    frame = Frame({s: tm.worlds[s] for s in MEM_SORTS}, {n: tm.rels[n] for n in ops})
    return sig, frame


def mem_countermodel(tm: TermModel, phi: Formula, max_size: int = 1):
    """(model, world) refuting the Mem-sorted phi over the memory fragment,
    its variables valued by sets of at most max_size worlds, or None."""
    from ..core.formula import variables

    sig, frame = mem_fragment(tm)
    pool = sorted(variables(phi))
    for model in enumerate_valuations(sig, frame, pool, max_size):
        ev = Evaluator(model)
        for w in frame.worlds[sort_of(sig, phi)]:
            if not ev.holds(w, phi):
                return model, w
    return None
