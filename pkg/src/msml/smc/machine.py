"""Small-step interpreter for SMC configurations and control terms."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from ..core.formula import App, Formula
from ..proof.schemes import numeral_value, truth_value
from .syntax import SmcError, expand, nat, then, to_term, val_term

DEFAULT_BUDGET = 10_000


@dataclass(frozen=True, eq=False)
class SmcConfig:
    """Value stack (top first; ints and bools) and memory as a sorted tuple of
    (variable, value) pairs. Zero entries are dropped: unset reads as 0."""

    stack: tuple = ()
    memory: tuple = ()

    def _key(self):
        # True == 1 in Python, so tag booleans to keep them apart
        return tuple((type(v) is bool, v) for v in self.stack), self.memory

    def __eq__(self, other):
        return isinstance(other, SmcConfig) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @classmethod
    def of(cls, stack=(), memory=None) -> "SmcConfig":
        return cls(tuple(stack), canon_memory(memory or {}))

    def lookup(self, x: str) -> int:
        return dict(self.memory).get(x, 0)

    def write(self, x: str, n: int) -> "SmcConfig":
        mem = dict(self.memory)
        mem[x] = n
        return SmcConfig(self.stack, canon_memory(mem))

    def mem_dict(self) -> dict:
        return dict(self.memory)

    def __str__(self):
        st = " . ".join(_show_val(v) for v in self.stack) or "nil"
        mem = ", ".join(f"{x}={n}" for x, n in self.memory)
        return f"<{st} | {{{mem}}}>"


def _show_val(v):
    return ("true" if v else "false") if type(v) is bool else str(v)


def canon_memory(mem) -> tuple:
    items = dict(mem).items()
    for x, n in items:
        if type(n) is not int or n < 0:
            raise SmcError(f"memory value for {x} must be a natural, got {n!r}")
    return tuple(sorted((x, n) for x, n in items if n != 0))


# --- terms for configurations -------------------------------------------------------


def stack_term(stack) -> Formula:
    out = App("nil")
    for v in reversed(tuple(stack)):
        out = App("cons", [val_term(v), out])
    return out


def mem_term(memory, var_order=None, base=None) -> Formula:
    """set-chain over `base` (default `empty`), entries in var_order, zeros
    omitted."""
    mem = dict(memory)
    order = list(var_order) if var_order is not None else sorted(mem)
    out = base if base is not None else App("empty")
    for x in order:
        n = mem.get(x, 0)
        if n:
            out = App("set", [out, App(x), nat(n)])
    for x in sorted(set(mem) - set(order)):
        if mem[x]:
            out = App("set", [out, App(x), nat(mem[x])])
    return out


def config_term(cfg: SmcConfig, var_order=None) -> Formula:
    return App("config", [stack_term(cfg.stack), mem_term(cfg.memory, var_order)])


def term_value(t: Formula):
    if t.op == "nat2val":
        n = numeral_value(t.args[0])
        if n is not None:
            return n
    if t.op == "bool2val":
        b = truth_value(t.args[0])
        if b is not None:
            return b
    raise SmcError(f"not a ground value term: {t!r}")


def term_stack(t: Formula) -> tuple:
    out = []
    while t.op == "cons":
        out.append(term_value(t.args[0]))
        t = t.args[1]
    if t.op != "nil" or t.args:
        raise SmcError(f"not a ground value stack: {t!r}")
    return tuple(out)


def term_memory(t: Formula) -> tuple:
    """Evaluate a ground set/empty term, later writes winning."""
    writes = []
    while t.op == "set":
        m, x, n = t.args
        v = numeral_value(n)
        if v is None or x.args:
            raise SmcError(f"not a ground memory term: {t!r}")
        writes.append((x.op, v))
        t = m
    if t.op != "empty":
        raise SmcError(f"not a ground memory term: {t!r}")
    mem = {}
    for x, v in reversed(writes):
        mem[x] = v
    return canon_memory(mem)


def term_config(t: Formula) -> SmcConfig:
    if t.op != "config":
        raise SmcError(f"not a configuration term: {t!r}")
    return SmcConfig(term_stack(t.args[0]), term_memory(t.args[1]))


# --- stepping ---------------------------------------------------------------------------


def _pop(cfg, kind, what):
    if not cfg.stack:
        raise SmcError(f"stack underflow at {what}")
    v = cfg.stack[0]
    if kind is int and type(v) is not int:
        raise SmcError(f"{what} expects a natural on the stack, found {_show_val(v)}")
    return v, SmcConfig(cfg.stack[1:], cfg.memory)


def _push(cfg, v):
    return SmcConfig((v,) + cfg.stack, cfg.memory)


def smc_step(cfg: SmcConfig, ctrl: Formula) -> set:
    """Successors (config, remaining control); remaining is None when the
    control is used up. Blocked tests give the empty set."""
    op = ctrl.op
    if op == "then":
        a, b = ctrl.args
        return {(c, b if rest is None else then(rest, b)) for c, rest in smc_step(cfg, a)}
    if op == "choice":
        return {(cfg, ctrl.args[0]), (cfg, ctrl.args[1])}
    if op == "star":
        return {(cfg, None), (cfg, then(ctrl.args[0], ctrl))}
    e = expand(ctrl)
    if e is not None:
        return {(cfg, e)}
    if op == "cs" and ctrl.args[0].op == "skip":
        return {(cfg, None)}
    if op == "ca":
        a = ctrl.args[0]
        if a.op == "nat2aexp":
            n = numeral_value(a.args[0])
            if n is None:
                raise SmcError(f"not a numeral: {a.args[0]!r}")
            return {(_push(cfg, n), None)}
        if a.op == "var2aexp":
            return {(_push(cfg, cfg.lookup(a.args[0].op)), None)}
    if op == "asgn":
        n, c = _pop(cfg, int, "asgn")
        return {(c.write(ctrl.args[0].op, n), None)}
    if op == "plus":
        n2, c = _pop(cfg, int, "plus")
        n1, c = _pop(c, int, "plus")
        return {(_push(c, n1 + n2), None)}
    if op == "leq":
        n1, c = _pop(cfg, int, "leq")
        n2, c = _pop(c, int, "leq")
        return {(_push(c, n1 <= n2), None)}
    if op == "test":
        want = term_value(ctrl.args[0])
        v, c = _pop(cfg, None, "test")
        if type(v) is type(want) and v == want:
            return {(c, None)}
        return set()
    raise SmcError(f"cannot execute control term {ctrl!r}")


@dataclass
class RunResult:
    status: str  # "ok", "stuck" or "budget-exceeded"
    finals: frozenset
    blocked: list = field(default_factory=list)  # (config, control) with no successor
    steps: int = 0
    states: set = field(default_factory=set)  # every (config, control) visited

    @property
    def final(self) -> SmcConfig:
        if len(self.finals) != 1:
            raise SmcError(f"expected one final configuration, have {len(self.finals)}")
        return next(iter(self.finals))


def run_ctrl(cfg: SmcConfig, ctrl: Formula, budget: int = DEFAULT_BUDGET) -> RunResult:
    """Exhaustive breadth-first closure of smc_step from (cfg, ctrl)."""
    start = (cfg, ctrl)
    seen = {start}
    queue = deque([start])
    finals, blocked, steps = set(), [], 0
    while queue:
        c, k = queue.popleft()
        if k is None:
            finals.add(c)
            continue
        if steps >= budget:
            return RunResult("budget-exceeded", frozenset(finals), blocked, steps, seen)
        steps += 1
        succ = smc_step(c, k)
        if not succ:
            blocked.append((c, k))
        for s in sorted(succ, key=repr):
            if s not in seen:
                seen.add(s)
                queue.append(s)
    status = "ok" if finals else "stuck"
    return RunResult(status, frozenset(finals), blocked, steps, seen)


def smc_run(program, memory=None, budget: int = DEFAULT_BUDGET) -> RunResult:
    """Run a program syntax tree (or Stmt term) from config(nil, memory)."""
    term = program if isinstance(program, Formula) else to_term(program)
    return run_ctrl(SmcConfig.of((), memory), App("cs", [term]), budget)
