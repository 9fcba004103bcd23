"""Many-sorted signatures, sort inference and sorted uniform substitution."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .formula import App, Formula, Not, Or, Var, bot_of, box


class SignatureError(ValueError):
    pass


class SortError(ValueError):
    pass


@dataclass(frozen=True)
class OpDecl:
    name: str
    arg_sorts: tuple
    result_sort: str

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)


@dataclass(frozen=True)
class Signature:
    sorts: tuple
    ops: Mapping[str, OpDecl]
    vars: Mapping[str, tuple]  # sort -> variables in declaration order
    var_sort: Mapping[str, str] = field(default=None, compare=False)

    def __post_init__(self):
        var_sort = {}
        for s, names in self.vars.items():
            for p in names:
                var_sort[p] = s
        object.__setattr__(self, "var_sort", var_sort)
        object.__setattr__(self, "_sort_cache", {})

    @classmethod
    def build(cls, sorts, ops, vars) -> "Signature":
        """Validate and construct. `ops` is an iterable of OpDecl (or tuples),
        `vars` an iterable of (name, sort) pairs in declaration order."""
        sorts = tuple(sorts)
        if len(set(sorts)) != len(sorts):
            dup = next(s for s in sorts if sorts.count(s) > 1)
            raise SignatureError(f"duplicate sort {dup!r}")
        declared = set(sorts)
        op_map = {}
        for op in ops:
            if not isinstance(op, OpDecl):
                name, args, res = op
                op = OpDecl(name, tuple(args), res)
            if op.name in op_map:
                raise SignatureError(f"duplicate operation {op.name!r}")
            for s in (*op.arg_sorts, op.result_sort):
                if s not in declared:
                    raise SignatureError(f"operation {op.name!r} uses undeclared sort {s!r}")
            op_map[op.name] = op
        var_map = {s: [] for s in sorts}
        seen = {}
        for name, s in vars:
            if s not in declared:
                raise SignatureError(f"variable {name!r} declared at undeclared sort {s!r}")
            if name in seen:
                if seen[name] != s:
                    raise SignatureError(f"variable {name!r} declared at two sorts ({seen[name]}, {s})")
                raise SignatureError(f"duplicate variable {name!r}")
            if name in op_map:
                raise SignatureError(f"symbol {name!r} is both a variable and an operation")
            seen[name] = s
            var_map[s].append(name)
        for s in sorts:
            if not var_map[s]:
                raise SignatureError(f"sort {s!r} has no variables")
        return cls(sorts, op_map, {s: tuple(v) for s, v in var_map.items()})

    def op(self, name: str) -> OpDecl:
        try:
            return self.ops[name]
        except KeyError:
            raise SortError(f"unknown operation {name!r}") from None

    def sort_of_var(self, name: str) -> str:
        try:
            return self.var_sort[name]
        except KeyError:
            raise SortError(f"unknown variable {name!r}") from None

    def canonical_var(self, sort: str) -> str:
        if sort not in self.vars:
            raise SortError(f"unknown sort {sort!r}")
        return self.vars[sort][0]

    def with_vars(self, extra: Mapping[str, str]) -> "Signature":
        """A copy with additional variables (used for scheme metavariables)."""
        pairs = [(p, s) for s in self.sorts for p in self.vars[s]]
        pairs.extend(extra.items())
        return Signature.build(self.sorts, self.ops.values(), pairs)

    def restrict(self, sorts, ops) -> "Signature":
        """Sub-signature on the given sorts and operation names."""
        sorts = [s for s in self.sorts if s in set(sorts)]
        return Signature.build(
            sorts,
            [self.ops[o] for o in ops],
            [(p, s) for s in sorts for p in self.vars[s]],
        )

    def ops_with_arg(self, sort: str):
        """Pairs (op, position) such that op takes an argument of `sort` there."""
        out = []
        for op in self.ops.values():
            for i, s in enumerate(op.arg_sorts):
                if s == sort:
                    out.append((op, i))
        return out


def sort_of(sig: Signature, phi: Formula) -> str:
    cache = sig._sort_cache
    hit = cache.get(phi)
    if hit is not None:
        return hit
    result = _sort_of(sig, phi)
    cache[phi] = result
    return result


def _sort_of(sig: Signature, phi: Formula) -> str:
    t = type(phi)
    if t is Var:
        return sig.sort_of_var(phi.name)
    if t is Not:
        return sort_of(sig, phi.child)
    if t is Or:
        left, right = sort_of(sig, phi.left), sort_of(sig, phi.right)
        if left != right:
            raise SortError(f"disjunction mixes sorts {left} and {right}")
        return left
    if t is App:
        op = sig.op(phi.op)
        if len(phi.args) != op.arity:
            raise SortError(f"{op.name} expects {op.arity} arguments, got {len(phi.args)}")
        for i, (arg, want) in enumerate(zip(phi.args, op.arg_sorts), 1):
            got = sort_of(sig, arg)
            if got != want:
                raise SortError(f"argument {i} of {op.name} has sort {got}, expected {want}")
        return op.result_sort
    raise TypeError(f"not a formula: {phi!r}")


def mk_dual(sig: Signature, op: str | OpDecl, args: Sequence[Formula]) -> Formula:
    decl = op if isinstance(op, OpDecl) else sig.op(op)
    if decl.arity == 0:
        raise SortError(f"nullary operation {decl.name} has no dual")
    result = box(decl.name, args)
    sort_of(sig, result)
    return result


def mk_bot(sig: Signature, sort: str) -> Formula:
    return bot_of(Var(sig.canonical_var(sort)))


def mk_top(sig: Signature, sort: str) -> Formula:
    return Not(mk_bot(sig, sort))


def substitute(sig: Signature, phi: Formula, theta: Mapping[str, Formula]) -> Formula:
    """Simultaneous sorted substitution of variables by formulas."""
    for p, psi in theta.items():
        want = sig.sort_of_var(p)
        got = sort_of(sig, psi)
        if got != want:
            raise SortError(f"binding {p} := ... has sort {got}, expected {want}")
    return _subst(phi, theta, {})


def _subst(phi, theta, memo):
    hit = memo.get(phi)
    if hit is not None:
        return hit
    t = type(phi)
    if t is Var:
        out = theta.get(phi.name, phi)
    elif t is Not:
        out = Not(_subst(phi.child, theta, memo))
    elif t is Or:
        out = Or(_subst(phi.left, theta, memo), _subst(phi.right, theta, memo))
    else:
        out = App(phi.op, [_subst(a, theta, memo) for a in phi.args]) if phi.args else phi
    memo[phi] = out
    return out
