"""Formula kernel: variables, negation, disjunction and operator application.

Every other connective is sugar built from these four node types. Nodes are
immutable and carry a precomputed hash so that large proof formulas can be
used as dictionary keys and compared cheaply.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Sequence


class Formula:
    __slots__ = ("_hash",)

    def __hash__(self) -> int:
        return self._hash

    def __setattr__(self, name, value):
        raise AttributeError("formulas are immutable")

    def _set(self, name, value):
        object.__setattr__(self, name, value)

    def __repr__(self) -> str:
        from .printer import print_plain

        return f"<{type(self).__name__} {print_plain(self)}>"


class Var(Formula):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self._set("name", name)
        self._set("_hash", hash(("Var", name)))

    __hash__ = Formula.__hash__

    def __eq__(self, other):
        return self is other or (type(other) is Var and other.name == self.name)


class Not(Formula):
    __slots__ = ("child",)

    def __init__(self, child: Formula):
        self._set("child", child)
        self._set("_hash", hash(("Not", child._hash)))

    __hash__ = Formula.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return type(other) is Not and other._hash == self._hash and other.child == self.child


class Or(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left: Formula, right: Formula):
        self._set("left", left)
        self._set("right", right)
        self._set("_hash", hash(("Or", left._hash, right._hash)))

    __hash__ = Formula.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return (
            type(other) is Or
            and other._hash == self._hash
            and other.left == self.left
            and other.right == self.right
        )


class App(Formula):
    __slots__ = ("op", "args")

    def __init__(self, op: str, args: Iterable[Formula] = ()):
        args = tuple(args)
        self._set("op", op)
        self._set("args", args)
        self._set("_hash", hash(("App", op, tuple(a._hash for a in args))))

    __hash__ = Formula.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return (
            type(other) is App
            and other._hash == self._hash
            and other.op == self.op
            and other.args == self.args
        )


# --- derived connectives -------------------------------------------------


def neg(a: Formula) -> Formula:
    return Not(a)


def lor(a: Formula, b: Formula) -> Formula:
    return Or(a, b)


def land(a: Formula, b: Formula) -> Formula:
    return Not(Or(Not(a), Not(b)))


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return land(implies(a, b), implies(b, a))


def conj(items: Sequence[Formula]) -> Formula:
    """Right-nested conjunction; callers handle the empty case themselves."""
    if not items:
        raise ValueError("empty conjunction")
    acc = items[-1]
    for f in reversed(items[:-1]):
        acc = land(f, acc)
    return acc


def guarded(hyps: Sequence[Formula], phi: Formula) -> Formula:
    """(h1 & ... & hn) -> phi, or phi itself when there are no hypotheses."""
    if not hyps:
        return phi
    return implies(conj(hyps), phi)


def box(op: str, args: Sequence[Formula]) -> Formula:
    """The dual operator: box(op, a1..an) = !op(!a1, ..., !an)."""
    return Not(App(op, [Not(a) for a in args]))


def bot_of(p: Formula) -> Formula:
    return land(p, Not(p))


# --- recognizers ---------------------------------------------------------


def as_implication(f: Formula):
    if type(f) is Or and type(f.left) is Not:
        return f.left.child, f.right
    return None


def as_conjunction(f: Formula):
    if type(f) is Not and type(f.child) is Or:
        inner = f.child
        if type(inner.left) is Not and type(inner.right) is Not:
            return inner.left.child, inner.right.child
    return None


def as_iff(f: Formula):
    parts = as_conjunction(f)
    if parts is None:
        return None
    a, b = as_implication(parts[0]) or (None, None), as_implication(parts[1]) or (None, None)
    if a[0] is not None and b[0] is not None and a[0] == b[1] and a[1] == b[0]:
        return a
    return None


def as_box(f: Formula):
    """Return (op, args) if f has the shape !op(!a1, ..., !an) with n >= 1."""
    if type(f) is Not and type(f.child) is App:
        app = f.child
        if app.args and all(type(a) is Not for a in app.args):
            return app.op, tuple(a.child for a in app.args)
    return None


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if type(g) is Not:
            stack.append(g.child)
        elif type(g) is Or:
            stack.append(g.right)
            stack.append(g.left)
        elif type(g) is App:
            stack.extend(reversed(g.args))


def variables(f: Formula) -> set:
    return {g.name for g in subformulas(f) if type(g) is Var}


def depth(f: Formula) -> int:
    if type(f) is Var:
        return 0
    if type(f) is Not:
        return 1 + depth(f.child)
    if type(f) is Or:
        return 1 + max(depth(f.left), depth(f.right))
    return 1 + max((depth(a) for a in f.args), default=-1)


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))
