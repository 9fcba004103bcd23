"""Finite many-sorted boolean algebras with operators.

Every finite boolean algebra is a powerset algebra, so each sort is given by
its atoms and elements are frozensets of atoms (join = union, complement =
set complement, bottom = empty set). Operators are total tables over element
tuples.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field

from .core.formula import Formula, Not, Or, Var
from .core.parser import IDENT, ParseError, strip_comment
from .core.signature import Signature, sort_of
from .semantics import Frame


class BaoError(ValueError):
    pass


def powerset(atoms):
    """All subsets of `atoms` as frozensets, ordered by bitmask."""
    atoms = tuple(atoms)
    n = len(atoms)
    return [frozenset(atoms[i] for i in range(n) if mask >> i & 1) for mask in range(1 << n)]


class Bao:
    def __init__(self, sig: Signature, atoms, tables):
        self.sig = sig
        self.atoms = {s: tuple(atoms[s]) for s in sig.sorts}
        for s, a in self.atoms.items():
            if not a:
                raise BaoError(f"sort {s} has no atoms")
            if len(set(a)) != len(a):
                raise BaoError(f"duplicate atom at sort {s}")
        self.tables = {op: dict(t) for op, t in tables.items()}
        self._elements = {s: powerset(a) for s, a in self.atoms.items()}
        self._rank = {s: {e: n for n, e in enumerate(els)} for s, els in self._elements.items()}

    def elements(self, sort):
        return self._elements[sort]

    def top(self, sort):
        return frozenset(self.atoms[sort])

    def bottom(self, sort):
        return frozenset()

    def complement(self, sort, a):
        return self.top(sort) - a

    def arg_tuples(self, op):
        decl = self.sig.op(op)
        return itertools.product(*(self._elements[s] for s in decl.arg_sorts))

    def apply(self, op, args):
        try:
            return self.tables[op][tuple(args)]
        except KeyError:
            raise BaoError(f"table of {op} has no entry for {tuple(map(sorted, args))}") from None

    def dual_apply(self, op, args):
        decl = self.sig.op(op)
        neg = [self.complement(s, a) for s, a in zip(decl.arg_sorts, args)]
        return self.complement(decl.result_sort, self.apply(op, neg))

    def rank(self, sort, a):
        return self._rank[sort][a]

    @classmethod
    def from_atom_table(cls, sig: Signature, atoms, atom_table) -> "Bao":
        """Extend a table given on atom tuples to all element tuples by
        additivity, with any empty argument giving the empty result."""
        tables = {}
        for name, decl in sig.ops.items():
            rows = atom_table.get(name, {})
            full = {}
            els = [powerset(atoms[s]) for s in decl.arg_sorts]
            for args in itertools.product(*els):
                out = set()
                for tup in itertools.product(*args):
                    out |= rows.get(tup, frozenset())
                full[args] = frozenset(out)
            tables[name] = full
        return cls(sig, atoms, tables)


# --- law checking ---------------------------------------------------------------


@dataclass
class BaoVerdict:
    ok: bool
    law: str = ""
    op: str | None = None
    witness: tuple | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def _show(args):
    return tuple(tuple(sorted(map(str, a))) for a in args)


def check_bao(sig: Signature, bao: Bao, seed: int = 0) -> BaoVerdict:
    """Totality, then (N) and (A) exhaustively, first witness in
    lexicographic tuple order; boolean laws spot-checked on random triples."""
    for name, decl in sig.ops.items():
        table = bao.tables.get(name)
        if table is None:
            return BaoVerdict(False, "total", name, None, "no table")
        top = bao.top(decl.result_sort)
        for args in bao.arg_tuples(name):
            if args not in table:
                return BaoVerdict(False, "total", name, _show(args), "missing entry")
            if not table[args] <= top:
                return BaoVerdict(False, "total", name, _show(args), "result leaves its sort")
    for name, decl in sig.ops.items():
        table = bao.tables[name]
        n = decl.arity
        for args in bao.arg_tuples(name):
            if any(not a for a in args) and table[args]:
                return BaoVerdict(False, "N", name, _show(args), f"value {sorted(map(str, table[args]))} instead of bottom")
        for args in bao.arg_tuples(name):
            for i in range(n):
                for b in bao.elements(decl.arg_sorts[i]):
                    joined = list(args)
                    joined[i] = args[i] | b
                    other = list(args)
                    other[i] = b
                    lhs = table[tuple(joined)]
                    rhs = table[args] | table[tuple(other)]
                    if lhs != rhs:
                        wit = _show(args) + (tuple(sorted(map(str, b))),)
                        return BaoVerdict(False, "A", name, wit, f"position {i + 1} is not additive")
    rng = random.Random(seed)
    for s in sig.sorts:
        els = bao.elements(s)
        top = bao.top(s)
        for _ in range(100):
            a, b, c = (rng.choice(els) for _ in range(3))
            laws = (
                a | b == b | a,
                (a | b) | c == a | (b | c),
                a | (a & b) == a,
                a & (b | c) == (a & b) | (a & c),
                a | (top - a) == top,
                a & (top - a) == frozenset(),
            )
            if not all(laws):
                return BaoVerdict(False, "boolean", None, (s,), "boolean law failed")
    return BaoVerdict(True)


# --- complex algebras and evaluation --------------------------------------------------


def complex_algebra(sig: Signature, frame: Frame) -> Bao:
    """Powerset algebra of the frame with the existential image operators."""
    tables = {}
    for name, decl in sig.ops.items():
        rel = frame.rels.get(name, frozenset())
        table = {}
        for args in itertools.product(*(powerset(frame.worlds[s]) for s in decl.arg_sorts)):
            table[args] = frozenset(t[0] for t in rel if all(u in x for u, x in zip(t[1:], args)))
        tables[name] = table
    return Bao(sig, frame.worlds, tables)


def complex_dual(frame: Frame, sig: Signature, op, args):
    """l(X1..Xn): worlds all of whose op-tuples meet some Xi at its position."""
    decl = sig.op(op)
    rel = frame.rels.get(op, frozenset())
    return frozenset(
        w
        for w in frame.worlds[decl.result_sort]
        if all(any(u in x for u, x in zip(t[1:], args)) for t in rel if t[0] == w)
    )


def evaluate(sig: Signature, bao: Bao, assignment, phi: Formula, memo=None):
    """The homomorphic extension of an assignment (variable -> element)."""
    memo = {} if memo is None else memo
    hit = memo.get(phi)
    if hit is not None:
        return hit
    t = type(phi)
    if t is Var:
        if phi.name not in assignment:
            raise BaoError(f"no assignment for {phi.name}")
        out = frozenset(assignment[phi.name])
    elif t is Not:
        out = bao.complement(sort_of(sig, phi), evaluate(sig, bao, assignment, phi.child, memo))
    elif t is Or:
        out = evaluate(sig, bao, assignment, phi.left, memo) | evaluate(sig, bao, assignment, phi.right, memo)
    else:
        out = bao.apply(phi.op, [evaluate(sig, bao, assignment, a, memo) for a in phi.args])
    memo[phi] = out
    return out


# --- ultrafilters and the representation ---------------------------------------------------


def principal_ultrafilter(bao: Bao, sort, atom):
    return frozenset(e for e in bao.elements(sort) if atom in e)


def ultrafilters(bao: Bao, sort):
    """One per atom: the elements containing it."""
    return [principal_ultrafilter(bao, sort, a) for a in bao.atoms[sort]]


def ultrafilter_frame(sig: Signature, bao: Bao, method="quantified") -> Frame:
    """Worlds are ultrafilters. Q w w1..wn holds iff f(a1..an) is in w for all
    ai in wi ("quantified"), or equivalently at the atoms ("atoms")."""
    ufs = {s: ultrafilters(bao, s) for s in sig.sorts}
    atom_of = {}
    for s in sig.sorts:
        for a, u in zip(bao.atoms[s], ufs[s]):
            atom_of[(s, u)] = a
    rels = {}
    for name, decl in sig.ops.items():
        tuples = set()
        for w in ufs[decl.result_sort]:
            for ws in itertools.product(*(ufs[s] for s in decl.arg_sorts)):
                if method == "atoms":
                    args = [frozenset([atom_of[(s, u)]]) for s, u in zip(decl.arg_sorts, ws)]
                    good = atom_of[(decl.result_sort, w)] in bao.apply(name, args)
                else:
                    good = all(bao.apply(name, args) in w for args in itertools.product(*ws))
                if good:
                    tuples.add((w, *ws))
        rels[name] = frozenset(tuples)
    return Frame({s: tuple(u) for s, u in ufs.items()}, rels)


@dataclass
class JTResult:
    ok: bool
    r: dict = field(default_factory=dict)  # sort -> element -> set of ultrafilters
    frame: Frame | None = None
    check: str = ""
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def jt_embedding(sig: Signature, bao: Bao) -> JTResult:
    pre = check_bao(sig, bao)
    if not pre.ok:
        raise BaoError(f"not a BAO: law {pre.law} fails for {pre.op} at {pre.witness}")
    frame = ultrafilter_frame(sig, bao)
    r = {}
    for s in sig.sorts:
        ufs = frame.worlds[s]
        r[s] = {a: frozenset(u for u in ufs if a in u) for a in bao.elements(s)}
    res = JTResult(True, r, frame)

    def fail(check, witness):
        res.ok, res.check, res.witness = False, check, witness
        return res

    for s in sig.sorts:
        if len(frame.worlds[s]) != len(bao.atoms[s]):
            return fail("ultrafilter count", (s,))
        rs = r[s]
        top = frozenset(frame.worlds[s])
        if len(set(rs.values())) != len(rs):
            return fail("injective", (s,))
        if rs[bao.bottom(s)]:
            return fail("bottom", (s,))
        for a in bao.elements(s):
            if rs[bao.complement(s, a)] != top - rs[a]:
                return fail("complement", (s, _show([a])))
            for b in bao.elements(s):
                if rs[a | b] != rs[a] | rs[b]:
                    return fail("join", (s, _show([a, b])))
    double = complex_algebra(sig, frame)
    for name, decl in sig.ops.items():
        for args in bao.arg_tuples(name):
            lhs = r[decl.result_sort][bao.apply(name, args)]
            rhs = double.apply(name, [r[s][a] for s, a in zip(decl.arg_sorts, args)])
            if lhs != rhs:
                return fail("H", (name, _show(args)))
    return res


# --- generation and files ----------------------------------------------------------------


def random_bao(sig: Signature, rng: random.Random, max_atoms: int = 3) -> Bao:
    atoms = {s: tuple(f"{s}{k}" for k in range(rng.randint(1, max_atoms))) for s in sig.sorts}
    table = {}
    for name, decl in sig.ops.items():
        rows = {}
        res = atoms[decl.result_sort]
        d = rng.random()
        for tup in itertools.product(*(atoms[s] for s in decl.arg_sorts)):
            rows[tup] = frozenset(a for a in res if rng.random() < d)
        table[name] = rows
    return Bao.from_atom_table(sig, atoms, table)


_ATOMS = re.compile(rf"^atoms\s+({IDENT})\s*=\s*\{{([^}}]*)\}}$")
_TABLE = re.compile(rf"^table\s+({IDENT})\s*:\s*\((.*)\)\s*->\s*\{{([^}}]*)\}}$")


def parse_bao(sig: Signature, text: str) -> Bao:
    """Rows on atom tuples are extended additively; rows on other element
    tuples then override single entries (useful for planting defects)."""
    atoms, rows, overrides = {}, {n: {} for n in sig.ops}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = strip_comment(raw)
        if not line:
            continue
        if m := _ATOMS.match(line):
            s = m.group(1)
            if s not in sig.vars:
                raise ParseError(f"unknown sort {s!r}", line=lineno)
            atoms[s] = tuple(m.group(2).split())
        elif m := _TABLE.match(line):
            name = m.group(1)
            if name not in sig.ops:
                raise ParseError(f"unknown operation {name!r}", line=lineno)
            args = tuple(frozenset(x.split()) for x in re.findall(r"\{([^}]*)\}", m.group(2)))
            if len(args) != sig.ops[name].arity:
                raise ParseError(f"{name} takes {sig.ops[name].arity} arguments", line=lineno)
            out = frozenset(m.group(3).split())
            if all(len(a) == 1 for a in args):
                rows[name][tuple(next(iter(a)) for a in args)] = out
            else:
                overrides.append((lineno, name, args, out))
        else:
            raise ParseError(f"cannot parse algebra line {line!r}", line=lineno)
    for s in sig.sorts:
        if s not in atoms:
            raise ParseError(f"no atoms for sort {s}")
    for name, tbl in rows.items():
        decl = sig.ops[name]
        for tup, out in tbl.items():
            for a, s in zip(tup, decl.arg_sorts):
                if a not in atoms[s]:
                    raise ParseError(f"{a!r} is not an atom of {s}")
            if not out <= set(atoms[decl.result_sort]):
                raise ParseError(f"table {name}: result leaves sort {decl.result_sort}")
    bao = Bao.from_atom_table(sig, atoms, rows)
    for lineno, name, args, out in overrides:
        bao.tables[name][args] = out
    return bao


def print_bao(sig: Signature, bao: Bao) -> str:
    """Atom rows only; exact when the tables are additive."""
    lines = [f"atoms {s} = {{ {' '.join(bao.atoms[s])} }}" for s in sig.sorts]
    for name, decl in sig.ops.items():
        for tup in itertools.product(*(bao.atoms[s] for s in decl.arg_sorts)):
            args = [frozenset([a]) for a in tup]
            out = bao.apply(name, args)
            order = bao.atoms[decl.result_sort]
            lines.append(
                f"table {name} : (" + ", ".join("{" + a + "}" for a in tup) + ") -> {"
                + " ".join(a for a in order if a in out) + "}"
            )
    return "\n".join(lines) + "\n"
