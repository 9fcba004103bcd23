"""Propositional validity by boolean abstraction.

Maximal non-boolean subformulas (variables and operator applications) become
atoms; identical subtrees share an atom. Validity is then decided over all
valuations at once: each atom is a 2^k-bit truth table packed in an int.
"""
from __future__ import annotations

from ..core.formula import Formula, Not, Or

MAX_ATOMS = 20


class TooManyAtoms(ValueError):
    pass


_tables = {}


def _atom_tables(k: int):
    hit = _tables.get(k)
    if hit is None:
        size = 1 << k
        full = (1 << size) - 1
        out = []
        for i in range(k):
            # bit j of the table is set iff bit i of j is set
            block = ((1 << (1 << i)) - 1) << (1 << i)
            t, width = block, 1 << (i + 1)
            while width < size:
                t |= t << width
                width <<= 1
            out.append(t & full)
        hit = (full, out)
        _tables[k] = hit
    return hit


def atoms_of(phi: Formula) -> list:
    """Distinct maximal non-boolean subformulas, in first-occurrence order."""
    seen = {}
    stack = [phi]
    while stack:
        g = stack.pop()
        t = type(g)
        if t is Not:
            stack.append(g.child)
        elif t is Or:
            stack.append(g.right)
            stack.append(g.left)
        elif g not in seen:
            seen[g] = len(seen)
    return list(seen)


def truth_table(phi: Formula, atoms=None):
    """(table, full mask, atoms) for phi."""
    atoms = atoms_of(phi) if atoms is None else atoms
    if len(atoms) > MAX_ATOMS:
        raise TooManyAtoms(f"{len(atoms)} distinct atoms exceed the limit of {MAX_ATOMS}")
    full, tabs = _atom_tables(len(atoms))
    index = {a: tabs[i] for i, a in enumerate(atoms)}
    memo = {}

    def ev(g):
        hit = memo.get(g)
        if hit is not None:
            return hit
        t = type(g)
        if t is Not:
            out = full ^ ev(g.child)
        elif t is Or:
            out = ev(g.left) | ev(g.right)
        else:
            out = index[g]
        memo[g] = out
        return out

    return ev(phi), full, atoms


_cache = {}


def taut_check(sig, phi: Formula) -> bool:
    """True iff phi is a substitution instance of a classical tautology.
    `sig` is accepted for interface symmetry; sorts are not needed here."""
    hit = _cache.get(phi)
    if hit is None:
        table, full, _ = truth_table(phi)
        hit = table == full
        if len(_cache) > 200_000:
            _cache.clear()
        _cache[phi] = hit
    return hit
