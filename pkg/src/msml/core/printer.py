"""Printer for the formula grammar, re-sugaring the kernel where it can.

Sugar is only applied when the printed text parses back to the very same
kernel tree, so parse(print(f)) == f always holds.
"""
from __future__ import annotations

from .formula import App, Formula, Not, Var, as_box, as_conjunction, as_iff, as_implication

# binding strength of each printed form, loosest first
IFF, IMP, OR, AND, UNARY, ATOM = range(6)


def _bot_sort(sig, f):
    """Sort s if f is literally the desugared bot@s."""
    parts = as_conjunction(f)
    if parts is None:
        return None
    a, b = parts
    if type(a) is Var and type(b) is Not and b.child == a:
        s = sig.var_sort.get(a.name)
        if s is not None and sig.vars[s][0] == a.name:
            return s
    return None


def _render(f: Formula, sig, want: int) -> str:
    text, level = _show(f, sig)
    return f"({text})" if level < want else text


def _show(f: Formula, sig):
    t = type(f)
    if t is Var:
        return f.name, ATOM
    if t is App:
        if not f.args:
            return f.op, ATOM
        return f"{f.op}({', '.join(_render(a, sig, IFF) for a in f.args)})", ATOM
    if sig is not None:
        s = _bot_sort(sig, f)
        if s is not None:
            return f"bot@{s}", ATOM
        if t is Not:
            s = _bot_sort(sig, f.child)
            if s is not None:
                return f"top@{s}", ATOM
    if t is Not:
        parts = as_iff(f)
        if parts is not None:
            a, b = parts
            return f"{_render(a, sig, IFF)} <-> {_render(b, sig, IMP)}", IFF
        parts = as_conjunction(f)
        if parts is not None:
            a, b = parts
            return f"{_render(a, sig, AND)} & {_render(b, sig, UNARY)}", AND
        boxed = as_box(f)
        if boxed is not None:
            op, args = boxed
            return f"[{op}]({', '.join(_render(a, sig, IFF) for a in args)})", ATOM
        return "!" + _render(f.child, sig, UNARY), UNARY
    # Or
    parts = as_implication(f)
    if parts is not None:
        a, b = parts
        return f"{_render(a, sig, OR)} -> {_render(b, sig, IMP)}", IMP
    return f"{_render(f.left, sig, OR)} | {_render(f.right, sig, AND)}", OR


def print_plain(f: Formula) -> str:
    """Print without bot/top recognition (no signature needed)."""
    return _show(f, None)[0]


def print_formula(sig, f: Formula) -> str:
    return _show(f, sig)[0]
