"""Dynamic-logic axioms for the SMC machine: the program-logic laws for
choice, composition, iteration and tests, and the machine laws for each
control instruction and for memory."""
from __future__ import annotations

import re

from ..core.formula import App, Formula, Not, box
from ..proof.schemes import AxiomSet, make_scheme
from .syntax import smc_signature

META = {
    "PI": "CtrlStack",
    "PI2": "CtrlStack",
    "G": "Config",
    "V": "Val",
    "V2": "Val",
    "VS": "ValStack",
    "MEM": "Mem",
    "X": "Var",
    "Y": "Var",
    "N": "Nat",
    "N1": "Nat",
    "N2": "Nat",
    "T": "Bool",
    "A1": "AExp",
    "A2": "AExp",
    "B": "BExp",
    "S": "Stmt",
    "S1": "Stmt",
    "S2": "Stmt",
}

# {P|G} stands for the box [P]G and is expanded before parsing
TEMPLATES = (
    ("Achoice", (), "{choice(PI, PI2)|G} <-> {PI|G} & {PI2|G}"),
    ("Athen", (), "{then(PI, PI2)|G} <-> {PI|{PI2|G}}"),
    ("Astar", (), "{star(PI)|G} <-> G & {PI|{star(PI)|G}}"),
    ("Atest", (), "config(cons(V, VS), MEM) -> {test(V)|config(VS, MEM)}"),
    ("Antest", (("distinct", ("V", "V2")),), "config(cons(V, VS), MEM) -> {test(V2)|G}"),
    ("CStmt", (), "cs(seq(S1, S2)) <-> then(cs(S1), cs(S2))"),
    ("AMem0", (), "empty -> get(X, 0)"),
    ("AMem1", (), "set(MEM, X, N) -> get(X, N)"),
    ("AMem2", (("distinct", ("X", "Y")),), "set(set(MEM, X, N), Y, N2) <-> set(set(MEM, Y, N2), X, N)"),
    ("AMem3", (), "set(set(MEM, X, N), X, N2) <-> set(MEM, X, N2)"),
    ("Aint", (("numeral", ("N",)),), "config(VS, MEM) -> {ca(nat2aexp(N))|config(cons(nat2val(N), VS), MEM)}"),
    (
        "Aid",
        (),
        "config(VS, set(MEM, X, N)) -> {ca(var2aexp(X))|config(cons(nat2val(N), VS), set(MEM, X, N))}",
    ),
    ("Dplus", (), "ca(add(A1, A2)) <-> then(ca(A1), then(ca(A2), plus))"),
    (
        "Aplus",
        (("intadd", ("N", "N1", "N2")),),
        "config(cons(nat2val(N2), cons(nat2val(N1), VS)), MEM) -> {plus|config(cons(nat2val(N), VS), MEM)}",
    ),
    ("Dleq", (), "cb(le(A1, A2)) <-> then(ca(A2), then(ca(A1), leq))"),
    (
        "Aleq",
        (("leqtruth", ("T", "N1", "N2")),),
        "config(cons(nat2val(N1), cons(nat2val(N2), VS)), MEM) -> {leq|config(cons(bool2val(T), VS), MEM)}",
    ),
    ("Askip", (), "G -> {cs(skip)|G}"),
    ("Dasgn", (), "cs(assign(X, A1)) <-> then(ca(A1), asgn(X))"),
    ("Aasgn", (), "config(cons(nat2val(N), VS), MEM) -> {asgn(X)|config(VS, set(MEM, X, N))}"),
    (
        "Dif",
        (),
        "cs(ite(B, S1, S2)) <-> then(cb(B), choice(then(test(bool2val(true)), cs(S1)),"
        " then(test(bool2val(false)), cs(S2))))",
    ),
    (
        "Dwhile",
        (),
        "cs(while(B, S)) <-> then(cb(B), then(star(then(test(bool2val(true)), then(cs(S), cb(B)))),"
        " test(bool2val(false))))",
    ),
)

PDL_SCHEMES = ("Achoice", "Athen", "Astar", "Atest", "Antest")

_BOX = re.compile(r"\{([^{}|]*)\|([^{}]*)\}")


def expand_boxes(text: str, mode: str = "pdl") -> str:
    if mode not in ("pdl", "literal"):
        raise ValueError(f"unknown box reading {mode!r}")
    fmt = "!exec({0}, !({1}))" if mode == "pdl" else "[exec]({0}, {1})"
    while True:
        new = _BOX.sub(lambda m: fmt.format(m.group(1).strip(), m.group(2).strip()), text)
        if new == text:
            return new
        text = new


def pbox(ctrl: Formula, gamma: Formula, mode: str = "pdl") -> Formula:
    """[ctrl]gamma under the chosen reading."""
    if mode == "literal":
        return box("exec", [ctrl, gamma])
    return Not(App("exec", [ctrl, Not(gamma)]))


def _meta_of(text):
    names = set(re.findall(r"[A-Za-z_][A-Za-z_0-9]*", text))
    return tuple((m, s) for m, s in META.items() if m in names)


_cache = {}


def smc_axioms(sig=None, box_mode: str = "pdl") -> AxiomSet:
    sig = sig or smc_signature()
    key = (id(sig), box_mode)
    hit = _cache.get(key)
    if hit is not None and hit[0] is sig:
        return hit[1]
    schemes = []
    for name, guards, text in TEMPLATES:
        body = expand_boxes(text, box_mode)
        schemes.append(make_scheme(sig, name, _meta_of(text), body, guards))
    out = AxiomSet.of(schemes)
    _cache[key] = (sig, out)
    return out
