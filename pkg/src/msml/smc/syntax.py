"""The SMC machine language: its signature, program syntax trees, the .smc
parser, and the translation of programs into ground terms."""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..core.formula import App, Formula
from ..core.signature import Signature

SORTS = ("Nat", "Var", "Bool", "AExp", "BExp", "Stmt", "Val", "ValStack", "Mem", "CtrlStack", "Config")

# one object variable per sort; none of these may be used as a program variable
OBJECT_VARS = {
    "Nat": "nv",
    "Var": "xv",
    "Bool": "bv",
    "AExp": "av",
    "BExp": "bexp",
    "Stmt": "stmt",
    "Val": "val",
    "ValStack": "vs",
    "Mem": "mem",
    "CtrlStack": "pi",
    "Config": "gamma",
}

FIXED_OPS = (
    ("true", (), "Bool"),
    ("false", (), "Bool"),
    ("nat2aexp", ("Nat",), "AExp"),
    ("var2aexp", ("Var",), "AExp"),
    ("add", ("AExp", "AExp"), "AExp"),
    ("le", ("AExp", "AExp"), "BExp"),
    ("assign", ("Var", "AExp"), "Stmt"),
    ("ite", ("BExp", "Stmt", "Stmt"), "Stmt"),
    ("while", ("BExp", "Stmt"), "Stmt"),
    ("skip", (), "Stmt"),
    ("seq", ("Stmt", "Stmt"), "Stmt"),
    ("nat2val", ("Nat",), "Val"),
    ("bool2val", ("Bool",), "Val"),
    ("nil", (), "ValStack"),
    ("cons", ("Val", "ValStack"), "ValStack"),
    ("empty", (), "Mem"),
    ("set", ("Mem", "Var", "Nat"), "Mem"),
    ("get", ("Var", "Nat"), "Mem"),
    ("ca", ("AExp",), "CtrlStack"),
    ("cb", ("BExp",), "CtrlStack"),
    ("cs", ("Stmt",), "CtrlStack"),
    ("asgn", ("Var",), "CtrlStack"),
    ("plus", (), "CtrlStack"),
    ("leq", (), "CtrlStack"),
    ("test", ("Val",), "CtrlStack"),
    ("then", ("CtrlStack", "CtrlStack"), "CtrlStack"),
    ("choice", ("CtrlStack", "CtrlStack"), "CtrlStack"),
    ("star", ("CtrlStack",), "CtrlStack"),
    ("config", ("ValStack", "Mem"), "Config"),
    ("exec", ("CtrlStack", "Config"), "Config"),
)

KEYWORDS = {"if", "then", "else", "while", "do", "skip"}
PGM_VARS = ("i1", "i2", "m")
PGM_TEXT = "i1:= 1; i2:= 2; if i1<=i2 then m:= i1 else m:= i2"


class SmcError(ValueError):
    pass


def smc_signature(max_nat: int = 3, program_vars=PGM_VARS) -> Signature:
    """Numerals 0..max_nat, the given program variables as Var constants,
    and one operation per production of the machine grammar."""
    ops = [(str(n), (), "Nat") for n in range(max_nat + 1)]
    for x in program_vars:
        if x in KEYWORDS or x in OBJECT_VARS.values() or x in {o[0] for o in FIXED_OPS}:
            raise SmcError(f"{x!r} cannot be used as a program variable")
        ops.append((x, (), "Var"))
    ops.extend(FIXED_OPS)
    return Signature.build(SORTS, ops, [(v, s) for s, v in OBJECT_VARS.items()])


def signature_for(program, extra_nat: int = 3) -> Signature:
    """Signature covering the program's variables and literals."""
    return smc_signature(max(extra_nat, max_literal(program)), program_vars(program))


# --- program syntax trees ---------------------------------------------------------


@dataclass(frozen=True)
class Num:
    n: int


@dataclass(frozen=True)
class Id:
    name: str


@dataclass(frozen=True)
class Plus:
    left: object
    right: object


@dataclass(frozen=True)
class Leq:
    left: object
    right: object


@dataclass(frozen=True)
class Assign:
    var: str
    expr: object


@dataclass(frozen=True)
class If:
    cond: Leq
    then: object
    orelse: object


@dataclass(frozen=True)
class While:
    cond: Leq
    body: object


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Seq:
    first: object
    second: object


def _walk(node):
    yield node
    for v in vars(node).values() if hasattr(node, "__dict__") else ():
        if isinstance(v, (Num, Id, Plus, Leq, Assign, If, While, Skip, Seq)):
            yield from _walk(v)


def program_vars(program):
    seen = []
    for node in _walk(program):
        name = node.var if isinstance(node, Assign) else node.name if isinstance(node, Id) else None
        if name is not None and name not in seen:
            seen.append(name)
    return tuple(seen)


def max_literal(program) -> int:
    return max((node.n for node in _walk(program) if isinstance(node, Num)), default=0)


# --- parser ---------------------------------------------------------------------------

_TOK = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9']*)|(:=|<=|[+;()]))")


def _tokens(text):
    out, pos = [], 0
    while pos < len(text):
        if not text[pos:].strip():
            break
        m = _TOK.match(text, pos)
        if not m:
            raise SmcError(f"unexpected character {text[pos:].strip()[0]!r} at offset {pos}")
        if m.group(1):
            out.append(("num", m.group(1)))
        elif m.group(2):
            out.append(("kw" if m.group(2) in KEYWORDS else "id", m.group(2)))
        else:
            out.append(("sym", m.group(3)))
        pos = m.end()
    out.append(("eof", ""))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, text=None):
        tok = self.toks[self.i]
        if text is not None and tok[1] != text:
            raise SmcError(f"expected {text!r}, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return tok

    def program(self):
        s = self.stmt()
        if self.peek()[0] != "eof":
            raise SmcError(f"unexpected {self.peek()[1]!r}")
        return s

    def stmt(self):
        first = self.simple()
        if self.peek()[1] == ";":
            self.take()
            return Seq(first, self.stmt())
        return first

    def simple(self):
        kind, text = self.peek()
        if text == "(":
            self.take()
            s = self.stmt()
            self.take(")")
            return s
        if text == "skip":
            self.take()
            return Skip()
        if text == "if":
            self.take()
            c = self.bexp()
            self.take("then")
            a = self.simple()
            self.take("else")
            return If(c, a, self.simple())
        if text == "while":
            self.take()
            c = self.bexp()
            self.take("do")
            return While(c, self.simple())
        if kind == "id":
            self.take()
            self.take(":=")
            return Assign(text, self.aexp())
        raise SmcError(f"unexpected {text or 'end of input'!r}")

    def bexp(self):
        left = self.aexp()
        self.take("<=")
        return Leq(left, self.aexp())

    def aexp(self):
        left = self.atom()
        while self.peek()[1] == "+":
            self.take()
            left = Plus(left, self.atom())
        return left

    def atom(self):
        kind, text = self.take()
        if kind == "num":
            return Num(int(text))
        if kind == "id":
            return Id(text)
        if text == "(":
            e = self.aexp()
            self.take(")")
            return e
        raise SmcError(f"expected an arithmetic expression, found {text or 'end of input'!r}")


def parse_program(text: str):
    return _Parser(text).program()


def show_program(s) -> str:
    if isinstance(s, Num):
        return str(s.n)
    if isinstance(s, Id):
        return s.name
    if isinstance(s, Plus):
        return f"{show_program(s.left)} + {_atom(s.right)}"
    if isinstance(s, Leq):
        return f"{show_program(s.left)} <= {show_program(s.right)}"
    if isinstance(s, Assign):
        return f"{s.var} := {show_program(s.expr)}"
    if isinstance(s, If):
        return f"if {show_program(s.cond)} then {_block(s.then)} else {_block(s.orelse)}"
    if isinstance(s, While):
        return f"while {show_program(s.cond)} do {_block(s.body)}"
    if isinstance(s, Skip):
        return "skip"
    if isinstance(s, Seq):
        return f"{_block(s.first)}; {show_program(s.second)}"
    raise TypeError(s)


def _atom(e):
    return f"({show_program(e)})" if isinstance(e, Plus) else show_program(e)


def _block(s):
    return f"({show_program(s)})" if isinstance(s, Seq) else show_program(s)


# --- terms ------------------------------------------------------------------------------


def nat(n: int) -> Formula:
    return App(str(n))


def val_term(v) -> Formula:
    if type(v) is bool:
        return App("bool2val", [App("true" if v else "false")])
    return App("nat2val", [nat(v)])


def to_term(node) -> Formula:
    """Program syntax tree to its ground term (sorts AExp, BExp or Stmt)."""
    if isinstance(node, Num):
        return App("nat2aexp", [nat(node.n)])
    if isinstance(node, Id):
        return App("var2aexp", [App(node.name)])
    if isinstance(node, Plus):
        return App("add", [to_term(node.left), to_term(node.right)])
    if isinstance(node, Leq):
        return App("le", [to_term(node.left), to_term(node.right)])
    if isinstance(node, Assign):
        return App("assign", [App(node.var), to_term(node.expr)])
    if isinstance(node, If):
        return App("ite", [to_term(node.cond), to_term(node.then), to_term(node.orelse)])
    if isinstance(node, While):
        return App("while", [to_term(node.cond), to_term(node.body)])
    if isinstance(node, Skip):
        return App("skip")
    if isinstance(node, Seq):
        return App("seq", [to_term(node.first), to_term(node.second)])
    raise TypeError(f"not a program node: {node!r}")


def then(a, b) -> Formula:
    return App("then", [a, b])


def test(v) -> Formula:
    return App("test", [val_term(v)])


TRUE_TEST = test(True)
FALSE_TEST = test(False)


def expand(term: Formula):
    """One unfolding of a compound c(..) control term (the D-rules), or None
    when the term is primitive or a control combinator."""
    if term.op == "cs":
        s = term.args[0]
        if s.op == "seq":
            return then(App("cs", [s.args[0]]), App("cs", [s.args[1]]))
        if s.op == "assign":
            return then(App("ca", [s.args[1]]), App("asgn", [s.args[0]]))
        if s.op == "ite":
            b, s1, s2 = s.args
            return then(
                App("cb", [b]),
                App("choice", [then(TRUE_TEST, App("cs", [s1])), then(FALSE_TEST, App("cs", [s2]))]),
            )
        if s.op == "while":
            b, body = s.args
            loop = App("star", [then(TRUE_TEST, then(App("cs", [body]), App("cb", [b])))])
            return then(App("cb", [b]), then(loop, FALSE_TEST))
        return None
    if term.op == "ca" and term.args[0].op == "add":
        a1, a2 = term.args[0].args
        return then(App("ca", [a1]), then(App("ca", [a2]), App("plus")))
    if term.op == "cb":
        a1, a2 = term.args[0].args
        return then(App("ca", [a2]), then(App("ca", [a1]), App("leq")))
    return None


_canon_cache = {}


def canon_ctrl(term: Formula) -> Formula:
    """Normal form of a control term: every compound c(..) unfolded."""
    hit = _canon_cache.get(term)
    if hit is not None:
        return hit
    e = expand(term)
    if e is not None:
        out = canon_ctrl(e)
    elif term.op in ("then", "choice", "star"):
        out = App(term.op, [canon_ctrl(a) for a in term.args])
    else:
        out = term
    _canon_cache[term] = out
    return out


def is_primitive(term: Formula) -> bool:
    return term.op not in ("then", "choice", "star") and expand(term) is None
