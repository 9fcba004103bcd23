"""Text front end: the .msig signature format and the formula grammar.

Formula grammar, loosest binding first::

    iff     := imp ('<->' imp)*          (left associative)
    imp     := disj ('->' imp)?          (right associative)
    disj    := conj ('|' conj)*
    conj    := unary ('&' unary)*
    unary   := '!' unary | atom
    atom    := ident | ident '(' args ')' | '[' ident ']' '(' args ')'
             | 'bot@' sort | 'top@' sort | '(' iff ')'
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import App, Formula, Not, Or, Var, box, iff, implies, land
from .signature import Signature, SignatureError, mk_bot, mk_top, sort_of


class ParseError(ValueError):
    def __init__(self, message: str, pos: int | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if pos is not None:
            where.append(f"col {pos + 1}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.pos = pos
        self.line = line


IDENT = r"[^\W\d][\w']*|\d+"
_TOKEN = re.compile(
    rf"\s*(?:(?P<botop>(?:bot|top)@(?:{IDENT}))|(?P<ident>{IDENT})|(?P<sym><->|->|[!&|(),\[\]]))"
)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("eof", "", n))
    return toks


class _FormulaParser:
    def __init__(self, sig: Signature, text: str):
        self.sig = sig
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, text=None):
        tok = self.toks[self.i]
        if text is not None and tok.text != text:
            what = repr(tok.text) if tok.kind != "eof" else "end of input"
            raise ParseError(f"expected {text!r}, found {what}", tok.pos)
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.iff()
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected {tok.text!r}", tok.pos)
        return f

    def iff(self):
        left = self.imp()
        while self.peek().text == "<->":
            self.take()
            left = iff(left, self.imp())
        return left

    def imp(self):
        left = self.disj()
        if self.peek().text == "->":
            self.take()
            return implies(left, self.imp())
        return left

    def disj(self):
        left = self.conj()
        while self.peek().text == "|":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek().text == "&":
            self.take()
            left = land(left, self.unary())
        return left

    def unary(self):
        if self.peek().text == "!":
            self.take()
            return Not(self.unary())
        return self.atom()

    def args(self):
        self.take("(")
        out = []
        if self.peek().text != ")":
            out.append(self.iff())
            while self.peek().text == ",":
                self.take()
                out.append(self.iff())
        self.take(")")
        return out

    def atom(self):
        tok = self.peek()
        if tok.text == "(":
            self.take()
            f = self.iff()
            self.take(")")
            return f
        if tok.text == "[":
            self.take()
            name = self.take()
            if name.kind != "ident":
                raise ParseError("expected operation name after '['", name.pos)
            self.take("]")
            if name.text not in self.sig.ops:
                raise ParseError(f"unknown operation {name.text!r}", name.pos)
            if self.sig.ops[name.text].arity == 0:
                raise ParseError(f"nullary operation {name.text!r} has no dual", name.pos)
            return box(name.text, self.args())
        if tok.kind == "botop":
            self.take()
            which, sort = tok.text.split("@", 1)
            if sort not in self.sig.vars:
                raise ParseError(f"unknown sort {sort!r}", tok.pos)
            return mk_bot(self.sig, sort) if which == "bot" else mk_top(self.sig, sort)
        if tok.kind == "ident":
            self.take()
            if tok.text in self.sig.var_sort:
                return Var(tok.text)
            if tok.text in self.sig.ops:
                if self.peek().text == "(":
                    return App(tok.text, self.args())
                return App(tok.text, ())
            raise ParseError(f"unknown symbol {tok.text!r}", tok.pos)
        what = repr(tok.text) if tok.kind != "eof" else "end of input"
        raise ParseError(f"unexpected {what}", tok.pos)


def parse_formula(sig: Signature, text: str) -> Formula:
    f = _FormulaParser(sig, text).parse()
    sort_of(sig, f)
    return f


# --- .msig ------------------------------------------------------------------

_SORT = re.compile(rf"^sort\s+({IDENT})$")
_OP = re.compile(rf"^op\s+({IDENT})\s*:\s*((?:(?:{IDENT})\s+)*?)\s*->\s*({IDENT})$")
_VAR = re.compile(rf"^var\s+({IDENT})\s*:\s*({IDENT})$")


def strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_signature(text: str) -> Signature:
    sorts, ops, vars = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = strip_comment(raw)
        if not line:
            continue
        if m := _SORT.match(line):
            sorts.append(m.group(1))
        elif m := _OP.match(line):
            ops.append((m.group(1), tuple(m.group(2).split()), m.group(3)))
        elif m := _VAR.match(line):
            vars.append((m.group(1), m.group(2)))
        else:
            raise ParseError(f"cannot parse signature line {line!r}", line=lineno)
    # declarations may come in any order; validation happens on the whole file
    problems = []
    known = set(sorts)
    for name, s in vars:
        if s not in known:
            problems.append(f"variable {name!r} declared at undeclared sort {s!r}")
    seen = {}
    for name, s in vars:
        if name in seen:
            problems.append(f"duplicate variable {name!r}")
        seen[name] = s
    if problems:
        raise SignatureError("; ".join(problems))
    return Signature.build(sorts, ops, vars)


def print_signature(sig: Signature) -> str:
    lines = [f"sort {s}" for s in sig.sorts]
    for op in sig.ops.values():
        args = " ".join(op.arg_sorts)
        lines.append(f"op {op.name} : {args + ' ' if args else ''}-> {op.result_sort}")
    for s in sig.sorts:
        lines.extend(f"var {p} : {s}" for p in sig.vars[s])
    return "\n".join(lines) + "\n"
