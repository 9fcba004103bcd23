"""Text formats: .max axiom files, .mpf proof files, .mfm formula lists."""
from __future__ import annotations

import os
import re

from ..core.parser import IDENT, ParseError, parse_formula, strip_comment
from ..core.printer import print_formula
from .checker import (
    MP,
    UG,
    AddInst,
    Axiom,
    DualInst,
    GlobalMode,
    Hyp,
    KInst,
    LocalMode,
    Mono,
    NormInst,
    Proof,
    Step,
    Taut,
)
from .schemes import AxiomSet, SchemeError, make_scheme, scheme_signature

_CLOSE = {"(": ")", "[": "]", "{": "}"}


def split_top(text: str, sep=","):
    """Split on `sep` outside any brackets."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def _bracketed(text: str, open_ch: str):
    """Content of a leading bracket group and the remainder."""
    text = text.strip()
    if not text.startswith(open_ch):
        raise ParseError(f"expected {open_ch!r}")
    depth = 0
    for n, ch in enumerate(text):
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
            if depth == 0:
                return text[1:n], text[n + 1 :].strip()
    raise ParseError(f"unclosed {open_ch!r}")


# --- .mfm ----------------------------------------------------------------------------


def parse_formula_list(sig, text: str):
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = strip_comment(raw)
        if line:
            try:
                out.append(parse_formula(sig, line))
            except ParseError as e:
                raise ParseError(str(e), line=lineno) from None
    return out


def print_formula_list(sig, formulas) -> str:
    return "".join(print_formula(sig, f) + "\n" for f in formulas)


# --- .max ------------------------------------------------------------------------------

_META = re.compile(rf"meta\s+({IDENT})\s*:\s*({IDENT})\s*")
_GUARD = re.compile(rf"guard\s+({IDENT})\s*\(([^)]*)\)\s*")


def parse_axioms(sig, text: str) -> AxiomSet:
    schemes, basis = [], "standard"
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = strip_comment(raw)
        if not line:
            continue
        try:
            if line.startswith("basis"):
                parts = line.split()
                if len(parts) != 2:
                    raise ParseError("expected 'basis standard|alternative'")
                basis = parts[1]
            elif line.startswith("scheme"):
                schemes.append(_parse_scheme(sig, line))
            else:
                raise ParseError(f"cannot parse axiom line {line!r}")
        except (ParseError, SchemeError, ValueError) as e:
            raise ParseError(str(e), line=lineno) from None
    return AxiomSet.of(schemes, basis)


def _parse_scheme(sig, line):
    head, sep, body = line.partition("::=")
    if not sep:
        raise ParseError("scheme needs '::='")
    m = re.match(rf"scheme\s+({IDENT})\s*", head)
    if not m:
        raise ParseError("scheme needs a name")
    name, rest = m.group(1), head[m.end():]
    metavars, guards = [], []
    while rest.strip():
        rest = rest.strip()
        if mm := _META.match(rest):
            metavars.append((mm.group(1), mm.group(2)))
        elif mm := _GUARD.match(rest):
            args = [a for a in re.split(r"[\s,]+", mm.group(2).strip()) if a]
            guards.append((mm.group(1), tuple(args)))
        else:
            raise ParseError(f"unexpected {rest!r} in scheme header")
        rest = rest[mm.end():]
    ext = scheme_signature(sig, tuple(metavars))
    return make_scheme(sig, name, metavars, parse_formula(ext, body.strip()), guards)


def print_axioms(sig, axioms: AxiomSet) -> str:
    lines = [f"basis {axioms.basis}"]
    for sc in axioms.schemes.values():
        ext = scheme_signature(sig, sc.metavars)
        head = [f"scheme {sc.name}"]
        head += [f"meta {m} : {s}" for m, s in sc.metavars]
        head += [f"guard {p}({', '.join(a)})" for p, a in sc.guards]
        lines.append(" ".join(head) + " ::= " + print_formula(ext, sc.template))
    return "\n".join(lines) + "\n"


# --- .mpf --------------------------------------------------------------------------------

_STEP = re.compile(r"^(\d+)\.\s*(.*)$")


def _binding(sig, text):
    inner, rest = _bracketed(text, "{")
    if rest:
        raise ParseError(f"trailing text {rest!r}")
    out = {}
    for part in split_top(inner):
        if not part:
            continue
        key, sep, val = part.partition(":=")
        if not sep:
            raise ParseError(f"binding entry {part!r} needs ':='")
        out[key.strip()] = parse_formula(sig, val.strip())
    return out


def _sides(sig, text):
    text = text.strip()
    if not text:
        return ()
    inner, rest = _bracketed(text, "[")
    if rest:
        raise ParseError(f"trailing text {rest!r}")
    return tuple(parse_formula(sig, p) for p in split_top(inner) if p)


def parse_justification(sig, text: str):
    text = text.strip()
    word, _, rest = text.partition(" ")
    rest = rest.strip()
    if word == "taut" and not rest:
        return Taut()
    if word == "hyp" and not rest:
        return Hyp()
    if word == "mp":
        j, k = rest.split()
        return MP(int(j), int(k))
    if word == "axiom":
        name, _, b = rest.partition(" ")
        return Axiom.of(name, _binding(sig, b))
    if word == "dual":
        op, _, b = rest.partition(" ")
        return DualInst.of(op, _binding(sig, b))
    if word in ("k", "norm", "add"):
        op, i, b = rest.split(None, 2)
        cls = {"k": KInst, "norm": NormInst, "add": AddInst}[word]
        return cls.of(op, int(i), _binding(sig, b))
    if word in ("ug", "mono"):
        parts = rest.split(None, 3)
        op, i, j = parts[:3]
        sides = _sides(sig, parts[3] if len(parts) > 3 else "")
        return (UG if word == "ug" else Mono)(op, int(i), int(j), sides)
    raise ParseError(f"unknown justification {text!r}")


def parse_proof(sig, text: str, base_dir=None) -> Proof:
    mode_line, hyps, steps = None, [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = strip_comment(raw)
        if not line:
            continue
        try:
            if line.startswith("mode "):
                if mode_line is not None or steps:
                    raise ParseError("the mode header must come first, once")
                mode_line = line.split()
                hyps.extend(_hyps_file(sig, mode_line, base_dir))
            elif line.startswith("hypothesis "):
                hyps.append(parse_formula(sig, line[len("hypothesis "):]))
            elif m := _STEP.match(line):
                n = int(m.group(1))
                if n != len(steps) + 1:
                    raise ParseError(f"step {n} out of sequence")
                body = m.group(2)
                if ";" not in body:
                    raise ParseError("step needs '; <justification>'")
                ftext, _, jtext = body.partition(";")
                steps.append(Step(parse_formula(sig, ftext.strip()), parse_justification(sig, jtext)))
            else:
                raise ParseError(f"cannot parse proof line {line!r}")
        except (ParseError, ValueError) as e:
            if isinstance(e, ParseError) and e.line is not None:
                raise
            raise ParseError(str(e), line=lineno) from None
    return Proof(tuple(steps), _mode(mode_line or ["mode", "global"], tuple(hyps)))


def _hyps_file(sig, words, base_dir):
    if "hyps" not in words:
        return []
    path = words[words.index("hyps") + 1]
    if path == "-":
        return []
    if base_dir and not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    with open(path, encoding="utf-8") as fh:
        return parse_formula_list(sig, fh.read())


def _mode(words, hyps):
    kind = words[1] if len(words) > 1 else ""
    if kind == "global":
        return GlobalMode(hyps)
    if kind == "local":
        if len(words) < 3:
            raise ParseError("local mode needs a sort")
        wits = ()
        if "witnesses" in words:
            wits = tuple(int(x) for x in words[words.index("witnesses") + 1 :])
        return LocalMode(words[2], hyps, wits)
    raise ParseError(f"unknown mode {kind!r}")


def print_justification(sig, just) -> str:
    t = type(just)
    if t is Taut:
        return "taut"
    if t is Hyp:
        return "hyp"
    if t is MP:
        return f"mp {just.j} {just.k}"

    def b(binding):
        return "{" + ", ".join(f"{k} := {print_formula(sig, f)}" for k, f in binding) + "}"

    if t is Axiom:
        return f"axiom {just.name} {b(just.binding)}"
    if t is DualInst:
        return f"dual {just.op} {b(just.binding)}"
    if t in (KInst, NormInst, AddInst):
        word = {KInst: "k", NormInst: "norm", AddInst: "add"}[t]
        return f"{word} {just.op} {just.i} {b(just.binding)}"
    if t in (UG, Mono):
        word = "ug" if t is UG else "mono"
        sides = "[" + ", ".join(print_formula(sig, f) for f in just.sides) + "]"
        return f"{word} {just.op} {just.i} {just.j} {sides}"
    raise TypeError(f"unknown justification {just!r}")


def print_proof(sig, proof: Proof, hyps_file=None) -> str:
    mode = proof.mode
    src = f" hyps {hyps_file}" if hyps_file else ""
    if isinstance(mode, LocalMode):
        head = f"mode local {mode.sort}{src}"
        if mode.witnesses:
            head += " witnesses " + " ".join(map(str, mode.witnesses))
    else:
        head = f"mode global{src}"
    lines = [head]
    if not hyps_file:
        lines += [f"hypothesis {print_formula(sig, h)}" for h in mode.hyps]
    for n, s in enumerate(proof.steps, 1):
        lines.append(f"{n}. {print_formula(sig, s.formula)} ; {print_justification(sig, s.just)}")
    return "\n".join(lines) + "\n"
