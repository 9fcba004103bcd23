"""Axiom schemes with metavariables and guards, plus the generated modal
schemes (K, Dual and the alternative-basis Norm/Add)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..core.formula import App, Formula, Not, box, iff, implies, lor, subformulas
from ..core.signature import Signature, mk_bot, sort_of, substitute


class SchemeError(ValueError):
    pass


# --- guards --------------------------------------------------------------------


def numeral_value(f: Formula):
    """The natural denoted by a numeral constant such as App('12'), else None."""
    if type(f) is App and not f.args and f.op.isdigit():
        return int(f.op)
    return None


def truth_value(f: Formula):
    if type(f) is App and not f.args and f.op in ("true", "false"):
        return f.op == "true"
    return None


def is_ground_term(f: Formula) -> bool:
    """Built only from operator applications: no variables or connectives."""
    return all(type(g) is App for g in subformulas(f))


def _intadd(sig, n, n1, n2):
    vals = [numeral_value(x) for x in (n, n1, n2)]
    return None not in vals and vals[0] == vals[1] + vals[2]


def _leqtruth(sig, t, n1, n2):
    tv, a, b = truth_value(t), numeral_value(n1), numeral_value(n2)
    return tv is not None and a is not None and b is not None and tv == (a <= b)


def _distinct(sig, a, b):
    return is_ground_term(a) and is_ground_term(b) and a != b


def _is_bot(sig, a):
    return a == mk_bot(sig, sort_of(sig, a))


def _numeral(sig, n):
    return numeral_value(n) is not None


GUARDS = {
    "intadd": (3, _intadd),
    "leqtruth": (3, _leqtruth),
    "distinct": (2, _distinct),
    "is_bot": (1, _is_bot),
    "numeral": (1, _numeral),
}


# --- schemes -------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomScheme:
    name: str
    metavars: tuple  # ((M, sort), ...)
    template: Formula
    guards: tuple = ()  # ((pred, (M, ...)), ...)

    def meta_sorts(self) -> dict:
        return dict(self.metavars)


@dataclass
class AxiomSet:
    schemes: dict = field(default_factory=dict)  # name -> AxiomScheme
    basis: str = "standard"

    def __post_init__(self):
        if self.basis not in ("standard", "alternative"):
            raise SchemeError(f"unknown basis {self.basis!r}")

    @classmethod
    def of(cls, schemes, basis="standard") -> "AxiomSet":
        out = {}
        for sc in schemes:
            if sc.name in out:
                raise SchemeError(f"duplicate scheme {sc.name!r}")
            out[sc.name] = sc
        return cls(out, basis)

    def __getitem__(self, name) -> AxiomScheme:
        try:
            return self.schemes[name]
        except KeyError:
            raise SchemeError(f"unknown scheme {name!r}") from None


def make_scheme(sig: Signature, name, metavars, template, guards=()) -> AxiomScheme:
    """Build and validate a scheme; `template` may be text over sig plus the
    metavariables."""
    metavars = tuple(metavars.items()) if isinstance(metavars, Mapping) else tuple(metavars)
    ext = scheme_signature(sig, metavars)
    if isinstance(template, str):
        from ..core.parser import parse_formula

        template = parse_formula(ext, template)
    sort_of(ext, template)
    meta = dict(metavars)
    for pred, args in guards:
        if pred not in GUARDS:
            raise SchemeError(f"unknown guard {pred!r}")
        if len(args) != GUARDS[pred][0]:
            raise SchemeError(f"guard {pred} takes {GUARDS[pred][0]} arguments")
        for a in args:
            if a not in meta:
                raise SchemeError(f"guard {pred} mentions undeclared metavariable {a!r}")
    return AxiomScheme(name, metavars, template, tuple((p, tuple(a)) for p, a in guards))


_ext_cache = {}


def scheme_signature(sig: Signature, metavars) -> Signature:
    key = (id(sig), tuple(metavars))
    hit = _ext_cache.get(key)
    if hit is None or hit[0] is not sig:
        hit = (sig, sig.with_vars(dict(metavars)) if metavars else sig)
        _ext_cache[key] = hit
    return hit[1]


def instantiate_scheme(sig: Signature, scheme: AxiomScheme, binding: Mapping[str, Formula]) -> Formula:
    meta = scheme.meta_sorts()
    missing = [m for m in meta if m not in binding]
    if missing:
        raise SchemeError(f"{scheme.name}: no binding for {', '.join(missing)}")
    extra = [m for m in binding if m not in meta]
    if extra:
        raise SchemeError(f"{scheme.name}: {', '.join(extra)} is not a metavariable")
    for m, f in binding.items():
        got = sort_of(sig, f)
        if got != meta[m]:
            raise SchemeError(f"{scheme.name}: {m} bound to a formula of sort {got}, expected {meta[m]}")
    for pred, args in scheme.guards:
        if not GUARDS[pred][1](sig, *(binding[a] for a in args)):
            raise SchemeError(f"{scheme.name}: guard {pred}({', '.join(args)}) fails")
    ext = scheme_signature(sig, scheme.metavars)
    return substitute(ext, scheme.template, dict(binding))


# --- generated modal schemes ------------------------------------------------------


def _plug(sides, i, x):
    """Insert x at 1-based position i among the other arguments."""
    sides = list(sides)
    return tuple(sides[: i - 1] + [x] + sides[i - 1 :])


def _sides_from(sig, op, i, binding, extra):
    decl = sig.op(op)
    n = decl.arity
    if n == 0:
        raise SchemeError(f"{op} is nullary")
    if not 1 <= i <= n:
        raise SchemeError(f"position {i} out of range for {op}/{n}")
    want = {f"PSI{j}": decl.arg_sorts[j - 1] for j in range(1, n + 1) if j != i}
    for k in extra:
        want[k] = decl.arg_sorts[i - 1]
    _check_binding(sig, op, want, binding)
    return tuple(binding[f"PSI{j}"] for j in range(1, n + 1) if j != i)


def _check_binding(sig, label, want, binding):
    missing = [k for k in want if k not in binding]
    if missing:
        raise SchemeError(f"{label}: no binding for {', '.join(missing)}")
    extra = [k for k in binding if k not in want]
    if extra:
        raise SchemeError(f"{label}: unexpected binding {', '.join(extra)}")
    for k, s in want.items():
        got = sort_of(sig, binding[k])
        if got != s:
            raise SchemeError(f"{label}: {k} has sort {got}, expected {s}")


def k_instance(sig, op, i, binding) -> Formula:
    """box(.., PHI -> CHI, ..) -> (box(.., PHI, ..) -> box(.., CHI, ..))"""
    sides = _sides_from(sig, op, i, binding, ("PHI", "CHI"))
    phi, chi = binding["PHI"], binding["CHI"]
    return implies(
        box(op, _plug(sides, i, implies(phi, chi))),
        implies(box(op, _plug(sides, i, phi)), box(op, _plug(sides, i, chi))),
    )


def dual_instance(sig, op, binding) -> Formula:
    """op(PSI1..PSIn) <-> !box(!PSI1, .., !PSIn)"""
    decl = sig.op(op)
    if decl.arity == 0:
        raise SchemeError(f"nullary operation {op} has no dual")
    want = {f"PSI{j}": s for j, s in enumerate(decl.arg_sorts, 1)}
    _check_binding(sig, op, want, binding)
    args = [binding[f"PSI{j}"] for j in range(1, decl.arity + 1)]
    return iff(App(op, args), Not(box(op, [Not(a) for a in args])))


def norm_instance(sig, op, i, binding) -> Formula:
    """op(.., bot, ..) <-> bot"""
    decl = sig.op(op)
    sides = _sides_from(sig, op, i, binding, ())
    return iff(App(op, _plug(sides, i, mk_bot(sig, decl.arg_sorts[i - 1]))), mk_bot(sig, decl.result_sort))


def add_instance(sig, op, i, binding) -> Formula:
    """op(.., PHI | CHI, ..) <-> op(.., PHI, ..) | op(.., CHI, ..)"""
    sides = _sides_from(sig, op, i, binding, ("PHI", "CHI"))
    phi, chi = binding["PHI"], binding["CHI"]
    return iff(
        App(op, _plug(sides, i, lor(phi, chi))),
        lor(App(op, _plug(sides, i, phi)), App(op, _plug(sides, i, chi))),
    )


def k_binding(sides, i, phi, chi) -> dict:
    b = side_binding(sides, i)
    b["PHI"], b["CHI"] = phi, chi
    return b


def side_binding(sides, i) -> dict:
    n = len(sides) + 1
    out = {}
    it = iter(sides)
    for j in range(1, n + 1):
        if j != i:
            out[f"PSI{j}"] = next(it)
    return out


def dual_binding(args) -> dict:
    return {f"PSI{j}": a for j, a in enumerate(args, 1)}


plug = _plug
