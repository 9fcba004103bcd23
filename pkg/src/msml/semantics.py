"""Finite sorted Kripke frames and models, satisfaction, consequence,
generated submodels and small-scope model enumeration."""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .core.formula import App, Formula, Not, Or, Var, variables
from .core.parser import IDENT, ParseError, strip_comment
from .core.signature import Signature, SortError, sort_of


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Frame:
    worlds: Mapping[str, tuple]  # sort -> ordered world ids
    rels: Mapping[str, frozenset]  # op -> set of (w, w1, ..., wn)

    def check(self, sig: Signature):
        for s in sig.sorts:
            ws = self.worlds.get(s)
            if not ws:
                raise ModelError(f"sort {s} has no worlds")
            if len(set(ws)) != len(ws):
                raise ModelError(f"duplicate world at sort {s}")
        member = {s: set(ws) for s, ws in self.worlds.items()}
        for name, tuples in self.rels.items():
            op = sig.op(name)
            sorts = (op.result_sort, *op.arg_sorts)
            for tup in tuples:
                if len(tup) != len(sorts):
                    raise ModelError(f"relation {name} has tuple {tup} of wrong length")
                for w, s in zip(tup, sorts):
                    if w not in member[s]:
                        raise ModelError(f"relation {name}: {w!r} is not a world of sort {s}")


class Model:
    """A frame plus a valuation. Variables missing from `valuation` are false
    everywhere."""

    def __init__(self, sig: Signature, frame: Frame, valuation: Mapping[str, Iterable] = (),
                 metadata=None, check=True):
        self.sig = sig
        self.frame = frame
        val = {p: frozenset() for p in sig.var_sort}
        for p, ws in dict(valuation).items():
            if p not in sig.var_sort:
                raise SortError(f"unknown variable {p!r}")
            val[p] = frozenset(ws)
        self.valuation = val
        self.metadata = dict(metadata or {})
        if check:
            frame.check(sig)
            for p, ws in val.items():
                if not ws <= set(frame.worlds[sig.var_sort[p]]):
                    raise ModelError(f"valuation of {p} leaves sort {sig.var_sort[p]}")
        # successor index: op -> first component -> list of argument tuples
        succ = {}
        for name in sig.ops:
            idx = {}
            for tup in frame.rels.get(name, ()):
                idx.setdefault(tup[0], []).append(tup[1:])
            succ[name] = idx
        self.succ = succ

    @property
    def worlds(self):
        return self.frame.worlds

    @property
    def rels(self):
        return self.frame.rels

    def __repr__(self):
        sizes = ", ".join(f"{s}:{len(ws)}" for s, ws in self.worlds.items())
        return f"<Model {sizes}>"


# --- satisfaction -------------------------------------------------------------


class Evaluator:
    """Pointwise satisfaction with a (world, subformula) memo shared by all
    queries made through one evaluator."""

    def __init__(self, model: Model):
        self.model = model
        self.memo = {}

    def holds(self, w, phi: Formula) -> bool:
        key = (w, phi)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        t = type(phi)
        if t is Var:
            out = w in self.model.valuation[phi.name]
        elif t is Not:
            out = not self.holds(w, phi.child)
        elif t is Or:
            out = self.holds(w, phi.left) or self.holds(w, phi.right)
        elif t is App:
            args = phi.args
            out = any(
                all(self.holds(u, a) for u, a in zip(tup, args))
                for tup in self.model.succ[phi.op].get(w, ())
            )
        else:
            raise TypeError(f"not a formula: {phi!r}")
        self.memo[key] = out
        return out


def satisfies(model: Model, world, phi: Formula) -> bool:
    s = sort_of(model.sig, phi)
    if world not in model.worlds[s]:
        raise ModelError(f"{world!r} is not a world of sort {s}")
    return Evaluator(model).holds(world, phi)


def globally_true(model: Model, phi: Formula) -> bool:
    return failing_world(model, phi) is None


def failing_world(model: Model, phi: Formula, ev: Evaluator | None = None):
    """First world (in declaration order) where phi fails, or None."""
    s = sort_of(model.sig, phi)
    ev = ev or Evaluator(model)
    for w in model.worlds[s]:
        if not ev.holds(w, phi):
            return w
    return None


def truth_set(model: Model, phi: Formula, memo=None) -> frozenset:
    """{w : M, w |= phi}, computed bottom-up on whole sets. Used by the
    search routines; satisfies() is the pointwise reference."""
    memo = {} if memo is None else memo
    return _tset(model, phi, memo)


def _tset(model, phi, memo):
    hit = memo.get(phi)
    if hit is not None:
        return hit
    t = type(phi)
    if t is Var:
        out = model.valuation[phi.name]
    elif t is Not:
        s = sort_of(model.sig, phi)
        out = frozenset(model.worlds[s]) - _tset(model, phi.child, memo)
    elif t is Or:
        out = _tset(model, phi.left, memo) | _tset(model, phi.right, memo)
    else:
        args = [_tset(model, a, memo) for a in phi.args]
        out = frozenset(
            w
            for w, tups in model.succ[phi.op].items()
            if any(all(u in a for u, a in zip(tup, args)) for tup in tups)
        )
    memo[phi] = out
    return out


@dataclass
class Consequence:
    holds: bool
    counterexample: tuple | None = None  # (model index, world)

    def __bool__(self):
        return self.holds


def local_consequence(models, hyps, phi: Formula) -> Consequence:
    hyps = list(hyps)
    if not models:
        return Consequence(True)
    sig = models[0].sig
    s = sort_of(sig, phi)
    for h in hyps:
        if sort_of(sig, h) != s:
            raise SortError(f"hypothesis {h!r} is not of sort {s}")
    for i, m in enumerate(models):
        ev = Evaluator(m)
        for w in m.worlds[s]:
            if all(ev.holds(w, h) for h in hyps) and not ev.holds(w, phi):
                return Consequence(False, (i, w))
    return Consequence(True)


def _members(gamma):
    if isinstance(gamma, Mapping):
        for fs in gamma.values():
            yield from fs
    else:
        yield from gamma


def global_model_of(model: Model, gamma) -> bool:
    ev = Evaluator(model)
    return all(failing_world(model, g, ev) is None for g in _members(gamma))


# --- generated submodels -----------------------------------------------------


def generated_submodel(model: Model, seed) -> Model:
    """Smallest submodel containing `seed` (sort -> world ids) and closed
    under relation successors. Sorts left empty get one fresh isolated world,
    listed in metadata["padded"]."""
    sig = model.sig
    keep = {s: set() for s in sig.sorts}
    work = []
    for s, ws in dict(seed).items():
        for w in ws:
            if w not in model.worlds.get(s, ()):
                raise ModelError(f"seed world {w!r} is not a world of sort {s}")
            if w not in keep[s]:
                keep[s].add(w)
                work.append((s, w))
    by_result = {}
    for name, op in sig.ops.items():
        if op.arity:
            by_result.setdefault(op.result_sort, []).append(op)
    while work:
        s, w = work.pop()
        for op in by_result.get(s, ()):
            for tup in model.succ[op.name].get(w, ()):
                for u, us in zip(tup, op.arg_sorts):
                    if u not in keep[us]:
                        keep[us].add(u)
                        work.append((us, u))
    worlds, padded = {}, {}
    for s in sig.sorts:
        ws = tuple(w for w in model.worlds[s] if w in keep[s])
        if not ws:
            fresh = ("pad", s)
            while fresh in model.worlds[s]:
                fresh = ("pad", fresh)
            ws = (fresh,)
            padded[s] = fresh
        worlds[s] = ws
    member = {s: set(ws) for s, ws in worlds.items()}
    rels = {}
    for name, op in sig.ops.items():
        srts = (op.result_sort, *op.arg_sorts)
        rels[name] = frozenset(
            tup for tup in model.rels.get(name, ())
            if all(w in member[x] for w, x in zip(tup, srts))
        )
    val = {p: ws & member[sig.var_sort[p]] for p, ws in model.valuation.items()}
    meta = dict(model.metadata)
    meta["padded"] = padded
    return Model(sig, Frame(worlds, rels), val, metadata=meta, check=False)


# --- enumeration -------------------------------------------------------------


def _all_tuples(op, worlds):
    pools = [worlds[op.result_sort]] + [worlds[s] for s in op.arg_sorts]
    return list(itertools.product(*pools))


def _subsets(items):
    """All subsets of `items`, ordered by bitmask."""
    n = len(items)
    for mask in range(1 << n):
        yield frozenset(items[i] for i in range(n) if mask >> i & 1)


def enumerate_frames(sig: Signature, max_worlds_per_sort: int, sorts_sizes=None) -> Iterator[Frame]:
    if max_worlds_per_sort < 1:
        raise ValueError("bound must be at least 1")
    ops = list(sig.ops.values())
    size_vectors = sorts_sizes or sorted(
        itertools.product(range(1, max_worlds_per_sort + 1), repeat=len(sig.sorts)),
        key=lambda v: (sum(v), v),
    )
    for sizes in size_vectors:
        worlds = {s: tuple(range(n)) for s, n in zip(sig.sorts, sizes)}
        choices = [list(_subsets(_all_tuples(op, worlds))) for op in ops]
        for combo in itertools.product(*choices):
            yield Frame(worlds, {op.name: rel for op, rel in zip(ops, combo)})


def enumerate_models(sig: Signature, max_worlds_per_sort: int, var_pool=None) -> Iterator[Model]:
    """Every model with at most `max_worlds_per_sort` worlds per sort, world
    ids 0..n-1, and every valuation of the variables in `var_pool` (others
    are empty). Deterministic: sizes ascending, then relations, then
    valuations, each by bitmask order."""
    pool = list(sig.var_sort) if var_pool is None else list(var_pool)
    for p in pool:
        sig.sort_of_var(p)
    for frame in enumerate_frames(sig, max_worlds_per_sort):
        vals = [list(_subsets(frame.worlds[sig.var_sort[p]])) for p in pool]
        for combo in itertools.product(*vals):
            yield Model(sig, frame, dict(zip(pool, combo)), check=False)


def count_models(sig: Signature, max_worlds_per_sort: int, var_pool=None) -> int:
    pool = list(sig.var_sort) if var_pool is None else list(var_pool)
    total = 0
    for sizes in itertools.product(range(1, max_worlds_per_sort + 1), repeat=len(sig.sorts)):
        n = dict(zip(sig.sorts, sizes))
        bits = 0
        for op in sig.ops.values():
            k = n[op.result_sort]
            for s in op.arg_sorts:
                k *= n[s]
            bits += k
        bits += sum(n[sig.var_sort[p]] for p in pool)
        total += 1 << bits
    return total


def random_frame(sig: Signature, rng: random.Random, max_worlds_per_sort: int, density=None) -> Frame:
    worlds = {s: tuple(range(rng.randint(1, max_worlds_per_sort))) for s in sig.sorts}
    rels = {}
    for op in sig.ops.values():
        d = rng.random() if density is None else density
        rels[op.name] = frozenset(t for t in _all_tuples(op, worlds) if rng.random() < d)
    return Frame(worlds, rels)


def random_model(sig: Signature, rng: random.Random, max_worlds_per_sort: int,
                 var_pool=None, density=None) -> Model:
    frame = random_frame(sig, rng, max_worlds_per_sort, density)
    pool = list(sig.var_sort) if var_pool is None else list(var_pool)
    val = {p: [w for w in frame.worlds[sig.var_sort[p]] if rng.random() < 0.5] for p in pool}
    return Model(sig, frame, val, check=False)


def enumerate_valuations(sig: Signature, frame: Frame, var_pool, max_size=None, metadata=None) -> Iterator[Model]:
    """Models over one fixed frame: every valuation of the variables in
    var_pool, each variable ranging over subsets of at most max_size worlds
    (all subsets when None), smaller subsets first."""
    pool = list(var_pool)
    choices = []
    for p in pool:
        ws = frame.worlds[sig.sort_of_var(p)]
        top = len(ws) if max_size is None else min(max_size, len(ws))
        choices.append([frozenset(c) for k in range(top + 1) for c in itertools.combinations(ws, k)])
    for combo in itertools.product(*choices):
        yield Model(sig, frame, dict(zip(pool, combo)), metadata=metadata, check=False)


def find_countermodel(sig: Signature, phi: Formula, max_worlds_per_sort: int, var_pool=None):
    """Smallest-first search for (model, world) with M, w not satisfying phi."""
    pool = sorted(variables(phi)) if var_pool is None else list(var_pool)
    s = sort_of(sig, phi)
    for m in enumerate_models(sig, max_worlds_per_sort, pool):
        bad = frozenset(m.worlds[s]) - truth_set(m, phi)
        if bad:
            w = next(w for w in m.worlds[s] if w in bad)
            return m, w
    return None


# --- .mmod -------------------------------------------------------------------

_WORLD = re.compile(rf"^world\s+(\S+)\s*:\s*({IDENT})$")
_REL = re.compile(rf"^rel\s+({IDENT})((?:\s+\S+)+)$")
_VAL = re.compile(rf"^val\s+({IDENT})\s*=\s*\{{([^}}]*)\}}$")


def parse_model(sig: Signature, text: str) -> Model:
    worlds = {s: [] for s in sig.sorts}
    sort_of_world = {}
    rels = {name: set() for name in sig.ops}
    val = {}
    pending = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = strip_comment(raw)
        if not line:
            continue
        if m := _WORLD.match(line):
            w, s = m.groups()
            if s not in worlds:
                raise ParseError(f"unknown sort {s!r}", line=lineno)
            if w in worlds[s]:
                raise ParseError(f"duplicate world {w!r}", line=lineno)
            worlds[s].append(w)
            sort_of_world.setdefault(w, s)
        elif m := _REL.match(line):
            pending.append((lineno, "rel", m.group(1), tuple(m.group(2).split())))
        elif m := _VAL.match(line):
            pending.append((lineno, "val", m.group(1), tuple(m.group(2).split())))
        else:
            raise ParseError(f"cannot parse model line {line!r}", line=lineno)
    for lineno, kind, name, ids in pending:
        if kind == "rel":
            if name not in sig.ops:
                raise ParseError(f"unknown operation {name!r}", line=lineno)
            op = sig.ops[name]
            if len(ids) != op.arity + 1:
                raise ParseError(f"relation {name} needs {op.arity + 1} worlds", line=lineno)
            rels[name].add(ids)
        else:
            if name not in sig.var_sort:
                raise ParseError(f"unknown variable {name!r}", line=lineno)
            if name in val:
                raise ParseError(f"variable {name!r} valued twice", line=lineno)
            val[name] = ids
    frame = Frame({s: tuple(ws) for s, ws in worlds.items()},
                  {n: frozenset(r) for n, r in rels.items()})
    return Model(sig, frame, val)


def print_model(model: Model) -> str:
    sig = model.sig
    lines = []
    for s in sig.sorts:
        lines.extend(f"world {w} : {s}" for w in model.worlds[s])
    for name in sig.ops:
        for tup in sorted(model.rels.get(name, ()), key=lambda t: tuple(map(str, t))):
            lines.append(f"rel {name} " + " ".join(map(str, tup)))
    for p, ws in model.valuation.items():
        if ws:
            order = model.worlds[sig.var_sort[p]]
            lines.append(f"val {p} = {{ " + " ".join(str(w) for w in order if w in ws) + " }")
    return "\n".join(lines) + "\n"
