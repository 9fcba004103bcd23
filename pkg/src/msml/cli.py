"""Command-line entry point: `msml <subcommand> ...`.

Exit status 0 means success, 1 means refuted or rejected (with a witness),
2 means a usage error or an input that does not exist or does not parse.
With `--format json` every record is one JSON object per line carrying
`format_version` and `record`.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import FORMAT_VERSION, __version__
from .algebra import BaoError, check_bao, jt_embedding, parse_bao, print_bao
from .core import (
    ParseError,
    SignatureError,
    SortError,
    parse_formula,
    parse_signature,
    print_formula,
    print_signature,
    sort_of,
)
from .proof import (
    AxiomSet,
    BuildError,
    GlobalMode,
    Proof,
    SchemeError,
    Step,
    Taut,
    TooManyAtoms,
    TransformError,
    check_proof,
    derive_box_conj,
    derive_cong,
    derive_dia_disj,
    derive_mono,
    dt_global,
    dt_local,
    dt_local_inverse,
    gamma_closure,
    globalize,
    parse_axioms,
    parse_formula_list,
    parse_proof,
    print_axioms,
    print_proof,
)
from .semantics import ModelError, failing_world, find_countermodel, parse_model, print_model, truth_set

DEFAULT_MAX_WORLDS = 3
DEFAULT_BUDGET = 10_000


class UsageError(Exception):
    pass


class Out:
    """Text lines or line-delimited JSON records."""

    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def emit(self, record: str, text: str | None = None, /, **fields):
        if self.fmt == "json":
            rec = {"format_version": FORMAT_VERSION, "record": record}
            rec.update(fields)
            self.stream.write(json.dumps(rec, sort_keys=True) + "\n")
        elif text is not None:
            self.stream.write(text if text.endswith("\n") else text + "\n")


# --- input helpers ---------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror or e}") from None


def _sig(args):
    if not getattr(args, "sig", None):
        raise UsageError("--sig is required")
    return parse_signature(_read(args.sig))


def _axioms(sig, path):
    return parse_axioms(sig, _read(path)) if path else AxiomSet()


def _proof(sig, path):
    return parse_proof(sig, _read(path), base_dir=os.path.dirname(os.path.abspath(path)))


def _formulas(sig, texts=(), path=None):
    out = [parse_formula(sig, t) for t in texts or ()]
    if path:
        out.extend(parse_formula_list(sig, _read(path)))
    return out


def _by_sort(sig, formulas):
    out = {s: [] for s in sig.sorts}
    for f in formulas:
        out[sort_of(sig, f)].append(f)
    return out


def _show_set(ws):
    return "{" + ", ".join(sorted(map(str, ws))) + "}"


def _uf_name(u):
    """A principal ultrafilter is named by the atom generating it."""
    for a in u:
        if len(a) == 1:
            return "uf(" + str(next(iter(a))) + ")"
    return repr(u)


# --- subcommands ------------------------------------------------------------------------


def cmd_parse(args, out: Out) -> int:
    path = args.file
    if path and path.endswith(".smc"):
        from .smc import parse_program, show_program

        prog = parse_program(_read(path))
        out.emit("program", show_program(prog), program=show_program(prog))
        return 0
    if path and path.endswith(".msig") and not args.sig and not args.formula:
        res = print_signature(parse_signature(_read(path)))
        out.emit("parsed", res.rstrip("\n"), file=path, kind="msig", text=res)
        return 0
    sig = _sig(args)
    if not path and not args.formula:
        text = print_signature(sig)
        out.emit("signature", text.rstrip("\n"), sorts=list(sig.sorts), ops=len(sig.ops), text=text)
        return 0
    for t in args.formula or ():
        f = parse_formula(sig, t)
        out.emit("formula", f"{print_formula(sig, f)} : {sort_of(sig, f)}",
                 formula=print_formula(sig, f), sort=sort_of(sig, f))
    if not path:
        return 0
    text = _read(path)
    ext = os.path.splitext(path)[1]
    if ext == ".mmod":
        res = print_model(parse_model(sig, text))
    elif ext == ".max":
        res = print_axioms(sig, parse_axioms(sig, text))
    elif ext == ".mpf":
        res = print_proof(sig, _proof(sig, path))
    elif ext == ".mba":
        res = print_bao(sig, parse_bao(sig, text))
    elif ext == ".mfm":
        res = "".join(print_formula(sig, f) + "\n" for f in parse_formula_list(sig, text))
    elif ext == ".msig":
        res = print_signature(parse_signature(text))
    else:
        raise UsageError(f"unknown file kind {ext!r}")
    out.emit("parsed", res.rstrip("\n"), file=path, kind=ext[1:], text=res)
    return 0


def cmd_model_check(args, out: Out) -> int:
    sig = _sig(args)
    model = parse_model(sig, _read(args.model))
    phi = parse_formula(sig, args.formula)
    s = sort_of(sig, phi)
    shown = print_formula(sig, phi)
    if args.world is not None and not args.all_worlds:
        ws = [w for w in model.worlds[s] if str(w) == args.world]
        if not ws:
            raise UsageError(f"no world {args.world!r} of sort {s}")
        w = ws[0]
        ok = w in truth_set(model, phi)
        out.emit("model-check", f"{'holds' if ok else 'fails'} at {w}: {shown}",
                 holds=ok, world=str(w), formula=shown, sort=s)
        return 0 if ok else 1
    w = failing_world(model, phi)
    if w is None:
        out.emit("model-check", f"globally true at sort {s}: {shown}", holds=True, world=None, formula=shown, sort=s)
        return 0
    out.emit("model-check", f"fails at world {w}: {shown}", holds=False, world=str(w), formula=shown, sort=s)
    return 1


def _verdict(sig, out: Out, v, what="proof") -> int:
    if v.ok:
        c = print_formula(sig, v.conclusion)
        out.emit("verdict", f"accepted: {c}", accepted=True, conclusion=c, what=what)
        return 0
    out.emit("verdict", f"rejected at step {v.step}: {v.reason}", accepted=False, step=v.step,
             reason=v.reason, what=what)
    return 1


def cmd_check_proof(args, out: Out) -> int:
    sig = _sig(args)
    axioms = _axioms(sig, args.axioms)
    proof = _proof(sig, args.proof)
    return _verdict(sig, out, check_proof(sig, axioms, proof))


def _emit_proof(sig, axioms, out: Out, proof, witnesses=()):
    for n, w in enumerate(witnesses, 1):
        chain = [[op, i, [print_formula(sig, f) for f in sides]] for op, i, sides in w.chain]
        f = print_formula(sig, w.formula)
        out.emit("witness", f"witness {n}: {f}  (base {print_formula(sig, w.base)}, {len(w.chain)} boxes)",
                 index=n, formula=f, base=print_formula(sig, w.base), chain=chain)
    text = print_proof(sig, proof)
    out.emit("proof", text, steps=len(proof.steps), text=text)
    return _verdict(sig, out, check_proof(sig, axioms, proof), what="output")


def cmd_transform(args, out: Out) -> int:
    sig = _sig(args)
    axioms = _axioms(sig, args.axioms)
    proof = _proof(sig, args.proof)
    phi = parse_formula(sig, args.phi) if args.phi else None
    if args.kind == "globalize":
        res = globalize(sig, axioms, proof)
        return _emit_proof(sig, axioms, out, res.proof, res.witnesses)
    if args.kind == "dt-global":
        if phi is None:
            raise UsageError("dt-global needs --phi")
        res = dt_global(sig, axioms, proof, phi)
        return _emit_proof(sig, axioms, out, res.proof, res.witnesses)
    if args.inverse:
        return _emit_proof(sig, axioms, out, dt_local_inverse(sig, axioms, proof))
    if phi is None:
        raise UsageError("dt-local needs --phi (or --inverse)")
    return _emit_proof(sig, axioms, out, dt_local(sig, axioms, proof, phi))


def cmd_gamma(args, out: Out) -> int:
    sig = _sig(args)
    gamma = _by_sort(sig, _formulas(sig, args.gamma, args.gamma_file))
    pool = _by_sort(sig, _formulas(sig, args.pool, args.pool_file))
    closure = gamma_closure(sig, gamma, args.depth, pool)
    for s in sig.sorts:
        for f in closure[s]:
            t = print_formula(sig, f)
            out.emit("member", f"{s}: {t}", sort=s, formula=t)
    total = sum(len(v) for v in closure.values())
    out.emit("summary", f"{total} formulas at depth {args.depth}", total=total, depth=args.depth)
    return 0


def _sub_proof(sig, axioms, args, want):
    """The supplied antecedent proof, or a one-step Taut proof of --a op --b."""
    if args.proof:
        return _proof(sig, args.proof)
    if args.a is None or args.b is None:
        raise UsageError("need --proof or both --a and --b")
    f = parse_formula(sig, f"({args.a}) {want} ({args.b})")
    return Proof((Step(f, Taut()),), GlobalMode())


def cmd_derive(args, out: Out) -> int:
    sig = _sig(args)
    axioms = _axioms(sig, args.axioms)
    if args.op not in sig.ops:
        raise UsageError(f"unknown operation {args.op!r}")
    sides = [parse_formula(sig, t) for t in args.side or ()]
    if args.rule in ("mono", "dia-mono"):
        sub = _sub_proof(sig, axioms, args, "->")
        proof = derive_mono(sig, args.op, args.pos, sides, sub, axioms, dual=args.rule == "dia-mono")
    elif args.rule == "cong":
        proof = derive_cong(sig, args.op, args.pos, sides, _sub_proof(sig, axioms, args, "<->"), axioms)
    else:
        if args.a is None or args.b is None:
            raise UsageError(f"{args.rule} needs --a and --b")
        a, b = parse_formula(sig, args.a), parse_formula(sig, args.b)
        fn = derive_box_conj if args.rule == "box-conj" else derive_dia_disj
        proof = fn(sig, args.op, args.pos, sides, a, b, axioms)
    return _emit_proof(sig, axioms, out, proof)


def cmd_bao_check(args, out: Out) -> int:
    sig = _sig(args)
    bao = parse_bao(sig, _read(args.algebra))
    v = check_bao(sig, bao, seed=args.seed)
    if v.ok:
        out.emit("bao-check", "ok: (N) and (A) hold", ok=True)
        return 0
    wit = [sorted(map(str, a)) for a in v.witness] if v.witness else None
    shown = "(" + ", ".join(_show_set(a) for a in v.witness) + ")" if v.witness else "-"
    out.emit("bao-check", f"violated ({v.law}) for {v.op} at {shown}: {v.detail}",
             ok=False, law=v.law, op=v.op, witness=wit, detail=v.detail)
    return 1


def cmd_jt(args, out: Out) -> int:
    sig = _sig(args)
    bao = parse_bao(sig, _read(args.algebra))
    pre = check_bao(sig, bao, seed=args.seed)
    if not pre.ok:
        out.emit("jt", f"not a BAO: ({pre.law}) fails for {pre.op}; embedding not attempted",
                 ok=False, check="bao", law=pre.law, op=pre.op)
        return 1
    res = jt_embedding(sig, bao)
    for s in sig.sorts:
        n = len(res.frame.worlds[s]) if res.frame else 0
        out.emit("ultrafilters", f"sort {s}: {len(bao.atoms[s])} atoms, {n} ultrafilters",
                 sort=s, atoms=len(bao.atoms[s]), ultrafilters=n)
        for a, img in sorted(res.r.get(s, {}).items(), key=lambda kv: (len(kv[0]), sorted(map(str, kv[0])))):
            names = sorted(_uf_name(u) for u in img)
            out.emit("r", f"  r({_show_set(a)}) = {{{', '.join(names)}}}",
                     sort=s, element=sorted(map(str, a)), image=names)
    if res.ok:
        out.emit("jt", "ok: injective, boolean homomorphism, (H) holds", ok=True)
        return 0
    out.emit("jt", f"failed {res.check} at {res.witness}", ok=False, check=res.check, witness=repr(res.witness))
    return 1


def cmd_enumerate(args, out: Out) -> int:
    sig = _sig(args)
    phi = parse_formula(sig, args.refute)
    shown = print_formula(sig, phi)
    found = find_countermodel(sig, phi, args.max_worlds)
    if found is None:
        out.emit("enumerate", f"no countermodel with at most {args.max_worlds} worlds per sort: {shown}",
                 refuted=False, formula=shown, max_worlds=args.max_worlds)
        return 0
    model, w = found
    text = print_model(model)
    out.emit("enumerate", f"countermodel, fails at world {w}: {shown}\n{text}",
             refuted=True, formula=shown, world=str(w), model=text, max_worlds=args.max_worlds)
    return 1


# --- smc ------------------------------------------------------------------------------------


def _memory(text):
    mem = {}
    for part in (text or "").split(","):
        part = part.strip()
        if not part:
            continue
        x, eq, n = part.partition("=")
        if not eq or not x.strip() or not n.strip().isdigit():
            raise UsageError(f"bad memory entry {part!r}, expected x=N")
        mem[x.strip()] = int(n)
    return mem


def cmd_smc(args, out: Out) -> int:
    from . import smc

    if args.action == "axioms":
        sig = smc.smc_signature()
        text = print_axioms(sig, smc.smc_axioms(sig, "literal" if args.box_literal else "pdl"))
        out.emit("axioms", text, box="literal" if args.box_literal else "pdl", text=text)
        return 0
    if args.action == "signature":
        text = print_signature(smc.smc_signature())
        out.emit("signature", text, text=text)
        return 0
    if args.action == "run":
        if not args.program:
            raise UsageError("smc run needs a program file")
        try:
            prog = smc.parse_program(_read(args.program))
        except smc.SmcError as e:
            raise UsageError(f"{args.program}: {e}") from None
        res = smc.smc_run(prog, _memory(args.mem), args.budget)
        for cfg in sorted(res.finals, key=str):
            mem = {x: n for x, n in cfg.memory}
            stack = [v for v in cfg.stack]
            show = ", ".join(f"{x}={n}" for x, n in sorted(mem.items()))
            out.emit("final", f"final memory {{{show}}} stack {list(map(str, stack)) or 'nil'}",
                     memory=mem, stack=stack)
        for cfg, ctrl in (res.blocked[:10] if res.status != "ok" else ()):
            out.emit("blocked", f"blocked at {cfg} before {ctrl!r}", config=str(cfg), control=repr(ctrl))
        out.emit("run", f"status {res.status} after {res.steps} steps", status=res.status, steps=res.steps,
                 finals=len(res.finals))
        return 0 if res.status == "ok" else 1
    return _smc_verify(args, out, smc)


def _smc_verify(args, out: Out, smc) -> int:
    sig = smc.smc_signature()
    axioms = smc.smc_axioms(sig)
    status = 0
    el = smc.elaborate_pgm_proof(sig)
    v = check_proof(sig, axioms, el.proof)
    exact = v.ok and v.conclusion == el.conclusion
    c = print_formula(sig, v.conclusion) if v.ok else None
    out.emit("pgm-proof", f"pgm proof: {'accepted' if exact else 'REJECTED'}, {len(el.proof.steps)} steps"
             + (f"\n  conclusion {c}" if c else f"\n  step {v.step}: {v.reason}"),
             accepted=exact, steps=len(el.proof.steps), conclusion=c, step=v.step)
    status |= not exact
    for label, n in sorted(el.step_map.items(), key=lambda kv: kv[1]):
        out.emit("step-map", f"  {label} -> kernel step {n}", label=label, step=n)
    mg = smc.mem_get_theorem(sig)
    v2 = check_proof(sig, axioms, mg)
    ok2 = v2.ok and v2.conclusion == smc.mem_get_goal()
    out.emit("mem-get", f"memory lookup theorem: {'accepted' if ok2 else 'REJECTED'}", accepted=ok2)
    status |= not ok2
    if args.mutants:
        for name, p, goal in (("pgm", el.proof, el.conclusion), ("mem-get", mg, smc.mem_get_goal())):
            rep = smc.mutation_check(sig, axioms, p, goal)
            out.emit("mutation", f"{name} mutants rejected {rep.rejected}/{rep.total}",
                     proof=name, total=rep.total, rejected=rep.rejected, survivors=rep.survivors)
            status |= not rep.ok
    if not args.no_coherence:
        model = smc.build_term_model(exec_budget=args.budget)
        rep = smc.check_coherence(model)
        for name, (count, skipped) in rep.per_scheme.items():
            out.emit("scheme", f"  {name}: {count} instances, {skipped} skipped",
                     scheme=name, instances=count, skipped=skipped)
        for name, number, binding, w in rep.failures[:10]:
            out.emit("coherence-failure", f"  {name} instance {number} fails at {w}",
                     scheme=name, number=number, world=str(w))
        out.emit("coherence", f"term model coherence: {rep.checked} checked, {len(rep.failures)} failures, "
                 f"{len(rep.skipped)} skipped", checked=rep.checked, failures=len(rep.failures),
                 skipped=[list(s) for s in rep.skipped])
        status |= not rep.ok
    return int(bool(status))


# --- wiring ------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default=argparse.SUPPRESS,
                        help="output format (default text)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomized checks (default 0)")

    ap = argparse.ArgumentParser(prog="msml", parents=[common],
                                 description="Many-sorted polyadic modal logic toolkit.")
    ap.add_argument("--version", action="version",
                    version=f"msml {__version__} (format version {FORMAT_VERSION})")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def cmd(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn)
        return p

    p = cmd("parse", cmd_parse, "parse and pretty-print a file or formula")
    p.add_argument("file", nargs="?", help=".msig .mmod .max .mpf .mba .mfm or .smc file")
    p.add_argument("--sig")
    p.add_argument("--formula", action="append")

    p = cmd("model-check", cmd_model_check, "check a formula in a finite model")
    p.add_argument("--sig", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--world")
    p.add_argument("--all-worlds", action="store_true")

    p = cmd("check-proof", cmd_check_proof, "check a Hilbert-style proof")
    p.add_argument("--sig", required=True)
    p.add_argument("--axioms")
    p.add_argument("--proof", required=True)

    p = cmd("transform", cmd_transform, "deduction-theorem and globalization transforms")
    p.add_argument("kind", choices=["dt-local", "globalize", "dt-global"])
    p.add_argument("--sig", required=True)
    p.add_argument("--axioms")
    p.add_argument("--proof", required=True)
    p.add_argument("--phi", help="the discharged hypothesis")
    p.add_argument("--inverse", action="store_true", help="dt-local in the reverse direction")

    p = cmd("gamma", cmd_gamma, "dump the box closure of a formula set")
    p.add_argument("--sig", required=True)
    p.add_argument("--gamma", action="append", help="member formula (repeatable)")
    p.add_argument("--gamma-file")
    p.add_argument("--pool", action="append", help="side formula (repeatable)")
    p.add_argument("--pool-file")
    p.add_argument("--depth", type=int, default=1)

    p = cmd("derive", cmd_derive, "emit a derived-theorem proof")
    p.add_argument("rule", choices=["mono", "dia-mono", "box-conj", "dia-disj", "cong"])
    p.add_argument("--sig", required=True)
    p.add_argument("--axioms")
    p.add_argument("--op", required=True)
    p.add_argument("--pos", type=int, default=1)
    p.add_argument("--side", action="append", help="side formula for the other positions (repeatable)")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--proof", help="antecedent proof for mono / cong")

    p = cmd("bao-check", cmd_bao_check, "check the (N) and (A) laws of a finite algebra")
    p.add_argument("--sig", required=True)
    p.add_argument("--algebra", required=True)

    p = cmd("jt", cmd_jt, "ultrafilter frame and representation embedding")
    p.add_argument("--sig", required=True)
    p.add_argument("--algebra", required=True)

    p = cmd("smc", cmd_smc, "stack machine tools")
    p.add_argument("action", choices=["run", "verify", "axioms", "signature"])
    p.add_argument("program", nargs="?")
    p.add_argument("--mem", help="initial memory, e.g. x=1,y=2")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="step budget")
    p.add_argument("--box-literal", action="store_true", help="axioms: box as a literal dual application")
    p.add_argument("--mutants", action="store_true", help="verify: also run the single-step mutation check")
    p.add_argument("--no-coherence", action="store_true", help="verify: skip the term-model check")

    p = cmd("enumerate", cmd_enumerate, "search small models for a countermodel")
    p.add_argument("--sig", required=True)
    p.add_argument("--refute", required=True, metavar="FORMULA")
    p.add_argument("--max-worlds", type=int, default=DEFAULT_MAX_WORLDS)
    return ap


INPUT_ERRORS = (UsageError, ParseError, SignatureError, SortError, SchemeError, ModelError, BaoError,
                TooManyAtoms, BuildError, TransformError)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    args.format = getattr(args, "format", "text")
    args.seed = getattr(args, "seed", 0)
    out = Out(args.format)
    try:
        return args.fn(args, out)
    except INPUT_ERRORS as e:
        out.emit("error", None, error=type(e).__name__, message=str(e))
        print(f"msml: error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        from .smc import SmcError

        if isinstance(e, SmcError):
            out.emit("error", None, error="SmcError", message=str(e))
            print(f"msml: error: {e}", file=sys.stderr)
            return 1
        raise


if __name__ == "__main__":
    sys.exit(main())
