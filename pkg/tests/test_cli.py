import json
import subprocess
import sys

import pytest

from msml import FORMAT_VERSION, __version__
from msml.cli import main

from conftest import fixture_path

SIG = fixture_path("unary.msig")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def records(text):
    recs = [json.loads(line) for line in text.splitlines() if line.strip()]
    assert all(r["format_version"] == FORMAT_VERSION for r in recs)
    return recs


def test_version(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--version"])
    assert e.value.code == 0
    out = capsys.readouterr().out
    assert __version__ in out and f"format version {FORMAT_VERSION}" in out


def test_usage_errors_exit_2(capsys):
    for argv in ([], ["bogus"], ["check-proof", "--sig", SIG], ["enumerate", "--sig", SIG, "--refute", "p",
                                                                  "--max-worlds", "x"]):
        with pytest.raises(SystemExit) as e:
            main(argv)
        assert e.value.code == 2
    capsys.readouterr()
    code, _, err = run(capsys, "jt", "--sig", SIG, "--algebra", fixture_path("missing.mba"))
    assert code == 2 and "cannot read" in err
    code, _, _ = run(capsys, "model-check", "--sig", SIG, "--model", fixture_path("two_world.mmod"),
                     "--formula", "p &")
    assert code == 2


def test_smc_run(capsys):
    code, out, _ = run(capsys, "--format", "json", "smc", "run", fixture_path("pgm.smc"))
    assert code == 0
    recs = records(out)
    final = [r for r in recs if r["record"] == "final"]
    assert final == [{"format_version": FORMAT_VERSION, "record": "final", "memory": {"i1": 1, "i2": 2, "m": 1},
                      "stack": []}]


def test_smc_run_with_memory_and_budget(tmp_path, capsys):
    prog = tmp_path / "loop.smc"
    prog.write_text("while x <= 5 do x := x + 1")
    code, out, _ = run(capsys, "smc", "run", str(prog), "--mem", "x=4")
    assert code == 0 and "x=6" in out
    code, out, _ = run(capsys, "smc", "run", str(prog), "--budget", "10")
    assert code == 1 and "budget-exceeded" in out
    code, _, _ = run(capsys, "smc", "run", str(prog), "--mem", "x=")
    assert code == 2


def test_smc_axioms_dump(capsys):
    code, out, _ = run(capsys, "smc", "axioms")
    assert code == 0 and out == open(fixture_path("smc.max")).read()
    code, lit, _ = run(capsys, "smc", "axioms", "--box-literal")
    assert code == 0 and "[exec]" in lit and lit != out


def test_smc_verify(capsys):
    code, out, _ = run(capsys, "--format", "json", "smc", "verify", "--no-coherence", "--mutants")
    assert code == 0
    recs = records(out)
    kinds = {r["record"] for r in recs}
    assert {"pgm-proof", "mem-get", "mutation"} <= kinds
    assert all(r["rejected"] == r["total"] for r in recs if r["record"] == "mutation")


def test_check_proof(capsys):
    code, out, _ = run(capsys, "check-proof", "--sig", SIG, "--proof", fixture_path("ug.mpf"))
    assert code == 0 and out.strip() == "accepted: [f](p -> p)"
    code, out, _ = run(capsys, "--format", "json", "check-proof", "--sig", SIG, "--proof", fixture_path("bad_mp.mpf"))
    assert code == 1
    rec, = records(out)
    assert rec["accepted"] is False and rec["step"] == 3


def test_check_pgm_proof_file(capsys):
    code, out, _ = run(capsys, "check-proof", "--sig", fixture_path("smc.msig"), "--axioms", fixture_path("smc.max"),
                       "--proof", fixture_path("pgm.mpf"))
    assert code == 0 and "set(set(set(mem, i2, 2), i1, 1), m, 1)" in out


def test_model_check(capsys):
    mod = fixture_path("two_world.mmod")
    code, out, _ = run(capsys, "model-check", "--sig", SIG, "--model", mod, "--formula", "f(p)")
    assert code == 1 and "w1" in out
    code, _, _ = run(capsys, "model-check", "--sig", SIG, "--model", mod, "--formula", "f(p)", "--world", "w0")
    assert code == 0
    code, _, _ = run(capsys, "model-check", "--sig", SIG, "--model", mod, "--formula", "[f](p)", "--all-worlds")
    assert code == 0


def test_enumerate(capsys):
    code, out, _ = run(capsys, "--format", "json", "enumerate", "--sig", SIG, "--refute", "p -> [f](p)",
                       "--max-worlds", "2")
    assert code == 1
    rec, = records(out)
    assert rec["refuted"] and "rel f" in rec["model"]
    code, _, _ = run(capsys, "enumerate", "--sig", SIG, "--refute", "[f](p & q) -> [f](p)", "--max-worlds", "2")
    assert code == 0


def test_transform_and_derive(capsys):
    code, out, _ = run(capsys, "transform", "globalize", "--sig", SIG, "--proof", fixture_path("hyp_ug.mpf"))
    assert code == 0 and "witness 1: [f](p)" in out
    code, out, _ = run(capsys, "transform", "dt-global", "--sig", SIG, "--proof", fixture_path("hyp_ug.mpf"),
                       "--phi", "p")
    assert code == 0 and "accepted: [f](p) -> [f](p)" in out
    code, _, _ = run(capsys, "transform", "dt-global", "--sig", SIG, "--proof", fixture_path("hyp_ug.mpf"))
    assert code == 2
    code, out, _ = run(capsys, "derive", "box-conj", "--sig", SIG, "--op", "f", "--a", "p", "--b", "q")
    assert code == 0 and "accepted: [f](p & q) <-> [f](p) & [f](q)" in out
    code, out, _ = run(capsys, "derive", "mono", "--sig", SIG, "--op", "f", "--a", "p", "--b", "q")
    assert code == 2


def test_transform_output_reparses(tmp_path, capsys):
    code, out, _ = run(capsys, "--format", "json", "transform", "globalize", "--sig", SIG, "--proof",
                       fixture_path("hyp_ug.mpf"))
    proof = next(r for r in records(out) if r["record"] == "proof")["text"]
    path = tmp_path / "local.mpf"
    path.write_text(proof)
    code, out, _ = run(capsys, "check-proof", "--sig", SIG, "--proof", str(path))
    assert code == 0


def test_gamma(capsys):
    code, out, _ = run(capsys, "--format", "json", "gamma", "--sig", SIG, "--gamma", "p", "--pool", "top@s",
                       "--depth", "1")
    assert code == 0
    members = [r["formula"] for r in records(out) if r["record"] == "member"]
    assert members == ["p", "[f](p)", "[g](p, top@s)", "[g](top@s, p)"]


def test_bao_and_jt(capsys):
    code, _, _ = run(capsys, "bao-check", "--sig", SIG, "--algebra", fixture_path("two_atoms.mba"))
    assert code == 0
    code, out, _ = run(capsys, "--format", "json", "bao-check", "--sig", SIG, "--algebra",
                       fixture_path("not_normal.mba"))
    rec, = records(out)
    assert code == 1 and rec["law"] == "N" and rec["witness"] == [[]]
    code, out, _ = run(capsys, "jt", "--sig", SIG, "--algebra", fixture_path("two_atoms.mba"))
    assert code == 0 and "r({w0}) = {uf(w0)}" in out
    code, _, _ = run(capsys, "jt", "--sig", SIG, "--algebra", fixture_path("not_normal.mba"))
    assert code == 1


def test_parse(capsys):
    code, out, _ = run(capsys, "parse", fixture_path("pgm.smc"))
    assert code == 0 and "if i1 <= i2" in out
    code, out, _ = run(capsys, "parse", "--sig", SIG, "--formula", "p->q|p")
    assert code == 0 and out.strip() == "p -> q | p : s"
    for name in ("two_world.mmod", "ug.mpf", "two_atoms.mba"):
        code, _, _ = run(capsys, "parse", "--sig", SIG, fixture_path(name))
        assert code == 0


def test_output_is_reproducible(capsys):
    argv = ["--format", "json", "--seed", "3", "enumerate", "--sig", SIG, "--refute", "f(p) -> [f](p)"]
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    assert a == b


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "msml.cli", "smc", "run", fixture_path("pgm.smc")],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "m=1" in res.stdout


def test_parse_signature_file_alone(capsys):
    code, out, _ = run(capsys, "parse", SIG)
    assert code == 0
    assert "op g : s s -> s" in out and "var q : s" in out
