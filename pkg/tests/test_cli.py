import json
import os
import shutil
import subprocess
import sys

import pytest

from polyloop.cli import main
from polyloop.groebner import buchberger, ideal_member
from polyloop.polycore import parse_poly

from conftest import LOOPS


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def loop(name):
    return LOOPS / name


def test_invgen_text(capsys):
    code, out, err = run(capsys, "invgen", loop("squares.loop"))
    assert code == 0
    assert "  x - y^2\n" in out and "  z - 2*y\n" in out
    assert "guard" in err


def test_invgen_json(capsys):
    code, out, _ = run(capsys, "invgen", loop("squares.loop"), "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["invariants"] == ["x - y^2", "z - 2*y"]
    assert doc["closed_forms"] == {"x": "n^2", "z": "2*n", "y": "n"}
    assert doc["valid_from"] == 0 and doc["timings_ms"] == {}
    assert all(isinstance(e, str) for e in doc["eigenvalues"])


def test_invgen_timings(capsys):
    _, out, _ = run(capsys, "invgen", loop("odd_sum.loop"), "--format", "json", "--timings")
    assert set(json.loads(out)["timings_ms"]) == {"closed_forms", "elimination"}


def test_invgen_fib(capsys):
    code, _, err = run(capsys, "invgen", loop("fib.loop"))
    assert code == 2 and "IrrationalEigenvalue" in err


def test_invgen_exponential(capsys):
    code, out, _ = run(capsys, "invgen", loop("powers.loop"))
    assert code == 0 and "  x^2 - y\n" in out


def test_invgen_errors(capsys, tmp_path):
    assert run(capsys, "invgen", tmp_path / "missing.loop")[0] == 1
    bad = tmp_path / "bad.loop"
    bad.write_text("vars: x\nx := 0\nwhile true:\n    x := x*x\n")
    code, _, err = run(capsys, "invgen", bad)
    assert code == 2 and "NonAffineUpdate" in err
    bad.write_text("vars x\n")
    assert run(capsys, "invgen", bad)[0] == 1


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["invgen", str(loop("odd_sum.loop")), "--format", "yaml"])
    assert info.value.code == 1


def test_check_verdicts(capsys):
    code, out, _ = run(capsys, "check", loop("broken.loop"), "--invariant", "x - y^2")
    assert code == 0 and "oracle FAIL at n=0" in out and "inductive FAIL" in out
    _, out, _ = run(capsys, "check", loop("odd_sum.loop"), "--invariant", "x - y^2")
    assert "inductive PASS" in out and "oracle PASS" in out
    _, out, _ = run(capsys, "check", loop("squares.loop"), "--invariant", "z - 2*y", "--iters", "50")
    assert "inductive PASS, oracle PASS (n <= 50), ideal PASS" in out
    _, out, _ = run(capsys, "check", loop("odd_sum3.loop"), "--invariant", "x - y^2")
    assert "inductive FAIL, oracle PASS (n <= 30), ideal PASS" in out


def test_check_needs_invariant(capsys):
    assert run(capsys, "check", loop("odd_sum.loop"))[0] == 1
    assert run(capsys, "check", loop("odd_sum.loop"), "--invariant", "q - 1")[0] == 1


def test_check_without_ideal(capsys):
    code, out, err = run(capsys, "check", loop("fib.loop"), "--invariant", "b^2 - a*b - a^2 - 1")
    assert code == 0 and "ideal n/a" in out and "IrrationalEigenvalue" in err


def test_check_invariant_file(capsys):
    code, out, _ = run(capsys, "check", loop("odd_sum3.loop"), "--invariants", loop("xy2.inv"))
    assert code == 0 and "x - y^2: inductive FAIL" in out


def test_synth_odd_sum(capsys):
    code, out, _ = run(capsys, "synth", loop("xy2.inv"), "--size", "2", "--solver", "builtin",
                       "--bound", "2", "--fix-init", "x=0,y=0", "--all")
    assert code == 0
    assert "    x := x + 2*y + 1\n    y := y + 1\n" in out


def test_synth_odd_sum3_with_fixed_row(capsys):
    code, out, _ = run(capsys, "synth", loop("xy2.inv"), "--size", "3", "--bound", "2",
                       "--fix-init", "x=0,y=0,z=0", "--fix", "b3_1=0,b3_2=0,b3_3=1,b3_4=2", "--all")
    assert code == 0
    assert "    x := x + z + 1\n    y := y + 1\n    z := z + 2\n" in out


def test_synth_unit_ideal(capsys):
    code, _, err = run(capsys, "synth", loop("unit.inv"))
    assert code == 1 and "unit ideal" in err


def test_synth_unsat(capsys):
    code, _, err = run(capsys, "synth", loop("xy2.inv"), "--bound", "0", "--fix-init", "x=1,y=0")
    assert code == 3 and "unsat" in err


def test_synth_bad_flags(capsys):
    assert run(capsys, "synth", loop("xy2.inv"), "--size", "1")[0] == 1
    assert run(capsys, "synth", loop("xy2.inv"), "--fix-init", "x")[0] == 1
    assert run(capsys, "synth", loop("xy2.inv"), "--fix", "q9=1")[0] == 1


def test_synth_solver_missing(capsys):
    code, _, err = run(capsys, "synth", loop("xy2.inv"), "--solver", "smt",
                       "--solver-cmd", "no-such-solver-binary")
    assert code == 2 and "SolverNotFound" in err


def test_synth_emit_loop_and_pipe(capsys, tmp_path):
    target = tmp_path / "out.loop"
    code, out, _ = run(capsys, "synth", loop("xy2.inv"), "--emit-loop", target)
    assert code == 0 and target.read_text() == out
    code, out, _ = run(capsys, "invgen", target)
    assert code == 0


def test_synth_emit_loop_dir(capsys, tmp_path):
    code, _, _ = run(capsys, "synth", loop("xy2.inv"), "--fix-init", "x=0,y=0", "--bound", "1",
                     "--all", "--emit-loop", tmp_path / "loops")
    assert code == 0 and len(os.listdir(tmp_path / "loops")) > 1


def test_emit_pcp(capsys, tmp_path):
    code, out, _ = run(capsys, "emit-pcp", loop("xy2.inv"), "--size", "2", "--out", tmp_path / "smt")
    assert code == 0
    assert sorted(os.listdir(tmp_path / "smt")) == ["case_000.smt2", "case_001.smt2"]
    code, out, _ = run(capsys, "emit-pcp", loop("xy2.inv"), "--format", "json")
    doc = json.loads(out)
    assert set(doc) == {"unknowns", "cases"} and len(doc["cases"]) == 2
    assert {"equalities", "disequalities", "tags"} <= set(doc["cases"][0])


def test_emit_pcp_unwritable(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(capsys, "emit-pcp", loop("xy2.inv"), "--out", blocker / "sub")
    assert code == 1 and err.startswith("error:")


def test_outputs_reproducible(capsys):
    for argv in (["invgen", loop("squares.loop"), "--format", "json"],
                 ["synth", loop("xy2.inv"), "--fix-init", "x=0,y=0", "--all"],
                 ["emit-pcp", loop("xy2.inv"), "--mode", "disjunctive"]):
        first = run(capsys, *argv)
        assert run(capsys, *argv) == first


def test_console_script_pipeline():
    exe = shutil.which("polyloop")
    cmd = [exe] if exe else [sys.executable, "-m", "polyloop"]
    synth = subprocess.run(cmd + ["synth", str(loop("xy2.inv")), "--fix-init", "x=1,y=1"],
                           capture_output=True, text=True, check=True)
    inv = subprocess.run(cmd + ["invgen", "-", "--format", "json"], input=synth.stdout,
                         capture_output=True, text=True)
    assert inv.returncode == 0
    basis = buchberger([parse_poly(p) for p in json.loads(inv.stdout)["invariants"]])
    assert ideal_member(parse_poly("x - y^2"), basis)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "polyloop", "invgen", str(loop("fib.loop"))],
                         capture_output=True, text=True)
    assert res.returncode == 2 and "IrrationalEigenvalue" in res.stderr
