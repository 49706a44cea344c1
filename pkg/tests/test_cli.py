"""Command-line driver: exit codes, output handling and flags."""

from __future__ import annotations

import io
import subprocess
import sys

import pytest

from mlgallina.cli import RunConfig, main, parser, run

from helpers import GOLDEN


def invoke(tmp_path, source, **kw):
    src = tmp_path / "in.sml"
    src.write_text(source)
    out = tmp_path / "out" / "in.v"
    err = io.StringIO()
    code = run(RunConfig(src, out, **kw), io.StringIO(), err)
    return code, out, err.getvalue()


def test_contract_program_translates(tmp_path):
    code, out, _ = invoke(tmp_path, (GOLDEN / "contract.sml").read_text())
    assert code == 0
    assert "Theorem posAdd_THM" in out.read_text()


def test_bind_failure_exits_2(tmp_path):
    code, out, err = invoke(tmp_path, "val x::l = []")
    assert code == 2
    assert not out.exists()
    assert "bind-failure" in err and "in.sml:1:" in err


def test_no_eval_skips_the_gate_only(tmp_path):
    code, out, _ = invoke(tmp_path, "val x::l = []", skip_eval=True)
    assert code == 0
    assert "patternFailure" in out.read_text()
    ok_src = "val x::l = [1,2,3]"
    _, a, _ = invoke(tmp_path, ok_src)
    first = a.read_text()
    _, b, _ = invoke(tmp_path, ok_src, skip_eval=True)
    assert b.read_text() == first


def test_unsupported_exits_3(tmp_path):
    code, out, err = invoke(tmp_path, 'val x = raise Fail "x"')
    assert code == 3
    assert not out.exists()
    assert "unsupported" in err


def test_type_error_exits_1(tmp_path):
    code, out, err = invoke(tmp_path, 'val x = 1 + "a"')
    assert code == 1 and not out.exists()
    assert "type error" in err


def test_syntax_error_exits_1(tmp_path):
    code, _, err = invoke(tmp_path, "val = 1")
    assert code == 1 and "syntax error" in err


def test_missing_input(tmp_path):
    assert run(RunConfig(tmp_path / "nope.sml"), io.StringIO(), io.StringIO()) == 1


def test_small_fuel_exits_2(tmp_path):
    code, _, err = invoke(tmp_path, "fun f 0 = 0 | f n = f (n - 1)\nval y = f 100", fuel=5)
    assert code == 2 and "fuel" in err


def test_stdout_and_header_flags(tmp_path):
    src = tmp_path / "a.sml"
    src.write_text("val L = []")
    out = io.StringIO()
    assert run(RunConfig(src, None, no_header=True, normalize_names=True), out, io.StringIO()) == 0
    assert out.getvalue() == "Definition L {_'1 : Type} := ([] : @list _'1).\n"
    out = io.StringIO()
    run(RunConfig(src), out, io.StringIO())
    assert out.getvalue().startswith("Require Import intSml.\n")


def test_shim_dir(tmp_path):
    code, _, _ = invoke(tmp_path, "val a = 1", shim_dir=tmp_path / "shims")
    assert code == 0
    assert len(list((tmp_path / "shims").glob("*.v"))) == 9


def test_fuel_flag_must_be_positive():
    with pytest.raises(SystemExit):
        parser().parse_args(["x.sml", "--fuel", "0"])
    assert parser().parse_args(["x.sml", "--fuel", "7"]).fuel == 7


def test_main_wires_flags(tmp_path):
    src = tmp_path / "a.sml"
    src.write_text("val a = 1")
    out = tmp_path / "a.v"
    assert main([str(src), "-o", str(out), "--no-header"]) == 0
    assert out.read_text() == "Definition a := 1.\n"


def test_module_entry_point(tmp_path):
    src = tmp_path / "a.sml"
    src.write_text("val x::l = []")
    proc = subprocess.run([sys.executable, "-m", "mlgallina", str(src)], capture_output=True, text=True)
    assert proc.returncode == 2
    assert proc.stdout == ""
