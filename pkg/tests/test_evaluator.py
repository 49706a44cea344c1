"""Fuel-bounded evaluation and basis stubs."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlgallina.basis import NONE, SList
from mlgallina.elaborator.types import CHAR, STRING, TTuple, list_of, option_of
from mlgallina.evaluator import BindFailure, Interpreter, apply_basis_stub, evaluate, show_value
from mlgallina.basis import ConVal

from helpers import CORPUS, elaborate


def run(src, fuel=100_000):
    annotated, _ = elaborate(src)
    return evaluate(annotated, fuel)


def shown(outcome):
    return {k: show_value(v) for k, v in outcome.values().items()}


def test_split_binding_succeeds():
    out = run("val x::l = [1,2,3]")
    assert out.ok
    assert out.values()["x"] == 1
    assert out.values()["l"] == SList((2, 3))


def test_split_of_empty_list_fails():
    out = run("val x::l = []")
    assert out.kind == "bind-failure"
    assert out.span is not None


def test_divergence_runs_out_of_fuel():
    out = run("fun loop x = loop (x+1)\nval y = loop 0", fuel=10_000)
    assert out.kind == "fuel-exhausted"


def test_match_failure_inside_function():
    out = run("fun f 0 = 1\nval y = f 3")
    assert out.kind == "bind-failure"


def test_fuel_must_be_positive():
    with pytest.raises(ValueError):
        Interpreter(0)


def test_closures_capture_definition_environment():
    out = run("val k = 1\nfun f x = x + k\nval k = 100\nval r = f 1")
    assert out.values()["r"] == 2


# ---------------------------------------------------------------- basis stubs


def test_list_hd():
    assert apply_basis_stub("List.hd", [SList((5, 6))]) == 5


@pytest.mark.parametrize("name, args", [
    ("List.hd", [SList(())]),
    ("List.tl", [SList(())]),
    ("Option.valOf", [NONE]),
    ("String.sub", [("abc", 5)]),
])
def test_raising_inputs_become_bind_failure(name, args):
    assert isinstance(apply_basis_stub(name, args), BindFailure)


def test_other_stubs():
    assert apply_basis_stub("List.length", [SList((1, 2, 3))]) == 3
    assert apply_basis_stub("String.size", ["abcd"]) == 4
    assert apply_basis_stub("String.sub", [("abc", 1)]) == "b"
    assert apply_basis_stub("Option.valOf", [ConVal("SOME", 7)]) == 7


def test_unknown_stub():
    with pytest.raises(KeyError):
        apply_basis_stub("List.nope", [])


# ---------------------------------------------------------------- fuel monotonicity


TERMINATING = [p for p in sorted(CORPUS.glob("*.sml")) if "exit 2" not in p.with_suffix(".out").read_text()]


@pytest.mark.parametrize("path", TERMINATING[:8], ids=lambda p: p.stem)
def test_exact_fuel_boundary(path):
    annotated, _ = elaborate(path.read_text())
    full = evaluate(annotated, 1_000_000)
    assert full.ok
    n = full.fuel_used
    assert shown(evaluate(annotated, max(n, 1))) == shown(full)
    if n > 1:
        assert evaluate(annotated, n - 1).kind == "fuel-exhausted"


FACT = elaborate("fun fact 0 = 1 | fact n = n * fact (n - 1)\nval r = fact 12")[0]
NEED = evaluate(FACT, 10_000).fuel_used


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3 * NEED))
def test_success_is_monotone_in_fuel(fuel):
    out = evaluate(FACT, fuel)
    if fuel >= NEED:
        assert out.ok and out.values()["r"] == 479001600
    else:
        assert out.kind == "fuel-exhausted"


# ---------------------------------------------------------------- printing


@pytest.mark.parametrize("v, ty, text", [
    (-3, None, "~3"),
    (2.5, None, "2.5"),
    (-1.0, None, "~1.0"),
    ("a", CHAR, '#"a"'),
    ("a", STRING, '"a"'),
    (SList(("x", "y")), list_of(CHAR), '[#"x",#"y"]'),
    ((1, True), None, "(1,true)"),
    (ConVal("SOME", ConVal("SOME", 1)), option_of(option_of(None)), "SOME (SOME 1)"),
    (NONE, None, "NONE"),
    ((), None, "()"),
    ((SList(()), "q"), TTuple((list_of(STRING), CHAR)), '([],#"q")'),
])
def test_show_value(v, ty, text):
    assert show_value(v, ty) == text
