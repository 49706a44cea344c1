"""Twenty small programs with expected toplevel output, run end to end."""

from __future__ import annotations

import io

import pytest

from mlgallina.cli import RunConfig, run
from mlgallina.gallina.checker import check_roundtrip, parse_document
from mlgallina.pipeline import compile_source, run_source

from helpers import CORPUS

PROGRAMS = sorted(CORPUS.glob("*.sml"))


def expected(path):
    return path.with_suffix(".out").read_text().strip().splitlines()


def test_corpus_has_twenty_programs():
    assert len(PROGRAMS) == 20


@pytest.mark.parametrize("path", PROGRAMS, ids=lambda p: p.stem)
def test_toplevel_bindings_match(path, tmp_path):
    want = expected(path)
    if want == ["exit 2"]:
        err = io.StringIO()
        code = run(RunConfig(path, tmp_path / "out.v"), io.StringIO(), err)
        assert code == 2
        assert not (tmp_path / "out.v").exists()
        return
    outcome, lines = run_source(path.read_text())
    assert outcome.ok, outcome.message
    assert lines == want


TRANSLATABLE = [p for p in PROGRAMS if expected(p) != ["exit 2"]]


@pytest.mark.parametrize("path", TRANSLATABLE, ids=lambda p: p.stem)
def test_translation_is_deterministic(path):
    src = path.read_text()
    assert compile_source(src).text == compile_source(src).text


@pytest.mark.parametrize("path", PROGRAMS, ids=lambda p: p.stem)
def test_output_reparses_to_the_same_tree(path):
    c = compile_source(path.read_text(), run_eval=False)
    assert check_roundtrip(c.sentences) == []
    parse_document(c.text)
