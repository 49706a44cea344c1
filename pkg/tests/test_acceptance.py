"""Acceptance criteria, one test each.

Every test prints a single ``PASS`` or ``FAIL`` line with its wall time and
budget, so ``pytest tests/test_acceptance.py -v`` doubles as a report.
"""

from __future__ import annotations

import io
import itertools
import time
from contextlib import contextmanager

import pytest

from mlgallina.cli import RunConfig, run
from mlgallina.gallina.checker import check_roundtrip, parse_document
from mlgallina.patterns import naive_precondition, satisfies, synthesize_precondition
from mlgallina.pipeline import compile_source, run_source

import oracles as O
from helpers import CORPUS, GOLDEN, annotations, as_listing, coq_tokens, emit_text
from test_patterns import hd_sum_matrix, oracle_satisfies, run_oracle_suite, to_engine

EXAMPLES = ["records", "contract", "mutual", "modules", "infix"]
TRUNCATED = {"contract", "mutual", "modules", "infix"}
INLINE = ["poly_value", "split_binding", "length", "hd", "hd_sum", "hd_sum_pair"]
PROGRAMS = sorted(CORPUS.glob("*.sml"))


@contextmanager
def criterion(capsys, name: str, budget: float | None = None):
    start = time.perf_counter()
    status, detail = "PASS", ""
    try:
        yield
        elapsed = time.perf_counter() - start
        if budget is not None and elapsed >= budget:
            status, detail = "FAIL", " over budget"
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        status, detail = "FAIL", f" {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        raise
    finally:
        limit = f", budget {budget:g} s" if budget is not None else ""
        with capsys.disabled():
            print(f"\n{status} {name} ({elapsed:.2f} s{limit}){detail}")
    if budget is not None:
        assert elapsed < budget, f"{name} took {elapsed:.2f} s"


def golden_ok(name: str) -> None:
    src = (GOLDEN / f"{name}.sml").read_text()
    golden = (GOLDEN / f"{name}.v").read_text()
    assert coq_tokens(emit_text(src)) == coq_tokens(golden), name
    listing = GOLDEN / f"{name}.listing"
    if listing.exists():
        assert coq_tokens(as_listing(golden)) == coq_tokens(listing.read_text()), name


def test_golden_translations(capsys):
    with criterion(capsys, "golden translations", 1.0):
        for name in EXAMPLES:
            golden_ok(name)
        for name in TRUNCATED:
            assert annotations((GOLDEN / f"{name}.v").read_text()) > 0, name


def test_inline_goldens(capsys):
    with criterion(capsys, "inline-example goldens", 1.0):
        for name in INLINE:
            golden_ok(name)


def test_precondition_minimization(capsys):
    with criterion(capsys, "precondition minimization", 1.0):
        rows, tys, m = hd_sum_matrix()
        minimized, naive = synthesize_precondition(m), naive_precondition(m)
        assert minimized.atom_counts() == [2, 1, 1]
        assert naive.atom_counts() == [3, 3, 3]
        sem = [O.to_sem(t) for t in tys]
        lists = O.values(tys[0], 2)
        for vec in itertools.product(lists, lists, (0, 1)):
            covered = O.first_match(rows, vec) is not None
            assert oracle_satisfies(minimized, vec) == covered
            assert oracle_satisfies(naive, vec) == covered
            assert satisfies(minimized, [to_engine(v) for v in vec], sem, m.table) == covered


def test_exhaustiveness_oracle_suite(capsys):
    with criterion(capsys, "exhaustiveness oracle suite", 30.0):
        cases, bad = run_oracle_suite(10_000)
        assert cases >= 10_000
        assert bad == [], f"{len(bad)} disagreements"


def test_evaluator_agreement(capsys, tmp_path):
    with criterion(capsys, "evaluator agreement", 5.0):
        assert len(PROGRAMS) == 20
        for path in PROGRAMS:
            want = path.with_suffix(".out").read_text().strip().splitlines()
            if want == ["exit 2"]:
                code = run(RunConfig(path, tmp_path / f"{path.stem}.v"), io.StringIO(), io.StringIO())
                assert code == 2, path.stem
            else:
                outcome, lines = run_source(path.read_text())
                assert outcome.ok and lines == want, path.stem


def test_determinism(capsys):
    with criterion(capsys, "determinism"):
        for path in PROGRAMS:
            src = path.read_text()
            assert compile_source(src, run_eval=False).text == compile_source(src, run_eval=False).text, path.stem


def test_reparse_closure(capsys):
    with criterion(capsys, "re-parse closure"):
        for path in PROGRAMS:
            c = compile_source(path.read_text(), run_eval=False)
            assert check_roundtrip(c.sentences) == [], path.stem
            parse_document(c.text)


@pytest.mark.skip(reason="needs Coq with the Equations plugin; covered by re-parse closure, well-formedness and goldens")
def test_coq_compilation():
    pass
