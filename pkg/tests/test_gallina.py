"""Gallina syntax: fresh names, printing, re-parsing and well-formedness."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlgallina.gallina import syntax as G
from mlgallina.gallina.checker import GallinaSyntaxError, check_roundtrip, parse_document
from mlgallina.gallina.names import EXISTENTIAL, MODULE, RECORD, TYVAR, FreshNamer
from mlgallina.gallina.printer import sentence, term
from mlgallina.gallina.wellformed import well_formed

from helpers import GOLDEN, translate

# ---------------------------------------------------------------- fresh names


def test_record_names_count_up():
    n = FreshNamer()
    assert [n.fresh(RECORD), n.fresh(RECORD)] == ["rid_1", "rid_2"]


def test_tyvar_names_continue_from_counter():
    n = FreshNamer()
    n.reset(TYVAR, 14187)
    assert n.fresh(TYVAR) == "_'14188"


def test_kinds_have_independent_counters():
    n = FreshNamer()
    assert [n.fresh(MODULE), n.fresh(EXISTENTIAL), n.fresh(MODULE)] == ["mid_1", "y1", "mid_2"]
    with pytest.raises(ValueError):
        n.fresh("nope")


def test_namer_is_deterministic_over_a_program():
    src = (GOLDEN / "records.sml").read_text()
    assert translate(src) == translate(src)


# ---------------------------------------------------------------- printing


def test_product_type_carries_type_scope():
    t = G.GScope(G.GProduct((G.GIdent("Z"), G.GIdent("Z"))), "type")
    assert term(t) == "(Z * Z)%type"


def test_prefix_equality_form():
    atom = G.GExists(("y1", "y2"), G.GEq(G.GIdent("x1"), G.GInfix("::", G.GIdent("y1"), G.GIdent("y2")), True))
    assert term(atom) == "exists y1 y2, eq (x1) (y1 :: y2)"


def test_axiom_line():
    ax = G.GAxiom("EmptyException", G.GForall((G.GBinder("a", None, True),), G.GIdent("a")))
    assert sentence(ax) == ["Axiom EmptyException : forall{a}, a."]


def test_theorem_is_admitted():
    th = G.GTheorem("f_THM", G.GEq(G.GIdent("true"), G.GIdent("true")))
    assert sentence(th)[-1] == "Admitted."


def test_negative_literal_is_parenthesized():
    assert term(G.GApp(G.GIdent("f"), (G.GInt(-3),))) == "(f (-3))"


# ---------------------------------------------------------------- re-parse


def test_parse_error_is_reported():
    with pytest.raises(GallinaSyntaxError):
        parse_document("Definition x := .")


idents = st.sampled_from(["a", "b", "f", "x1"]).map(G.GIdent)
leaf_terms = st.one_of(
    idents,
    st.integers(-5, 40).map(G.GInt),
    st.just(G.GUnit()),
    st.text("ab\" ", max_size=3).map(G.GString),
    st.sampled_from([("L",), ("M", "N")]).map(lambda p: G.GQualIdent(p, "v")),
)
pats = st.one_of(
    st.just(G.GPWild()),
    st.sampled_from(["p", "q"]).map(G.GPVar),
    st.integers(0, 3).map(G.GPInt),
    st.builds(lambda a, b: G.GPInfix("::", a, b), st.sampled_from(["h"]).map(G.GPVar), st.just(G.GPVar("t"))),
)


def _compound(sub):
    pairs = st.tuples(sub, sub)
    return st.one_of(
        st.lists(sub, min_size=2, max_size=3).map(lambda xs: G.GTuple(tuple(xs))),
        st.lists(sub, max_size=3).map(lambda xs: G.GList(tuple(xs))),
        st.builds(lambda f, xs: G.GApp(f, tuple(xs)), idents, st.lists(sub, min_size=1, max_size=2)),
        st.builds(lambda op, p: G.GInfix(op, *p), st.sampled_from(["+", "*", "-", "::", "++"]), pairs),
        pairs.map(lambda p: G.GBoolAnd(*p)),
        pairs.map(lambda p: G.GBoolOr(*p)),
        st.builds(G.GIf, sub, sub, sub),
        st.builds(lambda s, rows: G.GMatch(s, tuple(rows) + ((G.GPWild(), G.GIdent("patternFailure")),), False),
                  sub, st.lists(st.tuples(pats, sub), min_size=1, max_size=2)),
        st.builds(lambda p, v, b: G.GLet(p, v, b), st.sampled_from(["p", "q"]).map(G.GPVar), sub, sub),
    )


gterms = st.recursive(leaf_terms, _compound, max_leaves=10)


@settings(max_examples=300, deadline=None)
@given(gterms)
def test_printed_terms_reparse_to_the_same_tree(t):
    assert check_roundtrip([G.GDefinition("d", t)]) == []


# ---------------------------------------------------------------- well-formedness


def test_record_program_is_well_formed():
    sents = translate((GOLDEN / "records.sml").read_text())
    records = {s.name: [f for f, _ in s.fields] for s in sents if isinstance(s, G.GRecordDecl)}
    assert records == {"rid_1": ["rid_1_name", "rid_1_age"]}
    for s in sents:
        assert well_formed(s, records) == []


def test_incomplete_record_pattern():
    records = {"rid_1": ["rid_1_name", "rid_1_age"]}
    body = G.GMatch(G.GIdent("r"), ((G.GPRecord((("rid_1_age", G.GPVar("a")),)), G.GIdent("a")),))
    problems = well_formed(G.GDefinition("f", body), records)
    assert any("incomplete record pattern" in p for p in problems)


def test_non_exhaustive_match_needs_failure_branch():
    body = G.GMatch(G.GIdent("l"), ((G.GPInfix("::", G.GPVar("x"), G.GPVar("l")), G.GIdent("x")),), False)
    assert well_formed(G.GDefinition("x", body)) != []
    fixed = G.GMatch(body.scrutinee, body.branches + ((G.GPWild(), G.GIdent("patternFailure")),), False)
    assert well_formed(G.GDefinition("x", fixed)) == []


def test_precondition_requires_absurd_clause():
    eq = G.GEquations(
        "hd", [G.GEqBinder("x1", G.GIdent("T"))], G.GIdent("T"),
        [((G.GPInfix("::", G.GPVar("x"), G.GPVar("l")),), G.GIdent("x"))],
        precondition=G.GIdent("P"),
    )
    assert well_formed(eq) != []
    eq.clauses.append(((G.GPWild(),), G.HOLE))
    assert well_formed(eq) == []
