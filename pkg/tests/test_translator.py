"""Translation of declarations, contracts, modules and infix functions."""

from __future__ import annotations

import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlgallina.errors import TranslationError, UnsupportedConstruct
from mlgallina.gallina import syntax as G
from mlgallina.patterns import collect_vars, is_exhaustive, PatternMatrix

from helpers import GOLDEN, coq_tokens, elaborate, emit_text, translate


def kinds(sents):
    return [(type(s).__name__, getattr(s, "name", None)) for s in sents]


def test_empty_program():
    assert translate("") == []


def test_record_declaration_precedes_its_uses():
    sents = translate((GOLDEN / "records.sml").read_text())
    assert kinds(sents) == [("GRecordDecl", "rid_1"), ("GDefinition", "r"), ("GEquations", "isBob")]


def test_module_program_order():
    sents = translate((GOLDEN / "modules.sml").read_text())
    assert kinds(sents) == [
        ("GModuleType", "PAIR"), ("GModule", "IntString"), ("GModule", "Example"), ("GModule", "S"),
    ]
    assert sents[1].ascription == "PAIR"
    assert (sents[3].functor, sents[3].argument) == ("Example", "IntString")


def test_polymorphic_empty_list():
    (d,) = translate("val L = []")
    assert isinstance(d, G.GDefinition) and len(d.implicits) == 1
    assert emit_text("val L = []") == "Definition L {_'1 : Type} := ([] : @list _'1).\n"


def test_split_binding_gives_congruent_definitions():
    sents = [s for s in translate("val x::l = [1,2,3]") if isinstance(s, G.GDefinition)]
    assert [s.name for s in sents] == ["x", "l"]
    mx, ml = sents[0].body, sents[1].body
    assert not mx.exhaustive and mx.branches[-1] == (G.GPWild(), G.GIdent("patternFailure"))
    assert mx.scrutinee == ml.scrutinee
    assert mx.branches[0][0] == ml.branches[0][0]
    assert (mx.branches[0][1], ml.branches[0][1]) == (G.GIdent("x"), G.GIdent("l"))


def test_irrefutable_tuple_binding_has_no_default():
    sents = translate("val (a, b) = (1, 2)")
    assert [s.name for s in sents] == ["a", "b"]
    for s in sents:
        assert s.body.exhaustive and len(s.body.branches) == 1


def test_failure_axiom_is_declared_once():
    sents = translate("val x::l = [1]\nval y::m = [2]")
    axioms = [s for s in sents if isinstance(s, G.GAxiom)]
    assert [a.name for a in axioms] == ["patternFailure"]
    assert sents.index(axioms[0]) == 0


def test_length_equations():
    text = emit_text("fun length [] = 0\n  | length (x::l) = 1 + length l")
    assert text.startswith("Equations length `(x1: @list _'1): Z :=")
    assert "length (x :: l) := (1 + (length l))." in text


def test_hd_gets_precondition_and_absurd_clause():
    (eq,) = translate("fun hd (x::l) = x")
    assert eq.precondition is not None
    assert eq.clauses[-1] == ((G.GPWild(),), G.HOLE)


def test_mutual_recursion_uses_with():
    sents = translate((GOLDEN / "mutual.sml").read_text())
    eqs = [s for s in sents if isinstance(s, G.GEquations)]
    assert [c.name for c in eqs[0].companions] == ["lengthO"]


# ---------------------------------------------------------------- contracts


def test_contract_theorem_statement():
    text = emit_text((GOLDEN / "contract.sml").read_text())
    want = "Theorem posAdd_THM: forall x y b, posAdd (x, y) = b /\\ ((x > 0) && (y > 0)) = true -> ((b > x) && (b > y)) = true."
    assert coq_tokens(want) == coq_tokens(text[text.index("Theorem"):text.index("Admitted")])


def test_trivial_requires_is_kept():
    text = emit_text("(!! f x ==> b; REQUIRES: true; ENSURES: b > x; !!)\nfun f x = x + 1")
    assert "/\\ true = true ->" in text


def test_curried_contract():
    (_, th) = translate("(!! g x y ==> z; REQUIRES: x > 0; ENSURES: z > y; !!)\nfun g x y = x + y")
    assert [b.name for b in th.statement.binders] == ["x", "y", "z"]
    lhs = th.statement.body.dom.lhs.lhs
    assert lhs == G.GApp(G.GIdent("g"), (G.GIdent("x"), G.GIdent("y")))


def test_contract_variables_cover_inputs_and_output():
    src = "(!! f (a, (b, c)) ==> r; REQUIRES: a > 0; ENSURES: r > b; !!)\nfun f (a, (b, c)) = a + b + c"
    annotated, _ = elaborate(src)
    c = annotated[0].decl.contract
    (_, th) = translate(src)
    want = [v for p in c.inputs for v in collect_vars(p)] + collect_vars(c.output)
    assert [b.name for b in th.statement.binders] == want


# ---------------------------------------------------------------- records


def test_shared_record_declaration():
    src = "fun f (r : {a:int, b:bool}) = #a r\nval s = {b=true, a=1}\nval t = {a=2, b=false}"
    sents = translate(src)
    assert [s.name for s in sents if isinstance(s, G.GRecordDecl)] == ["rid_1"]


def test_distinct_field_types_get_distinct_records():
    sents = translate("val s = {a=1}\nval t = {a=true}")
    assert [s.name for s in sents if isinstance(s, G.GRecordDecl)] == ["rid_1", "rid_2"]


def test_fields_are_prefixed_and_ellipsis_expanded():
    src = "fun getAge (r: {name: string, age: int}) = case r of {age = x, ...} => x"
    text = emit_text(src)
    assert "{| rid_1_age := x; rid_1_name := _ |}" in text
    fields = re.findall(r"\b(rid_\d+_\w+)", text)
    assert set(fields) == {"rid_1_name", "rid_1_age"}


# ---------------------------------------------------------------- modules and infix


def test_inline_functor_argument_is_lifted_first():
    src = (
        "signature S = sig type t1 end\n"
        "functor Example (P : S) = struct type t = P.t1 end\n"
        "structure S2 = Example(struct type t1 = int end)"
    )
    sents = translate(src)
    assert kinds(sents)[-2:] == [("GModule", "mid_1"), ("GModule", "S2")]
    assert sents[-1].argument == "mid_1"


def test_nested_lifts_keep_discovery_order():
    src = (
        "signature S = sig type t1 end\n"
        "functor F (P : S) = struct type t = P.t1 end\n"
        "structure A = F(struct type t1 = int end)\n"
        "structure B = F(struct type t1 = bool end : S)"
    )
    names = [n for k, n in kinds(translate(src)) if n and n.startswith(("mid_", "A", "B"))]
    assert names == ["mid_1", "A", "mid_2", "B"]


def test_infix_program_sentences():
    sents = translate((GOLDEN / "infix.sml").read_text())
    notes = [s for s in sents if isinstance(s, G.GNotation)]
    assert len(notes) == 1
    assert (notes[0].assoc, notes[0].level) == ("left", 29)
    assert any(isinstance(s, G.GDefinition) and s.name == "opF" for s in sents)


@pytest.mark.parametrize("prec, level", [(0, 29), (4, 25), (9, 20)])
def test_notation_level_reverses_precedence(prec, level):
    sents = translate(f"infix {prec} F\nfun op F (x, y) = x + y")
    (note,) = [s for s in sents if isinstance(s, G.GNotation)]
    assert note.level == level


def test_fun_op_without_infix_has_no_notation():
    sents = translate("fun op g (x, y) = x")
    assert kinds(sents) == [("GEquations", "g")]


# ---------------------------------------------------------------- rejected input


def test_let_bound_function_is_rejected():
    with pytest.raises((TranslationError, UnsupportedConstruct)):
        translate("val y = let fun f x = x in f 1 end")


# ---------------------------------------------------------------- properties


clause_pats = st.sampled_from(["[]", "(x::l)", "[x]", "(x::y::l)", "_", "l"])


@settings(max_examples=100, deadline=None)
@given(st.lists(clause_pats, min_size=1, max_size=3))
def test_precondition_binder_iff_non_exhaustive(pats):
    src = "fun f " + "\n  | f ".join(f"{p} = 0" for p in pats)
    annotated, el = elaborate(src)
    (bind,) = annotated[0].decl.binds
    m = PatternMatrix([list(c.pats) for c in bind.clauses], [c.pats[0].ty for c in bind.clauses[:1]], el.table)
    sents = translate(src)
    (eq,) = [s for s in sents if isinstance(s, G.GEquations)]
    assert (eq.precondition is None) == is_exhaustive(m)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(["1", "true", "\"s\"", "[]", "NONE"]), min_size=1, max_size=3))
def test_binder_completeness(parts):
    src = f"val v = ({', '.join(parts)}, [])" if len(parts) > 1 else f"val v = {parts[0]}"
    _, el = elaborate(src)
    scheme = el.env.values["v"].scheme
    (d,) = translate(src)
    assert len(d.implicits) == len(scheme.quantified)
