"""Lexer, parser and SML printer."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlgallina.errors import LexError, ParseError, UnsupportedConstruct
from mlgallina.frontend import parse_source, tokenize
from mlgallina.frontend import syntax as S
from mlgallina.frontend.printer import print_program

from helpers import CORPUS, GOLDEN, elaborate

SAMPLES = sorted(GOLDEN.glob("*.sml")) + sorted(CORPUS.glob("*.sml"))


def kinds(src):
    return [(t.kind, t.text) for t in tokenize(src) if t.kind != "eof"]


# ---------------------------------------------------------------- tokens


def test_minimal_declaration_tokens():
    assert kinds("val x = 1") == [
        ("keyword", "val"), ("identifier", "x"), ("symbolic-id", "="), ("int-lit", "1"),
    ]


def test_contract_delimiters_are_atomic():
    toks = kinds("(!! f x ==> y; REQUIRES: true; ENSURES: true; !!)")
    assert toks[0] == ("contract-open", "(!!")
    assert toks[-1] == ("contract-close", "!!)")


def test_comment_is_skipped():
    assert kinds("val (* c *) x") == [("keyword", "val"), ("identifier", "x")]


def test_nested_comments():
    assert kinds("(* a (* b *) c *) x") == [("identifier", "x")]


@pytest.mark.parametrize("src", ['val s = "abc', "(* never closed", "val c = #\"ab\""])
def test_lexical_errors_carry_offsets(src):
    with pytest.raises(LexError) as info:
        tokenize(src)
    assert info.value.span is not None


@pytest.mark.parametrize("path", SAMPLES, ids=lambda p: p.name)
def test_tokens_reconstruct_source(path):
    src = path.read_text()
    toks = [t for t in tokenize(src) if t.kind != "eof"]
    last = 0
    for t in toks:
        start, end = t.span
        assert last <= start < end
        assert src.encode()[start:end].decode() == t.text
        gap = src.encode()[last:start].decode()
        assert gap.strip() == "" or "(*" in gap
        last = end
    assert src.encode()[last:].decode().strip() == ""


# ---------------------------------------------------------------- parsing


def only_exp(src):
    (d,), _ = parse_source(f"val it = {src}")
    return d.binds[0].exp


@pytest.mark.parametrize("src, node", [
    ("if b then 1 else 2", S.EIf),
    ("b andalso c", S.EAndalso),
    ("b orelse c", S.EOrelse),
    ("(1, 2)", S.ETuple),
    ("[1, 2]", S.EList),
    ("()", S.EUnit),
    ("case x of _ => 1", S.ECase),
    ("1 + 2", S.EInfix),
    ("let val y = 1 in y end", S.ELet),
    ("fn x => x", S.EFn),
])
def test_derived_forms_are_kept(src, node):
    assert isinstance(only_exp(src), node)


def test_fun_is_its_own_declaration():
    (d,), _ = parse_source("fun f 0 = 1 | f n = n")
    assert isinstance(d, S.DFun) and len(d.binds[0].clauses) == 2


def test_infix_directive_default_fixity():
    decls, infix = parse_source("infix F\nfun op F (x, y) = x*x + y")
    assert infix.get("F") == ("left", 0)
    assert isinstance(decls[-1], S.DFun) and decls[-1].binds[0].name == "F"


def test_later_infix_directive_overwrites():
    _, infix = parse_source("infix 3 F\ninfixr 7 F")
    assert infix.get("F") == ("right", 7)


def test_infix_precedence_shapes_tree():
    e = only_exp("1 + 2 * 3")
    assert e.op == "+" and e.rhs.op == "*"
    e = only_exp("1 :: 2 :: []")
    assert e.op == "::" and e.rhs.op == "::"


def test_contract_attaches_to_following_fun():
    src = (GOLDEN / "contract.sml").read_text()
    (d,), _ = parse_source(src)
    assert isinstance(d, S.DFun)
    c = d.contract
    assert c.fname == "posAdd"
    assert isinstance(c.requires, S.EAndalso) and isinstance(c.ensures, S.EAndalso)


CONTRACT = "(!! f x ==> y; REQUIRES: true; ENSURES: true; !!)\n"


def test_contract_must_be_immediately_followed_by_fun():
    with pytest.raises(ParseError):
        parse_source(CONTRACT + "val z = 1\nfun f x = x")


def test_contract_name_must_match():
    with pytest.raises(ParseError):
        parse_source(CONTRACT + "fun g x = x")


def test_contract_inputs_are_variables_or_tuples():
    with pytest.raises(ParseError):
        parse_source("(!! f [x] ==> y; REQUIRES: true; ENSURES: true; !!)\nfun f l = l")


@pytest.mark.parametrize("src", [
    'val x = raise Fail "x"',
    "val x = (1 handle _ => 2)",
    "val r = ref 0",
    "open List",
])
def test_effectful_constructs_are_rejected(src):
    # some are caught by the parser, the rest by the elaborator
    with pytest.raises((UnsupportedConstruct, ParseError)):
        elaborate(src)


def test_parse_error_has_span():
    with pytest.raises(ParseError) as info:
        parse_source("val = 1")
    assert info.value.span is not None


# ---------------------------------------------------------------- round trip


@pytest.mark.parametrize("path", SAMPLES, ids=lambda p: p.name)
def test_print_and_reparse_is_identity(path):
    decls, _ = parse_source(path.read_text())
    again, _ = parse_source(print_program(decls))
    assert again == decls


names = st.sampled_from(["x", "y", "f", "g"])
leaves = st.one_of(
    st.integers(-50, 50).map(S.EInt),
    names.map(S.EVar),
    st.text("abc \"\\\n", max_size=4).map(S.EString),
    st.just(S.EUnit()),
)
pats = st.one_of(
    st.just(S.PWild()),
    names.map(S.PVar),
    st.integers(0, 3).map(S.PInt),
)


def _compound(sub):
    return st.one_of(
        st.lists(sub, min_size=2, max_size=3).map(S.ETuple),
        st.lists(sub, max_size=3).map(S.EList),
        st.builds(S.EIf, sub, sub, sub),
        st.builds(S.EAndalso, sub, sub),
        st.builds(S.EOrelse, sub, sub),
        st.builds(S.EApp, names.map(S.EVar), sub),
        st.builds(S.EInfix, st.sampled_from(["+", "*", "-", "::", "=", "<", "^", "@"]), sub, sub),
        st.builds(S.ECase, sub, st.lists(st.builds(S.Rule, pats, sub), min_size=1, max_size=3)),
        st.builds(S.EFn, st.lists(st.builds(S.Rule, pats, sub), min_size=1, max_size=2)),
        st.builds(
            lambda p, e, b: S.ELet([S.DVal([S.ValBind(p, e)])], b), names.map(S.PVar), sub, sub
        ),
    )


expressions = st.recursive(leaves, _compound, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(expressions)
def test_random_expressions_round_trip(e):
    decls = [S.DVal([S.ValBind(S.PVar("it"), e)])]
    again, _ = parse_source(print_program(decls))
    assert again == decls
