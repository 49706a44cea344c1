"""Type inference, contracts and exhaustiveness annotations."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlgallina.elaborator import unify
from mlgallina.elaborator.infer import walk_nodes
from mlgallina.elaborator.types import (
    BOOL, INT, STRING, TArrow, TRecord, TTuple, TVar, UnifyError, apply, list_of, option_of, show,
)
from mlgallina.errors import ElabError, MLGallinaError
from mlgallina.frontend import syntax as S
from mlgallina.frontend.printer import SMLPrinter

import oracles as O
from helpers import GOLDEN, elaborate


def scheme_of(src, name):
    _, el = elaborate(src)
    info = el.env.values[name]
    return info.scheme, el.zonk(info.scheme.body)


# ---------------------------------------------------------------- unification


def test_unify_binds_list_element():
    assert unify(list_of(TVar("'a")), list_of(INT), {}) == {"'a": INT}


def test_unify_constructor_clash():
    with pytest.raises(MLGallinaError):
        unify(INT, STRING, {})


def test_unify_records_by_sorted_label():
    a = TRecord.make([("name", TVar("'a")), ("age", INT)])
    b = TRecord.make([("age", TVar("'b")), ("name", STRING)])
    s = unify(a, b, {})
    assert apply(a, s) == apply(b, s)
    assert apply(TVar("'a"), s) == STRING and apply(TVar("'b"), s) == INT


def test_occurs_check():
    with pytest.raises(UnifyError):
        unify(TVar("'a"), list_of(TVar("'a")), {})


def test_record_label_mismatch():
    with pytest.raises(MLGallinaError):
        unify(TRecord.make([("a", INT)]), TRecord.make([("b", INT)]), {})


ground = st.recursive(
    st.sampled_from([INT, BOOL, STRING]),
    lambda sub: st.one_of(
        sub.map(list_of), sub.map(option_of),
        st.tuples(sub, sub).map(lambda p: TTuple(p)),
        st.tuples(sub, sub).map(lambda p: TArrow(*p)),
    ),
    max_leaves=6,
)


def punch(t, rng, tag):
    """Replace random subtrees of ``t`` by fresh variables."""
    if rng.random() < 0.3:
        return TVar(f"'{tag}{rng.randrange(10**6)}")
    if isinstance(t, TTuple):
        return TTuple(tuple(punch(x, rng, tag) for x in t.items))
    if isinstance(t, TArrow):
        return TArrow(punch(t.dom, rng, tag), punch(t.cod, rng, tag))
    if getattr(t, "args", ()):
        return type(t)(t.name, tuple(punch(x, rng, tag) for x in t.args))
    return t


@settings(max_examples=200, deadline=None)
@given(ground, st.integers(0, 2**32))
def test_unifier_equalises_both_sides(t, seed):
    rng = random.Random(seed)
    a, b = punch(t, rng, "a"), punch(t, rng, "b")
    s = unify(a, b, {})
    assert apply(a, s) == apply(b, s)


@settings(max_examples=100, deadline=None)
@given(st.permutations(["a", "b", "c", "d"]))
def test_same_label_multiset_always_unifies(order):
    base = {"a": INT, "b": BOOL, "c": STRING, "d": list_of(INT)}
    r1 = TRecord.make(sorted(base.items()))
    r2 = TRecord.make([(l, base[l]) for l in order])
    assert unify(r1, r2, {}) == {}


# ---------------------------------------------------------------- programs


def test_empty_list_value_is_polymorphic():
    scheme, body = scheme_of("val L = []", "L")
    assert len(scheme.quantified) == 1
    assert body == list_of(TVar(scheme.quantified[0]))


def test_ellipsis_record_pattern_resolves_all_fields():
    src = "fun getAge (r: {name: string, age: int}) = case r of {age = x, ...} => x"
    annotated, _ = elaborate(src)
    recs = [n for n in walk_nodes(annotated[0].decl) if isinstance(n, S.PRecord)]
    assert recs and recs[0].ellipsis
    assert recs[0].ty == TRecord.make([("age", INT), ("name", STRING)])
    _, body = scheme_of(src, "getAge")
    assert body.cod == INT


def test_undetermined_ellipsis_is_an_error():
    with pytest.raises(ElabError):
        elaborate("fun f {x, ...} = x")


def test_split_binding_is_flagged_not_exhaustive():
    annotated, el = elaborate("val x::l = [1,2,3]")
    (bind,) = annotated[0].decl.binds
    assert bind.exhaustive is False
    assert bind.pat.ty == list_of(INT)
    assert any("not exhaustive" in str(w) for w in el.warnings)


def test_every_expression_and_pattern_is_typed():
    annotated, _ = elaborate((GOLDEN / "records.sml").read_text())
    for d in annotated:
        for node, ty in d.node_types().items():
            assert ty is not None


def test_overloaded_operator_defaults_to_int():
    _, body = scheme_of("fun add (a, b) = a + b", "add")
    assert show(body) == "int * int -> int"


def test_overload_resolved_by_context():
    _, body = scheme_of("fun add (a, b) = a + b + 1.0", "add")
    assert show(body) == "real * real -> real"


def test_value_restriction():
    scheme, _ = scheme_of("val g = (fn x => x) (fn y => y)", "g")
    assert scheme.quantified == ()
    scheme, _ = scheme_of("val h = fn x => x", "h")
    assert len(scheme.quantified) == 1


def test_principal_type_admits_instances():
    elaborate("fun id x = x\nval f : int -> int = id\nval g : string list -> string list = id")
    with pytest.raises(ElabError):
        elaborate("fun inc x = x + 1\nval f : string -> string = inc")


def test_real_equality_is_rejected():
    with pytest.raises(ElabError):
        elaborate("val b = 1.0 = 2.0")


def test_unbound_identifier():
    with pytest.raises(ElabError) as info:
        elaborate("val x = y")
    assert info.value.span is not None


def test_elaboration_is_deterministic():
    src = (GOLDEN / "modules.sml").read_text()

    def types():
        annotated, _ = elaborate(src)
        return [repr(sorted(map(repr, d.node_types().values()))) for d in annotated]

    assert types() == types()


# ---------------------------------------------------------------- contracts


def test_contract_variables_are_typed():
    annotated, _ = elaborate((GOLDEN / "contract.sml").read_text())
    c = annotated[0].contract
    assert c.var_names() == ["x", "y", "b"]
    assert all(t == INT for _, t in c.variables)


def test_contract_output_must_not_reuse_input_name():
    with pytest.raises(MLGallinaError):
        elaborate("(!! f x ==> x; REQUIRES: true; ENSURES: true; !!)\nfun f x = x + 1")


def test_contract_conditions_must_be_bool():
    with pytest.raises(ElabError) as info:
        elaborate("(!! f x ==> b; REQUIRES: true; ENSURES: b + 1; !!)\nfun f x = x + 1")
    assert "bool" in info.value.message


def test_contract_arity_must_match():
    with pytest.raises(ElabError):
        elaborate("(!! f x y ==> b; REQUIRES: true; ENSURES: true; !!)\nfun f x = x + 1")


def test_contract_may_use_earlier_declarations():
    elaborate("fun pos n = n > 0\n(!! f x ==> b; REQUIRES: pos x; ENSURES: pos b; !!)\nfun f x = x + 1")


def test_contract_cannot_see_function_locals():
    with pytest.raises(ElabError):
        elaborate("(!! f x ==> b; REQUIRES: true; ENSURES: b > k; !!)\nfun f x = let val k = 1 in x + k end")


# ---------------------------------------------------------------- exhaustiveness flags


def sml_type(t) -> str:
    kind = t[0]
    if kind == "bool":
        return "bool"
    if kind == "option":
        return f"({sml_type(t[1])}) option"
    if kind == "list":
        return f"({sml_type(t[1])}) list"
    return f"({sml_type(t[1])} * {sml_type(t[2])})"


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_case_flag_agrees_with_enumeration(seed):
    rng = random.Random(seed)
    t = rng.choice(O.ORACLE_TYPES)
    rows = [O.random_pattern(rng, t) for _ in range(rng.randint(1, 3))]
    pr = SMLPrinter()
    rules = " | ".join(f"{pr.pat(p)} => 0" for p in rows)
    annotated, _ = elaborate(f"val f = fn (v : {sml_type(t)}) => case v of {rules}")
    (case,) = [n for n in walk_nodes(annotated[0].decl) if isinstance(n, S.ECase)]
    assert case.exhaustive == O.brute_exhaustive([[p] for p in rows], [t])


def test_contract_sees_earlier_structure_members_and_the_function():
    elaborate(
        "structure S = struct fun pos n = n > 0\n"
        "(!! f x ==> b; REQUIRES: pos x; ENSURES: f b > 0; !!)\n"
        "fun f x = x + 1 end"
    )
