"""Pattern engine checked against brute-force enumeration in ``oracles``."""

from __future__ import annotations

import itertools
import random
import re

from hypothesis import given, settings
from hypothesis import strategies as st

from mlgallina.elaborator.types import INT
from mlgallina.basis import ConVal, SList
from mlgallina.frontend import syntax as S
from mlgallina.patterns import (
    PatternMatrix,
    collect_vars,
    generalize,
    is_exhaustive,
    is_generic,
    is_useful,
    naive_precondition,
    redundant_rows,
    satisfies,
    synthesize_precondition,
)

import oracles as O
from helpers import GOLDEN, elaborate

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def matrix_of(rows, tys):
    return PatternMatrix(rows, [O.to_sem(t) for t in tys])


def to_engine(v):
    """Oracle value -> evaluator value."""
    if isinstance(v, bool) or isinstance(v, int):
        return v
    tag = v[0]
    if tag == "L":
        return SList(tuple(to_engine(x) for x in v[1:]))
    if tag == "P":
        return (to_engine(v[1]), to_engine(v[2]))
    if tag == "NONE":
        return ConVal("NONE")
    return ConVal("SOME", to_engine(v[1]))


def oracle_satisfies(formula, vec) -> bool:
    return any(all(O.matches(a.skeleton, vec[a.arg]) for a in d) for d in formula.disjuncts)


# ---------------------------------------------------------------- exhaustiveness


def run_oracle_suite(n: int, seed: int = 2024):
    """Returns (cases, disagreements)."""
    rng = random.Random(seed)
    cache = O.MaskCache()
    bad = []
    for _ in range(n):
        rows, tys = O.random_matrix(rng)
        if is_exhaustive(matrix_of(rows, tys)) != cache.exhaustive(rows, tys):
            bad.append((rows, tys))
    return n, bad


def test_exhaustiveness_agrees_with_enumeration_on_10000_matrices():
    cases, bad = run_oracle_suite(10_000)
    assert cases >= 10_000
    assert bad == []


@settings(max_examples=300, deadline=None)
@given(seeds)
def test_exhaustive_property(seed):
    rows, tys = O.random_matrix(random.Random(seed))
    assert is_exhaustive(matrix_of(rows, tys)) == O.brute_exhaustive(rows, tys)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_redundant_rows_match_enumeration(seed):
    rows, tys = O.random_matrix(random.Random(seed))
    vecs = list(itertools.product(*(O.values(t) for t in tys)))
    hit = {O.first_match(rows, v) for v in vecs}
    expected = [i for i in range(len(rows)) if i not in hit]
    assert redundant_rows(matrix_of(rows, tys)) == expected


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_usefulness_of_a_new_row(seed):
    rng = random.Random(seed)
    rows, tys = O.random_matrix(rng)
    q = [O.random_pattern(rng, t) for t in tys]
    vecs = itertools.product(*(O.values(t) for t in tys))
    want = any(
        all(O.matches(p, v) for p, v in zip(q, vec)) and O.first_match(rows, vec) is None for vec in vecs
    )
    assert is_useful(matrix_of(rows, tys), q) == want


def test_known_matrices():
    b = [O.BOOL_T]
    assert is_exhaustive(matrix_of([[O.con("true")], [O.con("false")]], b))
    assert not is_exhaustive(matrix_of([[O.con("true")]], b))
    lb = [O.lst(O.BOOL_T)]
    cons = S.PInfix("::", S.PWild(), S.PWild())
    assert is_exhaustive(matrix_of([[O.con("nil")], [cons]], lb))
    assert not is_exhaustive(matrix_of([[cons]], lb))
    assert redundant_rows(matrix_of([[S.PWild()], [O.con("nil")]], lb)) == [1]


# ---------------------------------------------------------------- generic patterns


@settings(max_examples=300, deadline=None)
@given(seeds, st.sampled_from(O.ORACLE_TYPES))
def test_is_generic_iff_matches_everything(seed, t):
    p = O.random_pattern(random.Random(seed), t)
    assert is_generic(p, O.to_sem(t)) == all(O.matches(p, v) for v in O.values(t))


def test_irrefutable_tuple_is_generic():
    t = O.pair(O.BOOL_T, O.lst(O.BOOL_T))
    assert is_generic(S.PTuple([S.PVar("a"), S.PWild()]), O.to_sem(t))
    assert not is_generic(S.PTuple([S.PVar("a"), O.con("nil")]), O.to_sem(t))


@settings(max_examples=300, deadline=None)
@given(seeds, st.sampled_from(O.ORACLE_TYPES))
def test_collect_vars_in_binding_order(seed, t):
    p = O.random_pattern(random.Random(seed), t)
    got = collect_vars(p)
    assert got == sorted(got, key=lambda n: int(n[1:]))
    assert set(got) == set(re.findall(r"'(v\d+)'", repr(p)))


@settings(max_examples=300, deadline=None)
@given(seeds, st.sampled_from(O.ORACLE_TYPES))
def test_generalize_preserves_match_set(seed, t):
    p = O.random_pattern(random.Random(seed), t)
    names, skel = generalize(p, O.to_sem(t))
    assert names == [f"y{i + 1}" for i in range(len(names))]
    assert collect_vars(skel) == names
    assert all(O.matches(p, v) == O.matches(skel, v) for v in O.values(t))


# ---------------------------------------------------------------- preconditions


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_precondition_is_the_exact_domain(seed):
    rows, tys = O.random_matrix(random.Random(seed))
    m = matrix_of(rows, tys)
    formula = synthesize_precondition(m)
    if formula is None:
        assert O.brute_exhaustive(rows, tys)
        return
    naive = naive_precondition(m)
    for vec in itertools.product(*(O.values(t) for t in tys)):
        covered = O.first_match(rows, vec) is not None
        assert oracle_satisfies(formula, vec) == covered
        assert oracle_satisfies(naive, vec) == covered


def hd_sum_matrix():
    annotated, el = elaborate((GOLDEN / "hd_sum.sml").read_text())
    (bind,) = annotated[0].decl.binds
    rows = [list(c.pats) for c in bind.clauses]
    elem = O.pair(O.INT_T, O.INT_T)
    tys = [O.lst(elem), O.lst(elem), O.INT_T]
    return rows, tys, PatternMatrix(rows, [O.to_sem(t) for t in tys], el.table)


def test_hd_sum_minimized_atom_counts():
    _, _, m = hd_sum_matrix()
    assert synthesize_precondition(m).atom_counts() == [2, 1, 1]
    assert naive_precondition(m).atom_counts() == [3, 3, 3]


def test_hd_sum_formulas_agree_with_row_matching():
    rows, tys, m = hd_sum_matrix()
    minimized, naive = synthesize_precondition(m), naive_precondition(m)
    lists = O.values(tys[0], 2)
    assert len(lists) == 21
    checked = 0
    for l1, l2, init in itertools.product(lists, lists, (0, 1)):
        vec = (l1, l2, init)
        covered = O.first_match(rows, vec) is not None
        assert oracle_satisfies(minimized, vec) == covered
        assert oracle_satisfies(naive, vec) == covered
        engine_vec = [to_engine(v) for v in vec]
        sem = [O.to_sem(t) for t in tys]
        assert satisfies(minimized, engine_vec, sem, m.table) == covered
        checked += 1
    assert checked == 21 * 21 * 2


def test_total_function_has_no_precondition():
    lb = [O.lst(O.BOOL_T)]
    assert synthesize_precondition(matrix_of([[O.con("nil")], [S.PVar("l")]], lb)) is None


def test_int_literal_columns_are_never_exhaustive_without_default():
    m = PatternMatrix([[S.PInt(0)], [S.PInt(1)]], [INT])
    assert not is_exhaustive(m)
    assert is_exhaustive(PatternMatrix([[S.PInt(0)], [S.PWild()]], [INT]))
