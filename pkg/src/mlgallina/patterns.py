"""Pattern-matrix analysis: usefulness, exhaustiveness, generic patterns and
precondition synthesis for partial functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .basis import ConVal, SList
from .elaborator.env import DataInfo
from .elaborator.types import TCon, TRecord, TTuple, TVar, expand, rename
from .frontend import syntax as S

BUILTIN_CONSTRUCTORS = frozenset({"nil", "true", "false", "NONE", "SOME", "::"})


class RecVal(tuple):
    """Record value: tuple of (label, value) pairs sorted by label."""

    __slots__ = ()


# ---------------------------------------------------------------- constructor signatures


class DatatypeTable:
    """Maps a column type to its constructor signature."""

    def __init__(self, datatypes: Optional[Dict[str, DataInfo]] = None):
        self.datatypes = dict(datatypes or {})

    def add(self, info: DataInfo) -> None:
        self.datatypes[info.ident] = info

    def signature(self, t) -> Optional[List[Tuple[str, List]]]:
        """``[(constructor, argument types)]`` or None for open/infinite types."""
        if t is None:
            return None
        t = expand(t, {})
        if isinstance(t, TTuple):
            return [("#tuple", list(t.items))]
        if isinstance(t, TRecord):
            return [("#record", [ft for _, ft in t.fields])]
        if not isinstance(t, TCon):
            return None
        if t.name == "bool":
            return [("true", []), ("false", [])]
        if t.name == "unit":
            return [("()", [])]
        if t.name == "list":
            return [("nil", []), ("::", [t.args[0], t])]
        if t.name == "option":
            return [("NONE", []), ("SOME", [t.args[0]])]
        info = self.datatypes.get(t.name)
        if info is None:
            return None
        mapping = dict(zip(info.params, t.args))
        return [(c, [] if p is None else [rename(p, mapping)]) for c, p in info.cons]

    def is_constructor(self, name: str, t) -> bool:
        sig = self.signature(t)
        if sig is not None:
            return any(c == base_name(name) for c, _ in sig)
        return name in BUILTIN_CONSTRUCTORS


def base_name(con: str) -> str:
    """``A.B.Leaf`` -> ``Leaf``; signatures list constructors unqualified."""
    return con.rpartition(".")[2]


def _payload_types(table: DatatypeTable, t, con: str) -> List:
    sig = table.signature(t)
    con = base_name(con)
    if sig:
        for c, args in sig:
            if c == con:
                return args
    return []


# ---------------------------------------------------------------- core patterns


@dataclass(frozen=True)
class Wild:
    pass


@dataclass(frozen=True)
class Con:
    name: str
    args: Tuple = ()


@dataclass(frozen=True)
class Lit:
    value: object


WILD = Wild()


def _strip(p):
    while isinstance(p, (S.PTyped, S.PLayered)):
        p = p.pat
    return p


def _is_con_var(p: S.PVar, t, table: DatatypeTable) -> bool:
    if p.con:
        return True
    if t is not None and table.signature(t) is not None:
        return table.is_constructor(p.name, t)
    return p.name in BUILTIN_CONSTRUCTORS


def core(p, t, table: DatatypeTable):
    """Lower a source pattern to constructor form."""
    p = _strip(p)
    if isinstance(p, S.PWild):
        return WILD
    if isinstance(p, S.PVar):
        if _is_con_var(p, t, table):
            return Con(base_name(p.name))
        return WILD
    if isinstance(p, S.PInt):
        return Lit(("int", p.value))
    if isinstance(p, S.PString):
        return Lit(("string", p.value))
    if isinstance(p, S.PChar):
        return Lit(("char", p.value))
    if isinstance(p, S.PReal):
        return Lit(("real", p.text))
    if isinstance(p, S.PUnit):
        return Con("()")
    if isinstance(p, S.PTuple):
        tys = _payload_types(table, t, "#tuple") or [None] * len(p.items)
        return Con("#tuple", tuple(core(x, ty, table) for x, ty in zip(p.items, tys)))
    if isinstance(p, S.PRecord):
        rt = expand(t, {}) if t is not None else None
        given = dict(p.fields)
        if isinstance(rt, TRecord):
            return Con("#record", tuple(core(given[l], ft, table) if l in given else WILD for l, ft in rt.fields))
        labels = sorted(given)
        return Con("#record", tuple(core(given[l], None, table) for l in labels))
    if isinstance(p, S.PList):
        elem = _elem_type(t)
        out = Con("nil")
        for item in reversed(p.items):
            out = Con("::", (core(item, elem, table), out))
        return out
    if isinstance(p, S.PInfix):
        if p.op == "::":
            return Con("::", (core(p.lhs, _elem_type(t), table), core(p.rhs, t, table)))
        arg = S.PTuple([p.lhs, p.rhs])
        (pt,) = _payload_types(table, t, p.op) or [None]
        return Con(base_name(p.op), (core(arg, pt, table),))
    if isinstance(p, S.PConApp):
        if p.name == "::":
            inner = _strip(p.arg)
            if isinstance(inner, S.PTuple) and len(inner.items) == 2:
                return Con("::", (core(inner.items[0], _elem_type(t), table), core(inner.items[1], t, table)))
            return Con("::", (WILD, WILD))
        (pt,) = _payload_types(table, t, p.name) or [None]
        return Con(base_name(p.name), (core(p.arg, pt, table),))
    raise TypeError(p)


def _elem_type(t):
    if t is None:
        return None
    t = expand(t, {})
    if isinstance(t, TCon) and t.name == "list":
        return t.args[0]
    return None


# ---------------------------------------------------------------- usefulness


@dataclass
class PatternMatrix:
    rows: List[List]
    column_types: List
    table: DatatypeTable = field(default_factory=DatatypeTable)

    def __post_init__(self):
        w = len(self.column_types)
        for r in self.rows:
            if len(r) != w:
                raise ValueError("all rows must have the matrix width")

    def core_rows(self) -> List[List]:
        return [[core(p, t, self.table) for p, t in zip(r, self.column_types)] for r in self.rows]


def _head_key(p):
    return p.name if isinstance(p, Con) else ("lit", p.value)


def _specialize(rows, key, arity):
    out = []
    for r in rows:
        h = r[0]
        if isinstance(h, Wild):
            out.append([WILD] * arity + r[1:])
        elif _head_key(h) == key:
            out.append(list(h.args if isinstance(h, Con) else ()) + r[1:])
    return out


def _useful(rows: List[List], q: List, tys: List, table: DatatypeTable) -> bool:
    if not q:
        return not rows
    h = q[0]
    if isinstance(h, (Con, Lit)):
        key = _head_key(h)
        args = list(h.args) if isinstance(h, Con) else []
        argtys = _payload_types(table, tys[0], h.name) if isinstance(h, Con) else []
        if len(argtys) != len(args):
            argtys = [None] * len(args)
        return _useful(_specialize(rows, key, len(args)), args + q[1:], argtys + tys[1:], table)
    heads = {_head_key(r[0]) for r in rows if not isinstance(r[0], Wild)}
    sig = table.signature(tys[0])
    if sig is not None and heads and all(c in heads for c, _ in sig):
        for c, argtys in sig:
            if _useful(_specialize(rows, c, len(argtys)), [WILD] * len(argtys) + q[1:], list(argtys) + tys[1:], table):
                return True
        return False
    if sig is not None and not heads and len(sig) == 1:
        # single-constructor column (tuple, record, unit): expand to reach nested columns
        c, argtys = sig[0]
        return _useful(_specialize(rows, c, len(argtys)), [WILD] * len(argtys) + q[1:], list(argtys) + tys[1:], table)
    default = [r[1:] for r in rows if isinstance(r[0], Wild)]
    return _useful(default, q[1:], tys[1:], table)


def is_useful(matrix: PatternMatrix, row: Sequence) -> bool:
    """True iff some value matches ``row`` and no row of ``matrix``."""
    q = [core(p, t, matrix.table) for p, t in zip(row, matrix.column_types)]
    return _useful(matrix.core_rows(), q, list(matrix.column_types), matrix.table)


def is_exhaustive(matrix: PatternMatrix) -> bool:
    w = len(matrix.column_types)
    return not _useful(matrix.core_rows(), [WILD] * w, list(matrix.column_types), matrix.table)


def redundant_rows(matrix: PatternMatrix) -> List[int]:
    rows = matrix.core_rows()
    tys = list(matrix.column_types)
    return [i for i in range(len(rows)) if not _useful(rows[:i], rows[i], tys, matrix.table)]


# ---------------------------------------------------------------- generic patterns


def is_generic(p, t, table: Optional[DatatypeTable] = None) -> bool:
    """True iff ``p`` matches every value of type ``t``."""
    table = table or DatatypeTable()
    p = _strip(p)
    if isinstance(p, S.PWild):
        return True
    if isinstance(p, S.PVar):
        if not _is_con_var(p, t, table):
            return True
        sig = table.signature(t)
        return sig is not None and len(sig) == 1
    if isinstance(p, S.PUnit):
        return True
    if isinstance(p, S.PTuple):
        tys = _payload_types(table, t, "#tuple") or [None] * len(p.items)
        return all(is_generic(x, ty, table) for x, ty in zip(p.items, tys))
    if isinstance(p, S.PRecord):
        rt = expand(t, {}) if t is not None else None
        return all(
            is_generic(x, rt.field_type(l) if isinstance(rt, TRecord) else None, table) for l, x in p.fields
        )
    if isinstance(p, S.PConApp):
        sig = table.signature(t)
        if sig is None or len(sig) != 1 or sig[0][0] != base_name(p.name):
            return False
        (pt,) = sig[0][1] or [None]
        return is_generic(p.arg, pt, table)
    if isinstance(p, S.PInfix) and p.op != "::":
        sig = table.signature(t)
        if sig is None or len(sig) != 1:
            return False
        (pt,) = sig[0][1] or [None]
        return is_generic(S.PTuple([p.lhs, p.rhs]), pt, table)
    return False


def collect_vars(p) -> List[str]:
    """Variables bound by ``p`` in left-to-right order."""
    out: List[str] = []

    def go(q):
        if isinstance(q, S.PVar):
            if not q.con and not (q.name in BUILTIN_CONSTRUCTORS and q.ty is None):
                out.append(q.name)
        elif isinstance(q, S.PLayered):
            out.append(q.name)
            go(q.pat)
        elif isinstance(q, S.PTyped):
            go(q.pat)
        elif isinstance(q, (S.PTuple, S.PList)):
            for x in q.items:
                go(x)
        elif isinstance(q, S.PRecord):
            for _, x in q.fields:
                go(x)
        elif isinstance(q, S.PConApp):
            go(q.arg)
        elif isinstance(q, S.PInfix):
            go(q.lhs)
            go(q.rhs)

    go(p)
    return out


def generalize(p, t=None, table: Optional[DatatypeTable] = None, prefix: str = "y"):
    """Replace maximal generic sub-patterns by fresh variables y1, y2, ...

    Returns ``(vars, skeleton)``; types are erased from the skeleton.
    """
    table = table or DatatypeTable()
    names: List[str] = []

    def fresh():
        names.append(f"{prefix}{len(names) + 1}")
        v = S.PVar(names[-1])
        return v

    def go(q, ty):
        q = _strip(q)
        if is_generic(q, ty, table):
            return fresh()
        if isinstance(q, S.PTuple):
            tys = _payload_types(table, ty, "#tuple") or [None] * len(q.items)
            return S.PTuple([go(x, t2) for x, t2 in zip(q.items, tys)])
        if isinstance(q, S.PList):
            elem = _elem_type(ty)
            return S.PList([go(x, elem) for x in q.items])
        if isinstance(q, S.PRecord):
            rt = expand(ty, {}) if ty is not None else None
            given = dict(q.fields)
            if isinstance(rt, TRecord):
                fields = [(l, go(given[l], ft) if l in given else fresh()) for l, ft in rt.fields]
            else:
                fields = [(l, go(x, None)) for l, x in sorted(q.fields)]
            return S.PRecord(fields, False)
        if isinstance(q, S.PInfix):
            if q.op == "::":
                return S.PInfix("::", go(q.lhs, _elem_type(ty)), go(q.rhs, ty))
            (pt,) = _payload_types(table, ty, q.op) or [None]
            tys = _payload_types(table, pt, "#tuple") or [None, None]
            return S.PInfix(q.op, go(q.lhs, tys[0]), go(q.rhs, tys[1]))
        if isinstance(q, S.PConApp):
            (pt,) = _payload_types(table, ty, q.name) or [None]
            return S.PConApp(q.name, go(q.arg, pt), q.op)
        if isinstance(q, S.PVar):
            return S.PVar(q.name, q.op, con=True)
        return q

    skeleton = go(p, t)
    return names, skeleton


# ---------------------------------------------------------------- preconditions


@dataclass
class Atom:
    """``exists vars, x<arg+1> = skeleton``."""

    arg: int
    vars: List[str]
    skeleton: object


@dataclass
class PreconditionFormula:
    disjuncts: List[List[Atom]]

    def atom_counts(self) -> List[int]:
        return [len(d) for d in self.disjuncts]


def synthesize_precondition(matrix: PatternMatrix) -> Optional[PreconditionFormula]:
    """Minimised domain condition of a partial function, or None when total."""
    t = matrix.table
    tys = matrix.column_types
    for row in matrix.rows:
        if all(is_generic(p, ty, t) for p, ty in zip(row, tys)):
            return None
    if is_exhaustive(matrix):
        return None
    disjuncts = []
    for row in matrix.rows:
        atoms = []
        for i, (p, ty) in enumerate(zip(row, tys)):
            if not is_generic(p, ty, t):
                vs, skel = generalize(p, ty, t)
                atoms.append(Atom(i, vs, skel))
        disjuncts.append(atoms)
    return PreconditionFormula(disjuncts)


def naive_precondition(matrix: PatternMatrix) -> PreconditionFormula:
    """One atom per argument per clause, patterns taken verbatim."""
    return PreconditionFormula(
        [[Atom(i, collect_vars(p), _erase(p)) for i, p in enumerate(row)] for row in matrix.rows]
    )


def _erase(p):
    p = _strip(p)
    if isinstance(p, S.PTuple):
        return S.PTuple([_erase(x) for x in p.items])
    if isinstance(p, S.PList):
        return S.PList([_erase(x) for x in p.items])
    if isinstance(p, S.PRecord):
        return S.PRecord([(l, _erase(x)) for l, x in p.fields], p.ellipsis)
    if isinstance(p, S.PConApp):
        return S.PConApp(p.name, _erase(p.arg), p.op)
    if isinstance(p, S.PInfix):
        return S.PInfix(p.op, _erase(p.lhs), _erase(p.rhs))
    return p


# ---------------------------------------------------------------- matching values


def match_core(p, v) -> bool:
    if isinstance(p, Wild):
        return True
    if isinstance(p, Lit):
        return p.value[1] == v
    name = p.name
    if name == "()":
        return v == ()
    if name == "#tuple":
        return all(match_core(a, x) for a, x in zip(p.args, v))
    if name == "#record":
        return all(match_core(a, x) for a, (_, x) in zip(p.args, v))
    if name == "true":
        return v is True
    if name == "false":
        return v is False
    if name == "nil":
        return isinstance(v, SList) and len(v) == 0
    if name == "::":
        return isinstance(v, SList) and len(v) > 0 and match_core(p.args[0], v[0]) and match_core(p.args[1], SList(v[1:]))
    if isinstance(v, ConVal) and v.name == name:
        return not p.args or match_core(p.args[0], v.payload)
    return False


def matches(p, t, v, table: Optional[DatatypeTable] = None) -> bool:
    return match_core(core(p, t, table or DatatypeTable()), v)


def satisfies(formula: PreconditionFormula, values: Sequence, tys: Sequence, table=None) -> bool:
    """Does an argument vector satisfy the formula (existentials match anything)?"""
    table = table or DatatypeTable()
    return any(
        all(matches(a.skeleton, tys[a.arg], values[a.arg], table) for a in d) for d in formula.disjuncts
    )


def enumerate_values(t, max_len: int = 3, table: Optional[DatatypeTable] = None, ints=(0, 1)) -> Iterator:
    """All values of ``t`` with lists up to ``max_len`` and ints from ``ints``."""
    table = table or DatatypeTable()
    t = expand(t, {})
    if isinstance(t, TCon):
        if t.name == "bool":
            yield from (True, False)
            return
        if t.name == "unit":
            yield ()
            return
        if t.name == "int":
            yield from ints
            return
        if t.name == "list":
            elems = list(enumerate_values(t.args[0], max_len, table, ints))
            level = [()]
            for _ in range(max_len + 1):
                for l in level:
                    yield SList(l)
                level = [l + (e,) for l in level for e in elems]
            return
        if t.name == "option":
            yield ConVal("NONE")
            for v in enumerate_values(t.args[0], max_len, table, ints):
                yield ConVal("SOME", v)
            return
        sig = table.signature(t)
        if sig is not None:
            for c, args in sig:
                if not args:
                    yield ConVal(c)
                else:
                    for v in enumerate_values(args[0], max_len, table, ints):
                        yield ConVal(c, v)
            return
    if isinstance(t, TTuple):
        import itertools

        for combo in itertools.product(*(list(enumerate_values(x, max_len, table, ints)) for x in t.items)):
            yield tuple(combo)
        return
    if isinstance(t, TRecord):
        import itertools

        labels = [l for l, _ in t.fields]
        for combo in itertools.product(*(list(enumerate_values(x, max_len, table, ints)) for _, x in t.fields)):
            yield RecVal(zip(labels, combo))
        return
    raise ValueError(f"cannot enumerate values of {t}")
