"""Semantic types, substitutions and unification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

from ..errors import ElabError


@dataclass(frozen=True)
class TVar:
    """Type variable.  Fresh variables are named ``_'N``; explicit ones ``'a``."""

    name: str

    @property
    def explicit(self) -> bool:
        return not self.name.startswith("_")


@dataclass(frozen=True)
class TCon:
    """Applied type constructor (builtin, datatype, or abstract type).

    ``name`` is the unique identity (qualified, with a ``#n`` suffix when a
    datatype name is redeclared); ``display`` is how it was declared and
    ``path`` the structure path it lives in.
    """

    name: str
    args: Tuple["SemType", ...] = ()
    display: str = field(default="", compare=False)
    path: Tuple[str, ...] = field(default=(), compare=False)

    @property
    def shown(self) -> str:
        return self.display or self.name


@dataclass(frozen=True)
class TTuple:
    items: Tuple["SemType", ...]


@dataclass(frozen=True)
class TArrow:
    dom: "SemType"
    cod: "SemType"


@dataclass(frozen=True)
class TRecord:
    """Record type; ``fields`` is sorted by label.  ``order`` remembers the
    label order of the first source occurrence."""

    fields: Tuple[Tuple[str, "SemType"], ...]
    order: Tuple[str, ...] = field(default=(), compare=False)

    @staticmethod
    def make(pairs, order=None) -> "TRecord":
        pairs = list(pairs)
        labels = [l for l, _ in pairs]
        if len(set(labels)) != len(labels):
            raise ElabError("duplicate record label")
        return TRecord(tuple(sorted(pairs, key=lambda p: _label_key(p[0]))), tuple(order or labels))

    def labels(self) -> Tuple[str, ...]:
        return tuple(l for l, _ in self.fields)

    def field_type(self, label: str) -> "SemType":
        for l, t in self.fields:
            if l == label:
                return t
        raise KeyError(label)

    def source_order(self) -> Tuple[str, ...]:
        labels = self.labels()
        if self.order and sorted(self.order) == sorted(labels):
            return self.order
        return labels


@dataclass(frozen=True)
class TAbbrev:
    """A type abbreviation kept by name; unifies as its expansion."""

    name: str
    args: Tuple["SemType", ...]
    expansion: "SemType"
    path: Tuple[str, ...] = field(default=(), compare=False)


SemType = object  # TVar | TCon | TTuple | TArrow | TRecord | TAbbrev


def _label_key(label: str):
    return (0, int(label), "") if label.isdigit() else (1, 0, label)


INT = TCon("int")
REAL = TCon("real")
STRING = TCon("string")
CHAR = TCon("char")
BOOL = TCon("bool")
UNIT = TCon("unit")


def list_of(t) -> TCon:
    return TCon("list", (t,))


def option_of(t) -> TCon:
    return TCon("option", (t,))


@dataclass(frozen=True)
class TypeScheme:
    quantified: Tuple[str, ...]
    body: object

    def __post_init__(self):
        free = free_vars(self.body)
        if not set(self.quantified) <= free:
            raise ValueError("quantified variables must occur free in the body")


def mono(t) -> TypeScheme:
    return TypeScheme((), t)


# ---------------------------------------------------------------- substitution

Subst = Dict[str, object]


def walk(t, s: Subst):
    while isinstance(t, TVar) and t.name in s:
        t = s[t.name]
    return t


def expand(t, s: Subst):
    """Resolve variables and abbreviations at the head."""
    t = walk(t, s)
    while isinstance(t, TAbbrev):
        t = walk(t.expansion, s)
    return t


def apply(t, s: Subst):
    """Fully apply a (triangular) substitution."""
    t = walk(t, s)
    if isinstance(t, TVar):
        return t
    if isinstance(t, TCon):
        if not t.args:
            return t
        return TCon(t.name, tuple(apply(a, s) for a in t.args), t.display, t.path)
    if isinstance(t, TTuple):
        return TTuple(tuple(apply(a, s) for a in t.items))
    if isinstance(t, TArrow):
        return TArrow(apply(t.dom, s), apply(t.cod, s))
    if isinstance(t, TRecord):
        return TRecord(tuple((l, apply(x, s)) for l, x in t.fields), t.order)
    if isinstance(t, TAbbrev):
        return TAbbrev(t.name, tuple(apply(a, s) for a in t.args), apply(t.expansion, s), t.path)
    raise TypeError(t)


def subterms(t) -> Iterator:
    yield t
    if isinstance(t, TCon):
        for a in t.args:
            yield from subterms(a)
    elif isinstance(t, TTuple):
        for a in t.items:
            yield from subterms(a)
    elif isinstance(t, TArrow):
        yield from subterms(t.dom)
        yield from subterms(t.cod)
    elif isinstance(t, TRecord):
        for _, a in t.fields:
            yield from subterms(a)
    elif isinstance(t, TAbbrev):
        for a in t.args:
            yield from subterms(a)
        yield from subterms(t.expansion)


def free_vars_ordered(t, s: Optional[Subst] = None) -> List[str]:
    """Free type variables in left-to-right order of first occurrence.

    Abbreviations contribute the variables of their arguments first.
    """
    out: List[str] = []
    seen = set()

    def go(x):
        x = walk(x, s) if s else x
        if isinstance(x, TVar):
            if x.name not in seen:
                seen.add(x.name)
                out.append(x.name)
        elif isinstance(x, TCon):
            for a in x.args:
                go(a)
        elif isinstance(x, TTuple):
            for a in x.items:
                go(a)
        elif isinstance(x, TArrow):
            go(x.dom)
            go(x.cod)
        elif isinstance(x, TRecord):
            for _, a in x.fields:
                go(a)
        elif isinstance(x, TAbbrev):
            for a in x.args:
                go(a)
            go(x.expansion)

    go(t)
    return out


def free_vars(t, s: Optional[Subst] = None) -> FrozenSet[str]:
    return frozenset(free_vars_ordered(t, s))


def rename(t, mapping: Dict[str, object]):
    """Substitute variables simultaneously (no chasing)."""
    if isinstance(t, TVar):
        return mapping.get(t.name, t)
    if isinstance(t, TCon):
        return TCon(t.name, tuple(rename(a, mapping) for a in t.args), t.display, t.path) if t.args else t
    if isinstance(t, TTuple):
        return TTuple(tuple(rename(a, mapping) for a in t.items))
    if isinstance(t, TArrow):
        return TArrow(rename(t.dom, mapping), rename(t.cod, mapping))
    if isinstance(t, TRecord):
        return TRecord(tuple((l, rename(x, mapping)) for l, x in t.fields), t.order)
    if isinstance(t, TAbbrev):
        return TAbbrev(t.name, tuple(rename(a, mapping) for a in t.args), rename(t.expansion, mapping), t.path)
    raise TypeError(t)


# ---------------------------------------------------------------- unification


class UnifyError(ElabError):
    pass


def occurs(name: str, t, s: Subst) -> bool:
    t = walk(t, s)
    if isinstance(t, TVar):
        return t.name == name
    if isinstance(t, TCon):
        return any(occurs(name, a, s) for a in t.args)
    if isinstance(t, TTuple):
        return any(occurs(name, a, s) for a in t.items)
    if isinstance(t, TArrow):
        return occurs(name, t.dom, s) or occurs(name, t.cod, s)
    if isinstance(t, TRecord):
        return any(occurs(name, a, s) for _, a in t.fields)
    if isinstance(t, TAbbrev):
        return occurs(name, t.expansion, s)
    return False


def _bind(v: TVar, t, s: Subst, rigid: FrozenSet[str]) -> None:
    if isinstance(t, TVar) and t.name == v.name:
        return
    if v.name in rigid:
        if isinstance(t, TVar) and t.name not in rigid:
            _bind(t, v, s, rigid)
            return
        raise UnifyError(f"type variable {v.name} is too general to match {show(apply(t, s))}")
    if occurs(v.name, t, s):
        raise UnifyError(f"circular type: {v.name} occurs in {show(apply(t, s))}")
    s[v.name] = t


def unify_in_place(a, b, s: Subst, rigid: FrozenSet[str] = frozenset()) -> None:
    a = walk(a, s)
    b = walk(b, s)
    if isinstance(a, TVar) or isinstance(b, TVar):
        if isinstance(a, TVar) and isinstance(b, TVar):
            if a.name == b.name:
                return
            # keep explicit (user-written) names as representatives
            if a.explicit and not b.explicit:
                a, b = b, a
            if a.name in rigid and b.name not in rigid:
                a, b = b, a
            _bind(a, b, s, rigid)
            return
        if isinstance(a, TVar):
            _bind(a, b, s, rigid)
        else:
            _bind(b, a, s, rigid)
        return
    if isinstance(a, TAbbrev) and isinstance(b, TAbbrev) and a.name == b.name and len(a.args) == len(b.args):
        for x, y in zip(a.args, b.args):
            unify_in_place(x, y, s, rigid)
        return
    if isinstance(a, TAbbrev):
        unify_in_place(a.expansion, b, s, rigid)
        return
    if isinstance(b, TAbbrev):
        unify_in_place(a, b.expansion, s, rigid)
        return
    if isinstance(a, TCon) and isinstance(b, TCon):
        if a.name != b.name or len(a.args) != len(b.args):
            raise UnifyError(f"type clash: {show(apply(a, s))} vs {show(apply(b, s))}")
        for x, y in zip(a.args, b.args):
            unify_in_place(x, y, s, rigid)
        return
    if isinstance(a, TTuple) and isinstance(b, TTuple):
        if len(a.items) != len(b.items):
            raise UnifyError(f"tuple arity mismatch: {show(apply(a, s))} vs {show(apply(b, s))}")
        for x, y in zip(a.items, b.items):
            unify_in_place(x, y, s, rigid)
        return
    if isinstance(a, TArrow) and isinstance(b, TArrow):
        unify_in_place(a.dom, b.dom, s, rigid)
        unify_in_place(a.cod, b.cod, s, rigid)
        return
    if isinstance(a, TRecord) and isinstance(b, TRecord):
        if a.labels() != b.labels():
            raise UnifyError(
                "record label mismatch: {%s} vs {%s}" % (", ".join(a.labels()), ", ".join(b.labels()))
            )
        for (_, x), (_, y) in zip(a.fields, b.fields):
            unify_in_place(x, y, s, rigid)
        return
    raise UnifyError(f"type clash: {show(apply(a, s))} vs {show(apply(b, s))}")


def unify(a, b, subst: Optional[Subst] = None) -> Subst:
    """Most general unifier extending ``subst``; the input is not modified."""
    s = dict(subst or {})
    unify_in_place(a, b, s)
    return s


def match_one_way(pattern, target, bindings: Optional[Dict[str, object]] = None) -> Optional[Dict[str, object]]:
    """Bindings for the variables of ``pattern`` making it equal to ``target``
    (target variables are treated as constants), or None."""
    b = dict(bindings or {})

    def go(p, t) -> bool:
        while isinstance(p, TAbbrev):
            p = p.expansion
        while isinstance(t, TAbbrev):
            t = t.expansion
        if isinstance(p, TVar):
            if p.name in b:
                return b[p.name] == t
            b[p.name] = t
            return True
        if type(p) is not type(t):
            return False
        if isinstance(p, TCon):
            return p.name == t.name and len(p.args) == len(t.args) and all(map(go, p.args, t.args))
        if isinstance(p, TTuple):
            return len(p.items) == len(t.items) and all(map(go, p.items, t.items))
        if isinstance(p, TArrow):
            return go(p.dom, t.dom) and go(p.cod, t.cod)
        if isinstance(p, TRecord):
            return p.labels() == t.labels() and all(go(x, y) for (_, x), (_, y) in zip(p.fields, t.fields))
        return False

    return b if go(pattern, target) else None


# ---------------------------------------------------------------- printing


def show(t, names: Optional[Dict[str, str]] = None) -> str:
    """SML-style rendering."""

    def atom(x):
        r = go(x)
        return f"({r})" if isinstance(x, (TArrow, TTuple)) else r

    def go(x):
        if isinstance(x, TVar):
            return names.get(x.name, x.name) if names else x.name
        if isinstance(x, TCon):
            if not x.args:
                return x.shown
            if len(x.args) == 1:
                return f"{atom(x.args[0])} {x.shown}"
            return "(" + ", ".join(go(a) for a in x.args) + f") {x.shown}"
        if isinstance(x, TAbbrev):
            if not x.args:
                return x.name
            if len(x.args) == 1:
                return f"{atom(x.args[0])} {x.name}"
            return "(" + ", ".join(go(a) for a in x.args) + f") {x.name}"
        if isinstance(x, TTuple):
            return " * ".join(atom(a) for a in x.items)
        if isinstance(x, TArrow):
            d = go(x.dom)
            if isinstance(x.dom, TArrow):
                d = f"({d})"
            return f"{d} -> {go(x.cod)}"
        if isinstance(x, TRecord):
            return "{" + ", ".join(f"{l}: {go(a)}" for l, a in x.fields) + "}"
        raise TypeError(x)

    return go(t)
