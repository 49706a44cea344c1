"""Brute-force reference implementations used to check the pattern engine.

Nothing here calls into ``mlgallina.patterns``: types, values and matching
are re-implemented directly on source patterns.
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import List, Sequence, Tuple

from mlgallina.elaborator.types import BOOL, INT, TTuple, list_of, option_of
from mlgallina.frontend import syntax as S

# Oracle types: ("bool",), ("int",), ("option", t), ("list", t), ("pair", a, b)
BOOL_T = ("bool",)
INT_T = ("int",)


def opt(t):
    return ("option", t)


def lst(t):
    return ("list", t)


def pair(a, b):
    return ("pair", a, b)


def to_sem(t):
    kind = t[0]
    if kind == "bool":
        return BOOL
    if kind == "int":
        return INT
    if kind == "option":
        return option_of(to_sem(t[1]))
    if kind == "list":
        return list_of(to_sem(t[1]))
    return TTuple((to_sem(t[1]), to_sem(t[2])))


@lru_cache(maxsize=None)
def values(t, max_len: int = 4, ints: Tuple[int, ...] = (0, 1)) -> Tuple:
    """Every value of ``t``; lists as Python tuples tagged "L", options as
    ("NONE",) / ("SOME", v), pairs as ("P", a, b)."""
    kind = t[0]
    if kind == "bool":
        return (True, False)
    if kind == "int":
        return ints
    if kind == "option":
        return (("NONE",),) + tuple(("SOME", v) for v in values(t[1], max_len, ints))
    if kind == "list":
        elems = values(t[1], max_len, ints)
        out = []
        for n in range(max_len + 1):
            out.extend(("L",) + combo for combo in itertools.product(elems, repeat=n))
        return tuple(out)
    return tuple(("P", a, b) for a in values(t[1], max_len, ints) for b in values(t[2], max_len, ints))


def matches(p, v) -> bool:
    """Does source pattern ``p`` match oracle value ``v``?"""
    if isinstance(p, (S.PWild,)):
        return True
    if isinstance(p, S.PTyped):
        return matches(p.pat, v)
    if isinstance(p, S.PLayered):
        return matches(p.pat, v)
    if isinstance(p, S.PVar):
        if p.name == "true" and p.con:
            return v is True
        if p.name == "false" and p.con:
            return v is False
        if p.name == "NONE" and p.con:
            return v == ("NONE",)
        if p.name == "nil" and p.con:
            return v == ("L",)
        return True
    if isinstance(p, S.PInt):
        return v == p.value
    if isinstance(p, S.PConApp) and p.name == "SOME":
        return isinstance(v, tuple) and v[0] == "SOME" and matches(p.arg, v[1])
    if isinstance(p, S.PInfix) and p.op == "::":
        return isinstance(v, tuple) and v[0] == "L" and len(v) > 1 and matches(p.lhs, v[1]) and matches(p.rhs, ("L",) + v[2:])
    if isinstance(p, S.PList):
        return isinstance(v, tuple) and v[0] == "L" and len(v) - 1 == len(p.items) and all(
            matches(q, x) for q, x in zip(p.items, v[1:])
        )
    if isinstance(p, S.PTuple):
        return v[0] == "P" and matches(p.items[0], v[1]) and matches(p.items[1], v[2])
    raise TypeError(p)


def brute_exhaustive(rows: Sequence[Sequence], tys: Sequence, max_len: int = 4) -> bool:
    """Every value vector is matched by some row."""
    for vec in itertools.product(*(values(t, max_len) for t in tys)):
        if not any(all(matches(p, v) for p, v in zip(r, vec)) for r in rows):
            return False
    return True


def first_match(rows, vec):
    for i, r in enumerate(rows):
        if all(matches(p, v) for p, v in zip(r, vec)):
            return i
    return None


# ---------------------------------------------------------------- generators


def con(name):
    return S.PVar(name, con=True)


def random_pattern(rng: random.Random, t, depth: int = 3, names=None):
    """A random well-typed pattern of type ``t``; list patterns nest at most
    ``depth`` conses."""
    names = names if names is not None else itertools.count()
    r = rng.random()
    if r < 0.2:
        return S.PWild()
    if r < 0.3:
        return S.PVar(f"v{next(names)}")
    kind = t[0]
    if kind == "bool":
        return con(rng.choice(["true", "false"]))
    if kind == "int":
        return S.PInt(rng.choice([0, 1]))
    if kind == "option":
        if rng.random() < 0.4:
            return con("NONE")
        return S.PConApp("SOME", random_pattern(rng, t[1], depth, names))
    if kind == "list":
        if depth == 0 or rng.random() < 0.3:
            return con("nil")
        if rng.random() < 0.25:
            n = rng.randint(1, depth)
            return S.PList([random_pattern(rng, t[1], depth - 1, names) for _ in range(n)])
        return S.PInfix("::", random_pattern(rng, t[1], depth - 1, names), random_pattern(rng, t, depth - 1, names))
    return S.PTuple([random_pattern(rng, t[1], depth, names), random_pattern(rng, t[2], depth, names)])


BASE_TYPES = [BOOL_T, opt(BOOL_T), lst(BOOL_T)]
ORACLE_TYPES = BASE_TYPES + [pair(a, b) for a in BASE_TYPES for b in BASE_TYPES]


def random_matrix(rng: random.Random) -> Tuple[List[List], List]:
    """1 to 3 rows over one or two columns drawn from ``ORACLE_TYPES``."""
    width = rng.choice([1, 1, 2])
    tys = [rng.choice(ORACLE_TYPES if width == 1 else BASE_TYPES) for _ in range(width)]
    rows = [[random_pattern(rng, t) for t in tys] for _ in range(rng.randint(1, 3))]
    return rows, tys


class MaskCache:
    """Match sets as bitmasks over the enumerated values, keyed by pattern text."""

    def __init__(self, max_len: int = 4):
        self.max_len = max_len
        self.cache = {}

    def mask(self, p, t) -> int:
        key = (repr(p), t)
        m = self.cache.get(key)
        if m is None:
            m = 0
            for i, v in enumerate(values(t, self.max_len)):
                if matches(p, v):
                    m |= 1 << i
            self.cache[key] = m
        return m

    def exhaustive(self, rows, tys) -> bool:
        if len(tys) == 1:
            full = (1 << len(values(tys[0], self.max_len))) - 1
            acc = 0
            for r in rows:
                acc |= self.mask(r[0], tys[0])
            return acc == full
        return brute_exhaustive(rows, tys, self.max_len)
