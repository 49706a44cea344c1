"""The supported slice of the SML basis library.

One table drives three consumers: the elaborator (types), the evaluator
(Python implementations) and the translator/shim validator (Coq names).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Optional


class SMLRaise(Exception):
    """An SML exception escaping from a basis function."""

    def __init__(self, exn: str):
        super().__init__(exn)
        self.exn = exn


class SList(tuple):
    """SML list value."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "SList(" + tuple.__repr__(self) + ")"


NIL = SList()


@dataclass(frozen=True)
class ConVal:
    name: str
    payload: object = None


NONE = ConVal("NONE")


def SOME(v) -> ConVal:
    return ConVal("SOME", v)


@dataclass(frozen=True)
class Entry:
    name: str
    type: str
    coq: str
    shim: str
    impl: Optional[Callable] = None
    overload: FrozenSet[str] = frozenset()
    equality: bool = False


NUM = frozenset({"int", "real"})
ORD = frozenset({"int", "real", "string", "char"})


def _int_div(a, b):
    if b == 0:
        raise SMLRaise("Div")
    return a // b


def _int_mod(a, b):
    if b == 0:
        raise SMLRaise("Div")
    return a % b


def _hd(ev, l):
    if not l:
        raise SMLRaise("Empty")
    return l[0]


def _tl(ev, l):
    if not l:
        raise SMLRaise("Empty")
    return SList(l[1:])


def _last(ev, l):
    if not l:
        raise SMLRaise("Empty")
    return l[-1]


def _nth(ev, arg):
    l, i = arg
    if i < 0 or i >= len(l):
        raise SMLRaise("Subscript")
    return l[i]


def _take(ev, arg):
    l, i = arg
    if i < 0 or i > len(l):
        raise SMLRaise("Subscript")
    return SList(l[:i])


def _drop(ev, arg):
    l, i = arg
    if i < 0 or i > len(l):
        raise SMLRaise("Subscript")
    return SList(l[i:])


def _valof(ev, o):
    if o.name != "SOME":
        raise SMLRaise("Option")
    return o.payload


def _sub(ev, arg):
    s, i = arg
    if i < 0 or i >= len(s):
        raise SMLRaise("Subscript")
    return s[i]


def _chr(ev, i):
    if not 0 <= i <= 255:
        raise SMLRaise("Chr")
    return chr(i)


def _floor(ev, r):
    if math.isnan(r) or math.isinf(r):
        raise SMLRaise("Domain" if math.isnan(r) else "Overflow")
    return math.floor(r)


def _num2(op):
    def f(ev, arg):
        a, b = arg
        return op(a, b)

    return f


def _real_div(ev, arg):
    a, b = arg
    if b == 0:
        if a == 0 or math.isnan(a):
            return math.nan
        return math.copysign(math.inf, a) * math.copysign(1.0, b)
    return a / b


def _int_to_string(ev, i):
    return f"~{-i}" if i < 0 else str(i)


def _curry2(f):
    return lambda ev, a: (lambda ev2, b: f(ev2, a, b))


def _map(ev, f, l):
    return SList(ev.apply(f, x) for x in l)


def _filter(ev, f, l):
    return SList(x for x in l if ev.apply(f, x))


def _exists(ev, f, l):
    return any(ev.apply(f, x) for x in l)


def _all(ev, f, l):
    return all(ev.apply(f, x) for x in l)


def _foldl(ev, f):
    def with_init(ev2, init):
        def with_list(ev3, l):
            acc = init
            for x in l:
                acc = ev3.apply(f, (x, acc))
            return acc

        return with_list

    return with_init


def _foldr(ev, f):
    def with_init(ev2, init):
        def with_list(ev3, l):
            acc = init
            for x in reversed(l):
                acc = ev3.apply(f, (x, acc))
            return acc

        return with_list

    return with_init


def _getopt(ev, arg):
    o, d = arg
    return o.payload if o.name == "SOME" else d


def _opt_map(ev, f, o):
    return SOME(ev.apply(f, o.payload)) if o.name == "SOME" else NONE


def _zip(ev, arg):
    return SList(zip(arg[0], arg[1]))


def _unzip(ev, l):
    return (SList(a for a, _ in l), SList(b for _, b in l))


def _pair_map(ev, f, arg):
    return SList(ev.apply(f, p) for p in zip(arg[0], arg[1]))


def _compose(ev, arg):
    f, g = arg
    return lambda ev2, x: ev2.apply(f, ev2.apply(g, x))


def _abs(ev, x):
    return abs(x)


def _neg(ev, x):
    return -x


_E = Entry
TOPLEVEL = [
    _E("+", "'a * 'a -> 'a", "+", "notationsSml", _num2(lambda a, b: a + b), NUM),
    _E("-", "'a * 'a -> 'a", "-", "notationsSml", _num2(lambda a, b: a - b), NUM),
    _E("*", "'a * 'a -> 'a", "*", "notationsSml", _num2(lambda a, b: a * b), NUM),
    _E("/", "real * real -> real", "/", "realSml", _real_div),
    _E("div", "int * int -> int", "div", "intSml", _num2(_int_div)),
    _E("mod", "int * int -> int", "mod", "intSml", _num2(_int_mod)),
    _E("~", "'a -> 'a", "neg", "notationsSml", _neg, NUM),
    _E("abs", "'a -> 'a", "abs", "notationsSml", _abs, NUM),
    _E("<", "'a * 'a -> bool", "<", "notationsSml", _num2(lambda a, b: a < b), ORD),
    _E(">", "'a * 'a -> bool", ">", "notationsSml", _num2(lambda a, b: a > b), ORD),
    _E("<=", "'a * 'a -> bool", "<=", "notationsSml", _num2(lambda a, b: a <= b), ORD),
    _E(">=", "'a * 'a -> bool", ">=", "notationsSml", _num2(lambda a, b: a >= b), ORD),
    _E("=", "'a * 'a -> bool", "=", "notationsSml", _num2(lambda a, b: a == b), equality=True),
    _E("<>", "'a * 'a -> bool", "<>", "notationsSml", _num2(lambda a, b: a != b), equality=True),
    _E("^", "string * string -> string", "^", "stringSml", _num2(lambda a, b: a + b)),
    _E("@", "'a list * 'a list -> 'a list", "++", "listSml", _num2(lambda a, b: SList(a + b))),
    _E("o", "('b -> 'c) * ('a -> 'b) -> 'a -> 'c", "o", "notationsSml", _compose),
    _E("not", "bool -> bool", "negb", "boolSml", lambda ev, b: not b),
    _E("hd", "'a list -> 'a", "hd", "listSml", _hd),
    _E("tl", "'a list -> 'a list", "tl", "listSml", _tl),
    _E("null", "'a list -> bool", "null", "listSml", lambda ev, l: not l),
    _E("length", "'a list -> int", "length", "listSml", lambda ev, l: len(l)),
    _E("rev", "'a list -> 'a list", "rev", "listSml", lambda ev, l: SList(reversed(l))),
    _E("map", "('a -> 'b) -> 'a list -> 'b list", "map", "listSml", _curry2(_map)),
    _E("foldl", "('a * 'b -> 'b) -> 'b -> 'a list -> 'b", "foldl", "listSml", _foldl),
    _E("foldr", "('a * 'b -> 'b) -> 'b -> 'a list -> 'b", "foldr", "listSml", _foldr),
    _E("size", "string -> int", "size", "stringSml", lambda ev, s: len(s)),
    _E("str", "char -> string", "str", "stringSml", lambda ev, c: c),
    _E("explode", "string -> char list", "explode", "stringSml", lambda ev, s: SList(s)),
    _E("implode", "char list -> string", "implode", "stringSml", lambda ev, l: "".join(l)),
    _E("concat", "string list -> string", "concat", "stringSml", lambda ev, l: "".join(l)),
    _E("ord", "char -> int", "ord", "charSml", lambda ev, c: ord(c)),
    _E("chr", "int -> char", "chr", "charSml", _chr),
    _E("real", "int -> real", "real", "realSml", lambda ev, i: float(i)),
    _E("floor", "real -> int", "floor", "realSml", _floor),
    _E("valOf", "'a option -> 'a", "valOf", "optionSml", _valof),
    _E("isSome", "'a option -> bool", "isSome", "optionSml", lambda ev, o: o.name == "SOME"),
    _E("getOpt", "'a option * 'a -> 'a", "getOpt", "optionSml", _getopt),
]

STRUCTURES: Dict[str, list] = {
    "List": [
        _E("hd", "'a list -> 'a", "List.hd", "listSml", _hd),
        _E("tl", "'a list -> 'a list", "List.tl", "listSml", _tl),
        _E("last", "'a list -> 'a", "List.last", "listSml", _last),
        _E("null", "'a list -> bool", "List.null", "listSml", lambda ev, l: not l),
        _E("length", "'a list -> int", "List.length", "listSml", lambda ev, l: len(l)),
        _E("rev", "'a list -> 'a list", "List.rev", "listSml", lambda ev, l: SList(reversed(l))),
        _E("nth", "'a list * int -> 'a", "List.nth", "listSml", _nth),
        _E("take", "'a list * int -> 'a list", "List.take", "listSml", _take),
        _E("drop", "'a list * int -> 'a list", "List.drop", "listSml", _drop),
        _E("concat", "'a list list -> 'a list", "List.concat", "listSml",
           lambda ev, ls: SList(x for l in ls for x in l)),
        _E("map", "('a -> 'b) -> 'a list -> 'b list", "List.map", "listSml", _curry2(_map)),
        _E("filter", "('a -> bool) -> 'a list -> 'a list", "List.filter", "listSml", _curry2(_filter)),
        _E("exists", "('a -> bool) -> 'a list -> bool", "List.exists_", "listSml", _curry2(_exists)),
        _E("all", "('a -> bool) -> 'a list -> bool", "List.all", "listSml", _curry2(_all)),
        _E("foldl", "('a * 'b -> 'b) -> 'b -> 'a list -> 'b", "List.foldl", "listSml", _foldl),
        _E("foldr", "('a * 'b -> 'b) -> 'b -> 'a list -> 'b", "List.foldr", "listSml", _foldr),
    ],
    "Option": [
        _E("valOf", "'a option -> 'a", "Option.valOf", "optionSml", _valof),
        _E("isSome", "'a option -> bool", "Option.isSome", "optionSml", lambda ev, o: o.name == "SOME"),
        _E("getOpt", "'a option * 'a -> 'a", "Option.getOpt", "optionSml", _getopt),
        _E("map", "('a -> 'b) -> 'a option -> 'b option", "Option.map", "optionSml", _curry2(_opt_map)),
    ],
    "String": [
        _E("size", "string -> int", "String.size", "stringSml", lambda ev, s: len(s)),
        _E("sub", "string * int -> char", "String.sub", "stringSml", _sub),
        _E("concat", "string list -> string", "String.concat", "stringSml", lambda ev, l: "".join(l)),
        _E("explode", "string -> char list", "String.explode", "stringSml", lambda ev, s: SList(s)),
        _E("implode", "char list -> string", "String.implode", "stringSml", lambda ev, l: "".join(l)),
        _E("str", "char -> string", "String.str", "stringSml", lambda ev, c: c),
    ],
    "Int": [
        _E("toString", "int -> string", "Int.toString", "intSml", _int_to_string),
        _E("max", "int * int -> int", "Int.max", "intSml", _num2(max)),
        _E("min", "int * int -> int", "Int.min", "intSml", _num2(min)),
        _E("abs", "int -> int", "Int.abs", "intSml", _abs),
    ],
    "Real": [
        _E("fromInt", "int -> real", "Real.fromInt", "realSml", lambda ev, i: float(i)),
        _E("floor", "real -> int", "Real.floor", "realSml", _floor),
    ],
    "Char": [
        _E("ord", "char -> int", "Char.ord", "charSml", lambda ev, c: ord(c)),
        _E("chr", "int -> char", "Char.chr", "charSml", _chr),
    ],
    "Bool": [
        _E("not", "bool -> bool", "Bool.not", "boolSml", lambda ev, b: not b),
    ],
    "ListPair": [
        _E("zip", "'a list * 'b list -> ('a * 'b) list", "ListPair.zip", "listPairSml", _zip),
        _E("unzip", "('a * 'b) list -> 'a list * 'b list", "ListPair.unzip", "listPairSml", _unzip),
        _E("map", "('a * 'b -> 'c) -> 'a list * 'b list -> 'c list", "ListPair.map", "listPairSml", _curry2(_pair_map)),
    ],
}

# identifiers that belong to effectful SML and are rejected outright
UNSUPPORTED_VALUES = frozenset({"ref", "!", ":=", "print", "before", "ignore"})


def lookup(qualified: str) -> Optional[Entry]:
    if "." in qualified:
        struct, _, name = qualified.rpartition(".")
        for e in STRUCTURES.get(struct, ()):
            if e.name == name:
                return e
        return None
    for e in TOPLEVEL:
        if e.name == qualified:
            return e
    return None


def all_entries():
    yield from TOPLEVEL
    for entries in STRUCTURES.values():
        yield from entries
