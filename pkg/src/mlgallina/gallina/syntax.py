"""Gallina AST produced by the translator.

Terms, patterns and sentences are plain dataclasses compared
structurally; the re-parse checker relies on that equality.  Type-level
terms share the term classes (``GArrow``, ``GProduct``, ``GExplicitApp``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

# ------------------------------------------------------------------ terms


@dataclass(frozen=True)
class GIdent:
    name: str


@dataclass(frozen=True)
class GQualIdent:
    path: Tuple[str, ...]
    name: str

    @property
    def dotted(self) -> str:
        return ".".join(self.path + (self.name,))


@dataclass(frozen=True)
class GSort:
    name: str = "Type"


@dataclass(frozen=True)
class GInt:
    value: int


@dataclass(frozen=True)
class GReal:
    text: str  # decimal text, may start with '-'


@dataclass(frozen=True)
class GString:
    value: str


@dataclass(frozen=True)
class GChar:
    value: str


@dataclass(frozen=True)
class GUnit:
    pass


@dataclass(frozen=True)
class GTuple:
    items: Tuple["GTerm", ...]


@dataclass(frozen=True)
class GList:
    items: Tuple["GTerm", ...]


@dataclass(frozen=True)
class GApp:
    fn: "GTerm"
    args: Tuple["GTerm", ...]


@dataclass(frozen=True)
class GExplicitApp:
    """``@name a b``: application with implicit arguments made explicit."""

    name: str
    args: Tuple["GTerm", ...]


@dataclass(frozen=True)
class GArrow:
    dom: "GTerm"
    cod: "GTerm"


@dataclass(frozen=True)
class GProduct:
    items: Tuple["GTerm", ...]


@dataclass(frozen=True)
class GFun:
    binders: Tuple["GPattern", ...]
    body: "GTerm"


@dataclass(frozen=True)
class GLet:
    pat: "GPattern"
    value: "GTerm"
    body: "GTerm"


@dataclass(frozen=True)
class GMatch:
    scrutinee: "GTerm"
    branches: Tuple[Tuple["GPattern", "GTerm"], ...]
    exhaustive: bool = True


@dataclass(frozen=True)
class GIf:
    cond: "GTerm"
    then: "GTerm"
    else_: "GTerm"


@dataclass(frozen=True)
class GRecordLit:
    fields: Tuple[Tuple[str, "GTerm"], ...]


@dataclass(frozen=True)
class GAnnot:
    term: "GTerm"
    type: "GTerm"


@dataclass(frozen=True)
class GBinder:
    name: str
    type: Optional["GTerm"] = None
    implicit: bool = False


@dataclass(frozen=True)
class GForall:
    binders: Tuple[GBinder, ...]
    body: "GTerm"


@dataclass(frozen=True)
class GExists:
    names: Tuple[str, ...]
    body: "GTerm"


@dataclass(frozen=True)
class GAnd:
    lhs: "GTerm"
    rhs: "GTerm"


@dataclass(frozen=True)
class GOr:
    lhs: "GTerm"
    rhs: "GTerm"


@dataclass(frozen=True)
class GEq:
    """Propositional equality; ``prefix`` selects the ``eq (l) (r)`` spelling."""

    lhs: "GTerm"
    rhs: "GTerm"
    prefix: bool = False


@dataclass(frozen=True)
class GBoolAnd:
    lhs: "GTerm"
    rhs: "GTerm"


@dataclass(frozen=True)
class GBoolOr:
    lhs: "GTerm"
    rhs: "GTerm"


@dataclass(frozen=True)
class GInfix:
    op: str
    lhs: "GTerm"
    rhs: "GTerm"


@dataclass(frozen=True)
class GScope:
    term: "GTerm"
    key: str


HOLE = GIdent("_")

GTerm = Union[
    GIdent, GQualIdent, GSort, GInt, GReal, GString, GChar, GUnit, GTuple, GList,
    GApp, GExplicitApp, GArrow, GProduct, GFun, GLet, GMatch, GIf, GRecordLit,
    GAnnot, GForall, GExists, GAnd, GOr, GEq, GBoolAnd, GBoolOr, GInfix, GScope,
]

# --------------------------------------------------------------- patterns


@dataclass(frozen=True)
class GPWild:
    pass


@dataclass(frozen=True)
class GPVar:
    name: str


@dataclass(frozen=True)
class GPCon:
    name: str
    args: Tuple["GPattern", ...] = ()


@dataclass(frozen=True)
class GPInt:
    value: int


@dataclass(frozen=True)
class GPString:
    value: str


@dataclass(frozen=True)
class GPChar:
    value: str


@dataclass(frozen=True)
class GPUnit:
    pass


@dataclass(frozen=True)
class GPTuple:
    items: Tuple["GPattern", ...]


@dataclass(frozen=True)
class GPList:
    items: Tuple["GPattern", ...]


@dataclass(frozen=True)
class GPInfix:
    op: str
    lhs: "GPattern"
    rhs: "GPattern"


@dataclass(frozen=True)
class GPRecord:
    fields: Tuple[Tuple[str, "GPattern"], ...]


@dataclass(frozen=True)
class GPAs:
    pat: "GPattern"
    name: str


GPattern = Union[GPWild, GPVar, GPCon, GPInt, GPString, GPChar, GPUnit, GPTuple, GPList, GPInfix, GPRecord, GPAs]

# -------------------------------------------------------------- sentences


@dataclass
class GRequire:
    modules: List[str]
    source: Optional[str] = None  # ``From <source> Require Import ...``


@dataclass
class GGeneralizable:
    pass


@dataclass
class GDefinition:
    name: str
    body: GTerm
    implicits: List[str] = field(default_factory=list)
    params: List[Tuple[str, GTerm]] = field(default_factory=list)
    ret: Optional[GTerm] = None


@dataclass
class GEqBinder:
    name: str
    type: GTerm
    generalized: bool = False


@dataclass
class GEquations:
    name: str
    binders: List[GEqBinder]
    ret: GTerm
    clauses: List[Tuple[Tuple[GPattern, ...], GTerm]]
    precondition: Optional[GTerm] = None
    companions: List["GEquations"] = field(default_factory=list)


@dataclass
class GInductive:
    name: str
    params: List[str]
    constructors: List[Tuple[str, Optional[GTerm]]]
    companions: List["GInductive"] = field(default_factory=list)


@dataclass
class GRecordDecl:
    name: str
    params: List[str]
    fields: List[Tuple[str, GTerm]]


@dataclass
class GTheorem:
    name: str
    statement: GTerm


@dataclass
class GAxiom:
    name: str
    statement: GTerm
    local: bool = False


@dataclass
class GNotation:
    symbol: str
    body: GTerm
    level: int
    assoc: str = "left"


@dataclass
class GModule:
    name: str
    body: Optional[List["GSentence"]] = None
    ascription: Optional[str] = None
    params: List[Tuple[str, str]] = field(default_factory=list)
    functor: Optional[str] = None  # ``Module N := !functor arg``
    argument: Optional[str] = None
    opaque: bool = field(default=False, compare=False)


@dataclass
class GModuleType:
    name: str
    body: List["GSentence"]


@dataclass
class GParameter:
    name: str
    type: GTerm


@dataclass
class GDeclareModule:
    name: str
    type: str


@dataclass
class GInclude:
    name: str


GSentence = Union[
    GRequire, GGeneralizable, GDefinition, GEquations, GInductive, GRecordDecl, GTheorem,
    GAxiom, GNotation, GModule, GModuleType, GParameter, GDeclareModule, GInclude,
]


def sentence_names(s) -> List[str]:
    """Names a sentence defines at its own level."""
    if isinstance(s, GDefinition):
        return [s.name]
    if isinstance(s, GEquations):
        return [s.name] + [c.name for c in s.companions]
    if isinstance(s, GInductive):
        out = []
        for ind in [s] + list(s.companions):
            out.append(ind.name)
            out.extend(c for c, _ in ind.constructors)
        return out
    if isinstance(s, GRecordDecl):
        return [s.name] + [f for f, _ in s.fields]
    if isinstance(s, (GTheorem, GAxiom, GParameter)):
        return [s.name]
    if isinstance(s, (GModule, GModuleType, GDeclareModule)):
        return [s.name]
    return []
