"""Source AST for the SML subset.

Derived forms (tuples, lists, ``if``, ``case``, ``andalso``/``orelse``,
infix applications, ``fun``) are kept as their own node classes.  Nodes
carry annotation slots (``ty``, ``exhaustive``, ...) that the elaborator
fills in; those slots and the spans are excluded from equality so two
parses of the same text compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, List, Optional, Tuple

Span = Optional[Tuple[int, int]]


def _span():
    return field(default=None, compare=False, repr=False)


def _note(default=None):
    return field(default=default, compare=False, repr=False)


# ---------------------------------------------------------------- types


@dataclass
class TyVar:
    name: str
    span: Span = _span()


@dataclass
class TyCon:
    name: str
    args: List[Any] = field(default_factory=list)
    span: Span = _span()


@dataclass
class TyTuple:
    items: List[Any]
    span: Span = _span()


@dataclass
class TyArrow:
    dom: Any
    cod: Any
    span: Span = _span()


@dataclass
class TyRecord:
    fields: List[Tuple[str, Any]]
    span: Span = _span()


# ---------------------------------------------------------------- patterns


@dataclass
class PWild:
    span: Span = _span()
    ty: Any = _note()


@dataclass
class PVar:
    """Variable or nullary constructor; the elaborator sets ``con``."""

    name: str
    op: bool = False
    span: Span = _span()
    ty: Any = _note()
    con: bool = _note(False)
    basis: bool = _note(False)


@dataclass
class PInt:
    value: int
    span: Span = _span()
    ty: Any = _note()


@dataclass
class PReal:
    text: str
    span: Span = _span()
    ty: Any = _note()


@dataclass
class PString:
    value: str
    span: Span = _span()
    ty: Any = _note()


@dataclass
class PChar:
    value: str
    span: Span = _span()
    ty: Any = _note()


@dataclass
class PUnit:
    span: Span = _span()
    ty: Any = _note()


@dataclass
class PTuple:
    items: List[Any]
    span: Span = _span()
    ty: Any = _note()


@dataclass
class PList:
    items: List[Any]
    span: Span = _span()
    ty: Any = _note()


@dataclass
class PRecord:
    fields: List[Tuple[str, Any]]
    ellipsis: bool = False
    span: Span = _span()
    ty: Any = _note()


@dataclass
class PConApp:
    name: str
    arg: Any
    op: bool = False
    span: Span = _span()
    ty: Any = _note()


@dataclass
class PInfix:
    op: str
    lhs: Any
    rhs: Any
    span: Span = _span()
    ty: Any = _note()


@dataclass
class PTyped:
    pat: Any
    tyann: Any
    span: Span = _span()
    ty: Any = _note()


@dataclass
class PLayered:
    name: str
    pat: Any
    tyann: Any = None
    span: Span = _span()
    ty: Any = _note()


# ---------------------------------------------------------------- expressions


@dataclass
class EVar:
    """Long value identifier; ``con`` and ``basis`` are set by the elaborator."""

    name: str
    op: bool = False
    span: Span = _span()
    ty: Any = _note()
    con: bool = _note(False)
    basis: bool = _note(False)


@dataclass
class EInt:
    value: int
    span: Span = _span()
    ty: Any = _note()


@dataclass
class EReal:
    text: str
    span: Span = _span()
    ty: Any = _note()


@dataclass
class EString:
    value: str
    span: Span = _span()
    ty: Any = _note()


@dataclass
class EChar:
    value: str
    span: Span = _span()
    ty: Any = _note()


@dataclass
class EUnit:
    span: Span = _span()
    ty: Any = _note()


@dataclass
class ETuple:
    items: List[Any]
    span: Span = _span()
    ty: Any = _note()


@dataclass
class EList:
    items: List[Any]
    span: Span = _span()
    ty: Any = _note()


@dataclass
class ERecord:
    fields: List[Tuple[str, Any]]
    span: Span = _span()
    ty: Any = _note()


@dataclass
class ESelector:
    label: str
    span: Span = _span()
    ty: Any = _note()


@dataclass
class EApp:
    fn: Any
    arg: Any
    span: Span = _span()
    ty: Any = _note()


@dataclass
class EInfix:
    op: str
    lhs: Any
    rhs: Any
    span: Span = _span()
    ty: Any = _note()
    con: bool = _note(False)
    basis: bool = _note(False)


@dataclass
class Rule:
    pat: Any
    body: Any
    span: Span = _span()


@dataclass
class EFn:
    rules: List[Rule]
    span: Span = _span()
    ty: Any = _note()
    exhaustive: bool = _note(True)


@dataclass
class ECase:
    scrutinee: Any
    rules: List[Rule]
    span: Span = _span()
    ty: Any = _note()
    exhaustive: bool = _note(True)


@dataclass
class EIf:
    cond: Any
    then: Any
    else_: Any
    span: Span = _span()
    ty: Any = _note()


@dataclass
class EAndalso:
    lhs: Any
    rhs: Any
    span: Span = _span()
    ty: Any = _note()


@dataclass
class EOrelse:
    lhs: Any
    rhs: Any
    span: Span = _span()
    ty: Any = _note()


@dataclass
class ELet:
    decls: List[Any]
    body: Any
    span: Span = _span()
    ty: Any = _note()


@dataclass
class ETyped:
    exp: Any
    tyann: Any
    span: Span = _span()
    ty: Any = _note()


# ---------------------------------------------------------------- contracts


@dataclass
class Contract:
    fname: str
    inputs: List[Any]
    output: Any
    requires: Any
    ensures: Any
    span: Span = _span()


# ---------------------------------------------------------------- declarations


@dataclass
class ValBind:
    pat: Any
    exp: Any
    span: Span = _span()
    exhaustive: bool = _note(True)
    schemes: Any = _note()  # name -> TypeScheme


@dataclass
class DVal:
    binds: List[ValBind]
    rec: bool = False
    tyvars: List[str] = field(default_factory=list)
    span: Span = _span()


@dataclass
class Clause:
    pats: List[Any]
    ret: Any
    body: Any
    span: Span = _span()


@dataclass
class FunBind:
    name: str
    clauses: List[Clause]
    op: bool = False
    span: Span = _span()
    exhaustive: bool = _note(True)
    scheme: Any = _note()
    ty: Any = _note()
    fixity: Any = _note()


@dataclass
class DFun:
    binds: List[FunBind]
    tyvars: List[str] = field(default_factory=list)
    contract: Optional[Contract] = None
    span: Span = _span()
    elab_contract: Any = _note()


@dataclass
class ConBind:
    name: str
    arg: Any = None
    span: Span = _span()


@dataclass
class DatBind:
    tyvars: List[str]
    name: str
    cons: List[ConBind]
    span: Span = _span()
    info: Any = _note()


@dataclass
class DDatatype:
    binds: List[DatBind]
    span: Span = _span()


@dataclass
class TypBind:
    tyvars: List[str]
    name: str
    ty: Any
    span: Span = _span()
    sem: Any = _note()


@dataclass
class DType:
    binds: List[TypBind]
    span: Span = _span()


@dataclass
class DInfix:
    kind: str  # infix | infixr | nonfix
    prec: Optional[int]
    ids: List[str]
    span: Span = _span()


@dataclass
class DLocal:
    inner: List[Any]
    outer: List[Any]
    span: Span = _span()


# ---------------------------------------------------------------- modules


@dataclass
class StrStruct:
    decls: List[Any]
    span: Span = _span()


@dataclass
class StrVar:
    name: str
    span: Span = _span()


@dataclass
class StrApp:
    functor: str
    arg: Any
    span: Span = _span()


@dataclass
class StrConstraint:
    str: Any
    sig: Any
    opaque: bool = False
    span: Span = _span()


@dataclass
class SigSig:
    specs: List[Any]
    span: Span = _span()


@dataclass
class SigVar:
    name: str
    span: Span = _span()


@dataclass
class SpecVal:
    name: str
    ty: Any
    span: Span = _span()
    sem: Any = _note()


@dataclass
class SpecType:
    tyvars: List[str]
    name: str
    ty: Any = None
    eq: bool = False
    span: Span = _span()
    sem: Any = _note()


@dataclass
class SpecDatatype:
    binds: List[DatBind]
    span: Span = _span()


@dataclass
class SpecStructure:
    name: str
    sig: Any
    span: Span = _span()


@dataclass
class SpecInclude:
    sig: Any
    span: Span = _span()


@dataclass
class StrBind:
    name: str
    sig: Any
    opaque: bool
    str: Any
    span: Span = _span()


@dataclass
class DStructure:
    binds: List[StrBind]
    span: Span = _span()


@dataclass
class SigBind:
    name: str
    sig: Any
    span: Span = _span()


@dataclass
class DSignature:
    binds: List[SigBind]
    span: Span = _span()


@dataclass
class FctBind:
    name: str
    param: str
    param_sig: Any
    sig: Any
    opaque: bool
    body: Any
    span: Span = _span()


@dataclass
class DFunctor:
    binds: List[FctBind]
    span: Span = _span()


EXP_TYPES = (
    EVar, EInt, EReal, EString, EChar, EUnit, ETuple, EList, ERecord, ESelector,
    EApp, EInfix, EFn, ECase, EIf, EAndalso, EOrelse, ELet, ETyped,
)
PAT_TYPES = (
    PWild, PVar, PInt, PReal, PString, PChar, PUnit, PTuple, PList, PRecord,
    PConApp, PInfix, PTyped, PLayered,
)
