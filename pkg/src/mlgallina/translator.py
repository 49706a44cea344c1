"""Annotated SML declarations to Gallina sentences.

The translator owns four pieces of state for one compilation unit:
record declarations (a global part plus the records created by the
declaration being translated), the type variables met in the current
declaration, modules lifted out of inline structure and signature
expressions, and the set of functions that already have an infix
notation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import basis
from .elaborator.types import (
    TAbbrev, TArrow, TCon, TRecord, TTuple, TVar, TypeScheme, expand, free_vars_ordered, match_one_way,
)
from .errors import Diagnostic, TranslationError
from .frontend import syntax as S
from .gallina import syntax as G
from .gallina.names import MODULE, RECORD, FreshNamer
from .gallina.wellformed import well_formed
from .patterns import DatatypeTable, PatternMatrix, collect_vars, synthesize_precondition

PATTERN_FAILURE = "patternFailure"

BUILTIN_TYPES = {"int": "Z", "real": "float", "string": "string", "char": "char", "bool": "bool", "unit": "unit"}
BUILTIN_CON_TERMS = {"true": "true", "false": "false", "NONE": "None", "SOME": "Some"}

COQ_RESERVED = frozenset("""
    as at cofix else end exists exists2 fix for forall fun if IF in let match mod return
    then using where with Type Prop Set SProp Definition Theorem Lemma Inductive Record Module
    Equations Parameter Axiom Notation Require Import Fixpoint Proof Qed Admitted End
""".split())


def coq_ident(name: str) -> str:
    """An SML identifier as a Coq identifier (reserved words get a trailing ``_``)."""
    if name in COQ_RESERVED:
        return name + "_"
    return name


def tyvar_name(name: str) -> str:
    """``'a`` and ``'a#3`` print as ``_a``; inferred ``_'N`` stay as they are."""
    if name.startswith("'"):
        return "_" + name[1:].split("#", 1)[0]
    return name


def _is_symbolic(name: str) -> bool:
    return not (name[:1].isalpha() or name[:1] == "_")


# ---------------------------------------------------------------- contexts


@dataclass
class RecordEntry:
    name: str
    generic: TRecord
    params: List[str]
    path: Tuple[str, ...]


@dataclass
class RecordContext:
    """Records already declared (``global_``) and those created while
    translating the current declaration (``local``)."""

    global_: List[RecordEntry] = field(default_factory=list)
    local: List[RecordEntry] = field(default_factory=list)

    def lookup(self, rec: TRecord) -> Optional[Tuple[RecordEntry, Dict[str, object]]]:
        for entry in self.global_ + self.local:
            if entry.generic.labels() != rec.labels():
                continue
            binding = match_one_way(entry.generic, rec)
            if binding is not None:
                return entry, binding
        return None

    def by_labels(self, labels: Sequence[str]) -> Optional[RecordEntry]:
        for entry in self.global_ + self.local:
            if sorted(entry.generic.labels()) == sorted(labels):
                return entry
        return None

    def flush(self) -> List[RecordEntry]:
        out, self.local = self.local, []
        self.global_.extend(out)
        return out


@dataclass
class TypeVarContext:
    vars: List[str] = field(default_factory=list)

    def add(self, name: str) -> None:
        if name not in self.vars:
            self.vars.append(name)

    def reset(self) -> None:
        self.vars = []


@dataclass
class SigmaContext:
    lifted: List[G.GSentence] = field(default_factory=list)

    def take(self) -> List[G.GSentence]:
        out, self.lifted = self.lifted, []
        return out


@dataclass
class InfixContext:
    declared: set = field(default_factory=set)


# ---------------------------------------------------------------- translator


class Translator:
    def __init__(self, table: Optional[DatatypeTable] = None, namer: Optional[FreshNamer] = None):
        self.table = table or DatatypeTable()
        self.namer = namer or FreshNamer()
        self.records = RecordContext()
        self.tyvars = TypeVarContext()
        self.sigma = SigmaContext()
        self.infix = InfixContext()
        self.path: Tuple[str, ...] = ()
        self.warnings: List[Diagnostic] = []
        self._needs_failure = False
        self._failure_emitted = False

    # ------------------------------------------------------------ program

    def program(self, decls: Sequence) -> List[G.GSentence]:
        out: List[G.GSentence] = []
        for d in decls:
            d = getattr(d, "decl", d)
            self.tyvars.reset()
            sents = self.decl(d)
            if self._needs_failure and not self._failure_emitted:
                out.append(failure_axiom())
                self._failure_emitted = True
            out.extend(sents)
        return out

    def decl(self, d) -> List[G.GSentence]:
        """One declaration at the current module level, preceded by the
        records and lifted modules it created."""
        body = self._decl(d)
        records = [self._record_decl(e) for e in self.records.flush()]
        lifted = self.sigma.take()
        out = lifted + records + body
        self._check(out, d)
        return out

    def _check(self, sents, d) -> None:
        known = {e.name: [f"{e.name}_{l}" for l in e.generic.labels()] for e in self.records.global_}
        for s in sents:
            problems = well_formed(s, known)
            if problems:
                raise TranslationError("; ".join(problems), getattr(d, "span", None))

    def _decl(self, d) -> List[G.GSentence]:
        if isinstance(d, S.DVal):
            return self.val(d)
        if isinstance(d, S.DFun):
            return self.fun(d)
        if isinstance(d, S.DDatatype):
            return [self.datatype(d.binds)]
        if isinstance(d, S.DType):
            return [self.abbreviation(b) for b in d.binds]
        if isinstance(d, S.DInfix):
            return []
        if isinstance(d, S.DLocal):
            out: List[G.GSentence] = []
            for x in list(d.inner) + list(d.outer):
                out.extend(self.decl(x))
            return out
        if isinstance(d, S.DStructure):
            return [self.structure(b) for b in d.binds]
        if isinstance(d, S.DSignature):
            return [G.GModuleType(b.name, self.sig_body(b.sig)) for b in d.binds]
        if isinstance(d, S.DFunctor):
            return [self.functor(b) for b in d.binds]
        raise TranslationError(f"cannot translate {type(d).__name__}", getattr(d, "span", None))

    # ------------------------------------------------------------ types

    def _qualify(self, name: str, path: Tuple[str, ...]) -> str:
        n = 0
        while n < len(path) and n < len(self.path) and path[n] == self.path[n]:
            n += 1
        return ".".join(path[n:] + (name,))

    def type(self, t) -> G.GTerm:
        if isinstance(t, TVar):
            self.tyvars.add(t.name)
            return G.GIdent(tyvar_name(t.name))
        if isinstance(t, TCon):
            if t.name in BUILTIN_TYPES:
                return G.GIdent(BUILTIN_TYPES[t.name])
            if t.name in ("list", "option"):
                return G.GExplicitApp(t.name, (self.type(t.args[0]),))
            return self._applied(self._qualify(t.shown, t.path), t.args)
        if isinstance(t, TAbbrev):
            return self._applied(self._qualify(t.name, t.path), t.args)
        if isinstance(t, TTuple):
            return G.GScope(G.GProduct(tuple(self.type(x) for x in t.items)), "type")
        if isinstance(t, TArrow):
            return G.GArrow(self.type(t.dom), self.type(t.cod))
        if isinstance(t, TRecord):
            entry, binding = self.record(t)
            args = [binding.get(p, TVar(p)) for p in entry.params]
            return self._applied(self._qualify(entry.name, entry.path), args)
        raise TranslationError(f"cannot translate type {t!r}")

    def _applied(self, name: str, args) -> G.GTerm:
        if not args:
            if "." in name:
                *path, last = name.split(".")
                return G.GQualIdent(tuple(path), last)
            return G.GIdent(name)
        return G.GExplicitApp(name, tuple(self.type(a) for a in args))

    def record(self, rec: TRecord) -> Tuple[RecordEntry, Dict[str, object]]:
        found = self.records.lookup(rec)
        if found is not None:
            return found
        entry = RecordEntry(self.namer.fresh(RECORD), rec, free_vars_ordered(rec), self.path)
        # field types may mention other records; resolve them before this one
        for _, ft in rec.fields:
            self.type(ft)
        self.records.local.append(entry)
        return entry, {p: TVar(p) for p in entry.params}

    def _record_decl(self, e: RecordEntry) -> G.GRecordDecl:
        saved, self.path = self.path, e.path
        fields = [(f"{e.name}_{l}", self.type(e.generic.field_type(l))) for l in e.generic.source_order()]
        self.path = saved
        return G.GRecordDecl(e.name, [tyvar_name(p) for p in e.params], fields)

    def _record_name(self, ty, labels: Sequence[str]) -> str:
        t = expand(ty, {}) if ty is not None else None
        if isinstance(t, TRecord):
            entry, _ = self.record(t)
        else:
            entry = self.records.by_labels(labels)
            if entry is None:
                raise TranslationError("record type could not be determined")
        return entry.name

    def _field(self, rid: str, label: str) -> str:
        return f"{rid}_{label}"

    # ------------------------------------------------------------ patterns

    def pat(self, p) -> G.GPattern:
        if isinstance(p, S.PWild):
            return G.GPWild()
        if isinstance(p, S.PVar):
            if p.con:
                return self._con_pat(p.name, None)
            return G.GPVar(coq_ident(p.name))
        if isinstance(p, S.PInt):
            return G.GPInt(p.value)
        if isinstance(p, S.PString):
            return G.GPString(p.value)
        if isinstance(p, S.PChar):
            return G.GPChar(p.value)
        if isinstance(p, S.PUnit):
            return G.GPUnit()
        if isinstance(p, S.PTuple):
            return G.GPTuple(tuple(self.pat(x) for x in p.items))
        if isinstance(p, S.PList):
            return G.GPList(tuple(self.pat(x) for x in p.items))
        if isinstance(p, S.PRecord):
            t = expand(p.ty, {}) if p.ty is not None else None
            labels = t.labels() if isinstance(t, TRecord) else tuple(sorted(l for l, _ in p.fields))
            rid = self._record_name(p.ty, labels)
            given = dict(p.fields)
            return G.GPRecord(tuple(
                (self._field(rid, l), self.pat(given[l]) if l in given else G.GPWild()) for l in labels
            ))
        if isinstance(p, S.PConApp):
            return self._con_pat(p.name, self.pat(p.arg))
        if isinstance(p, S.PInfix):
            if p.op == "::":
                return G.GPInfix("::", self.pat(p.lhs), self.pat(p.rhs))
            return self._con_pat(p.op, G.GPTuple((self.pat(p.lhs), self.pat(p.rhs))))
        if isinstance(p, S.PTyped):
            return self.pat(p.pat)
        if isinstance(p, S.PLayered):
            return G.GPAs(self.pat(p.pat), coq_ident(p.name))
        if isinstance(p, S.PReal):
            raise TranslationError("real constants cannot be matched", p.span)
        raise TranslationError(f"cannot translate pattern {type(p).__name__}", getattr(p, "span", None))

    def _con_pat(self, name: str, arg) -> G.GPattern:
        if name == "nil":
            return G.GPList(())
        if _is_symbolic(name.rpartition(".")[2]):
            raise TranslationError(f"symbolic constructor {name} has no Gallina counterpart")
        coq = BUILTIN_CON_TERMS.get(name, name)
        return G.GPCon(coq, (arg,) if arg is not None else ())

    def pat_term(self, p, ty=None) -> G.GTerm:
        """A pattern read as a term (contract inputs, precondition skeletons)."""
        ty = ty if ty is not None else getattr(p, "ty", None)
        if isinstance(p, (S.PWild,)):
            return G.HOLE
        if isinstance(p, S.PVar):
            return self._con_term(p.name) if p.con else G.GIdent(coq_ident(p.name))
        if isinstance(p, S.PInt):
            return G.GInt(p.value)
        if isinstance(p, S.PString):
            return G.GString(p.value)
        if isinstance(p, S.PChar):
            return G.GChar(p.value)
        if isinstance(p, S.PUnit):
            return G.GUnit()
        if isinstance(p, S.PTuple):
            tys = self._component_types(ty, len(p.items))
            return G.GTuple(tuple(self.pat_term(x, t) for x, t in zip(p.items, tys)))
        if isinstance(p, S.PList):
            elem = self._elem(ty)
            return G.GList(tuple(self.pat_term(x, elem) for x in p.items))
        if isinstance(p, S.PRecord):
            t = expand(ty, {}) if ty is not None else None
            labels = t.labels() if isinstance(t, TRecord) else tuple(sorted(l for l, _ in p.fields))
            rid = self._record_name(ty, labels)
            given = dict(p.fields)
            return G.GRecordLit(tuple(
                (self._field(rid, l), self.pat_term(given[l], t.field_type(l) if isinstance(t, TRecord) else None))
                for l in labels if l in given
            ))
        if isinstance(p, S.PConApp):
            return G.GApp(self._con_term(p.name), (self.pat_term(p.arg),))
        if isinstance(p, S.PInfix):
            if p.op == "::":
                elem = self._elem(ty)
                return G.GInfix("::", self.pat_term(p.lhs, elem), self.pat_term(p.rhs, ty))
            return G.GApp(self._con_term(p.op), (G.GTuple((self.pat_term(p.lhs), self.pat_term(p.rhs))),))
        if isinstance(p, S.PTyped):
            return self.pat_term(p.pat, ty)
        if isinstance(p, S.PLayered):
            return G.GIdent(coq_ident(p.name))
        raise TranslationError(f"cannot use {type(p).__name__} as a term", getattr(p, "span", None))

    @staticmethod
    def _component_types(ty, n: int) -> List:
        t = expand(ty, {}) if ty is not None else None
        if isinstance(t, TTuple) and len(t.items) == n:
            return list(t.items)
        return [None] * n

    @staticmethod
    def _elem(ty):
        t = expand(ty, {}) if ty is not None else None
        if isinstance(t, TCon) and t.name == "list":
            return t.args[0]
        return None

    # ------------------------------------------------------------ expressions

    def _con_term(self, name: str) -> G.GTerm:
        if name == "nil":
            return G.GList(())
        if _is_symbolic(name.rpartition(".")[2]):
            raise TranslationError(f"symbolic constructor {name} has no Gallina counterpart")
        return self._name(BUILTIN_CON_TERMS.get(name, name))

    @staticmethod
    def _name(name: str) -> G.GTerm:
        if "." in name:
            *path, last = name.split(".")
            return G.GQualIdent(tuple(path), coq_ident(last))
        return G.GIdent(coq_ident(name))

    def _basis_value(self, name: str, node) -> G.GTerm:
        entry = basis.lookup(name)
        if entry is None:
            raise TranslationError(f"{name} has no Gallina counterpart", getattr(node, "span", None))
        if _is_symbolic(entry.coq) or entry.coq in ("div", "mod", "o"):
            a, b = G.GIdent("a"), G.GIdent("b")
            if entry.coq == "neg":
                return G.GIdent("neg")
            return G.GFun((G.GPTuple((G.GPVar("a"), G.GPVar("b"))),), G.GInfix(entry.coq, a, b))
        return self._name(entry.coq)

    def exp(self, e) -> G.GTerm:
        if isinstance(e, S.EVar):
            if e.con:
                return self._con_term(e.name)
            if e.basis:
                return self._basis_value(e.name, e)
            if e.op and e.name in self.infix.declared:
                return G.GIdent("op" + e.name)
            if _is_symbolic(e.name.rpartition(".")[2]):
                raise TranslationError(f"symbolic identifier {e.name} has no Gallina counterpart", e.span)
            return self._name(e.name)
        if isinstance(e, S.EInt):
            return G.GInt(e.value)
        if isinstance(e, S.EReal):
            return G.GReal(real_text(e.text))
        if isinstance(e, S.EString):
            return G.GString(e.value)
        if isinstance(e, S.EChar):
            return G.GChar(e.value)
        if isinstance(e, S.EUnit):
            return G.GUnit()
        if isinstance(e, S.ETuple):
            return G.GTuple(tuple(self.exp(x) for x in e.items))
        if isinstance(e, S.EList):
            return G.GList(tuple(self.exp(x) for x in e.items))
        if isinstance(e, S.ERecord):
            t = expand(e.ty, {})
            rid = self._record_name(t, [l for l, _ in e.fields])
            given = dict(e.fields)
            labels = t.labels() if isinstance(t, TRecord) else sorted(given)
            return G.GRecordLit(tuple((self._field(rid, l), self.exp(given[l])) for l in labels))
        if isinstance(e, S.ESelector):
            t = expand(e.ty, {})
            rec = expand(t.dom, {}) if isinstance(t, TArrow) else None
            rid = self._record_name(rec, [e.label])
            return G.GIdent(self._field(rid, e.label))
        if isinstance(e, S.EApp):
            return self._app(e)
        if isinstance(e, S.EInfix):
            return self._infix(e)
        if isinstance(e, S.EFn):
            return self._fn(e)
        if isinstance(e, S.ECase):
            return self._match(self.exp(e.scrutinee), [(r.pat, r.body) for r in e.rules], e.exhaustive)
        if isinstance(e, S.EIf):
            return G.GIf(self.exp(e.cond), self.exp(e.then), self.exp(e.else_))
        if isinstance(e, S.EAndalso):
            return G.GBoolAnd(self.exp(e.lhs), self.exp(e.rhs))
        if isinstance(e, S.EOrelse):
            return G.GBoolOr(self.exp(e.lhs), self.exp(e.rhs))
        if isinstance(e, S.ELet):
            return self._let(e.decls, self.exp(e.body), e)
        if isinstance(e, S.ETyped):
            return G.GAnnot(self.exp(e.exp), self.type(e.ty))
        raise TranslationError(f"cannot translate {type(e).__name__}", getattr(e, "span", None))

    def _app(self, e: S.EApp) -> G.GTerm:
        args = []
        fn = e
        while isinstance(fn, S.EApp):
            args.append(fn.arg)
            fn = fn.fn
        args.reverse()
        if isinstance(fn, S.EVar) and fn.basis:
            entry = basis.lookup(fn.name)
            symbolic = entry is not None and (_is_symbolic(entry.coq) or entry.coq in ("div", "mod", "o"))
            if symbolic and entry.coq != "neg" and len(args) == 1 and isinstance(args[0], S.ETuple) \
                    and len(args[0].items) == 2:
                lhs, rhs = args[0].items
                return G.GInfix(entry.coq, self.exp(lhs), self.exp(rhs))
        return G.GApp(self.exp(fn), tuple(self.exp(a) for a in args))

    def _infix(self, e: S.EInfix) -> G.GTerm:
        lhs, rhs = self.exp(e.lhs), self.exp(e.rhs)
        if e.con:
            if e.op == "::":
                return G.GInfix("::", lhs, rhs)
            return G.GApp(self._con_term(e.op), (G.GTuple((lhs, rhs)),))
        if e.basis:
            entry = basis.lookup(e.op)
            if entry is None:
                raise TranslationError(f"{e.op} has no Gallina counterpart", e.span)
            if _is_symbolic(entry.coq) or entry.coq in ("div", "mod", "o"):
                return G.GInfix(entry.coq, lhs, rhs)
            return G.GApp(self._name(entry.coq), (G.GTuple((lhs, rhs)),))
        if e.op in self.infix.declared:
            return G.GInfix(e.op, lhs, rhs)
        if _is_symbolic(e.op):
            raise TranslationError(f"symbolic identifier {e.op} has no Gallina counterpart", e.span)
        return G.GApp(self._name(e.op), (G.GTuple((lhs, rhs)),))

    def _fn(self, e: S.EFn) -> G.GTerm:
        if len(e.rules) == 1 and e.exhaustive:
            p = self.pat(e.rules[0].pat)
            if isinstance(p, (G.GPVar, G.GPTuple, G.GPUnit, G.GPWild)):
                if isinstance(p, G.GPWild):
                    p = G.GPVar("_")
                return G.GFun((p,), self.exp(e.rules[0].body))
        arg = "_arg"
        return G.GFun((G.GPVar(arg),), self._match(G.GIdent(arg), [(r.pat, r.body) for r in e.rules], e.exhaustive))

    def _match(self, scrutinee: G.GTerm, arms, exhaustive: bool) -> G.GMatch:
        branches = [(self.pat(p), self.exp(b)) for p, b in arms]
        if not exhaustive:
            branches.append((G.GPWild(), self._failure()))
        return G.GMatch(scrutinee, tuple(branches), exhaustive)

    def _failure(self) -> G.GTerm:
        self._needs_failure = True
        return G.GIdent(PATTERN_FAILURE)

    def _let(self, decls, body: G.GTerm, node) -> G.GTerm:
        bindings: List[Tuple[G.GPattern, G.GTerm]] = []
        self._let_bindings(decls, bindings)
        for p, v in reversed(bindings):
            body = G.GLet(p, v, body)
        return body

    def _let_bindings(self, decls, out: List) -> None:
        for d in decls:
            if isinstance(d, S.DVal) and not d.rec:
                for b in d.binds:
                    value = self.exp(b.exp)
                    p = self.pat(b.pat)
                    if b.exhaustive and _irrefutable(p):
                        if not isinstance(p, G.GPWild):
                            out.append((p, value))
                        continue
                    for v in collect_vars(b.pat):
                        arms = [(p, G.GIdent(coq_ident(v)))]
                        if not b.exhaustive:
                            arms.append((G.GPWild(), self._failure()))
                        out.append((G.GPVar(coq_ident(v)), G.GMatch(value, tuple(arms), b.exhaustive)))
            elif isinstance(d, S.DLocal):
                self._let_bindings(list(d.inner) + list(d.outer), out)
            elif isinstance(d, S.DInfix):
                continue
            elif isinstance(d, (S.DFun, S.DVal)):
                raise TranslationError(
                    "functions declared inside let blocks are not supported; lift them to the top level",
                    d.span,
                )
            else:
                raise TranslationError(f"{type(d).__name__} inside let is not supported", getattr(d, "span", None))

    # ------------------------------------------------------------ values

    def _poly(self, scheme: TypeScheme, body: G.GTerm) -> Tuple[List[str], G.GTerm]:
        names = free_vars_ordered(scheme.body)
        if not names:
            return [], body
        annotated = G.GAnnot(body, self.type(scheme.body))
        return [tyvar_name(n) for n in names], annotated

    def val(self, d: S.DVal) -> List[G.GSentence]:
        if d.rec:
            return [self._val_rec(d)]
        out: List[G.GSentence] = []
        for b in d.binds:
            core = b.pat.pat if isinstance(b.pat, S.PTyped) else b.pat
            schemes = b.schemes or {}
            if isinstance(core, S.PVar) and not core.con:
                name = core.name
                implicits, body = self._poly(schemes[name], self.exp(b.exp))
                out.append(G.GDefinition(coq_ident(name), body, implicits))
                continue
            names = collect_vars(b.pat)
            if not names:
                continue
            for v in names:
                arms = [(self.pat(b.pat), G.GIdent(coq_ident(v)))]
                if not b.exhaustive:
                    arms.append((G.GPWild(), self._failure()))
                m = G.GMatch(self.exp(b.exp), tuple(arms), b.exhaustive)
                implicits, body = self._poly(schemes[v], m)
                out.append(G.GDefinition(coq_ident(v), body, implicits))
        return out

    def _val_rec(self, d: S.DVal) -> G.GEquations:
        groups = []
        for b in d.binds:
            core = b.pat.pat if isinstance(b.pat, S.PTyped) else b.pat
            fn = b.exp
            while isinstance(fn, S.ETyped):
                fn = fn.exp
            if not isinstance(core, S.PVar) or not isinstance(fn, S.EFn):
                raise TranslationError("val rec must bind a name to fn", b.span)
            scheme = b.schemes[core.name]
            rows = [([r.pat], r.body) for r in fn.rules]
            groups.append((core.name, scheme.body, rows, fn.exhaustive, b.span))
        return self._equations(groups)

    # ------------------------------------------------------------ functions

    def fun(self, d: S.DFun) -> List[G.GSentence]:
        groups = []
        for b in d.binds:
            rows = [(list(c.pats), c.body) for c in b.clauses]
            groups.append((b.name, b.scheme.body, rows, b.exhaustive, b.span))
        self._check_termination(d)
        out: List[G.GSentence] = [self._equations(groups)]
        if d.elab_contract is not None:
            out.append(self.contract(d.elab_contract))
        for b in d.binds:
            if b.fixity is not None and b.name not in self.infix.declared:
                out.extend(self._notation(b.name, b.fixity))
        return out

    def _notation(self, name: str, fixity) -> List[G.GSentence]:
        assoc, prec = fixity
        self.infix.declared.add(name)
        body = G.GApp(G.GIdent(name), (G.GTuple((G.GIdent("x"), G.GIdent("y"))),))
        return [
            G.GDefinition("op" + name, G.GIdent(name)),
            G.GNotation(f"x '{name}' y", body, notation_level(prec), "right" if assoc == "right" else "left"),
        ]

    def _equations(self, groups) -> G.GEquations:
        eqs = []
        for name, fty, rows, exhaustive, span in groups:
            if _is_symbolic(name):
                raise TranslationError(f"symbolic function name {name} has no Gallina counterpart", span)
            arity = len(rows[0][0])
            params, t = [], fty
            for _ in range(arity):
                t = t if isinstance(t, TArrow) else expand(t, {})
                params.append(t.dom)
                t = t.cod
            binders = [
                G.GEqBinder(f"x{i + 1}", self.type(pt), bool(free_vars_ordered(pt)))
                for i, pt in enumerate(params)
            ]
            ret = self.type(t)
            clauses = [(tuple(self.pat(p) for p in pats), self.exp(body)) for pats, body in rows]
            pre = None
            if not exhaustive:
                formula = synthesize_precondition(PatternMatrix([pats for pats, _ in rows], params, self.table))
                if formula is not None:
                    pre = self.formula(formula, params)
                    clauses.append((tuple(G.GPWild() for _ in params), G.HOLE))
            eqs.append(G.GEquations(coq_ident(name), binders, ret, clauses, pre))
        first = eqs[0]
        first.companions = eqs[1:]
        return first

    def formula(self, f, column_types) -> G.GTerm:
        prefix = sum(f.atom_counts()) > 1
        disjuncts = []
        for atoms in f.disjuncts:
            acc = None
            for atom in reversed(atoms):
                skel = self.pat_term(atom.skeleton, column_types[atom.arg])
                eq = G.GEq(G.GIdent(f"x{atom.arg + 1}"), skel, prefix)
                body = eq if acc is None else G.GAnd(eq, acc)
                acc = G.GExists(tuple(atom.vars), body) if atom.vars else body
            disjuncts.append(acc)
        out = disjuncts[-1]
        for d in reversed(disjuncts[:-1]):
            out = G.GOr(d, out)
        return out

    def contract(self, c) -> G.GTheorem:
        ct = c.contract
        fn = self._name(ct.fname)
        inputs = tuple(self.pat_term(p) for p in ct.inputs)
        call = G.GApp(fn, inputs)
        true = G.GIdent("true")
        req = self.exp(ct.requires) if ct.requires is not None else true
        ens = self.exp(ct.ensures) if ct.ensures is not None else true
        stmt = G.GArrow(G.GAnd(G.GEq(call, self.pat_term(ct.output)), G.GEq(req, true)), G.GEq(ens, true))
        names = c.var_names()
        if names:
            stmt = G.GForall(tuple(G.GBinder(coq_ident(n)) for n in names), stmt)
        return G.GTheorem(f"{coq_ident(ct.fname)}_THM", stmt)

    def _check_termination(self, d: S.DFun) -> None:
        names = {b.name for b in d.binds}
        for b in d.binds:
            for c in b.clauses:
                smaller = [_strict_vars(p) for p in c.pats]
                for call in _calls(c.body, names):
                    if not _decreasing(call, smaller):
                        self.warnings.append(Diagnostic(
                            f"{b.name}: recursion is not structural; the emitted Equations may need a termination proof",
                            b.span,
                        ))
                        return

    # ------------------------------------------------------------ datatypes

    def datatype(self, binds: Sequence[S.DatBind]) -> G.GInductive:
        inds = []
        for b in binds:
            info = b.info
            params = [tyvar_name(p) for p in info.params]
            result = self._applied(b.name, [TVar(p) for p in info.params])
            cons = []
            for cname, payload in info.cons:
                if _is_symbolic(cname):
                    raise TranslationError(f"symbolic constructor {cname} has no Gallina counterpart", b.span)
                cons.append((cname, None if payload is None else G.GArrow(self.type(payload), result)))
            inds.append(G.GInductive(b.name, params, cons))
        first = inds[0]
        first.companions = inds[1:]
        return first

    def abbreviation(self, b: S.TypBind) -> G.GDefinition:
        return G.GDefinition(b.name, self.type(b.sem), [tyvar_name("'" + v.lstrip("'")) for v in b.tyvars])

    # ------------------------------------------------------------ modules

    def _lift_sig(self, sigexp) -> str:
        if isinstance(sigexp, S.SigVar):
            return sigexp.name
        name = self.namer.fresh(MODULE)
        self.sigma.lifted.append(G.GModuleType(name, self.sig_body(sigexp)))
        return name

    def sig_body(self, sigexp) -> List[G.GSentence]:
        if isinstance(sigexp, S.SigVar):
            return [G.GInclude(sigexp.name)]
        out: List[G.GSentence] = []
        for spec in sigexp.specs:
            out.extend(self._spec(spec))
        return out

    def _spec(self, spec) -> List[G.GSentence]:
        before = len(self.records.local)
        if isinstance(spec, S.SpecType):
            if spec.ty is None:
                kind: G.GTerm = G.GSort()
                for _ in spec.tyvars:
                    kind = G.GArrow(G.GSort(), kind)
                sents = [G.GParameter(spec.name, kind)]
            else:
                sents = [G.GDefinition(spec.name, self.type(spec.sem), [tyvar_name(v) for v in spec.tyvars])]
        elif isinstance(spec, S.SpecVal):
            t = self.type(spec.sem)
            names = free_vars_ordered(spec.sem)
            if names:
                t = G.GForall(tuple(G.GBinder(tyvar_name(n), G.GSort(), True) for n in names), t)
            sents = [G.GParameter(coq_ident(spec.name), t)]
        elif isinstance(spec, S.SpecDatatype):
            sents = [self.datatype(spec.binds)]
        elif isinstance(spec, S.SpecStructure):
            sents = [G.GDeclareModule(spec.name, self._lift_sig(spec.sig))]
        elif isinstance(spec, S.SpecInclude):
            sents = [G.GInclude(self._lift_sig(spec.sig))]
        else:
            raise TranslationError(f"cannot translate specification {type(spec).__name__}", getattr(spec, "span", None))
        new = self.records.local[before:]
        del self.records.local[before:]
        self.records.global_.extend(new)
        return [self._record_decl(e) for e in new] + sents

    def _body(self, decls, path: Tuple[str, ...]) -> List[G.GSentence]:
        saved_path, saved_tv = self.path, self.tyvars
        saved_sigma = self.sigma.take()
        self.path = path
        out: List[G.GSentence] = []
        try:
            for d in decls:
                self.tyvars = TypeVarContext()
                out.extend(self.decl(d))
        finally:
            self.path, self.tyvars = saved_path, saved_tv
            self.sigma.lifted = saved_sigma + self.sigma.lifted
        return out

    def _module_arg(self, arg, path: Tuple[str, ...]) -> str:
        if isinstance(arg, S.StrVar):
            return arg.name
        if isinstance(arg, list):
            arg = S.StrStruct(arg)
        name = self.namer.fresh(MODULE)
        # build first: _body rebinds self.sigma.lifted
        m = self._module(name, arg, None, False, path)
        self.sigma.lifted.append(m)
        return name

    def _module(self, name: str, strexp, sig, opaque: bool, path: Tuple[str, ...]) -> G.GModule:
        if isinstance(strexp, S.StrConstraint):
            if sig is not None:
                inner = self.namer.fresh(MODULE)
                m = self._module(inner, strexp, None, False, path)
                self.sigma.lifted.append(m)
                strexp = S.StrVar(inner)
            else:
                return self._module(name, strexp.str, strexp.sig, strexp.opaque, path)
        asc = self._lift_sig(sig) if sig is not None else None
        if opaque:
            self.warnings.append(Diagnostic(f"{name}: opaque ascription is emitted as <: and does not hide definitions"))
        if isinstance(strexp, S.StrStruct):
            return G.GModule(name, self._body(strexp.decls, path), asc, opaque=opaque)
        if isinstance(strexp, S.StrVar):
            return G.GModule(name, None, asc, argument=strexp.name, opaque=opaque)
        if isinstance(strexp, S.StrApp):
            arg = self._module_arg(strexp.arg, path)
            return G.GModule(name, None, asc, functor=strexp.functor, argument=arg, opaque=opaque)
        raise TranslationError(f"cannot translate structure expression {type(strexp).__name__}")

    def structure(self, b: S.StrBind) -> G.GModule:
        return self._module(b.name, b.str, b.sig, b.opaque, self.path + (b.name,))

    def functor(self, b: S.FctBind) -> G.GModule:
        psig = self._lift_sig(b.param_sig)
        m = self._module(b.name, b.body, b.sig, b.opaque, (b.name,))
        m.params = [(b.param, psig)]
        return m


# ---------------------------------------------------------------- helpers


def failure_axiom() -> G.GAxiom:
    return G.GAxiom(PATTERN_FAILURE, G.GForall((G.GBinder("a", None, True),), G.GIdent("a")), local=True)


def notation_level(prec: int) -> int:
    """Coq level for an SML precedence: tighter SML binding, lower level."""
    return 29 - prec


def real_text(text: str) -> str:
    text = text.replace("~", "-")
    value = float(text)
    if math.isinf(value) or math.isnan(value):
        raise TranslationError(f"real constant {text} is out of range")
    s = repr(value)
    if "e" in s or "E" in s:
        s = format(value, "f")
    return s


def _irrefutable(p) -> bool:
    if isinstance(p, (G.GPVar, G.GPWild, G.GPUnit)):
        return True
    if isinstance(p, G.GPTuple):
        return all(_irrefutable(x) for x in p.items)
    return False


def _strict_vars(p) -> set:
    """Variables bound strictly below a constructor in ``p``."""
    out: set = set()

    def go(q, under: bool):
        if isinstance(q, S.PVar) and not q.con:
            if under:
                out.add(q.name)
        elif isinstance(q, S.PTuple):
            for x in q.items:
                go(x, under)
        elif isinstance(q, S.PList):
            for x in q.items:
                go(x, True)
        elif isinstance(q, S.PRecord):
            for _, x in q.fields:
                go(x, under)
        elif isinstance(q, S.PConApp):
            go(q.arg, True)
        elif isinstance(q, S.PInfix):
            go(q.lhs, True)
            go(q.rhs, True)
        elif isinstance(q, S.PTyped):
            go(q.pat, under)
        elif isinstance(q, S.PLayered):
            go(q.pat, under)

    go(p, False)
    return out


def _calls(e, names) -> List[List]:
    """Argument lists of calls to any of ``names`` inside ``e``."""
    found: List[List] = []

    def go(x):
        if isinstance(x, S.EApp):
            args = []
            fn = x
            while isinstance(fn, S.EApp):
                args.append(fn.arg)
                fn = fn.fn
            if isinstance(fn, S.EVar) and fn.name in names:
                found.append(list(reversed(args)))
            go(fn)
            for a in args:
                go(a)
            return
        if isinstance(x, S.EInfix) and x.op in names:
            found.append([S.ETuple([x.lhs, x.rhs])])
        if isinstance(x, list):
            for y in x:
                go(y)
            return
        if hasattr(x, "__dataclass_fields__"):
            for f in x.__dataclass_fields__.values():
                if f.compare:
                    go(getattr(x, f.name))
        elif isinstance(x, tuple):
            for y in x:
                go(y)

    go(e)
    return found


def _decreasing(args, smaller) -> bool:
    for a, vars_ in zip(args, smaller):
        if isinstance(a, S.EVar) and a.name in vars_:
            return True
        if isinstance(a, S.ETuple):
            if any(isinstance(x, S.EVar) and x.name in vars_ for x in a.items):
                return True
    return False


def translate_program(annotated: Sequence, table: Optional[DatatypeTable] = None) -> List[G.GSentence]:
    return Translator(table).program(annotated)
