"""Hindley-Milner elaboration of the source AST.

Every expression and pattern node gets its ``ty`` slot filled with a fully
substituted semantic type; bindings and matches get their exhaustiveness
flags; fun declarations with contracts get an elaborated contract.
"""

from __future__ import annotations

import copy
import dataclasses
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .. import basis
from ..errors import Diagnostic, ElabError, UnsupportedConstruct
from ..frontend import syntax as S
from ..frontend.lexer import tokenize
from ..frontend.parser import InfixEnvironment, Parser
from ..gallina.names import TYVAR, FreshNamer
from ..patterns import DatatypeTable, PatternMatrix, collect_vars, is_exhaustive, redundant_rows
from .env import DataInfo, Env, FunctorInfo, Sig, TypeInfo, ValInfo
from .types import (
    BOOL, CHAR, INT, REAL, STRING, UNIT, TAbbrev, TArrow, TCon, TRecord, TTuple, TVar,
    TypeScheme, UnifyError, apply, expand, free_vars, free_vars_ordered, list_of, mono,
    option_of, rename, show, subterms, unify_in_place, walk,
)


@dataclass
class ElabContract:
    """A contract whose bound variables have been typed against its function."""

    contract: S.Contract
    fname: str
    variables: List[Tuple[str, object]]  # binding order: inputs then output
    input_types: List[object]
    output_type: object

    def var_names(self) -> List[str]:
        return [n for n, _ in self.variables]


@dataclass
class AnnotatedDecl:
    decl: object
    warnings: List[Diagnostic] = field(default_factory=list)

    @property
    def contract(self) -> Optional[ElabContract]:
        return getattr(self.decl, "elab_contract", None)

    def node_types(self) -> Dict[int, object]:
        """id(node) -> type for every typed expression and pattern."""
        out: Dict[int, object] = {}
        for node in walk_nodes(self.decl):
            if isinstance(node, S.EXP_TYPES + S.PAT_TYPES):
                out[id(node)] = node.ty
        return out

    def exhaustive_flags(self) -> List[bool]:
        return [n.exhaustive for n in walk_nodes(self.decl) if isinstance(n, (S.ValBind, S.FunBind, S.EFn, S.ECase))]


def walk_nodes(node):
    """Pre-order traversal of syntax nodes (annotations excluded)."""
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, (list, tuple)):
            stack.extend(reversed(n))
            continue
        if not dataclasses.is_dataclass(n) or type(n).__module__ != S.__name__:
            continue
        yield n
        kids = []
        for f in dataclasses.fields(n):
            if f.compare:
                kids.append(getattr(n, f.name))
        stack.extend(reversed(kids))


# ---------------------------------------------------------------- basis environment


def _parse_type(text: str):
    return Parser(tokenize(text)).ty()


def _builtin_type(name: str, arity: int) -> TypeInfo:
    params = tuple(f"'p{i}" for i in range(arity))
    return TypeInfo("datatype", params, TCon(name, tuple(TVar(p) for p in params)), name=name)


_CONSTRUCTORS = {
    "true": ("bool", None),
    "false": ("bool", None),
    "nil": ("list", None),
    "::": ("list", "'a * 'a list"),
    "NONE": ("option", None),
    "SOME": ("option", "'a"),
}


class Elaborator:
    def __init__(self, infix_env: Optional[InfixEnvironment] = None):
        self.infix_env = infix_env or InfixEnvironment()
        self.subst: Dict[str, object] = {}
        self.namer = FreshNamer()
        self.table = DatatypeTable()
        self.warnings: List[Diagnostic] = []
        self._idents = set()
        self._explicit_count = 0
        self._scopes: List[Dict[str, TVar]] = []
        self._overloads: List[Tuple[TVar, frozenset, str, object]] = []
        self._equalities: List[Tuple[object, object]] = []
        self._flex: List[Tuple[TVar, Dict[str, object], object]] = []
        self._matches: List[Tuple[object, List[List], List, str, object]] = []
        self.env = self._initial_env()

    # ------------------------------------------------------------ setup

    def _initial_env(self) -> Env:
        env = Env()
        for name, arity in (("int", 0), ("real", 0), ("string", 0), ("char", 0),
                            ("bool", 0), ("unit", 0), ("list", 1), ("option", 1)):
            env.types[name] = _builtin_type(name, arity)
        for con, (tname, payload) in _CONSTRUCTORS.items():
            result = {"bool": "bool", "list": "'a list", "option": "'a option"}[tname]
            text = f"{payload} -> {result}" if payload else result
            env.values[con] = ValInfo(self._basis_scheme(text, env), kind="con", datatype=tname)
        for e in basis.TOPLEVEL:
            env.values[e.name] = ValInfo(self._basis_scheme(e.type, env), "basis", None, e.overload, e.equality)
        for sname, entries in basis.STRUCTURES.items():
            senv = Env()
            for e in entries:
                senv.values[e.name] = ValInfo(self._basis_scheme(e.type, env), "basis", None, e.overload, e.equality)
            env.structures[sname] = senv
        return env.child()

    def _basis_scheme(self, text: str, env: Env) -> TypeScheme:
        scope: Dict[str, TVar] = {}
        t = self.ty(_parse_type(text), env, scope, open_scope=True)
        return TypeScheme(tuple(free_vars_ordered(t)), t)

    # ------------------------------------------------------------ helpers

    def fresh(self) -> TVar:
        return TVar(self.namer.fresh(TYVAR))

    def unify(self, a, b, node=None, what: str = "") -> None:
        try:
            unify_in_place(a, b, self.subst)
        except UnifyError as e:
            msg = e.message if not what else f"{what}: {e.message}"
            raise ElabError(msg, getattr(node, "span", None)) from None

    def zonk(self, t):
        return apply(t, self.subst)

    def _unique_ident(self, path: Tuple[str, ...], name: str) -> str:
        base = ".".join(path + (name,))
        ident, n = base, 1
        while ident in self._idents or ident in ("int", "real", "string", "char", "bool", "unit", "list", "option"):
            n += 1
            ident = f"{base}#{n}"
        self._idents.add(ident)
        return ident

    def instantiate(self, info: ValInfo, node=None, name: str = ""):
        mapping = {q: self.fresh() for q in info.scheme.quantified}
        t = rename(self.zonk(info.scheme.body), mapping)
        if info.overload:
            for v in mapping.values():
                self._overloads.append((v, info.overload, name, node))
        if info.equality:
            for v in mapping.values():
                self._equalities.append((v, node))
        return t

    def _constrained_vars(self) -> set:
        out = set()
        for v, *_ in self._overloads:
            out |= free_vars(self.zonk(v))
        for rho, fields, _ in self._flex:
            out |= free_vars(self.zonk(rho))
            for t in fields.values():
                out |= free_vars(self.zonk(t))
        return out

    def generalize(self, types: List, env: Env) -> Tuple[str, ...]:
        fixed = env.free_type_vars(self.subst) | self._constrained_vars()
        out: List[str] = []
        for t in types:
            for v in free_vars_ordered(self.zonk(t)):
                if v not in fixed and v not in out:
                    out.append(v)
        return tuple(out)

    # ------------------------------------------------------------ types

    def ty(self, node, env: Env, scope: Optional[Dict[str, TVar]] = None, open_scope: bool = False):
        """Convert a syntactic type.  ``scope`` fixes tyvar meanings; when it is
        None the current explicit-tyvar scope is used (and extended)."""
        if isinstance(node, S.TyVar):
            if node.name.startswith("''"):
                raise UnsupportedConstruct("equality type variables are not supported", node.span)
            if scope is not None:
                if node.name not in scope:
                    if not open_scope:
                        raise ElabError(f"unbound type variable {node.name}", node.span)
                    scope[node.name] = TVar(node.name)
                return scope[node.name]
            return self._explicit_tyvar(node.name)
        if isinstance(node, S.TyTuple):
            return TTuple(tuple(self.ty(x, env, scope, open_scope) for x in node.items))
        if isinstance(node, S.TyArrow):
            return TArrow(self.ty(node.dom, env, scope, open_scope), self.ty(node.cod, env, scope, open_scope))
        if isinstance(node, S.TyRecord):
            pairs = [(l, self.ty(x, env, scope, open_scope)) for l, x in node.fields]
            try:
                return TRecord.make(pairs)
            except ElabError as e:
                raise ElabError(e.message, node.span) from None
        if isinstance(node, S.TyCon):
            info = env.lookup_type(node.name)
            if info is None:
                raise ElabError(f"unbound type constructor {node.name}", node.span)
            args = tuple(self.ty(x, env, scope, open_scope) for x in node.args)
            if len(args) != info.arity:
                raise ElabError(f"type constructor {node.name} expects {info.arity} argument(s)", node.span)
            if info.kind == "abbrev":
                body = rename(info.body, dict(zip(info.params, args)))
                return TAbbrev(info.name, args, body, info.path)
            return TCon(info.tcon.name, args, info.tcon.display, info.tcon.path)
        raise TypeError(node)

    def _explicit_tyvar(self, name: str) -> TVar:
        for scope in reversed(self._scopes):
            if name in scope:
                return scope[name]
        if not self._scopes:
            self._scopes.append({})
        self._explicit_count += 1
        v = TVar(f"{name}#{self._explicit_count}")
        self._scopes[-1][name] = v
        return v

    def _push_scope(self, tyvars: List[str]) -> None:
        self._scopes.append({})
        for name in tyvars:
            self._explicit_tyvar(name)

    def _pop_scope(self, node) -> None:
        scope = self._scopes.pop()
        seen = {}
        for name, v in scope.items():
            t = walk(v, self.subst)
            if not isinstance(t, TVar):
                raise ElabError(f"type variable {name} cannot be instantiated to {show(self.zonk(t))}", node.span)
            if t.name in seen:
                raise ElabError(f"type variables {seen[t.name]} and {name} cannot be equal", node.span)
            seen[t.name] = name

    # ------------------------------------------------------------ patterns

    def pat(self, p, env: Env, binds: Dict[str, object]):
        t = self._pat(p, env, binds)
        p.ty = t
        return t

    def _bind_var(self, name: str, t, binds, node) -> None:
        if name in binds:
            raise ElabError(f"variable {name} bound twice in pattern", node.span)
        binds[name] = t

    def _constructor(self, name: str, env: Env, node) -> Optional[ValInfo]:
        info = env.lookup_value(name)
        if info is not None and info.kind == "con":
            return info
        return None

    def _pat(self, p, env: Env, binds):
        if isinstance(p, S.PWild):
            return self.fresh()
        if isinstance(p, S.PVar):
            con = self._constructor(p.name, env, p)
            if con is not None:
                p.con = True
                t = self.instantiate(con, p, p.name)
                if isinstance(expand(t, self.subst), TArrow):
                    raise ElabError(f"constructor {p.name} expects an argument", p.span)
                return t
            if "." in p.name:
                raise ElabError(f"unbound constructor {p.name}", p.span)
            t = self.fresh()
            self._bind_var(p.name, t, binds, p)
            return t
        if isinstance(p, S.PInt):
            return INT
        if isinstance(p, S.PString):
            return STRING
        if isinstance(p, S.PChar):
            return CHAR
        if isinstance(p, S.PReal):
            raise ElabError("real constants are not allowed in patterns", p.span)
        if isinstance(p, S.PUnit):
            return UNIT
        if isinstance(p, S.PTuple):
            return TTuple(tuple(self.pat(x, env, binds) for x in p.items))
        if isinstance(p, S.PList):
            elem = self.fresh()
            for x in p.items:
                self.unify(self.pat(x, env, binds), elem, x, "list pattern elements differ")
            return list_of(elem)
        if isinstance(p, S.PRecord):
            fields = {l: self.pat(x, env, binds) for l, x in p.fields}
            if len(fields) != len(p.fields):
                raise ElabError("duplicate label in record pattern", p.span)
            if not p.ellipsis:
                return TRecord.make(list(fields.items()))
            rho = self.fresh()
            self._flex.append((rho, fields, p))
            return rho
        if isinstance(p, (S.PConApp, S.PInfix)):
            name = p.name if isinstance(p, S.PConApp) else p.op
            con = self._constructor(name, env, p)
            if con is None:
                raise ElabError(f"{name} is not a constructor", p.span)
            t = expand(self.instantiate(con, p, name), self.subst)
            if not isinstance(t, TArrow):
                raise ElabError(f"constructor {name} takes no argument", p.span)
            if isinstance(p, S.PConApp):
                at = self.pat(p.arg, env, binds)
            else:
                at = TTuple((self.pat(p.lhs, env, binds), self.pat(p.rhs, env, binds)))
            self.unify(t.dom, at, p, f"argument of constructor {name}")
            return t.cod
        if isinstance(p, S.PTyped):
            t = self.pat(p.pat, env, binds)
            self.unify(t, self.ty(p.tyann, env), p, "pattern does not match its annotation")
            return t
        if isinstance(p, S.PLayered):
            t = self.pat(p.pat, env, binds)
            if p.tyann is not None:
                self.unify(t, self.ty(p.tyann, env), p, "pattern does not match its annotation")
            self._bind_var(p.name, t, binds, p)
            return t
        raise TypeError(p)

    # ------------------------------------------------------------ expressions

    def exp(self, e, env: Env):
        t = self._exp(e, env)
        e.ty = t
        return t

    def _lookup(self, name: str, env: Env, node) -> ValInfo:
        info = env.lookup_value(name)
        if info is None:
            if name in basis.UNSUPPORTED_VALUES:
                raise UnsupportedConstruct(f"{name} is outside the supported pure subset", node.span)
            raise ElabError(f"unbound identifier {name}", node.span)
        return info

    def _exp(self, e, env: Env):
        if isinstance(e, S.EVar):
            info = self._lookup(e.name, env, e)
            e.con = info.kind == "con"
            e.basis = info.kind == "basis"
            return self.instantiate(info, e, e.name)
        if isinstance(e, S.EInt):
            return INT
        if isinstance(e, S.EReal):
            return REAL
        if isinstance(e, S.EString):
            return STRING
        if isinstance(e, S.EChar):
            return CHAR
        if isinstance(e, S.EUnit):
            return UNIT
        if isinstance(e, S.ETuple):
            return TTuple(tuple(self.exp(x, env) for x in e.items))
        if isinstance(e, S.EList):
            elem = self.fresh()
            for x in e.items:
                self.unify(self.exp(x, env), elem, x, "list elements have different types")
            return list_of(elem)
        if isinstance(e, S.ERecord):
            pairs = [(l, self.exp(x, env)) for l, x in e.fields]
            try:
                return TRecord.make(pairs)
            except ElabError as err:
                raise ElabError(err.message, e.span) from None
        if isinstance(e, S.ESelector):
            rho, ft = self.fresh(), self.fresh()
            self._flex.append((rho, {e.label: ft}, e))
            return TArrow(rho, ft)
        if isinstance(e, S.EApp):
            ft = self.exp(e.fn, env)
            at = self.exp(e.arg, env)
            res = self.fresh()
            self.unify(ft, TArrow(at, res), e, "ill-typed application")
            return res
        if isinstance(e, S.EInfix):
            info = self._lookup(e.op, env, e)
            e.con = info.kind == "con"
            e.basis = info.kind == "basis"
            ot = self.instantiate(info, e, e.op)
            lt = self.exp(e.lhs, env)
            rt = self.exp(e.rhs, env)
            res = self.fresh()
            self.unify(ot, TArrow(TTuple((lt, rt)), res), e, f"operator {e.op} applied to ill-typed operands")
            return res
        if isinstance(e, S.EFn):
            dom, cod = self.fresh(), self.fresh()
            self._rules(e.rules, dom, cod, env)
            self._matches.append((e, [[r.pat] for r in e.rules], [dom], "match", e))
            return TArrow(dom, cod)
        if isinstance(e, S.ECase):
            st = self.exp(e.scrutinee, env)
            res = self.fresh()
            self._rules(e.rules, st, res, env)
            self._matches.append((e, [[r.pat] for r in e.rules], [st], "match", e))
            return res
        if isinstance(e, S.EIf):
            self.unify(self.exp(e.cond, env), BOOL, e.cond, "condition must be bool")
            t = self.exp(e.then, env)
            self.unify(t, self.exp(e.else_, env), e, "branches of if have different types")
            return t
        if isinstance(e, (S.EAndalso, S.EOrelse)):
            self.unify(self.exp(e.lhs, env), BOOL, e.lhs, "operand must be bool")
            self.unify(self.exp(e.rhs, env), BOOL, e.rhs, "operand must be bool")
            return BOOL
        if isinstance(e, S.ELet):
            inner = env.child()
            for d in e.decls:
                self.dec(d, inner, top=False, path=())
            return self.exp(e.body, inner)
        if isinstance(e, S.ETyped):
            t = self.exp(e.exp, env)
            self.unify(t, self.ty(e.tyann, env), e, "expression does not match its annotation")
            return t
        raise TypeError(e)

    def _rules(self, rules, dom, cod, env: Env) -> None:
        for r in rules:
            binds: Dict[str, object] = {}
            self.unify(self.pat(r.pat, env, binds), dom, r.pat, "pattern type differs from earlier rules")
            renv = env.child()
            for n, t in binds.items():
                renv.add_value(n, ValInfo(mono(t)))
            self.unify(self.exp(r.body, renv), cod, r.body, "rule bodies have different types")

    def nonexpansive(self, e, env: Env) -> bool:
        if isinstance(e, (S.EVar, S.EInt, S.EReal, S.EString, S.EChar, S.EUnit, S.EFn, S.ESelector)):
            return True
        if isinstance(e, (S.ETuple, S.EList)):
            return all(self.nonexpansive(x, env) for x in e.items)
        if isinstance(e, S.ERecord):
            return all(self.nonexpansive(x, env) for _, x in e.fields)
        if isinstance(e, S.ETyped):
            return self.nonexpansive(e.exp, env)
        if isinstance(e, S.EApp) and isinstance(e.fn, S.EVar):
            info = env.lookup_value(e.fn.name)
            return info is not None and info.kind == "con" and self.nonexpansive(e.arg, env)
        if isinstance(e, S.EInfix):
            info = env.lookup_value(e.op)
            return info is not None and info.kind == "con" and self.nonexpansive(e.lhs, env) and self.nonexpansive(e.rhs, env)
        return False

    # ------------------------------------------------------------ declarations

    def dec(self, d, env: Env, top: bool, path: Tuple[str, ...]) -> None:
        if isinstance(d, S.DVal):
            self._dec_val(d, env)
        elif isinstance(d, S.DFun):
            self._dec_fun(d, env)
        elif isinstance(d, S.DDatatype):
            self._datatypes(d.binds, env, path)
        elif isinstance(d, S.DType):
            for b in d.binds:
                scope = {v: TVar(v) for v in b.tyvars}
                body = self.ty(b.ty, env, scope)
                b.sem = body
                env.types[b.name] = TypeInfo("abbrev", tuple(b.tyvars), body=body, name=b.name, path=path)
        elif isinstance(d, S.DInfix):
            pass
        elif isinstance(d, S.DLocal):
            inner = env.child()
            for x in d.inner:
                self.dec(x, inner, top, path)
            outer = inner.child()
            for x in d.outer:
                self.dec(x, outer, top, path)
            env.absorb(outer)
        elif isinstance(d, S.DStructure):
            if not top:
                raise ElabError("structures may only be declared at top level", d.span)
            for b in d.binds:
                e = self.strexp(b.str, env, path + (b.name,))
                if b.sig is not None:
                    self.sig_annotate(b.sig, env)
                    e = self.match_sig(e, b.sig, env, b)
                env.structures[b.name] = e
        elif isinstance(d, S.DSignature):
            for b in d.binds:
                sig = self.sig(b.sig, env, ())
                sig.ast, sig.defenv = b.sig, env
                env.signatures[b.name] = sig
        elif isinstance(d, S.DFunctor):
            for b in d.binds:
                self._dec_functor(b, env)
        else:
            raise UnsupportedConstruct(f"unsupported declaration {type(d).__name__}", getattr(d, "span", None))
        if top:
            self.flush(d)

    def _dec_val(self, d: S.DVal, env: Env) -> None:
        self._push_scope(d.tyvars)
        if d.rec:
            self._dec_val_rec(d, env)
            return
        results = []
        for b in d.binds:
            et = self.exp(b.exp, env)
            binds: Dict[str, object] = {}
            pt = self.pat(b.pat, env, binds)
            self.unify(pt, et, b, "pattern and expression types differ")
            self._matches.append((b, [[b.pat]], [et], "binding", b))
            results.append((b, binds))
        self._pop_scope(d)
        self._resolve_flex(final=False)
        for b, binds in results:
            gen = self.nonexpansive(b.exp, env)
            b.schemes = {}
            for n, t in binds.items():
                q = self.generalize([t], env) if gen else ()
                b.schemes[n] = TypeScheme(q, self.zonk(t))
        for b, _ in results:
            for n, sc in b.schemes.items():
                env.add_value(n, ValInfo(sc))

    def _dec_val_rec(self, d: S.DVal, env: Env) -> None:
        renv = env.child()
        names = []
        for b in d.binds:
            if not isinstance(b.pat, (S.PVar, S.PTyped)) or not isinstance(b.exp, S.EFn):
                raise ElabError("val rec requires a variable bound to fn", b.span)
            binds: Dict[str, object] = {}
            self.pat(b.pat, env, binds)
            for n, t in binds.items():
                renv.add_value(n, ValInfo(mono(t)))
                names.append((b, n, t))
        for b, n, t in names:
            self.unify(self.exp(b.exp, renv), t, b, "recursive value has inconsistent type")
        self._pop_scope(d)
        self._resolve_flex(final=False)
        q = self.generalize([t for _, _, t in names], env)
        for b, n, t in names:
            zt = self.zonk(t)
            b.schemes = {n: TypeScheme(tuple(v for v in q if v in free_vars(zt)), zt)}
            env.add_value(n, ValInfo(b.schemes[n]))

    def _dec_fun(self, d: S.DFun, env: Env) -> None:
        self._push_scope(d.tyvars)
        renv = env.child()
        ftypes = {}
        for b in d.binds:
            if b.name in ftypes:
                raise ElabError(f"function {b.name} declared twice in one group", b.span)
            ftypes[b.name] = self.fresh()
            renv.add_value(b.name, ValInfo(mono(ftypes[b.name])))
        for b in d.binds:
            arity = len(b.clauses[0].pats)
            params = [self.fresh() for _ in range(arity)]
            res = self.fresh()
            for c in b.clauses:
                if len(c.pats) != arity:
                    raise ElabError(f"clauses of {b.name} have different numbers of arguments", c.span)
                binds: Dict[str, object] = {}
                for p, pt in zip(c.pats, params):
                    self.unify(self.pat(p, renv, binds), pt, p, f"argument pattern of {b.name}")
                cenv = renv.child()
                for n, t in binds.items():
                    cenv.add_value(n, ValInfo(mono(t)))
                if c.ret is not None:
                    self.unify(res, self.ty(c.ret, renv), c, "result annotation")
                self.unify(self.exp(c.body, cenv), res, c.body, f"body of {b.name}")
            ft = res
            for pt in reversed(params):
                ft = TArrow(pt, ft)
            self.unify(ftypes[b.name], ft, b, f"recursive use of {b.name}")
            self._matches.append((b, [list(c.pats) for c in b.clauses], params, "function", b))
        self._pop_scope(d)
        self._resolve_flex(final=False)
        q = self.generalize(list(ftypes.values()), env)
        for b in d.binds:
            zt = self.zonk(ftypes[b.name])
            b.ty = zt
            b.scheme = TypeScheme(tuple(v for v in q if v in free_vars(zt)), zt)
            env.add_value(b.name, ValInfo(b.scheme))
        if d.contract is not None:
            fb = next(b for b in d.binds if b.name == d.contract.fname)
            d.elab_contract = self.elaborate_contract(d.contract, fb.scheme, env, len(fb.clauses[0].pats))

    def elaborate_contract(self, c: S.Contract, scheme: TypeScheme, env: Env, arity: Optional[int] = None) -> ElabContract:
        if arity is not None and len(c.inputs) != arity:
            raise ElabError(
                f"contract for {c.fname} has {len(c.inputs)} input group(s) but the function takes {arity}", c.span
            )
        t = self.instantiate(ValInfo(scheme), c, c.fname)
        binds: Dict[str, object] = {}
        input_types = []
        names: List[str] = []
        for p in c.inputs:
            ft = expand(t, self.subst)
            if not isinstance(ft, TArrow):
                raise ElabError(f"contract for {c.fname} has more inputs than the function", c.span)
            self._contract_pat(p, env, binds, names)
            self.unify(p.ty, ft.dom, p, "contract input does not match the function's argument type")
            input_types.append(ft.dom)
            t = ft.cod
        self._contract_pat(c.output, env, binds, names)
        self.unify(c.output.ty, t, c.output, "contract output does not match the function's result type")
        cenv = env.child()
        for n in names:
            cenv.add_value(n, ValInfo(mono(binds[n])))
        for label, cond in (("REQUIRES", c.requires), ("ENSURES", c.ensures)):
            ct = self.exp(cond, cenv)
            self.unify(ct, BOOL, cond, f"{label} condition: expected bool")
        return ElabContract(c, c.fname, [(n, binds[n]) for n in names], input_types, t)

    def _contract_pat(self, p, env: Env, binds, names: List[str]) -> None:
        fresh: Dict[str, object] = {}
        try:
            self.pat(p, env, fresh)
        except ElabError as e:
            raise ElabError(e.message, e.span or p.span) from None
        for n in collect_vars(p):
            if n in binds:
                raise ElabError(f"contract variable {n} is bound more than once", p.span)
            binds[n] = fresh[n]
            names.append(n)

    def _datatypes(self, binds: List[S.DatBind], env: Env, path: Tuple[str, ...]) -> None:
        infos = []
        for b in binds:
            info = DataInfo(self._unique_ident(path, b.name), b.name, tuple(b.tyvars), [], path)
            env.types[b.name] = TypeInfo("datatype", info.params, info.tcon(), data=info, name=b.name, path=path)
            infos.append(info)
        for b, info in zip(binds, infos):
            scope = {v: TVar(v) for v in b.tyvars}
            result = info.tcon()
            for cb in b.cons:
                payload = self.ty(cb.arg, env, scope) if cb.arg is not None else None
                info.cons.append((cb.name, payload))
                body = TArrow(payload, result) if payload is not None else result
                env.add_value(cb.name, ValInfo(TypeScheme(info.params, body), kind="con", datatype=info.ident))
            b.info = info
            self.table.add(info)

    # ------------------------------------------------------------ modules

    def strexp(self, s, env: Env, path: Tuple[str, ...]) -> Env:
        if isinstance(s, S.StrStruct):
            senv = env.child()
            for d in s.decls:
                self.dec(d, senv, top=True, path=path)
            return senv.own()
        if isinstance(s, S.StrVar):
            e = env.lookup_structure(s.name)
            if e is None:
                raise ElabError(f"unbound structure {s.name}", s.span)
            return e
        if isinstance(s, S.StrConstraint):
            e = self.strexp(s.str, env, path)
            self.sig_annotate(s.sig, env)
            return self.match_sig(e, s.sig, env, s)
        if isinstance(s, S.StrApp):
            f = env.lookup_functor(s.functor)
            if f is None:
                raise ElabError(f"unbound functor {s.functor}", s.span)
            arg = s.arg if not isinstance(s.arg, list) else S.StrStruct(s.arg, span=s.span)
            aenv = self.strexp(arg, env, path)
            view = self.match_sig(aenv, f.param_sig, f.defenv, s)
            fenv = f.defenv.child()
            fenv.structures[f.param] = view
            result = self.strexp(copy.deepcopy(f.body), fenv, path)
            if f.result_sig is not None:
                result = self.match_sig(result, f.result_sig, f.defenv, s)
            return result
        raise TypeError(s)

    def _dec_functor(self, b: S.FctBind, env: Env) -> None:
        self.sig_annotate(b.param_sig, env)
        param = self.sig(copy.deepcopy(b.param_sig), env, (b.param,))
        fenv = env.child()
        fenv.structures[b.param] = param.env
        body_env = self.strexp(b.body, fenv, (b.name,))
        if b.sig is not None:
            self.sig_annotate(b.sig, fenv)
            self.match_sig(body_env, b.sig, fenv, b)
        env.functors[b.name] = FunctorInfo(b.param, b.param_sig, b.body, env, b.sig, b.opaque, body_env)

    def sig_annotate(self, sigexp, env: Env) -> None:
        """Elaborate an inline signature in place so its specs carry types."""
        if isinstance(sigexp, S.SigSig):
            self.sig(sigexp, env, ())

    def sig(self, sigexp, env: Env, path: Tuple[str, ...]) -> Sig:
        if isinstance(sigexp, S.SigVar):
            known = env.lookup_signature(sigexp.name)
            if known is None:
                raise ElabError(f"unbound signature {sigexp.name}", sigexp.span)
            return self.sig(copy.deepcopy(known.ast), known.defenv, path)
        if not isinstance(sigexp, S.SigSig):
            raise TypeError(sigexp)
        senv = env.child()
        abstract: List[str] = []
        for spec in sigexp.specs:
            if isinstance(spec, S.SpecType):
                scope = {v: TVar(v) for v in spec.tyvars}
                if spec.ty is None:
                    ident = self._unique_ident(path, spec.name)
                    tcon = TCon(ident, tuple(TVar(v) for v in spec.tyvars), spec.name, path)
                    senv.types[spec.name] = TypeInfo("abstract", tuple(spec.tyvars), tcon, name=spec.name, path=path)
                    spec.sem = tcon
                    abstract.append(ident)
                else:
                    body = self.ty(spec.ty, senv, scope)
                    spec.sem = body
                    senv.types[spec.name] = TypeInfo("abbrev", tuple(spec.tyvars), body=body, name=spec.name, path=path)
            elif isinstance(spec, S.SpecVal):
                t = self.ty(spec.ty, senv, {}, open_scope=True)
                spec.sem = t
                senv.values[spec.name] = ValInfo(TypeScheme(tuple(free_vars_ordered(t)), t))
            elif isinstance(spec, S.SpecDatatype):
                self._datatypes(spec.binds, senv, path)
            elif isinstance(spec, S.SpecStructure):
                sub = self.sig(spec.sig, senv, path + (spec.name,))
                senv.structures[spec.name] = sub.env
                abstract.extend(sub.abstract)
            elif isinstance(spec, S.SpecInclude):
                sub = self.sig(spec.sig, senv, path)
                senv.absorb(sub.env)
                abstract.extend(sub.abstract)
            else:
                raise TypeError(spec)
        return Sig(senv.own(), abstract)

    def match_sig(self, e: Env, sigexp, defenv: Env, node) -> Env:
        """Check ``e`` against a fresh instance of ``sigexp``; return the view."""
        sig = self.sig(copy.deepcopy(sigexp), defenv, ())
        realization: Dict[str, Tuple[Tuple[str, ...], object]] = {}
        self._realize(e, sig.env, realization, node)
        return self._check_match(e, sig.env, realization, node)

    def _realize(self, e: Env, spec: Env, real, node) -> None:
        for name, ti in spec.types.items():
            actual = e.types.get(name)
            if actual is None:
                raise ElabError(f"structure does not define type {name} required by the signature", node.span)
            if actual.arity != ti.arity:
                raise ElabError(f"type {name} has the wrong number of parameters for the signature", node.span)
            if ti.kind == "abstract":
                args = tuple(TVar(p) for p in ti.params)
                real[ti.tcon.name] = (ti.params, self._type_fn(actual, args))
        for name, sub in spec.structures.items():
            actual = e.structures.get(name)
            if actual is None:
                raise ElabError(f"structure does not define substructure {name}", node.span)
            self._realize(actual, sub, real, node)

    @staticmethod
    def _type_fn(ti: TypeInfo, args):
        if ti.kind == "abbrev":
            return TAbbrev(ti.name, args, rename(ti.body, dict(zip(ti.params, args))), ti.path)
        return TCon(ti.tcon.name, args, ti.tcon.display, ti.tcon.path)

    def _check_match(self, e: Env, spec: Env, real, node) -> Env:
        view = Env()
        for name, ti in spec.types.items():
            actual = e.types[name]
            if ti.kind == "abbrev":
                args = tuple(TVar(p) for p in ti.params)
                want = _realize_type(rename(ti.body, dict(zip(ti.params, args))), real)
                if not _equivalent(self._type_fn(actual, args), want, self.subst):
                    raise ElabError(f"type {name} does not match its definition in the signature", node.span)
            elif ti.kind == "datatype":
                if actual.kind != "datatype" or actual.data.con_names() != ti.data.con_names():
                    raise ElabError(f"datatype {name} does not match the signature", node.span)
            view.types[name] = actual
        for name, vi in spec.values.items():
            actual = e.values.get(name)
            if actual is None:
                raise ElabError(f"structure does not define value {name} required by the signature", node.span)
            want = _realize_type(vi.scheme.body, real)
            if not _more_general(actual.scheme, want, vi.scheme.quantified, self.subst):
                raise ElabError(
                    f"value {name} has type {show(self.zonk(actual.scheme.body))}, "
                    f"which does not match {show(want)}", node.span)
            view.values[name] = actual
        for name, sub in spec.structures.items():
            view.structures[name] = self._check_match(e.structures[name], sub, real, node)
        return view

    # ------------------------------------------------------------ deferred checks

    def _resolve_flex(self, final: bool) -> None:
        pending, self._flex = self._flex, []
        for rho, fields, node in pending:
            t = expand(rho, self.subst)
            if isinstance(t, TRecord):
                for label, ft in fields.items():
                    if label not in t.labels():
                        raise ElabError(f"record type has no field {label}", node.span)
                    self.unify(ft, t.field_type(label), node, f"field {label}")
            elif isinstance(t, TVar):
                if final:
                    raise ElabError("cannot infer the full record type of this record pattern", node.span)
                self._flex.append((rho, fields, node))
            else:
                raise ElabError(f"record pattern used at non-record type {show(self.zonk(t))}", node.span)

    def flush(self, d) -> None:
        """End of a top-level declaration: settle deferred constraints, check
        matches and write final types into the tree."""
        self._resolve_flex(final=True)
        for v, allowed, name, node in self._overloads:
            t = expand(v, self.subst)
            if isinstance(t, TVar):
                self.unify(t, INT, node)
            elif not (isinstance(t, TCon) and t.name in allowed):
                raise ElabError(f"{name} is not defined at type {show(self.zonk(t))}", getattr(node, "span", None))
        self._overloads = []
        for v, node in self._equalities:
            for sub in subterms(self.zonk(v)):
                s = expand(sub, self.subst)
                if isinstance(s, TCon) and s.name == "real":
                    raise ElabError("real is not an equality type", getattr(node, "span", None))
                if isinstance(s, TArrow):
                    raise ElabError("function types do not admit equality", getattr(node, "span", None))
        self._equalities = []
        matches, self._matches = self._matches, []
        for target, rows, cols, kind, node in matches:
            m = PatternMatrix(rows, [self.zonk(c) for c in cols], self.table)
            target.exhaustive = is_exhaustive(m)
            if not target.exhaustive:
                self.warnings.append(self._warn(node, f"{kind} not exhaustive"))
            for i in redundant_rows(m):
                self.warnings.append(self._warn(node, f"redundant {kind} clause {i + 1}"))
        self._zonk_tree(d)

    @staticmethod
    def _warn(node, msg: str) -> Diagnostic:
        return Diagnostic(msg, getattr(node, "span", None))

    def _zonk_tree(self, root) -> None:
        for n in walk_nodes(root):
            if isinstance(n, S.EXP_TYPES + S.PAT_TYPES) and n.ty is not None:
                n.ty = self.zonk(n.ty)
            if isinstance(n, S.FunBind) and n.ty is not None:
                n.ty = self.zonk(n.ty)
                n.scheme = TypeScheme(n.scheme.quantified, self.zonk(n.scheme.body))
            if isinstance(n, S.ValBind) and n.schemes:
                n.schemes = {k: TypeScheme(v.quantified, self.zonk(v.body)) for k, v in n.schemes.items()}
            if isinstance(n, S.DFun) and n.elab_contract is not None:
                c = n.elab_contract
                c.variables = [(k, self.zonk(t)) for k, t in c.variables]
                c.input_types = [self.zonk(t) for t in c.input_types]
                c.output_type = self.zonk(c.output_type)
            if isinstance(n, (S.SpecVal, S.SpecType, S.TypBind)) and n.sem is not None:
                n.sem = self.zonk(n.sem)

    # ------------------------------------------------------------ entry point

    def program(self, decls: List) -> List[AnnotatedDecl]:
        out = []
        for d in decls:
            before = len(self.warnings)
            self.dec(d, self.env, top=True, path=())
            out.append(AnnotatedDecl(d, self.warnings[before:]))
        return out


def _realize_type(t, real):
    if isinstance(t, TCon):
        args = tuple(_realize_type(a, real) for a in t.args)
        if t.name in real:
            params, body = real[t.name]
            return rename(body, dict(zip(params, args)))
        return TCon(t.name, args, t.display, t.path)
    if isinstance(t, TTuple):
        return TTuple(tuple(_realize_type(a, real) for a in t.items))
    if isinstance(t, TArrow):
        return TArrow(_realize_type(t.dom, real), _realize_type(t.cod, real))
    if isinstance(t, TRecord):
        return TRecord(tuple((l, _realize_type(a, real)) for l, a in t.fields), t.order)
    if isinstance(t, TAbbrev):
        return TAbbrev(t.name, tuple(_realize_type(a, real) for a in t.args), _realize_type(t.expansion, real), t.path)
    return t


def _equivalent(a, b, subst) -> bool:
    s = dict(subst)
    rigid = free_vars(apply(a, s)) | free_vars(apply(b, s))
    try:
        unify_in_place(a, b, s, rigid)
        return True
    except UnifyError:
        return False


def _more_general(actual: TypeScheme, want, want_quantified, subst) -> bool:
    """Is ``actual`` at least as general as ``want`` (whose variables are rigid)?"""
    s = dict(subst)
    counter = [0]

    def fresh():
        counter[0] += 1
        return TVar(f"_'match{counter[0]}")

    body = rename(apply(actual.body, s), {q: fresh() for q in actual.quantified})
    try:
        unify_in_place(body, want, s, frozenset(free_vars(want)))
        return True
    except UnifyError:
        return False


def elaborate(program: List, infix_env: Optional[InfixEnvironment] = None) -> List[AnnotatedDecl]:
    """Type every node of ``program``; raises ElabError on the first type error."""
    return Elaborator(infix_env).program(program)


def elaborate_program(program: List, infix_env: Optional[InfixEnvironment] = None):
    """Like :func:`elaborate` but also returns the elaborator (environment,
    datatype table and warnings)."""
    el = Elaborator(infix_env)
    return el.program(program), el


def unify(a, b, subst: Optional[Dict[str, object]] = None) -> Dict[str, object]:
    s = dict(subst or {})
    unify_in_place(a, b, s)
    return s


__all__ = [
    "AnnotatedDecl", "ElabContract", "Elaborator", "elaborate", "elaborate_program", "unify",
    "walk_nodes", "BOOL", "CHAR", "INT", "REAL", "STRING", "UNIT", "list_of", "option_of",
]
