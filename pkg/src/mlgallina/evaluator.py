"""Fuel-bounded big-step interpreter used as the gate before translation."""

from __future__ import annotations

import sys
import threading
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from . import basis
from .basis import NIL, ConVal, SList, SMLRaise
from .elaborator.types import TCon, TRecord, TTuple, expand
from .frontend import syntax as S
from .patterns import RecVal, collect_vars

DEFAULT_FUEL = 1_000_000


# ---------------------------------------------------------------- values


@dataclass(eq=False)
class Closure:
    rules: List[S.Rule]
    env: Dict[str, Any] = field(repr=False)
    name: str = "fn"


@dataclass(eq=False)
class FunClosure:
    """A curried ``fun`` function; ``args`` holds the arguments applied so far."""

    bind: S.FunBind
    env: Dict[str, Any] = field(repr=False)
    args: tuple = ()


@dataclass(eq=False)
class BasisFn:
    name: str
    impl: Any


@dataclass(eq=False)
class ConFn:
    name: str


@dataclass
class Structure:
    env: Dict[str, Any] = field(repr=False)


@dataclass(frozen=True)
class BindFailure:
    exn: str


class _Failure(Exception):
    def __init__(self, kind: str, message: str, span=None):
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.span = span


class FuelExhausted(_Failure):
    def __init__(self):
        super().__init__("fuel-exhausted", "evaluation ran out of fuel")


@dataclass
class EvalOutcome:
    """``ok`` with the final top-level environment, or one of the failure kinds
    ``bind-failure``, ``fuel-exhausted`` and ``stuck``."""

    kind: str
    env: Optional[Dict[str, Any]] = field(default=None, repr=False)
    span: Optional[tuple] = None
    message: str = ""
    fuel_used: int = 0

    @property
    def ok(self) -> bool:
        return self.kind == "ok"

    def values(self) -> Dict[str, Any]:
        """Top-level value bindings (structures and functors omitted)."""
        if self.env is None:
            return {}
        return {k: v for k, v in self.env.items() if not k.startswith("%") and k not in _INITIAL_NAMES}


_BUILTIN_VALUES: Dict[str, Any] = {"true": True, "false": False, "nil": NIL, "NONE": basis.NONE}


def _initial_env() -> Dict[str, Any]:
    env: Dict[str, Any] = dict(_BUILTIN_VALUES)
    env["SOME"] = ConFn("SOME")
    env["::"] = ConFn("::")
    for e in basis.TOPLEVEL:
        env[e.name] = BasisFn(e.name, e.impl)
    for sname, entries in basis.STRUCTURES.items():
        env["%" + sname] = Structure({e.name: BasisFn(f"{sname}.{e.name}", e.impl) for e in entries})
    return env


_INITIAL_NAMES = frozenset(_initial_env())

_CON_NAMES = frozenset({"true", "false", "nil", "NONE", "SOME", "::"})


# ---------------------------------------------------------------- interpreter


class Frame:
    """A scope: fresh bindings in front of an enclosing environment.

    Chaining avoids copying the whole environment on every application.
    """

    __slots__ = ("vars", "parent")

    def __init__(self, vars: Dict[str, Any], parent):
        self.vars = vars
        self.parent = parent

    def get(self, name: str, default=None):
        f = self
        while type(f) is Frame:
            v = f.vars.get(name, _MISSING)
            if v is not _MISSING:
                return v
            f = f.parent
        return default if f is None else f.get(name, default)

    def __contains__(self, name: str) -> bool:
        return self.get(name, _MISSING) is not _MISSING

    def __getitem__(self, name: str):
        v = self.get(name, _MISSING)
        if v is _MISSING:
            raise KeyError(name)
        return v

    def flatten(self) -> Dict[str, Any]:
        chain = []
        f = self
        while type(f) is Frame:
            chain.append(f.vars)
            f = f.parent
        out = dict(f or {})
        for vars in reversed(chain):
            out.update(vars)
        return out


_MISSING = object()


def _scope(env) -> "Frame":
    """A new empty scope over ``env``.  Top-level environments stay flat
    dicts (one copy per declaration) so lookups from calls stay shallow."""
    if type(env) is dict:
        return Frame(dict(env), None)
    return Frame({}, env)


class Interpreter:
    """Big-step evaluator; one unit of fuel per application of a closure or
    basis function (constructor applications are free)."""

    def __init__(self, fuel: int = DEFAULT_FUEL):
        if fuel < 1:
            raise ValueError("fuel must be positive")
        self.fuel = fuel
        self.used = 0

    def tick(self) -> None:
        self.used += 1
        if self.used > self.fuel:
            raise FuelExhausted()

    # ------------------------------------------------------------ lookup

    @staticmethod
    def lookup(env, name: str, node=None):
        if "." in name:
            *path, last = name.split(".")
            cur = env
            for p in path:
                s = cur.get("%" + p)
                if s is None:
                    raise _Failure("stuck", f"unbound structure {p}", getattr(node, "span", None))
                cur = s.env
            if last not in cur:
                raise _Failure("stuck", f"unbound identifier {name}", getattr(node, "span", None))
            return cur[last]
        if name not in env:
            raise _Failure("stuck", f"unbound identifier {name}", getattr(node, "span", None))
        return env[name]

    # ------------------------------------------------------------ application

    def apply(self, f, v):
        """Apply a function value (used by basis higher-order functions)."""
        if isinstance(f, (Closure, FunClosure)):
            body, env = self._enter(f, v)
            if body is None:
                return env
            return self.eval(body, env)
        return self._apply_prim(f, v)

    def _apply_prim(self, f, v):
        if isinstance(f, BasisFn):
            self.tick()
            try:
                r = f.impl(self, v)
            except SMLRaise as exc:
                raise _Failure("bind-failure", f"uncaught exception {exc.exn} from {f.name}") from None
            except (TypeError, ValueError, AttributeError) as exc:
                raise _Failure("stuck", f"{f.name}: {exc}") from None
            return BasisFn(f.name, r) if callable(r) else r
        if isinstance(f, ConFn):
            if f.name == "::":
                return SList((v[0],) + tuple(v[1]))
            return ConVal(f.name, v)
        raise _Failure("stuck", f"cannot apply non-function value {f!r}")

    def _enter(self, f, v):
        """Returns (body, env) to continue with, or (None, value) when done."""
        self.used += 1
        if self.used > self.fuel:
            raise FuelExhausted()
        if type(f) is Closure:
            for r in f.rules:
                binds = {}
                if self.match(r.pat, v, binds, f.env):
                    return r.body, Frame(binds, f.env)
            raise _Failure("bind-failure", f"uncaught exception Match in {f.name}")
        clauses = f.bind.clauses
        if not f.args and len(clauses) == 1:
            pats = clauses[0].pats
            if len(pats) == 1 and type(pats[0]) is S.PVar and not pats[0].con and pats[0].ty is not None:
                return clauses[0].body, Frame({pats[0].name: v}, f.env)
        args = f.args + (v,)
        arity = len(clauses[0].pats)
        if len(args) < arity:
            return None, FunClosure(f.bind, f.env, args)
        for c in f.bind.clauses:
            binds = {}
            if all(self.match(p, a, binds, f.env) for p, a in zip(c.pats, args)):
                return c.body, Frame(binds, f.env)
        raise _Failure("bind-failure", f"uncaught exception Match in {f.bind.name}")

    # ------------------------------------------------------------ patterns

    def is_con(self, p, env) -> bool:
        if p.con:
            return True
        if p.ty is not None:
            return False
        v = env.get(p.name)
        return p.name in _CON_NAMES or isinstance(v, ConFn) or (isinstance(v, ConVal) and v.name == p.name)

    def match(self, p, v, binds, env) -> bool:
        if isinstance(p, S.PWild):
            return True
        if isinstance(p, S.PVar):
            if self.is_con(p, env):
                if p.name == "true":
                    return v is True
                if p.name == "false":
                    return v is False
                if p.name == "nil":
                    return isinstance(v, SList) and not v
                return isinstance(v, ConVal) and v.name == p.name.rpartition(".")[2] and v.payload is None
            binds[p.name] = v
            return True
        if isinstance(p, (S.PInt, S.PString, S.PChar)):
            return v == p.value
        if isinstance(p, S.PUnit):
            return v == ()
        if isinstance(p, S.PTuple):
            return all(self.match(x, y, binds, env) for x, y in zip(p.items, v))
        if isinstance(p, S.PList):
            return len(v) == len(p.items) and all(self.match(x, y, binds, env) for x, y in zip(p.items, v))
        if isinstance(p, S.PRecord):
            d = dict(v)
            return all(self.match(x, d[l], binds, env) for l, x in p.fields)
        if isinstance(p, S.PInfix) or (isinstance(p, S.PConApp) and p.name == "::"):
            name = p.op if isinstance(p, S.PInfix) else p.name
            if isinstance(p, S.PInfix):
                lhs, rhs = p.lhs, p.rhs
            else:
                lhs, rhs = p.arg.items if isinstance(p.arg, S.PTuple) else (None, None)
            if name == "::":
                if not (isinstance(v, SList) and v):
                    return False
                if lhs is None:
                    return self.match(p.arg, (v[0], SList(v[1:])), binds, env)
                return self.match(lhs, v[0], binds, env) and self.match(rhs, SList(v[1:]), binds, env)
            if not (isinstance(v, ConVal) and v.name == name.rpartition(".")[2]):
                return False
            return self.match(lhs, v.payload[0], binds, env) and self.match(rhs, v.payload[1], binds, env)
        if isinstance(p, S.PConApp):
            if not (isinstance(v, ConVal) and v.name == p.name.rpartition(".")[2]):
                return False
            return self.match(p.arg, v.payload, binds, env)
        if isinstance(p, S.PTyped):
            return self.match(p.pat, v, binds, env)
        if isinstance(p, S.PLayered):
            binds[p.name] = v
            return self.match(p.pat, v, binds, env)
        raise _Failure("stuck", f"cannot match pattern {type(p).__name__}", p.span)

    # ------------------------------------------------------------ expressions

    def eval(self, e, env):
        # dispatch on exact node type; this loop is the interpreter's hot path
        while True:
            t = type(e)
            if t is S.EVar:
                if type(env) is Frame:
                    v = env.vars.get(e.name, _MISSING)
                    if v is _MISSING and env.parent is not None:
                        v = env.parent.get(e.name, _MISSING)
                else:
                    v = env.get(e.name, _MISSING)
                return v if v is not _MISSING else self.lookup(env, e.name, e)
            if t is S.EInt or t is S.EString or t is S.EChar:
                return e.value
            if t is S.EApp:
                f = self.eval(e.fn, env)
                v = self.eval(e.arg, env)
            elif t is S.EInfix:
                f = env.get(e.op, _MISSING)
                if f is _MISSING:
                    f = self.lookup(env, e.op, e)
                v = (self.eval(e.lhs, env), self.eval(e.rhs, env))
            elif t is S.EIf:
                e = e.then if self.eval(e.cond, env) else e.else_
                continue
            elif t is S.ECase:
                v = self.eval(e.scrutinee, env)
                for r in e.rules:
                    binds = {}
                    if self.match(r.pat, v, binds, env):
                        e, env = r.body, Frame(binds, env)
                        break
                else:
                    raise _Failure("bind-failure", "uncaught exception Match", e.span)
                continue
            elif t is S.ELet:
                for d in e.decls:
                    env = self.dec(d, env)
                e = e.body
                continue
            elif t is S.ETyped:
                e = e.exp
                continue
            else:
                return self._eval_simple(e, env)
            tf = type(f)
            if tf is FunClosure or tf is Closure:
                body, env2 = self._enter(f, v)
                if body is None:
                    return env2
                e, env = body, env2
                continue
            if tf is BasisFn:
                self.used += 1
                if self.used > self.fuel:
                    raise FuelExhausted()
                try:
                    r = f.impl(self, v)
                except SMLRaise as exc:
                    raise _Failure("bind-failure", f"uncaught exception {exc.exn} from {f.name}", e.span) from None
                except _Failure as exc:
                    exc.span = exc.span or e.span
                    raise
                except (TypeError, ValueError, AttributeError) as exc:
                    raise _Failure("stuck", f"{f.name}: {exc}", e.span) from None
                return BasisFn(f.name, r) if callable(r) else r
            try:
                return self._apply_prim(f, v)
            except _Failure as exc:
                exc.span = exc.span or e.span
                raise

    def _eval_simple(self, e, env):
        if isinstance(e, S.EVar):
            v = self.lookup(env, e.name, e)
            return v
        if isinstance(e, (S.EInt, S.EString, S.EChar)):
            return e.value
        if isinstance(e, S.EReal):
            return float(e.text.replace("~", "-"))
        if isinstance(e, S.EUnit):
            return ()
        if isinstance(e, S.ETuple):
            return tuple(self.eval(x, env) for x in e.items)
        if isinstance(e, S.EList):
            return SList(self.eval(x, env) for x in e.items)
        if isinstance(e, S.ERecord):
            vals = {l: self.eval(x, env) for l, x in e.fields}
            return RecVal(sorted(vals.items(), key=lambda kv: _label_key(kv[0])))
        if isinstance(e, S.ESelector):
            label = e.label
            return BasisFn(f"#{label}", lambda ev, r: dict(r)[label])
        if isinstance(e, S.EFn):
            return Closure(e.rules, env)
        if isinstance(e, S.EAndalso):
            return bool(self.eval(e.lhs, env)) and bool(self.eval(e.rhs, env))
        if isinstance(e, S.EOrelse):
            return bool(self.eval(e.lhs, env)) or bool(self.eval(e.rhs, env))
        raise _Failure("stuck", f"cannot evaluate {type(e).__name__}", getattr(e, "span", None))

    # ------------------------------------------------------------ declarations

    def dec(self, d, env):
        if isinstance(d, S.DVal):
            if d.rec:
                new = _scope(env)
                for b in d.binds:
                    name = _pat_name(b.pat)
                    new.vars[name] = Closure(b.exp.rules, new, name)
                return new
            binds = {}
            for b in d.binds:
                v = self.eval(b.exp, env)
                if not self.match(b.pat, v, binds, env):
                    raise _Failure("bind-failure", "uncaught exception Bind", b.span)
            return Frame(binds, env)
        if isinstance(d, S.DFun):
            new = _scope(env)
            for b in d.binds:
                new.vars[b.name] = FunClosure(b, new)
            return new
        if isinstance(d, S.DDatatype):
            new = _scope(env)
            for b in d.binds:
                for c in b.cons:
                    new.vars[c.name] = ConFn(c.name) if c.arg is not None else ConVal(c.name)
            return new
        if isinstance(d, (S.DType, S.DInfix, S.DSignature)):
            return env
        if isinstance(d, S.DLocal):
            inner = env
            for x in d.inner:
                inner = self.dec(x, inner)
            outer = inner
            for x in d.outer:
                outer = self.dec(x, outer)
            new = _scope(env)
            for x in d.outer:
                for k in _declared(x):
                    new.vars[k] = outer[k]
            return new
        if isinstance(d, S.DStructure):
            new = _scope(env)
            for b in d.binds:
                new.vars["%" + b.name] = self.strexp(b.str, env)
            return new
        if isinstance(d, S.DFunctor):
            new = _scope(env)
            for b in d.binds:
                new.vars["%%" + b.name] = (b, env)
            return new
        raise _Failure("stuck", f"cannot evaluate declaration {type(d).__name__}", getattr(d, "span", None))

    def strexp(self, s, env) -> Structure:
        if isinstance(s, S.StrStruct):
            inner = env
            names: List[str] = []
            for d in s.decls:
                inner = self.dec(d, inner)
                names.extend(_declared(d))
            return Structure({k: inner[k] for k in names})
        if isinstance(s, S.StrVar):
            cur = env
            st = None
            for p in s.name.split("."):
                st = cur.get("%" + p)
                if st is None:
                    raise _Failure("stuck", f"unbound structure {s.name}", s.span)
                cur = st.env
            return st
        if isinstance(s, S.StrConstraint):
            return self.strexp(s.str, env)
        if isinstance(s, S.StrApp):
            entry = env.get("%%" + s.functor)
            if entry is None:
                raise _Failure("stuck", f"unbound functor {s.functor}", s.span)
            fb, fenv = entry
            arg = s.arg if not isinstance(s.arg, list) else S.StrStruct(s.arg)
            a = self.strexp(arg, env)
            # functor bodies are evaluated only here, at the application site
            return self.strexp(fb.body, Frame({"%" + fb.param: a}, fenv))
        raise _Failure("stuck", f"cannot evaluate structure {type(s).__name__}", getattr(s, "span", None))

    def program(self, decls) -> Dict[str, Any]:
        env = _initial_env()
        for d in decls:
            env = self.dec(getattr(d, "decl", d), env)
            if type(env) is Frame:
                env = env.flatten()
        return env


def _declared(d) -> List[str]:
    """Environment keys introduced by a declaration."""
    if isinstance(d, S.DVal):
        return [n for b in d.binds for n in collect_vars(b.pat)]
    if isinstance(d, S.DFun):
        return [b.name for b in d.binds]
    if isinstance(d, S.DDatatype):
        return [c.name for b in d.binds for c in b.cons]
    if isinstance(d, S.DLocal):
        return [n for x in d.outer for n in _declared(x)]
    if isinstance(d, S.DStructure):
        return ["%" + b.name for b in d.binds]
    if isinstance(d, S.DFunctor):
        return ["%%" + b.name for b in d.binds]
    return []


def _pat_name(p) -> str:
    while isinstance(p, S.PTyped):
        p = p.pat
    return p.name


def _label_key(label: str):
    return (0, int(label), "") if label.isdigit() else (1, 0, label)


_STACK_SIZE = 512 * 1024 * 1024


def _run_deep(fn):
    """Run ``fn`` on a thread with a large stack and recursion limit."""
    result: Dict[str, Any] = {}

    def target():
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(200_000)
        try:
            result["value"] = fn()
        except BaseException as exc:  # re-raised in the caller
            result["error"] = exc
        finally:
            sys.setrecursionlimit(old)

    prev = threading.stack_size()
    threading.stack_size(_STACK_SIZE)
    try:
        t = threading.Thread(target=target)
        t.start()
        t.join()
    finally:
        threading.stack_size(prev)
    if "error" in result:
        raise result["error"]
    return result["value"]


def evaluate(program, fuel: int = DEFAULT_FUEL) -> EvalOutcome:
    """Evaluate a program; failures are reported in the outcome, never raised."""
    interp = Interpreter(fuel)

    def go():
        try:
            env = interp.program(program)
            return EvalOutcome("ok", env, fuel_used=interp.used)
        except FuelExhausted as exc:
            return EvalOutcome("fuel-exhausted", message=exc.message, fuel_used=interp.used)
        except RecursionError:
            return EvalOutcome("fuel-exhausted", message="evaluation exceeded the recursion depth", fuel_used=interp.used)
        except _Failure as exc:
            return EvalOutcome(exc.kind, span=exc.span, message=exc.message, fuel_used=interp.used)

    return _run_deep(go)


def apply_basis_stub(name: str, args: List[Any]):
    """Apply a basis function to curried arguments; an SML exception becomes
    a :class:`BindFailure`."""
    entry = basis.lookup(name)
    if entry is None:
        raise KeyError(f"unknown basis function {name}")
    interp = Interpreter()
    f: Any = BasisFn(name, entry.impl)
    try:
        for a in args:
            f = interp._apply_prim(f, a)
    except _Failure as exc:
        return BindFailure(exc.message.split()[2] if exc.kind == "bind-failure" else exc.message)
    return f


def show_value(v, ty=None) -> str:
    """SML-style rendering of a value, as printed by an SML toplevel.

    ``ty`` is only needed to tell characters from one-letter strings.
    """
    ty = expand(ty, {}) if ty is not None else None

    def arg(i):
        if isinstance(ty, TTuple):
            return ty.items[i]
        if isinstance(ty, TCon) and ty.args:
            return ty.args[0]
        return None

    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, int):
        return f"~{-v}" if v < 0 else str(v)
    if isinstance(v, float):
        return _show_real(v)
    if isinstance(v, str):
        body = v.replace("\\", "\\\\").replace('"', '\\"')
        if isinstance(ty, TCon) and ty.name == "char":
            return f'#"{body}"'
        return f'"{body}"'
    if isinstance(v, SList):
        return "[" + ",".join(show_value(x, arg(0)) for x in v) + "]"
    if isinstance(v, RecVal):
        fields = dict(ty.fields) if isinstance(ty, TRecord) else {}
        return "{" + ",".join(f"{l}={show_value(x, fields.get(l))}" for l, x in v) + "}"
    if isinstance(v, tuple):
        return "()" if not v else "(" + ",".join(show_value(x, arg(i)) for i, x in enumerate(v)) + ")"
    if isinstance(v, ConVal):
        if v.payload is None:
            return v.name
        inner = show_value(v.payload, arg(0) if v.name == "SOME" else None)
        if isinstance(v.payload, ConVal) and v.payload.payload is not None:
            inner = f"({inner})"
        return f"{v.name} {inner}"
    if isinstance(v, (Closure, FunClosure, BasisFn, ConFn)):
        return "fn"
    return repr(v)


def _show_real(r: float) -> str:
    if r != r:
        return "nan"
    if r in (float("inf"), float("-inf")):
        return "inf" if r > 0 else "~inf"
    text = repr(r)
    if text.endswith(".0"):
        text = text[:-2] + ".0"
    return text.replace("-", "~").replace("e", "E")


__all__ = [
    "DEFAULT_FUEL", "EvalOutcome", "BindFailure", "Interpreter", "evaluate", "apply_basis_stub", "show_value",
]
