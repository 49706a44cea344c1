"""Concrete Gallina syntax for the AST in :mod:`.syntax`.

Applications and infix operators are always parenthesized, except on
either side of a propositional ``=`` where an application prints bare.
Binding forms (``fun``, ``let``, ``if``, ``forall``, ``exists``) print
bare only where they may extend to the right edge of their context.
"""

from __future__ import annotations

from typing import List

from .syntax import (
    GAnd, GAnnot, GApp, GArrow, GAxiom, GBoolAnd, GBoolOr, GChar, GDeclareModule, GDefinition, GEq,
    GEquations, GExists, GExplicitApp, GForall, GFun, GGeneralizable, GIdent, GIf, GInclude, GInductive,
    GInfix, GInt, GLet, GList, GMatch, GModule, GModuleType, GNotation, GOr, GPAs, GParameter, GPChar,
    GPCon, GPInfix, GPInt, GPList, GPRecord, GPString, GPTuple, GPUnit, GPVar, GPWild, GProduct,
    GQualIdent, GReal, GRecordDecl, GRecordLit, GRequire, GScope, GSort, GString, GTheorem, GTuple,
    GUnit,
)

TOP = 200
OPAQUE_NOTE = "(* opaque ascription: the abstraction is not enforced by <: *)"


def quote(s: str) -> str:
    return '"' + s.replace('"', '""') + '"'


def _binder_level(t) -> bool:
    return isinstance(t, (GFun, GLet, GIf, GForall, GExists))


def term(t, level: int = TOP, tail: bool = True) -> str:
    """Render ``t`` at a position admitting operators up to ``level``."""
    if isinstance(t, GIdent):
        return t.name
    if isinstance(t, GQualIdent):
        return t.dotted
    if isinstance(t, GSort):
        return t.name
    if isinstance(t, GInt):
        return str(t.value) if t.value >= 0 else f"({t.value})"
    if isinstance(t, GReal):
        return (f"({t.text})" if t.text.startswith("-") else t.text) + "%float"
    if isinstance(t, GString):
        return quote(t.value)
    if isinstance(t, GChar):
        return quote(t.value) + "%char"
    if isinstance(t, GUnit):
        return "tt"
    if isinstance(t, GTuple):
        return "(" + ", ".join(term(x, TOP, False) for x in t.items) + ")"
    if isinstance(t, GList):
        return "[" + "; ".join(term(x, TOP, False) for x in t.items) + "]"
    if isinstance(t, GRecordLit):
        return "{| " + "; ".join(f"{f} := {term(x, TOP, False)}" for f, x in t.fields) + " |}"
    if isinstance(t, GApp):
        return "(" + _app(t) + ")"
    if isinstance(t, GExplicitApp):
        s = "@" + t.name + "".join(" " + term(a, 0) for a in t.args)
        return s if level >= 10 else f"({s})"
    if isinstance(t, GInfix):
        return f"({term(t.lhs, 0)} {t.op} {term(t.rhs, 0)})"
    if isinstance(t, GBoolAnd):
        return f"({term(t.lhs, 0)} && {term(t.rhs, 0)})"
    if isinstance(t, GBoolOr):
        return f"({term(t.lhs, 0)} || {term(t.rhs, 0)})"
    if isinstance(t, GScope):
        return term(t.term, 0) + "%" + t.key
    if isinstance(t, GProduct):
        return "(" + " * ".join(term(x, 39, False) for x in t.items) + ")"
    if isinstance(t, GAnnot):
        return f"({term(t.term)} : {term(t.type)})"
    if isinstance(t, GMatch):
        arms = " | ".join(f"{pattern(p)} => {term(b)}" for p, b in t.branches)
        s = f"match {term(t.scrutinee)} with {arms} end"
        return s if level >= TOP else f"({s})"
    if isinstance(t, GArrow):
        s = f"{term(t.dom, 98, False)} -> {term(t.cod, 99, tail)}"
        return s if level >= 99 else f"({s})"
    if isinstance(t, GAnd):
        s = f"{term(t.lhs, 79, False)} /\\ {term(t.rhs, 80, tail)}"
        return s if level >= 80 else f"({s})"
    if isinstance(t, GOr):
        s = f"{_disjunct(t.lhs)} \\/ {_disjunct(t.rhs) if not isinstance(t.rhs, GOr) else term(t.rhs, 85, tail)}"
        return s if level >= 85 else f"({s})"
    if isinstance(t, GEq):
        if t.prefix:
            s = f"eq ({_eqside(t.lhs)}) ({_eqside(t.rhs)})"
        else:
            s = f"{_eqside(t.lhs)} = {_eqside(t.rhs)}"
        return s if level >= 70 else f"({s})"
    if _binder_level(t):
        s = _binder(t, tail)
        return s if level >= TOP and tail else f"({s})"
    raise TypeError(f"not a Gallina term: {t!r}")


def _app(t: GApp) -> str:
    return " ".join([term(t.fn, 0)] + [term(a, 0) for a in t.args])


def _eqside(t) -> str:
    if isinstance(t, GApp):
        return _app(t)
    if isinstance(t, GInfix) and t.op == "::":
        return f"{term(t.lhs, 0)} :: {_eqside(t.rhs)}"
    return term(t, 69, False)


def _disjunct(t) -> str:
    return term(t, 70, False) if isinstance(t, GEq) else "(" + term(t) + ")"


def _forall_binders(binders) -> str:
    out = []
    for i, b in enumerate(binders):
        if b.implicit:
            text = "{" + b.name + (f" : {term(b.type)}" if b.type is not None else "") + "}"
            out.append(text if i == 0 and b.type is None else " " + text)
        elif b.type is not None:
            out.append(f" ({b.name} : {term(b.type)})")
        else:
            out.append(" " + b.name)
    return "".join(out)


def _binder(t, tail: bool) -> str:
    if isinstance(t, GFun):
        bs = " ".join(p.name if isinstance(p, GPVar) else "'" + pattern(p) for p in t.binders)
        return f"fun {bs} => {term(t.body)}"
    if isinstance(t, GLet):
        lhs = t.pat.name if isinstance(t.pat, GPVar) else "'" + pattern(t.pat)
        return f"let {lhs} := {term(t.value)} in {term(t.body)}"
    if isinstance(t, GIf):
        return f"if {term(t.cond)} then {term(t.then)} else {term(t.else_)}"
    if isinstance(t, GForall):
        return f"forall{_forall_binders(t.binders)}, {term(t.body)}"
    if isinstance(t, GExists):
        return f"exists {' '.join(t.names)}, {term(t.body)}"
    raise TypeError(t)


def pattern(p) -> str:
    if isinstance(p, GPWild):
        return "_"
    if isinstance(p, GPVar):
        return p.name
    if isinstance(p, GPCon):
        if not p.args:
            return p.name
        return "(" + p.name + "".join(" " + pattern(a) for a in p.args) + ")"
    if isinstance(p, GPInt):
        return str(p.value) if p.value >= 0 else f"({p.value})"
    if isinstance(p, GPString):
        return quote(p.value)
    if isinstance(p, GPChar):
        return quote(p.value) + "%char"
    if isinstance(p, GPUnit):
        return "tt"
    if isinstance(p, GPTuple):
        return "(" + ", ".join(pattern(x) for x in p.items) + ")"
    if isinstance(p, GPList):
        return "[" + "; ".join(pattern(x) for x in p.items) + "]"
    if isinstance(p, GPInfix):
        return f"({pattern(p.lhs)} {p.op} {pattern(p.rhs)})"
    if isinstance(p, GPRecord):
        return "{| " + "; ".join(f"{f} := {pattern(x)}" for f, x in p.fields) + " |}"
    if isinstance(p, GPAs):
        return f"({pattern(p.pat)} as {p.name})"
    raise TypeError(f"not a Gallina pattern: {p!r}")


# -------------------------------------------------------------- sentences


def _implicits(names) -> str:
    return "".join(f" {{{n} : Type}}" for n in names)


def sentence(s, indent: int = 0, width: int = 100, step: int = 2) -> List[str]:
    """Render one sentence as a list of lines indented by ``indent``."""
    pad = " " * indent
    if isinstance(s, GRequire):
        mods = " ".join(s.modules)
        return [pad + (f"From {s.source} Require Import {mods}." if s.source else f"Require Import {mods}.")]
    if isinstance(s, GGeneralizable):
        return [pad + "Generalizable All Variables."]
    if isinstance(s, GDefinition):
        head = f"Definition {s.name}{_implicits(s.implicits)}"
        head += "".join(f" ({n} : {term(t)})" for n, t in s.params)
        if s.ret is not None:
            head += f" : {term(s.ret)}"
        body = term(s.body)
        line = f"{pad}{head} := {body}."
        if len(line) <= width:
            return [line]
        return [f"{pad}{head} :=", f"{pad}{' ' * step}{body}."]
    if isinstance(s, GEquations):
        lines: List[str] = []
        for i, eq in enumerate([s] + list(s.companions)):
            head = ("Equations " if i == 0 else "with ") + eq.name
            for b in eq.binders:
                head += f" {'`' if b.generalized else ''}({b.name}: {term(b.type)})"
            tail = f": {term(eq.ret)} :="
            if eq.precondition is not None:
                pre = "{H: " + term(eq.precondition) + "}"
                if len(pad) + len(head) + 1 + len(pre) + len(tail) > width:
                    # the precondition goes on its own continuation line
                    lines.append(pad + head)
                    head = " " * (2 * step) + pre
                else:
                    head += " " + pre
            lines.append(f"{pad}{head}{tail}")
            for j, (pats, body) in enumerate(eq.clauses):
                lhs = " ".join([eq.name] + [pattern(p) for p in pats])
                sep = ";" if j < len(eq.clauses) - 1 else ""
                lines.append(f"{pad}{' ' * step}{lhs} := {term(body)}{sep}")
        lines[-1] += "."
        return lines
    if isinstance(s, GInductive):
        lines = []
        for i, ind in enumerate([s] + list(s.companions)):
            kw = "Inductive " if i == 0 else "with "
            lines.append(f"{pad}{kw}{ind.name}{_implicits(ind.params)} : Type :=")
            for c, ty in ind.constructors:
                lines.append(f"{pad}{' ' * step}| {c}" + (f" : {term(ty)}" if ty is not None else ""))
        lines[-1] += "."
        return lines
    if isinstance(s, GRecordDecl):
        fields = "; ".join(f"{f} : {term(t)}" for f, t in s.fields)
        return [f"{pad}Record {s.name}{_implicits(s.params)} := {{ {fields} }}."]
    if isinstance(s, GTheorem):
        stmt = term(s.statement)
        line = f"{pad}Theorem {s.name}: {stmt}."
        if len(line) > width and " -> " in stmt:
            left, _, right = stmt.rpartition(" -> ")
            out = [f"{pad}Theorem {s.name}: {left} ->", f"{pad}{' ' * step}{right}."]
        else:
            out = [line]
        return out + [pad + "Admitted."]
    if isinstance(s, GAxiom):
        return [f"{pad}{'Local ' if s.local else ''}Axiom {s.name} : {term(s.statement)}."]
    if isinstance(s, GNotation):
        return [f"{pad}Notation {quote(s.symbol)} := {term(s.body, 0)} ({s.assoc} associativity, at level {s.level})."]
    if isinstance(s, GModule):
        head = f"Module {s.name}" + "".join(f" ({p} : {t})" for p, t in s.params)
        if s.ascription:
            head += f" <: {s.ascription}"
        lines = [pad + OPAQUE_NOTE] if s.opaque else []
        if s.body is None:
            rhs = f"!{s.functor} {s.argument}" if s.functor else s.argument
            return lines + [f"{pad}{head} := {rhs}."]
        lines.append(f"{pad}{head}.")
        for sub in s.body:
            lines.extend(sentence(sub, indent + step, width, step))
        return lines + [f"{pad}End {s.name}."]
    if isinstance(s, GModuleType):
        lines = [f"{pad}Module Type {s.name}."]
        for sub in s.body:
            lines.extend(sentence(sub, indent + step, width, step))
        return lines + [f"{pad}End {s.name}."]
    if isinstance(s, GParameter):
        return [f"{pad}Parameter {s.name} : {term(s.type)}."]
    if isinstance(s, GDeclareModule):
        return [f"{pad}Declare Module {s.name} : {s.type}."]
    if isinstance(s, GInclude):
        return [f"{pad}Include {s.name}."]
    raise TypeError(f"not a Gallina sentence: {s!r}")
