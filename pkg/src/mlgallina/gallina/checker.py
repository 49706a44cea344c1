"""Re-parser for the Gallina text the printer emits.

It accepts exactly the surface the printer produces, which is enough to
check that every emitted sentence reads back to the same AST.
"""

from __future__ import annotations

import re
from typing import List, Optional, Sequence

from ..errors import MLGallinaError
from . import printer
from .syntax import (
    HOLE, GAnd, GAnnot, GApp, GArrow, GAxiom, GBinder, GBoolAnd, GBoolOr, GChar, GDeclareModule,
    GDefinition, GEq, GEqBinder, GEquations, GExists, GExplicitApp, GForall, GFun, GGeneralizable,
    GIdent, GIf, GInclude, GInductive, GInfix, GInt, GLet, GList, GMatch, GModule, GModuleType,
    GNotation, GOr, GPAs, GParameter, GPChar, GPCon, GPInfix, GPInt, GPList, GPRecord, GPString,
    GPTuple, GPUnit, GPVar, GPWild, GProduct, GQualIdent, GReal, GRecordDecl, GRecordLit, GRequire,
    GScope, GSort, GString, GTheorem, GTuple, GUnit,
)


class GallinaSyntaxError(MLGallinaError):
    stage = "gallina syntax error"


_SYMBOLS = [
    ":=", "=>", "->", "/\\", "\\/", "&&", "||", "{|", "|}", "::", "++", "<>", "<=", ">=", "<:",
    "(", ")", "{", "}", "[", "]", ";", ",", ".", ":", "|", "*", "+", "-", "=", "<", ">", "%",
    "@", "`", "'", "!", "^", "/", "~",
]
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*(?:\.[A-Za-z_][A-Za-z0-9_']*)*")
_NUM = re.compile(r"[0-9]+(?:\.[0-9]+)?")

BINDERS = {"fun", "let", "if", "match", "forall", "exists"}
KEYWORDS = BINDERS | {"end", "with", "then", "else", "in", "as"}
SYMBOL_INFIXES = {"+", "-", "*", "/", "^", "++", "<", ">", "<=", ">=", "=", "<>", "&&", "||", "::"}
WORD_INFIXES = {"div", "mod", "o"}
BUILTIN_CONSTRUCTORS = {"true", "false", "None", "Some"}


def tokenize(text: str) -> List[tuple]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if text.startswith("(*", i):
            depth, i = 1, i + 2
            while i < n and depth:
                if text.startswith("(*", i):
                    depth, i = depth + 1, i + 2
                elif text.startswith("*)", i):
                    depth, i = depth - 1, i + 2
                else:
                    i += 1
            if depth:
                raise GallinaSyntaxError("unterminated comment", (i, i))
            continue
        if c == '"':
            j, buf = i + 1, []
            while True:
                if j >= n:
                    raise GallinaSyntaxError("unterminated string", (i, i))
                if text[j] == '"':
                    if text.startswith('""', j):
                        buf.append('"')
                        j += 2
                        continue
                    break
                buf.append(text[j])
                j += 1
            toks.append(("str", "".join(buf), i))
            i = j + 1
            continue
        m = _NUM.match(text, i)
        if m:
            toks.append(("num", m.group(), i))
            i = m.end()
            continue
        m = _IDENT.match(text, i)
        if m:
            toks.append(("id", m.group(), i))
            i = m.end()
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(("sym", sym, i))
                i += len(sym)
                break
        else:
            raise GallinaSyntaxError(f"unexpected character {c!r}", (i, i))
    toks.append(("eof", "", n))
    return toks


class GallinaParser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.constructors = set(BUILTIN_CONSTRUCTORS)
        self.word_infixes = set(WORD_INFIXES)

    # ------------------------------------------------------------ helpers

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value: str, k: int = 0) -> bool:
        kind, v, _ = self.peek(k)
        return kind in ("sym", "id") and v == value

    def advance(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str):
        t = self.advance()
        if t[1] != value or t[0] not in ("sym", "id"):
            raise GallinaSyntaxError(f"expected {value!r}, found {t[1]!r}", (t[2], t[2]))
        return t

    def ident(self) -> str:
        t = self.advance()
        if t[0] != "id":
            raise GallinaSyntaxError(f"expected identifier, found {t[1]!r}", (t[2], t[2]))
        return t[1]

    def error(self, msg: str):
        t = self.peek()
        return GallinaSyntaxError(f"{msg} at {t[1]!r}", (t[2], t[2]))

    # -------------------------------------------------------------- terms

    def term(self, no_eq: bool = False):
        if self.peek()[0] == "id" and self.peek()[1] in BINDERS:
            return self.binder()
        return self.arrow(no_eq)

    def arrow(self, no_eq: bool):
        lhs = self.disj(no_eq)
        if self.at("->"):
            self.advance()
            return GArrow(lhs, self.term(no_eq))
        return lhs

    def disj(self, no_eq: bool):
        lhs = self.conj(no_eq)
        if self.at("\\/"):
            self.advance()
            rhs = self.binder() if self.peek()[1] in BINDERS and self.peek()[0] == "id" else self.disj(no_eq)
            return GOr(lhs, rhs)
        return lhs

    def conj(self, no_eq: bool):
        lhs = self.equality(no_eq)
        if self.at("/\\"):
            self.advance()
            rhs = self.binder() if self.peek()[1] in BINDERS and self.peek()[0] == "id" else self.conj(no_eq)
            return GAnd(lhs, rhs)
        return lhs

    def equality(self, no_eq: bool):
        if self.at("eq") and self.at("(", 1):
            self.advance()
            self.expect("(")
            lhs = self.eqside()
            self.expect(")")
            self.expect("(")
            rhs = self.eqside()
            self.expect(")")
            return GEq(lhs, rhs, prefix=True)
        lhs = self.eqside()
        if self.at("=") and not no_eq:
            self.advance()
            return GEq(lhs, self.eqside())
        return lhs

    def eqside(self):
        lhs = self.app_seq()
        if self.at("::"):
            self.advance()
            return GInfix("::", lhs, self.eqside())
        return lhs

    def starts_atom(self) -> bool:
        kind, v, _ = self.peek()
        if kind in ("num", "str"):
            return True
        if kind == "id":
            return v not in KEYWORDS and v not in self.word_infixes
        return v in ("(", "[", "{|")

    def app_seq(self):
        if self.at("@"):
            self.advance()
            name = self.ident()
            args = []
            while self.starts_atom():
                args.append(self.atom())
            return GExplicitApp(name, tuple(args))
        if not self.starts_atom():
            raise self.error("expected a term")
        head = self.atom()
        args = []
        while self.starts_atom():
            args.append(self.atom())
        return GApp(head, tuple(args)) if args else head

    def _scoped(self, t):
        while self.at("%") and self.peek(1)[0] == "id":
            self.advance()
            key = self.ident()
            if key == "char" and isinstance(t, GString):
                t = GChar(t.value)
            elif key == "type" and isinstance(t, _ProductDraft):
                t = GScope(GProduct(t.items), "type")
            else:
                t = GScope(t, key)
        if isinstance(t, _ProductDraft):
            if len(t.items) != 2:
                raise self.error("unscoped product")
            t = GInfix("*", t.items[0], t.items[1])
        return t

    def atom(self):
        kind, v, pos = self.advance()
        if kind == "num":
            if "." in v:
                t = GReal(v)
                self.expect("%")
                self.expect("float")
                return t
            return GInt(int(v))
        if kind == "str":
            return self._scoped(GString(v))
        if kind == "id":
            if v == "tt":
                return GUnit()
            if v == "Type":
                return GSort()
            if v == "_":
                return HOLE
            if "." in v:
                parts = v.split(".")
                return self._scoped(GQualIdent(tuple(parts[:-1]), parts[-1]))
            return self._scoped(GIdent(v))
        if v == "[":
            items = []
            while not self.at("]"):
                items.append(self.term())
                if not self.at("]"):
                    self.expect(";")
            self.advance()
            return GList(tuple(items))
        if v == "{|":
            fields = []
            while not self.at("|}"):
                f = self.ident()
                self.expect(":=")
                fields.append((f, self.term()))
                if not self.at("|}"):
                    self.expect(";")
            self.advance()
            return GRecordLit(tuple(fields))
        if v == "(":
            return self._scoped(self.paren())
        raise GallinaSyntaxError(f"unexpected {v!r}", (pos, pos))

    def _infix_op(self) -> Optional[str]:
        kind, v, _ = self.peek()
        if kind == "sym" and v in SYMBOL_INFIXES:
            return v
        if kind == "id" and v in self.word_infixes:
            return v
        return None

    def paren(self):
        if self.at("-") and self.peek(1)[0] == "num" and self.at(")", 2):
            self.advance()
            v = self.advance()[1]
            self.expect(")")
            if "." in v:
                self.expect("%")
                self.expect("float")
                return GReal("-" + v)
            return GInt(-int(v))
        first = self.term(no_eq=True)
        if self.at(","):
            items = [first]
            while self.at(","):
                self.advance()
                items.append(self.term())
            self.expect(")")
            return GTuple(tuple(items))
        if self.at(":"):
            self.advance()
            ty = self.term()
            self.expect(")")
            return GAnnot(first, ty)
        op = self._infix_op()
        if op is None:
            self.expect(")")
            return first
        if op == "*":
            items = [first]
            while self.at("*"):
                self.advance()
                items.append(self.term(no_eq=True))
            self.expect(")")
            return _ProductDraft(tuple(items))
        self.advance()
        rhs = self.term(no_eq=True)
        self.expect(")")
        if op == "&&":
            return GBoolAnd(first, rhs)
        if op == "||":
            return GBoolOr(first, rhs)
        return GInfix(op, first, rhs)

    def binder(self):
        kw = self.ident()
        if kw == "fun":
            bs = []
            while not self.at("=>"):
                if self.at("'"):
                    self.advance()
                    bs.append(self.pattern())
                else:
                    bs.append(GPVar(self.ident()))
            self.advance()
            return GFun(tuple(bs), self.term())
        if kw == "let":
            if self.at("'"):
                self.advance()
                pat = self.pattern()
            else:
                pat = GPVar(self.ident())
            self.expect(":=")
            value = self.term()
            self.expect("in")
            return GLet(pat, value, self.term())
        if kw == "if":
            c = self.term()
            self.expect("then")
            a = self.term()
            self.expect("else")
            return GIf(c, a, self.term())
        if kw == "match":
            scrut = self.term()
            self.expect("with")
            branches = []
            while True:
                p = self.pattern()
                self.expect("=>")
                branches.append((p, self.term()))
                if self.at("end"):
                    self.advance()
                    break
                self.expect("|")
            last_p, last_b = branches[-1]
            exhaustive = not (isinstance(last_p, GPWild) and last_b == GIdent("patternFailure"))
            return GMatch(scrut, tuple(branches), exhaustive)
        if kw == "forall":
            bs = []
            while not self.at(","):
                if self.at("{"):
                    self.advance()
                    name = self.ident()
                    ty = None
                    if self.at(":"):
                        self.advance()
                        ty = self.term()
                    self.expect("}")
                    bs.append(GBinder(name, ty, True))
                elif self.at("("):
                    self.advance()
                    name = self.ident()
                    self.expect(":")
                    ty = self.term()
                    self.expect(")")
                    bs.append(GBinder(name, ty))
                else:
                    bs.append(GBinder(self.ident()))
            self.advance()
            return GForall(tuple(bs), self.term())
        if kw == "exists":
            names = []
            while not self.at(","):
                names.append(self.ident())
            self.advance()
            return GExists(tuple(names), self.term())
        raise self.error(f"unexpected {kw}")

    # ----------------------------------------------------------- patterns

    def _is_constructor(self, name: str) -> bool:
        return "." in name or name in self.constructors

    def pattern(self):
        kind, v, pos = self.advance()
        if kind == "num":
            return GPInt(int(v))
        if kind == "str":
            if self.at("%"):
                self.advance()
                self.expect("char")
                return GPChar(v)
            return GPString(v)
        if kind == "id":
            if v == "_":
                return GPWild()
            if v == "tt":
                return GPUnit()
            return GPCon(v) if self._is_constructor(v) else GPVar(v)
        if v == "[":
            items = []
            while not self.at("]"):
                items.append(self.pattern())
                if not self.at("]"):
                    self.expect(";")
            self.advance()
            return GPList(tuple(items))
        if v == "{|":
            fields = []
            while not self.at("|}"):
                f = self.ident()
                self.expect(":=")
                fields.append((f, self.pattern()))
                if not self.at("|}"):
                    self.expect(";")
            self.advance()
            return GPRecord(tuple(fields))
        if v == "(":
            if self.at("-"):
                self.advance()
                n = int(self.advance()[1])
                self.expect(")")
                return GPInt(-n)
            first = self.pattern()
            if self.at(","):
                items = [first]
                while self.at(","):
                    self.advance()
                    items.append(self.pattern())
                self.expect(")")
                return GPTuple(tuple(items))
            if self.at("as"):
                self.advance()
                name = self.ident()
                self.expect(")")
                return GPAs(first, name)
            op = self._infix_op()
            if op is not None:
                self.advance()
                rhs = self.pattern()
                self.expect(")")
                return GPInfix(op, first, rhs)
            if isinstance(first, (GPCon, GPVar)) and not self.at(")"):
                args = []
                while not self.at(")"):
                    args.append(self.pattern())
                self.advance()
                return GPCon(first.name, tuple(args))
            self.expect(")")
            return first
        raise GallinaSyntaxError(f"unexpected {v!r} in pattern", (pos, pos))

    # ---------------------------------------------------------- sentences

    def implicits(self) -> List[str]:
        out = []
        while self.at("{") and not self.at("H", 1):
            self.advance()
            out.append(self.ident())
            self.expect(":")
            self.expect("Type")
            self.expect("}")
        return out

    def sentences(self, until: Optional[str] = None) -> list:
        out = []
        while True:
            if self.peek()[0] == "eof":
                if until is not None:
                    raise self.error(f"missing End {until}")
                return out
            if self.at("End"):
                self.advance()
                name = self.ident()
                if name != until:
                    raise self.error(f"End {name} does not close {until}")
                self.expect(".")
                return out
            out.append(self.sentence())

    def sentence(self):
        kw = self.ident()
        if kw == "Require":
            self.expect("Import")
            mods = []
            while not self.at("."):
                mods.append(self.ident())
            self.advance()
            return GRequire(mods)
        if kw == "From":
            src = self.ident()
            self.expect("Require")
            self.expect("Import")
            mods = []
            while not self.at("."):
                mods.append(self.ident())
            self.advance()
            return GRequire(mods, src)
        if kw == "Generalizable":
            self.expect("All")
            self.expect("Variables")
            self.expect(".")
            return GGeneralizable()
        if kw == "Definition":
            name = self.ident()
            imps = self.implicits()
            params = []
            while self.at("("):
                self.advance()
                pn = self.ident()
                self.expect(":")
                params.append((pn, self.term()))
                self.expect(")")
            ret = None
            if self.at(":"):
                self.advance()
                ret = self.term()
            self.expect(":=")
            body = self.term()
            self.expect(".")
            return GDefinition(name, body, imps, params, ret)
        if kw == "Equations":
            first = self.equation()
            while self.at("with"):
                self.advance()
                first.companions.append(self.equation())
            self.expect(".")
            return first
        if kw == "Inductive":
            first = self.inductive()
            while self.at("with"):
                self.advance()
                first.companions.append(self.inductive())
            self.expect(".")
            return first
        if kw == "Record":
            name = self.ident()
            params = self.implicits()
            self.expect(":=")
            self.expect("{")
            fields = []
            while not self.at("}"):
                f = self.ident()
                self.expect(":")
                fields.append((f, self.term()))
                if not self.at("}"):
                    self.expect(";")
            self.advance()
            self.expect(".")
            return GRecordDecl(name, params, fields)
        if kw == "Theorem":
            name = self.ident()
            self.expect(":")
            stmt = self.term()
            self.expect(".")
            self.expect("Admitted")
            self.expect(".")
            return GTheorem(name, stmt)
        if kw in ("Local", "Axiom"):
            local = kw == "Local"
            if local:
                self.expect("Axiom")
            name = self.ident()
            self.expect(":")
            stmt = self.term()
            self.expect(".")
            return GAxiom(name, stmt, local)
        if kw == "Notation":
            kind, symbol, pos = self.advance()
            if kind != "str":
                raise GallinaSyntaxError("notation symbol must be a string", (pos, pos))
            self.expect(":=")
            body = self.atom()
            self.expect("(")
            assoc = self.ident()
            self.expect("associativity")
            self.expect(",")
            self.expect("at")
            self.expect("level")
            level = int(self.advance()[1])
            self.expect(")")
            self.expect(".")
            parts = symbol.split()
            if len(parts) == 3 and parts[1].startswith("'"):
                self.word_infixes.add(parts[1].strip("'"))
            return GNotation(symbol, body, level, assoc)
        if kw == "Module":
            if self.at("Type"):
                self.advance()
                name = self.ident()
                self.expect(".")
                return GModuleType(name, self.sentences(name))
            name = self.ident()
            params = []
            while self.at("("):
                self.advance()
                p = self.ident()
                self.expect(":")
                params.append((p, self.ident()))
                self.expect(")")
            asc = None
            if self.at("<:"):
                self.advance()
                asc = self.ident()
            if self.at(":="):
                self.advance()
                functor = None
                if self.at("!"):
                    self.advance()
                    functor = self.ident()
                arg = self.ident()
                self.expect(".")
                return GModule(name, None, asc, params, functor, arg)
            self.expect(".")
            return GModule(name, self.sentences(name), asc, params)
        if kw == "Parameter":
            name = self.ident()
            self.expect(":")
            ty = self.term()
            self.expect(".")
            return GParameter(name, ty)
        if kw == "Declare":
            self.expect("Module")
            name = self.ident()
            self.expect(":")
            ty = self.ident()
            self.expect(".")
            return GDeclareModule(name, ty)
        if kw == "Include":
            name = self.ident()
            self.expect(".")
            return GInclude(name)
        raise self.error(f"unknown sentence {kw}")

    def equation(self) -> GEquations:
        name = self.ident()
        binders = []
        pre = None
        while not self.at(":"):
            gen = False
            if self.at("`"):
                self.advance()
                gen = True
            if self.at("{"):
                self.advance()
                self.expect("H")
                self.expect(":")
                pre = self.term()
                self.expect("}")
                continue
            self.expect("(")
            bn = self.ident()
            self.expect(":")
            bt = self.term()
            self.expect(")")
            binders.append(GEqBinder(bn, bt, gen))
        self.advance()
        ret = self.term()
        self.expect(":=")
        clauses = []
        while self.at(name):
            self.advance()
            pats = []
            while not self.at(":="):
                pats.append(self.pattern())
            self.advance()
            clauses.append((tuple(pats), self.term()))
            if not self.at(";"):
                break
            self.advance()
        return GEquations(name, binders, ret, clauses, pre)

    def inductive(self) -> GInductive:
        name = self.ident()
        params = self.implicits()
        self.expect(":")
        self.expect("Type")
        self.expect(":=")
        cons = []
        while self.at("|"):
            self.advance()
            c = self.ident()
            self.constructors.add(c)
            ty = None
            if self.at(":"):
                self.advance()
                ty = self.term()
            cons.append((c, ty))
        return GInductive(name, params, cons)


class _ProductDraft:
    """``(A * B * ...)`` before its ``%type`` scope has been seen."""

    def __init__(self, items):
        self.items = items


def parse_document(text: str) -> list:
    """Parse a whole emitted file back into sentences."""
    return GallinaParser(text).sentences()


def reparse_sentences(sentences: Sequence, constructors: Sequence[str] = (), infixes: Sequence[str] = ()) -> list:
    """Print and re-parse; returns the parsed list for comparison."""
    text = "\n".join(line for s in sentences for line in printer.sentence(s))
    p = GallinaParser(text)
    p.constructors.update(constructors)
    p.word_infixes.update(infixes)
    return p.sentences()


def check_roundtrip(sentences: Sequence, constructors: Sequence[str] = (), infixes: Sequence[str] = ()) -> List[str]:
    """Diagnostics for sentences that do not read back to themselves.

    Constructors and notations declared by earlier sentences stay known
    for later ones, as they would in a Coq session.
    """
    out = []
    known, words = set(constructors), set(infixes)
    for s in sentences:
        text = "\n".join(printer.sentence(s))
        p = GallinaParser(text)
        p.constructors.update(known)
        p.word_infixes.update(words)
        try:
            got = p.sentences()
        except MLGallinaError as err:
            out.append(f"{type(s).__name__}: {err.message}")
            continue
        known, words = p.constructors, p.word_infixes
        if got != [s]:
            out.append(f"{type(s).__name__} {getattr(s, 'name', '')}: re-parse differs")
    return out
