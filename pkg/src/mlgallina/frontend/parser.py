"""Recursive-descent parser producing the source AST and the infix environment."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..errors import ParseError, UnsupportedConstruct
from . import syntax as S
from .lexer import (
    CHAR, CONTRACT_CLOSE, CONTRACT_OPEN, EOF, IDENT, INT, KEYWORD, PUNCTUATION,
    REAL, STRING, SYMBOL, Token, literal_value, tokenize,
)

RESERVED_SYMBOLS = frozenset([":", "|", "=>", "->", "#", ":>", "=="])
UNSUPPORTED_KEYWORDS = {
    "raise": "exceptions (raise)",
    "handle": "exceptions (handle)",
    "exception": "exception declarations",
    "open": "open declarations",
    "abstype": "abstype declarations",
    "while": "while loops",
    "withtype": "withtype",
    "sharing": "sharing constraints",
    "where": "where-type constraints",
}

BASIS_FIXITY = {
    "*": ("left", 7), "/": ("left", 7), "div": ("left", 7), "mod": ("left", 7),
    "+": ("left", 6), "-": ("left", 6), "^": ("left", 6),
    "::": ("right", 5), "@": ("right", 5),
    "=": ("left", 4), "<>": ("left", 4), ">": ("left", 4), ">=": ("left", 4),
    "<": ("left", 4), "<=": ("left", 4),
    ":=": ("left", 3), "o": ("left", 3),
    "before": ("left", 0),
}


@dataclass
class InfixEnvironment:
    """Identifier -> (associativity, precedence)."""

    entries: Dict[str, Tuple[str, int]] = field(default_factory=lambda: dict(BASIS_FIXITY))

    def copy(self) -> "InfixEnvironment":
        return InfixEnvironment(dict(self.entries))

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def get(self, name: str):
        return self.entries.get(name)

    def declare(self, name: str, assoc: str, prec: int) -> None:
        self.entries[name] = (assoc, prec)

    def remove(self, name: str) -> None:
        self.entries.pop(name, None)

    def user_entries(self) -> Dict[str, Tuple[str, int]]:
        return {k: v for k, v in self.entries.items() if BASIS_FIXITY.get(k) != v}


def _join(a, b):
    if a is None or b is None:
        return a or b
    return (a[0], b[1])


class Parser:
    def __init__(self, tokens: List[Token]):
        self.toks = tokens
        self.pos = 0
        self.infix = InfixEnvironment()

    # ------------------------------------------------------------ helpers

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != EOF:
            self.pos += 1
        return t

    def at(self, kind: str, text: Optional[str] = None, k: int = 0) -> bool:
        return self.peek(k).is_(kind, text)

    def at_kw(self, text: str, k: int = 0) -> bool:
        return self.at(KEYWORD, text, k)

    def at_sym(self, text: str, k: int = 0) -> bool:
        return self.at(SYMBOL, text, k)

    def at_p(self, text: str, k: int = 0) -> bool:
        return self.at(PUNCTUATION, text, k)

    def error(self, msg: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.peek()
        found = tok.text or "end of input"
        return ParseError(f"{msg} (found {found!r})", tok.span)

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        if not self.at(kind, text):
            raise self.error(f"expected {text or kind}")
        return self.next()

    def expect_kw(self, text: str) -> Token:
        return self.expect(KEYWORD, text)

    def expect_p(self, text: str) -> Token:
        return self.expect(PUNCTUATION, text)

    def expect_sym(self, text: str) -> Token:
        return self.expect(SYMBOL, text)

    def check_unsupported(self) -> None:
        t = self.peek()
        if t.kind == KEYWORD and t.text in UNSUPPORTED_KEYWORDS:
            raise UnsupportedConstruct(f"{UNSUPPORTED_KEYWORDS[t.text]} are outside the supported pure subset", t.span)

    def is_vid(self, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind == IDENT or (t.kind == SYMBOL and t.text not in RESERVED_SYMBOLS) or t.is_(SYMBOL, "=")

    def is_infix_tok(self, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind in (IDENT, SYMBOL) and t.text in self.infix

    def ident(self) -> Token:
        if not self.is_vid():
            raise self.error("expected identifier")
        return self.next()

    def alnum_ident(self) -> Token:
        if not self.at(IDENT):
            raise self.error("expected identifier")
        return self.next()

    def label(self) -> Token:
        if self.at(IDENT) or self.at(INT):
            return self.next()
        raise self.error("expected record label")

    # ------------------------------------------------------------ program

    def program(self) -> List:
        decls = self.decs(top=True)
        if not self.at(EOF):
            raise self.error("unexpected token")
        return decls

    def decs(self, top: bool = False) -> List:
        out: List = []
        while True:
            self.check_unsupported()
            if self.at_p(";"):
                self.next()
                continue
            if self.at(CONTRACT_OPEN):
                contract = self.contract()
                while self.at_p(";"):
                    self.next()
                if not self.at_kw("fun"):
                    raise self.error("a contract must be immediately followed by a fun declaration")
                d = self.dec()
                names = [b.name for b in d.binds]
                if contract.fname not in names:
                    raise ParseError(
                        f"contract names {contract.fname!r} but the following declaration defines {', '.join(names)}",
                        contract.span,
                    )
                d.contract = contract
                out.append(d)
                continue
            if self.peek().kind == KEYWORD and self.peek().text in (
                "val", "fun", "type", "datatype", "infix", "infixr", "nonfix",
                "local", "structure", "signature", "functor",
            ):
                out.append(self.dec())
                continue
            return out

    def dec(self):
        t = self.peek()
        kw = t.text
        if kw == "val":
            return self.val_dec()
        if kw == "fun":
            return self.fun_dec()
        if kw == "type":
            return self.type_dec()
        if kw == "datatype":
            return self.datatype_dec()
        if kw in ("infix", "infixr", "nonfix"):
            return self.infix_dec()
        if kw == "local":
            self.next()
            inner = self.decs()
            self.expect_kw("in")
            outer = self.decs()
            end = self.expect_kw("end")
            return S.DLocal(inner, outer, _join(t.span, end.span))
        if kw == "structure":
            return self.structure_dec()
        if kw == "signature":
            return self.signature_dec()
        if kw == "functor":
            return self.functor_dec()
        raise self.error("expected declaration")

    def tyvarseq(self) -> List[str]:
        if self.at(IDENT) and self.peek().text.startswith("'"):
            return [self.next().text]
        if self.at_p("(") and self.at(IDENT, k=1) and self.peek(1).text.startswith("'"):
            self.next()
            names = [self.alnum_ident().text]
            while self.at_p(","):
                self.next()
                names.append(self.alnum_ident().text)
            self.expect_p(")")
            return names
        return []

    def val_dec(self):
        start = self.next()
        rec = False
        if self.at_kw("rec"):
            self.next()
            rec = True
        tyvars = self.tyvarseq()
        binds = []
        while True:
            if self.at_kw("rec"):
                self.next()
                rec = True
            p = self.pat()
            self.expect_sym("=")
            e = self.exp()
            binds.append(S.ValBind(p, e, _join(p.span, e.span)))
            if not self.at_kw("and"):
                break
            self.next()
        return S.DVal(binds, rec, tyvars, _join(start.span, binds[-1].span))

    def fun_dec(self):
        start = self.next()
        tyvars = self.tyvarseq()
        binds = []
        while True:
            binds.append(self.fun_bind())
            if not self.at_kw("and"):
                break
            self.next()
        return S.DFun(binds, tyvars, None, _join(start.span, binds[-1].span))

    def fun_bind(self) -> S.FunBind:
        clauses = []
        name, op, clause = self.fun_clause()
        clauses.append(clause)
        while self.at_sym("|"):
            self.next()
            tok = self.peek()
            n2, _, clause = self.fun_clause()
            if n2 != name:
                raise ParseError(f"clauses of {name!r} must all define {name!r}, not {n2!r}", tok.span)
            if len(clause.pats) != len(clauses[0].pats):
                raise ParseError(f"clauses of {name!r} have different numbers of arguments", tok.span)
            clauses.append(clause)
        fb = S.FunBind(name, clauses, op, _join(clauses[0].span, clauses[-1].span))
        fb.fixity = self.infix.get(name)
        return fb

    def fun_clause(self):
        start = self.peek()
        op = False
        if self.at_kw("op"):
            self.next()
            name = self.ident().text
            op = True
            pats = self.atpats_until_eq()
        elif self.is_vid() and not self.is_infix_tok() and not self.is_infix_tok(1):
            name = self.ident().text
            pats = self.atpats_until_eq()
        else:
            lhs = self.atpat()
            if not self.is_infix_tok():
                raise self.error("expected function name")
            name = self.next().text
            rhs = self.atpat()
            pats = [S.PTuple([lhs, rhs], _join(lhs.span, rhs.span))]
        if not pats:
            raise self.error(f"function {name!r} needs at least one argument pattern")
        ret = None
        if self.at_sym(":"):
            self.next()
            ret = self.ty()
        self.expect_sym("=")
        body = self.exp()
        return name, op, S.Clause(pats, ret, body, _join(start.span, body.span))

    def atpats_until_eq(self) -> List:
        pats = []
        while not (self.at_sym("=") or self.at_sym(":")):
            if not self.can_start_atpat():
                raise self.error("expected argument pattern")
            pats.append(self.atpat())
        return pats

    def type_dec(self):
        start = self.next()
        binds = []
        while True:
            tv = self.tyvarseq()
            name = self.alnum_ident()
            self.expect_sym("=")
            t = self.ty()
            binds.append(S.TypBind(tv, name.text, t, _join(name.span, t.span)))
            if not self.at_kw("and"):
                break
            self.next()
        return S.DType(binds, _join(start.span, binds[-1].span))

    def datbinds(self) -> List[S.DatBind]:
        binds = []
        while True:
            tv = self.tyvarseq()
            name = self.alnum_ident()
            self.expect_sym("=")
            if self.at_kw("datatype"):
                raise UnsupportedConstruct("datatype replication is not supported", self.peek().span)
            cons = []
            while True:
                if self.at_kw("op"):
                    self.next()
                ctok = self.ident()
                arg = None
                if self.at_kw("of"):
                    self.next()
                    arg = self.ty()
                cons.append(S.ConBind(ctok.text, arg, _join(ctok.span, arg.span if arg else None)))
                if not self.at_sym("|"):
                    break
                self.next()
            binds.append(S.DatBind(tv, name.text, cons, _join(name.span, cons[-1].span)))
            if not self.at_kw("and"):
                break
            self.next()
        self.check_unsupported()
        return binds

    def datatype_dec(self):
        start = self.next()
        binds = self.datbinds()
        return S.DDatatype(binds, _join(start.span, binds[-1].span))

    def infix_dec(self):
        start = self.next()
        kind = start.text
        prec = None
        if kind != "nonfix" and self.at(INT):
            tok = self.next()
            prec = int(tok.text)
            if not 0 <= prec <= 9 or len(tok.text) != 1:
                raise ParseError("fixity precedence must be a single digit", tok.span)
        ids = []
        end = start
        while self.is_vid() and not self.at_sym("="):
            end = self.next()
            ids.append(end.text)
        if not ids:
            raise self.error("expected identifiers after fixity directive")
        for i in ids:
            if kind == "nonfix":
                self.infix.remove(i)
            else:
                self.infix.declare(i, "left" if kind == "infix" else "right", prec if prec is not None else 0)
        return S.DInfix(kind, prec, ids, _join(start.span, end.span))

    # ------------------------------------------------------------ contracts

    def contract(self) -> S.Contract:
        start = self.next()
        fname = self.ident().text
        inputs = []
        while not self.at_sym("==>"):
            if not self.can_start_atpat():
                raise self.error("expected contract input pattern or '==>'")
            inputs.append(self.atpat())
        if not inputs:
            raise self.error("contract needs at least one input")
        for p in inputs:
            if not _contract_input_ok(p):
                raise ParseError("contract inputs must be variables or tuples of variables, optionally typed", p.span)
        self.next()
        if self.at(IDENT) and self.at_sym(":", 1):
            v = self.next()
            self.next()
            t = self.ty()
            output = S.PTyped(S.PVar(v.text, span=v.span), t, _join(v.span, t.span))
        else:
            output = self.atpat()
        inner = output.pat if isinstance(output, S.PTyped) else output
        if not isinstance(inner, S.PVar) or inner.op:
            raise ParseError("contract output must be a single named variable", output.span)
        self.expect_p(";")
        self.contract_label("REQUIRES")
        req = self.exp()
        self.expect_p(";")
        self.contract_label("ENSURES")
        ens = self.exp()
        if self.at_p(";"):
            self.next()
        end = self.expect(CONTRACT_CLOSE)
        return S.Contract(fname, inputs, output, req, ens, _join(start.span, end.span))

    def contract_label(self, word: str) -> None:
        if not self.at(IDENT, word):
            raise self.error(f"expected {word}:")
        self.next()
        self.expect_sym(":")

    # ------------------------------------------------------------ modules

    def structure_dec(self):
        start = self.next()
        binds = []
        while True:
            name = self.alnum_ident()
            sig, opaque = self.opt_ascription()
            self.expect_sym("=")
            body = self.strexp()
            binds.append(S.StrBind(name.text, sig, opaque, body, _join(name.span, body.span)))
            if not self.at_kw("and"):
                break
            self.next()
        return S.DStructure(binds, _join(start.span, binds[-1].span))

    def opt_ascription(self):
        if self.at_sym(":") or self.at_sym(":>"):
            opaque = self.next().text == ":>"
            return self.sigexp(), opaque
        return None, False

    def strexp(self):
        start = self.peek()
        if self.at_kw("struct"):
            self.next()
            saved = self.infix.copy()
            decls = self.decs()
            end = self.expect_kw("end")
            self.infix = saved
            s = S.StrStruct(decls, _join(start.span, end.span))
        elif self.at(IDENT):
            name = self.next()
            if self.at_p("("):
                self.next()
                if self.at_kw("struct") or (self.at(IDENT) and (self.at_p(")", 1) or self.at_p("(", 1) or self.at_sym(":", 1) or self.at_sym(":>", 1))):
                    arg = self.strexp()
                else:
                    a0 = self.peek()
                    saved = self.infix.copy()
                    decls = self.decs()
                    self.infix = saved
                    arg = S.StrStruct(decls, _join(a0.span, decls[-1].span if decls else a0.span))
                end = self.expect_p(")")
                s = S.StrApp(name.text, arg, _join(name.span, end.span))
            else:
                s = S.StrVar(name.text, name.span)
        else:
            self.check_unsupported()
            raise self.error("expected structure expression")
        while self.at_sym(":") or self.at_sym(":>"):
            opaque = self.next().text == ":>"
            sig = self.sigexp()
            s = S.StrConstraint(s, sig, opaque, _join(s.span, sig.span))
        return s

    def sigexp(self):
        start = self.peek()
        if self.at_kw("sig"):
            self.next()
            specs = self.specs()
            end = self.expect_kw("end")
            sig = S.SigSig(specs, _join(start.span, end.span))
        elif self.at(IDENT):
            tok = self.next()
            sig = S.SigVar(tok.text, tok.span)
        else:
            raise self.error("expected signature expression")
        self.check_unsupported()
        return sig

    def specs(self) -> List:
        out = []
        while True:
            self.check_unsupported()
            t = self.peek()
            if self.at_p(";"):
                self.next()
            elif self.at_kw("val"):
                self.next()
                while True:
                    name = self.ident()
                    self.expect_sym(":")
                    ty = self.ty()
                    out.append(S.SpecVal(name.text, ty, _join(name.span, ty.span)))
                    if not self.at_kw("and"):
                        break
                    self.next()
            elif self.at_kw("type") or self.at_kw("eqtype"):
                eq = self.next().text == "eqtype"
                while True:
                    tv = self.tyvarseq()
                    name = self.alnum_ident()
                    ty = None
                    if self.at_sym("="):
                        self.next()
                        ty = self.ty()
                    out.append(S.SpecType(tv, name.text, ty, eq, _join(name.span, ty.span if ty else None)))
                    if not self.at_kw("and"):
                        break
                    self.next()
            elif self.at_kw("datatype"):
                self.next()
                binds = self.datbinds()
                out.append(S.SpecDatatype(binds, _join(t.span, binds[-1].span)))
            elif self.at_kw("structure"):
                self.next()
                name = self.alnum_ident()
                self.expect_sym(":")
                sig = self.sigexp()
                out.append(S.SpecStructure(name.text, sig, _join(name.span, sig.span)))
            elif self.at_kw("include"):
                self.next()
                sig = self.sigexp()
                out.append(S.SpecInclude(sig, _join(t.span, sig.span)))
            else:
                return out

    def signature_dec(self):
        start = self.next()
        binds = []
        while True:
            name = self.alnum_ident()
            self.expect_sym("=")
            sig = self.sigexp()
            binds.append(S.SigBind(name.text, sig, _join(name.span, sig.span)))
            if not self.at_kw("and"):
                break
            self.next()
        return S.DSignature(binds, _join(start.span, binds[-1].span))

    def functor_dec(self):
        start = self.next()
        binds = []
        while True:
            name = self.alnum_ident()
            self.expect_p("(")
            if not (self.at(IDENT) and self.at_sym(":", 1)):
                raise UnsupportedConstruct(
                    "functor parameters must have the form (Name : SIG)", self.peek().span
                )
            param = self.next().text
            self.next()
            psig = self.sigexp()
            self.expect_p(")")
            sig, opaque = self.opt_ascription()
            self.expect_sym("=")
            body = self.strexp()
            binds.append(S.FctBind(name.text, param, psig, sig, opaque, body, _join(name.span, body.span)))
            if not self.at_kw("and"):
                break
            self.next()
        return S.DFunctor(binds, _join(start.span, binds[-1].span))

    # ------------------------------------------------------------ types

    def ty(self):
        t = self.tuple_ty()
        if self.at_sym("->"):
            self.next()
            r = self.ty()
            return S.TyArrow(t, r, _join(t.span, r.span))
        return t

    def tuple_ty(self):
        items = [self.app_ty()]
        while self.at_sym("*"):
            self.next()
            items.append(self.app_ty())
        if len(items) == 1:
            return items[0]
        return S.TyTuple(items, _join(items[0].span, items[-1].span))

    def app_ty(self):
        start = self.peek()
        if self.at_p("("):
            self.next()
            args = [self.ty()]
            while self.at_p(","):
                self.next()
                args.append(self.ty())
            end = self.expect_p(")")
            if len(args) > 1:
                con = self.alnum_ident()
                if con.text.startswith("'"):
                    raise self.error("expected type constructor", con)
                t = S.TyCon(con.text, args, _join(start.span, con.span))
            else:
                t = args[0]
        elif self.at(IDENT) and self.peek().text.startswith("'"):
            tok = self.next()
            t = S.TyVar(tok.text, tok.span)
        elif self.at(IDENT):
            tok = self.next()
            t = S.TyCon(tok.text, [], tok.span)
        elif self.at_p("{"):
            self.next()
            fields = []
            if not self.at_p("}"):
                while True:
                    lab = self.label()
                    self.expect_sym(":")
                    fields.append((lab.text, self.ty()))
                    if not self.at_p(","):
                        break
                    self.next()
            end = self.expect_p("}")
            t = S.TyRecord(fields, _join(start.span, end.span))
        else:
            raise self.error("expected type")
        while self.at(IDENT) and not self.peek().text.startswith("'"):
            con = self.next()
            t = S.TyCon(con.text, [t], _join(t.span, con.span))
        return t

    # ------------------------------------------------------------ patterns

    def can_start_atpat(self) -> bool:
        t = self.peek()
        if t.kind in (INT, STRING, CHAR):
            return True
        if t.kind == PUNCTUATION and t.text in ("_", "(", "[", "{"):
            return True
        if t.is_(KEYWORD, "op"):
            return True
        return self.is_vid() and not self.at_sym("=") and not self.is_infix_tok()

    def pat(self):
        p = self.infpat()
        while True:
            if self.at_sym(":"):
                self.next()
                t = self.ty()
                p = S.PTyped(p, t, _join(p.span, t.span))
            elif self.at_kw("as"):
                self.next()
                if isinstance(p, S.PVar):
                    name, tyann = p.name, None
                elif isinstance(p, S.PTyped) and isinstance(p.pat, S.PVar):
                    name, tyann = p.pat.name, p.tyann
                else:
                    raise ParseError("left of 'as' must be a variable", p.span)
                inner = self.pat()
                return S.PLayered(name, inner, tyann, _join(p.span, inner.span))
            else:
                return p

    def infpat(self):
        items = [self.apppat()]
        while self.is_infix_tok() and not self.at_sym("="):
            items.append(self.next().text)
            items.append(self.apppat())
        return self.resolve(items, lambda op, l, r: S.PInfix(op, l, r, _join(l.span, r.span)))

    def apppat(self):
        p = self.atpat()
        if isinstance(p, S.PVar) and self.can_start_atpat():
            arg = self.atpat()
            return S.PConApp(p.name, arg, p.op, _join(p.span, arg.span))
        return p

    def atpat(self):
        t = self.peek()
        if t.kind == INT:
            self.next()
            return S.PInt(literal_value(t), t.span)
        if t.kind == REAL:
            raise ParseError("real constants are not allowed in patterns", t.span)
        if t.kind == STRING:
            self.next()
            return S.PString(literal_value(t), t.span)
        if t.kind == CHAR:
            self.next()
            return S.PChar(literal_value(t), t.span)
        if t.is_(PUNCTUATION, "_"):
            self.next()
            return S.PWild(t.span)
        if t.is_(KEYWORD, "op"):
            self.next()
            v = self.ident()
            return S.PVar(v.text, True, _join(t.span, v.span))
        if t.is_(PUNCTUATION, "("):
            self.next()
            if self.at_p(")"):
                end = self.next()
                return S.PUnit(_join(t.span, end.span))
            items = [self.pat()]
            while self.at_p(","):
                self.next()
                items.append(self.pat())
            end = self.expect_p(")")
            if len(items) == 1:
                return items[0]
            return S.PTuple(items, _join(t.span, end.span))
        if t.is_(PUNCTUATION, "["):
            self.next()
            items = []
            if not self.at_p("]"):
                items.append(self.pat())
                while self.at_p(","):
                    self.next()
                    items.append(self.pat())
            end = self.expect_p("]")
            return S.PList(items, _join(t.span, end.span))
        if t.is_(PUNCTUATION, "{"):
            return self.record_pat()
        if self.is_vid() and not self.at_sym("="):
            self.next()
            return S.PVar(t.text, False, t.span)
        raise self.error("expected pattern")

    def record_pat(self):
        start = self.next()
        fields = []
        ellipsis = False
        if not self.at_p("}"):
            while True:
                if self.at_p("..."):
                    self.next()
                    ellipsis = True
                    break
                lab = self.label()
                if self.at_sym("="):
                    self.next()
                    fields.append((lab.text, self.pat()))
                else:
                    # label punning: {x, y : int, z as p}
                    p = S.PVar(lab.text, False, lab.span)
                    if self.at_sym(":"):
                        self.next()
                        t = self.ty()
                        p = S.PTyped(p, t, _join(lab.span, t.span))
                    if self.at_kw("as"):
                        self.next()
                        inner = self.pat()
                        tyann = p.tyann if isinstance(p, S.PTyped) else None
                        p = S.PLayered(lab.text, inner, tyann, _join(lab.span, inner.span))
                    fields.append((lab.text, p))
                if not self.at_p(","):
                    break
                self.next()
        end = self.expect_p("}")
        if not fields and not ellipsis:
            return S.PUnit(_join(start.span, end.span))
        return S.PRecord(fields, ellipsis, _join(start.span, end.span))

    # ------------------------------------------------------------ expressions

    def exp(self):
        self.check_unsupported()
        t = self.peek()
        if t.is_(KEYWORD, "fn"):
            self.next()
            rules = self.match()
            return S.EFn(rules, _join(t.span, rules[-1].span))
        if t.is_(KEYWORD, "case"):
            self.next()
            scrut = self.exp()
            self.expect_kw("of")
            rules = self.match()
            return S.ECase(scrut, rules, _join(t.span, rules[-1].span))
        if t.is_(KEYWORD, "if"):
            self.next()
            c = self.exp()
            self.expect_kw("then")
            a = self.exp()
            self.expect_kw("else")
            b = self.exp()
            return S.EIf(c, a, b, _join(t.span, b.span))
        e = self.orelse()
        self.check_unsupported()
        return e

    def _starts_big(self) -> bool:
        return self.peek().kind == KEYWORD and self.peek().text in ("fn", "case", "if", "raise")

    def orelse(self):
        e = self.andalso()
        while self.at_kw("orelse"):
            self.next()
            r = self.exp() if self._starts_big() else self.andalso()
            e = S.EOrelse(e, r, _join(e.span, r.span))
        return e

    def andalso(self):
        e = self.typed()
        while self.at_kw("andalso"):
            self.next()
            r = self.exp() if self._starts_big() else self.typed()
            e = S.EAndalso(e, r, _join(e.span, r.span))
        return e

    def typed(self):
        e = self.infexp()
        while self.at_sym(":"):
            self.next()
            t = self.ty()
            e = S.ETyped(e, t, _join(e.span, t.span))
        return e

    def match(self) -> List[S.Rule]:
        rules = []
        while True:
            p = self.pat()
            self.expect_sym("=>")
            body = self.exp()
            rules.append(S.Rule(p, body, _join(p.span, body.span)))
            if not self.at_sym("|"):
                return rules
            self.next()

    def infexp(self):
        items = [self.appexp()]
        while self.is_infix_tok():
            items.append(self.next().text)
            if self._starts_big():
                raise self.error("parenthesize fn/case/if used as an infix operand")
            items.append(self.appexp())
        return self.resolve(items, lambda op, l, r: S.EInfix(op, l, r, _join(l.span, r.span)))

    def resolve(self, items, make):
        """Precedence climbing over [operand, op, operand, ...]."""
        pos = 0

        def climb(min_prec: int):
            nonlocal pos
            lhs = items[pos]
            pos += 1
            while pos < len(items):
                op = items[pos]
                assoc, prec = self.infix.get(op)
                if prec < min_prec:
                    break
                pos += 1
                rhs = climb(prec + 1 if assoc == "left" else prec)
                lhs = make(op, lhs, rhs)
            return lhs

        return climb(0)

    def can_start_atexp(self) -> bool:
        t = self.peek()
        if t.kind in (INT, REAL, STRING, CHAR):
            return True
        if t.kind == PUNCTUATION and t.text in ("(", "[", "{"):
            return True
        if t.kind == KEYWORD and t.text in ("op", "let"):
            return True
        if t.is_(SYMBOL, "#") and (self.at(IDENT, k=1) or self.at(INT, k=1)):
            return True
        return self.is_vid() and not self.is_infix_tok() and not self.at_sym("=")

    def appexp(self):
        e = self.atexp()
        while self.can_start_atexp():
            a = self.atexp()
            e = S.EApp(e, a, _join(e.span, a.span))
        return e

    def atexp(self):
        t = self.peek()
        if t.kind == INT:
            self.next()
            return S.EInt(literal_value(t), t.span)
        if t.kind == REAL:
            self.next()
            return S.EReal(t.text, t.span)
        if t.kind == STRING:
            self.next()
            return S.EString(literal_value(t), t.span)
        if t.kind == CHAR:
            self.next()
            return S.EChar(literal_value(t), t.span)
        if t.is_(KEYWORD, "op"):
            self.next()
            v = self.ident()
            return S.EVar(v.text, True, _join(t.span, v.span))
        if t.is_(SYMBOL, "#") and (self.at(IDENT, k=1) or self.at(INT, k=1)):
            self.next()
            lab = self.next()
            return S.ESelector(lab.text, _join(t.span, lab.span))
        if t.is_(KEYWORD, "let"):
            self.next()
            saved = self.infix.copy()
            decls = self.decs()
            self.expect_kw("in")
            body = self.exp()
            if self.at_p(";"):
                raise UnsupportedConstruct("expression sequences are outside the supported pure subset", self.peek().span)
            end = self.expect_kw("end")
            self.infix = saved
            return S.ELet(decls, body, _join(t.span, end.span))
        if t.is_(PUNCTUATION, "("):
            self.next()
            if self.at_p(")"):
                end = self.next()
                return S.EUnit(_join(t.span, end.span))
            items = [self.exp()]
            if self.at_p(";"):
                raise UnsupportedConstruct("expression sequences are outside the supported pure subset", self.peek().span)
            while self.at_p(","):
                self.next()
                items.append(self.exp())
            end = self.expect_p(")")
            if len(items) == 1:
                return items[0]
            return S.ETuple(items, _join(t.span, end.span))
        if t.is_(PUNCTUATION, "["):
            self.next()
            items = []
            if not self.at_p("]"):
                items.append(self.exp())
                while self.at_p(","):
                    self.next()
                    items.append(self.exp())
            end = self.expect_p("]")
            return S.EList(items, _join(t.span, end.span))
        if t.is_(PUNCTUATION, "{"):
            self.next()
            fields = []
            if not self.at_p("}"):
                while True:
                    lab = self.label()
                    self.expect_sym("=")
                    fields.append((lab.text, self.exp()))
                    if not self.at_p(","):
                        break
                    self.next()
            end = self.expect_p("}")
            if not fields:
                return S.EUnit(_join(t.span, end.span))
            return S.ERecord(fields, _join(t.span, end.span))
        if self.is_vid() and not self.at_sym("="):
            self.next()
            return S.EVar(t.text, False, t.span)
        self.check_unsupported()
        raise self.error("expected expression")


def _contract_input_ok(p) -> bool:
    if isinstance(p, S.PTyped):
        p = p.pat
    if isinstance(p, S.PVar):
        return not p.op
    if isinstance(p, S.PUnit):
        return True
    if isinstance(p, S.PTuple):
        return all(_contract_input_ok(q) for q in p.items)
    return False


def parse(tokens: List[Token]):
    """Parse a token stream into ``(declarations, infix environment)``."""
    p = Parser(tokens)
    return p.program(), p.infix


def parse_source(source: str):
    return parse(tokenize(source))
