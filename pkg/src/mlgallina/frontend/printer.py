"""SML pretty-printer for the source AST.

Every compound expression, pattern and type is parenthesised, so the output
re-parses to a structurally equal tree.
"""

from __future__ import annotations

from typing import List, Optional

from . import syntax as S
from .parser import InfixEnvironment

_SML_ESC = {"\n": "\\n", "\t": "\\t", "\\": "\\\\", '"': '\\"'}


def sml_string(value: str) -> str:
    out = []
    for ch in value:
        if ch in _SML_ESC:
            out.append(_SML_ESC[ch])
        elif ord(ch) < 32 or ord(ch) == 127:
            out.append("\\%03d" % ord(ch))
        else:
            out.append(ch)
    return '"' + "".join(out) + '"'


def _int(v: int) -> str:
    return f"~{-v}" if v < 0 else str(v)


class SMLPrinter:
    def __init__(self, infix: Optional[InfixEnvironment] = None):
        self.infix = infix.copy() if infix else InfixEnvironment()

    # types
    def ty(self, t) -> str:
        if isinstance(t, S.TyVar):
            return t.name
        if isinstance(t, S.TyCon):
            if not t.args:
                return t.name
            if len(t.args) == 1:
                return f"({self.ty(t.args[0])} {t.name})"
            return "((" + ", ".join(self.ty(a) for a in t.args) + f") {t.name})"
        if isinstance(t, S.TyTuple):
            return "(" + " * ".join(self.ty(a) for a in t.items) + ")"
        if isinstance(t, S.TyArrow):
            return f"({self.ty(t.dom)} -> {self.ty(t.cod)})"
        if isinstance(t, S.TyRecord):
            return "{" + ", ".join(f"{l} : {self.ty(x)}" for l, x in t.fields) + "}"
        raise TypeError(t)

    # patterns
    def pat(self, p) -> str:
        if isinstance(p, S.PWild):
            return "_"
        if isinstance(p, S.PVar):
            return f"(op {p.name})" if p.op else p.name
        if isinstance(p, S.PInt):
            return _int(p.value)
        if isinstance(p, S.PString):
            return sml_string(p.value)
        if isinstance(p, S.PChar):
            return "#" + sml_string(p.value)
        if isinstance(p, S.PUnit):
            return "()"
        if isinstance(p, S.PTuple):
            return "(" + ", ".join(self.pat(x) for x in p.items) + ")"
        if isinstance(p, S.PList):
            return "[" + ", ".join(self.pat(x) for x in p.items) + "]"
        if isinstance(p, S.PRecord):
            parts = [f"{l} = {self.pat(x)}" for l, x in p.fields]
            if p.ellipsis:
                parts.append("...")
            return "{" + ", ".join(parts) + "}"
        if isinstance(p, S.PConApp):
            return f"({'op ' if p.op else ''}{p.name} {self.pat(p.arg)})"
        if isinstance(p, S.PInfix):
            return f"({self.pat(p.lhs)} {p.op} {self.pat(p.rhs)})"
        if isinstance(p, S.PTyped):
            return f"({self.pat(p.pat)} : {self.ty(p.tyann)})"
        if isinstance(p, S.PLayered):
            ann = f" : {self.ty(p.tyann)}" if p.tyann is not None else ""
            return f"({p.name}{ann} as {self.pat(p.pat)})"
        raise TypeError(p)

    # expressions
    def exp(self, e) -> str:
        if isinstance(e, S.EVar):
            return f"(op {e.name})" if e.op else e.name
        if isinstance(e, S.EInt):
            return _int(e.value)
        if isinstance(e, S.EReal):
            return e.text
        if isinstance(e, S.EString):
            return sml_string(e.value)
        if isinstance(e, S.EChar):
            return "#" + sml_string(e.value)
        if isinstance(e, S.EUnit):
            return "()"
        if isinstance(e, S.ETuple):
            return "(" + ", ".join(self.exp(x) for x in e.items) + ")"
        if isinstance(e, S.EList):
            return "[" + ", ".join(self.exp(x) for x in e.items) + "]"
        if isinstance(e, S.ERecord):
            return "{" + ", ".join(f"{l} = {self.exp(x)}" for l, x in e.fields) + "}"
        if isinstance(e, S.ESelector):
            return f"#{e.label}"
        if isinstance(e, S.EApp):
            return f"({self.exp(e.fn)} {self.exp(e.arg)})"
        if isinstance(e, S.EInfix):
            return f"({self.exp(e.lhs)} {e.op} {self.exp(e.rhs)})"
        if isinstance(e, S.EFn):
            return f"(fn {self.rules(e.rules)})"
        if isinstance(e, S.ECase):
            return f"(case {self.exp(e.scrutinee)} of {self.rules(e.rules)})"
        if isinstance(e, S.EIf):
            return f"(if {self.exp(e.cond)} then {self.exp(e.then)} else {self.exp(e.else_)})"
        if isinstance(e, S.EAndalso):
            return f"({self.exp(e.lhs)} andalso {self.exp(e.rhs)})"
        if isinstance(e, S.EOrelse):
            return f"({self.exp(e.lhs)} orelse {self.exp(e.rhs)})"
        if isinstance(e, S.ELet):
            saved = self.infix.copy()
            decls = " ".join(self.dec(d) for d in e.decls)
            body = self.exp(e.body)
            self.infix = saved
            return f"let {decls} in {body} end"
        if isinstance(e, S.ETyped):
            return f"({self.exp(e.exp)} : {self.ty(e.tyann)})"
        raise TypeError(e)

    def rules(self, rules: List[S.Rule]) -> str:
        return " | ".join(f"{self.pat(r.pat)} => {self.exp(r.body)}" for r in rules)

    # declarations
    def tyvars(self, tvs: List[str]) -> str:
        if not tvs:
            return ""
        if len(tvs) == 1:
            return tvs[0] + " "
        return "(" + ", ".join(tvs) + ") "

    def contract(self, c: S.Contract) -> str:
        ins = " ".join(self.pat(p) for p in c.inputs)
        return (
            f"(!! {c.fname} {ins} ==> {self.pat(c.output)};\n"
            f"    REQUIRES: {self.exp(c.requires)};\n"
            f"    ENSURES: {self.exp(c.ensures)}; !!)\n"
        )

    def clause(self, fb: S.FunBind, cl: S.Clause) -> str:
        ret = f" : {self.ty(cl.ret)}" if cl.ret is not None else ""
        if not fb.op and fb.name in self.infix:
            (tup,) = cl.pats
            head = f"{self.pat(tup.items[0])} {fb.name} {self.pat(tup.items[1])}"
        else:
            head = ("op " if fb.op else "") + fb.name + " " + " ".join(self.pat(p) for p in cl.pats)
        return f"{head}{ret} = {self.exp(cl.body)}"

    def datbinds(self, binds: List[S.DatBind]) -> str:
        out = []
        for b in binds:
            cons = " | ".join(c.name + (f" of {self.ty(c.arg)}" if c.arg is not None else "") for c in b.cons)
            out.append(f"{self.tyvars(b.tyvars)}{b.name} = {cons}")
        return " and ".join(out)

    def dec(self, d) -> str:
        if isinstance(d, S.DVal):
            binds = " and ".join(f"{self.pat(b.pat)} = {self.exp(b.exp)}" for b in d.binds)
            return f"val {'rec ' if d.rec else ''}{self.tyvars(d.tyvars)}{binds}"
        if isinstance(d, S.DFun):
            pre = self.contract(d.contract) if d.contract else ""
            groups = []
            for fb in d.binds:
                groups.append("\n  | ".join(self.clause(fb, cl) for cl in fb.clauses))
            return f"{pre}fun {self.tyvars(d.tyvars)}" + "\nand ".join(groups)
        if isinstance(d, S.DType):
            return "type " + " and ".join(f"{self.tyvars(b.tyvars)}{b.name} = {self.ty(b.ty)}" for b in d.binds)
        if isinstance(d, S.DDatatype):
            return "datatype " + self.datbinds(d.binds)
        if isinstance(d, S.DInfix):
            for i in d.ids:
                if d.kind == "nonfix":
                    self.infix.remove(i)
                else:
                    self.infix.declare(i, "left" if d.kind == "infix" else "right", d.prec or 0)
            prec = f" {d.prec}" if d.prec is not None else ""
            return f"{d.kind}{prec} " + " ".join(d.ids)
        if isinstance(d, S.DLocal):
            inner = "\n".join(self.dec(x) for x in d.inner)
            outer = "\n".join(self.dec(x) for x in d.outer)
            return f"local\n{inner}\nin\n{outer}\nend"
        if isinstance(d, S.DStructure):
            parts = []
            for b in d.binds:
                asc = f" {':>' if b.opaque else ':'} {self.sig(b.sig)}" if b.sig is not None else ""
                parts.append(f"{b.name}{asc} = {self.str(b.str)}")
            return "structure " + " and ".join(parts)
        if isinstance(d, S.DSignature):
            return "signature " + " and ".join(f"{b.name} = {self.sig(b.sig)}" for b in d.binds)
        if isinstance(d, S.DFunctor):
            parts = []
            for b in d.binds:
                asc = f" {':>' if b.opaque else ':'} {self.sig(b.sig)}" if b.sig is not None else ""
                parts.append(f"{b.name} ({b.param} : {self.sig(b.param_sig)}){asc} = {self.str(b.body)}")
            return "functor " + " and ".join(parts)
        raise TypeError(d)

    def str(self, s) -> str:
        if isinstance(s, S.StrStruct):
            saved = self.infix.copy()
            body = "\n".join(self.dec(d) for d in s.decls)
            self.infix = saved
            return f"struct\n{body}\nend"
        if isinstance(s, S.StrVar):
            return s.name
        if isinstance(s, S.StrApp):
            return f"{s.functor} ({self.str(s.arg)})"
        if isinstance(s, S.StrConstraint):
            return f"{self.str(s.str)} {':>' if s.opaque else ':'} {self.sig(s.sig)}"
        raise TypeError(s)

    def sig(self, g) -> str:
        if isinstance(g, S.SigVar):
            return g.name
        out = []
        for sp in g.specs:
            if isinstance(sp, S.SpecVal):
                out.append(f"val {sp.name} : {self.ty(sp.ty)}")
            elif isinstance(sp, S.SpecType):
                kw = "eqtype" if sp.eq else "type"
                rhs = f" = {self.ty(sp.ty)}" if sp.ty is not None else ""
                out.append(f"{kw} {self.tyvars(sp.tyvars)}{sp.name}{rhs}")
            elif isinstance(sp, S.SpecDatatype):
                out.append("datatype " + self.datbinds(sp.binds))
            elif isinstance(sp, S.SpecStructure):
                out.append(f"structure {sp.name} : {self.sig(sp.sig)}")
            elif isinstance(sp, S.SpecInclude):
                out.append(f"include {self.sig(sp.sig)}")
        return "sig\n" + "\n".join(out) + "\nend"

    def program(self, decls) -> str:
        return "\n".join(self.dec(d) for d in decls) + "\n"


def print_program(decls) -> str:
    """Render declarations back to SML text (starting from the basis fixities)."""
    return SMLPrinter(None).program(decls)
