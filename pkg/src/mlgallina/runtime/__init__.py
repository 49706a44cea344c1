"""Coq shim libraries imported by the emitted header.

The ``.v`` files under ``coq/`` are static assets.  ``PROVIDES`` records,
for every identifier the translator may emit without defining it, the
shim that defines it and what kind of declaration it is.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Set, Tuple

from ..emitter import SHIM_MODULES
from ..gallina.syntax import (
    GAxiom, GDeclareModule, GDefinition, GEquations, GInductive, GModule, GModuleType, GNotation,
    GParameter, GRecordDecl, GTheorem,
)

KINDS = ("typeclass", "instance", "notation", "function", "axiom", "type")


@dataclass(frozen=True)
class ShimFile:
    name: str
    content: str
    provides: Tuple[Tuple[str, str], ...]


def _entries(shim: str, kind: str, names: str) -> Dict[str, Tuple[str, str]]:
    return {n: (shim, kind) for n in names.split()}


PROVIDES: Dict[str, Tuple[str, str]] = {
    **_entries("notationsSml", "typeclass", "eqInfixes numInfixes ordInfixes"),
    **_entries("notationsSml", "instance", "eqZ eqString eqChar eqBool eqList numZ numFloat ordZ ordFloat ordString ordChar"),
    **_entries("notationsSml", "notation", "= <> + - * < > <= >= o"),
    **_entries("notationsSml", "function", "eqb neq add sub mul neg abs lt gt le ge list_eqb"),
    **_entries("intSml", "type", "Z"),
    **_entries("intSml", "axiom", "Div"),
    **_entries("intSml", "notation", "div mod"),
    **_entries("intSml", "function", "divChecked modChecked digits Int.toString Int.max Int.min Int.abs"),
    **_entries("realSml", "type", "float"),
    **_entries("realSml", "notation", "/"),
    **_entries("realSml", "axiom", "real floor Overflow"),
    **_entries("realSml", "function", "Real.fromInt Real.floor"),
    **_entries("stringSml", "type", "string"),
    **_entries("stringSml", "axiom", "Subscript"),
    **_entries("stringSml", "notation", "^"),
    **_entries("stringSml", "function", """size str explode implode concat String.size String.sub
        String.concat String.explode String.implode String.str"""),
    **_entries("charSml", "type", "char"),
    **_entries("charSml", "axiom", "Chr"),
    **_entries("charSml", "function", "ord chr Char.ord Char.chr"),
    **_entries("boolSml", "function", "Bool.not"),
    **_entries("optionSml", "axiom", "OptionException"),
    **_entries("optionSml", "function", "valOf isSome getOpt Option.valOf Option.isSome Option.getOpt Option.map"),
    **_entries("listSml", "notation", "[] ++"),
    **_entries("listSml", "axiom", "EmptyException SubscriptException"),
    **_entries("listSml", "function", """hd tl null length rev map foldl foldr last_ nth_ take_ drop_
        List.hd List.tl List.last List.null List.length List.rev List.nth List.take List.drop
        List.concat List.map List.filter List.exists_ List.all List.foldl List.foldr"""),
    **_entries("listPairSml", "function", "ListPair.zip ListPair.unzip ListPair.map"),
}

# Names every Coq session has without importing anything.
PRELUDE = frozenset("""
    Type Prop bool true false unit tt list option Some None negb andb orb && || :: eq
    prod pair fst snd nat
""".split())


def shim_text(name: str) -> str:
    return resources.files(__package__).joinpath("coq", f"{name}.v").read_text(encoding="utf-8")


def shim_files() -> List[ShimFile]:
    out = []
    for name in SHIM_MODULES:
        provided = tuple(sorted((i, k) for i, (s, k) in PROVIDES.items() if s == name))
        out.append(ShimFile(name, shim_text(name), provided))
    return out


def install_shims(directory: Path) -> List[Path]:
    """Copy the nine shim files into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for shim in shim_files():
        path = directory / f"{shim.name}.v"
        path.write_text(shim.content, encoding="utf-8", newline="\n")
        written.append(path)
    return written


def validate_shims(emitted: Iterable[str]) -> List[str]:
    """One diagnostic per identifier that neither a shim nor the prelude provides."""
    missing = sorted(set(emitted) - PRELUDE - set(PROVIDES))
    return [f"no shim provides {name}" for name in missing]


# ---------------------------------------------------------------- identifier collection


def external_identifiers(sentences) -> Set[str]:
    """Identifiers the sentences use but do not themselves define.

    Bound variables, translator type variables (``_a``, ``_'3``) and names
    under a module declared in the same unit are left out.
    """
    from ..gallina import syntax as G
    from ..gallina.wellformed import sentence_patterns, sentence_terms, subpatterns, subterms

    used: Set[str] = set()
    defined: Set[str] = set()
    modules: Set[str] = set()

    def pattern_names(p):
        for q in subpatterns(p):
            if isinstance(q, G.GPVar):
                defined.add(q.name)
            elif isinstance(q, G.GPAs):
                defined.add(q.name)
            elif isinstance(q, G.GPCon):
                used.add(q.name)
            elif isinstance(q, G.GPInfix):
                used.add(q.op)
            elif isinstance(q, G.GPRecord):
                used.update(f for f, _ in q.fields)

    def term_names(t):
        for x in subterms(t):
            if isinstance(x, G.GIdent):
                used.add(x.name)
            elif isinstance(x, G.GQualIdent):
                used.add(x.dotted)
            elif isinstance(x, G.GExplicitApp):
                used.add(x.name)
            elif isinstance(x, G.GInfix):
                used.add(x.op)
            elif isinstance(x, G.GBoolAnd):
                used.add("&&")
            elif isinstance(x, G.GBoolOr):
                used.add("||")
            elif isinstance(x, G.GEq):
                used.add("=")
            elif isinstance(x, G.GList) and not x.items:
                used.add("[]")
            elif isinstance(x, G.GRecordLit):
                used.update(f for f, _ in x.fields)
            elif isinstance(x, G.GForall):
                defined.update(b.name for b in x.binders)
            elif isinstance(x, G.GExists):
                defined.update(x.names)

    def visit(s):
        if isinstance(s, (GModule, GModuleType)):
            modules.add(s.name)
            defined.add(s.name)
            for p, sig in getattr(s, "params", []):
                modules.add(p)
                used.add(sig)
            if isinstance(s, GModule):
                if s.ascription:
                    used.add(s.ascription)
                if s.argument:
                    used.add(s.argument)
                if s.functor:
                    used.add(s.functor)
            for sub in s.body or []:
                visit(sub)
            return
        if isinstance(s, GDeclareModule):
            modules.add(s.name)
            defined.add(s.name)
            used.add(s.type)
            return
        if isinstance(s, GEquations):
            for eq in [s] + list(s.companions):
                defined.add(eq.name)
                defined.update(b.name for b in eq.binders)
        elif isinstance(s, GInductive):
            for ind in [s] + list(s.companions):
                defined.add(ind.name)
                defined.update(c for c, _ in ind.constructors)
        elif isinstance(s, GRecordDecl):
            defined.add(s.name)
            defined.update(f for f, _ in s.fields)
        elif isinstance(s, GDefinition):
            defined.add(s.name)
            defined.update(s.implicits)
            defined.update(n for n, _ in s.params)
        elif isinstance(s, GNotation):
            parts = s.symbol.split()
            if len(parts) == 3:
                defined.add(parts[1].strip("'"))
                defined.update((parts[0], parts[2]))
        elif isinstance(s, (GTheorem, GAxiom, GParameter)):
            defined.add(s.name)
        elif hasattr(s, "name"):
            defined.add(s.name)
        for p in sentence_patterns(s):
            pattern_names(p)
        for t in sentence_terms(s):
            term_names(t)

    for s in sentences:
        visit(s)
    out = set()
    for name in used - defined:
        if name == "_" or name.startswith("_"):
            continue
        head = name.split(".", 1)[0]
        if "." in name and head in modules:
            continue
        out.add(name)
    return out
