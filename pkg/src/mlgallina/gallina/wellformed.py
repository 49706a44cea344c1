"""Structural sanity checks on Gallina sentences before printing."""

from __future__ import annotations

from typing import Dict, Iterator, List, Optional, Sequence, Set

from .syntax import (
    HOLE, GAnd, GAnnot, GApp, GArrow, GBoolAnd, GBoolOr, GDefinition, GEq, GEquations, GExists,
    GExplicitApp, GForall, GFun, GIdent, GIf, GInductive, GInfix, GLet, GList, GMatch, GModule,
    GModuleType, GNotation, GOr, GPAs, GPCon, GPInfix, GPList, GPRecord, GPTuple, GPWild, GProduct,
    GRecordDecl, GRecordLit, GScope, GTheorem, GTuple, GAxiom, GParameter,
)


def subterms(t) -> Iterator:
    """Every term nested in ``t``, including ``t`` itself."""
    yield t
    if isinstance(t, (GTuple, GList, GProduct)):
        for x in t.items:
            yield from subterms(x)
    elif isinstance(t, GApp):
        yield from subterms(t.fn)
        for a in t.args:
            yield from subterms(a)
    elif isinstance(t, GExplicitApp):
        for a in t.args:
            yield from subterms(a)
    elif isinstance(t, (GArrow,)):
        yield from subterms(t.dom)
        yield from subterms(t.cod)
    elif isinstance(t, (GAnd, GOr, GEq, GBoolAnd, GBoolOr, GInfix)):
        yield from subterms(t.lhs)
        yield from subterms(t.rhs)
    elif isinstance(t, GFun):
        yield from subterms(t.body)
    elif isinstance(t, GLet):
        yield from subterms(t.value)
        yield from subterms(t.body)
    elif isinstance(t, GMatch):
        yield from subterms(t.scrutinee)
        for _, b in t.branches:
            yield from subterms(b)
    elif isinstance(t, GIf):
        yield from subterms(t.cond)
        yield from subterms(t.then)
        yield from subterms(t.else_)
    elif isinstance(t, GRecordLit):
        for _, x in t.fields:
            yield from subterms(x)
    elif isinstance(t, GAnnot):
        yield from subterms(t.term)
        yield from subterms(t.type)
    elif isinstance(t, (GForall, GExists)):
        if isinstance(t, GForall):
            for b in t.binders:
                if b.type is not None:
                    yield from subterms(b.type)
        yield from subterms(t.body)
    elif isinstance(t, GScope):
        yield from subterms(t.term)


def subpatterns(p) -> Iterator:
    yield p
    if isinstance(p, GPCon):
        for a in p.args:
            yield from subpatterns(a)
    elif isinstance(p, (GPTuple, GPList)):
        for x in p.items:
            yield from subpatterns(x)
    elif isinstance(p, GPInfix):
        yield from subpatterns(p.lhs)
        yield from subpatterns(p.rhs)
    elif isinstance(p, GPRecord):
        for _, x in p.fields:
            yield from subpatterns(x)
    elif isinstance(p, GPAs):
        yield from subpatterns(p.pat)


def sentence_terms(s) -> Iterator:
    """Top-level terms and patterns held by one sentence (not nested modules)."""
    if isinstance(s, GDefinition):
        for _, t in s.params:
            yield t
        if s.ret is not None:
            yield s.ret
        yield s.body
    elif isinstance(s, GEquations):
        for eq in [s] + list(s.companions):
            for b in eq.binders:
                yield b.type
            yield eq.ret
            if eq.precondition is not None:
                yield eq.precondition
            for _, body in eq.clauses:
                yield body
    elif isinstance(s, GInductive):
        for ind in [s] + list(s.companions):
            for _, ty in ind.constructors:
                if ty is not None:
                    yield ty
    elif isinstance(s, GRecordDecl):
        for _, t in s.fields:
            yield t
    elif isinstance(s, (GTheorem, GAxiom)):
        yield s.statement
    elif isinstance(s, GParameter):
        yield s.type
    elif isinstance(s, GNotation):
        yield s.body


def sentence_patterns(s) -> Iterator:
    if isinstance(s, GEquations):
        for eq in [s] + list(s.companions):
            for pats, _ in eq.clauses:
                for p in pats:
                    yield from subpatterns(p)
    for t in sentence_terms(s):
        for sub in subterms(t):
            if isinstance(sub, GMatch):
                for p, _ in sub.branches:
                    yield from subpatterns(p)
            elif isinstance(sub, (GFun,)):
                for p in sub.binders:
                    yield from subpatterns(p)
            elif isinstance(sub, GLet):
                yield from subpatterns(sub.pat)


def _duplicates(names: Sequence[str]) -> List[str]:
    seen: Set[str] = set()
    dups = []
    for n in names:
        if n in seen and n not in dups:
            dups.append(n)
        seen.add(n)
    return dups


def well_formed(s, records: Optional[Dict[str, List[str]]] = None,
                defined: Optional[Set[str]] = None) -> List[str]:
    """Diagnostics for ``s``; empty when it is well formed.

    ``records`` maps each record name to its field names and enables the
    completeness check on literals and patterns; ``defined`` lists names
    already in scope and enables the notation check.
    """
    out: List[str] = []
    if isinstance(s, (GModule, GModuleType)):
        for sub in s.body or []:
            out.extend(well_formed(sub, records, defined))
        return out
    if isinstance(s, GDefinition):
        for d in _duplicates(list(s.implicits) + [n for n, _ in s.params]):
            out.append(f"{s.name}: binder {d} repeated")
    if isinstance(s, GEquations):
        for eq in [s] + list(s.companions):
            for d in _duplicates([b.name for b in eq.binders]):
                out.append(f"{eq.name}: binder {d} repeated")
            for pats, _ in eq.clauses:
                if len(pats) != len(eq.binders):
                    out.append(f"{eq.name}: clause has {len(pats)} patterns for {len(eq.binders)} binders")
            if eq.precondition is not None:
                pats, body = eq.clauses[-1]
                if body != HOLE or not all(isinstance(p, GPWild) for p in pats):
                    out.append(f"{eq.name}: precondition without a final absurd clause")
    for t in sentence_terms(s):
        for sub in subterms(t):
            if isinstance(sub, GMatch) and not sub.exhaustive:
                p, b = sub.branches[-1]
                if not isinstance(p, GPWild) or b != GIdent("patternFailure"):
                    out.append("non-exhaustive match lacks the patternFailure branch")
            if isinstance(sub, GRecordLit) and records is not None:
                out.extend(_record_complete([f for f, _ in sub.fields], records, "literal"))
    if records is not None:
        for p in sentence_patterns(s):
            if isinstance(p, GPRecord):
                out.extend(_record_complete([f for f, _ in p.fields], records, "pattern"))
    if isinstance(s, GNotation) and defined is not None:
        for sub in subterms(s.body):
            if isinstance(sub, GIdent) and sub.name not in defined and sub.name not in ("x", "y"):
                out.append(f"notation refers to undefined {sub.name}")
    return out


def _record_complete(fields: List[str], records: Dict[str, List[str]], what: str) -> List[str]:
    for name, labels in records.items():
        if fields and fields[0] in labels:
            if sorted(fields) != sorted(labels):
                return [f"incomplete record {what}: {name} expects fields {', '.join(labels)}"]
            return []
    return [f"no record declares field {fields[0]}"] if fields else []
