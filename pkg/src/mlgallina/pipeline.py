"""Parse, elaborate, evaluate, translate and emit one compilation unit."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .elaborator import elaborate_program
from .emitter import EmitConfig, emit
from .errors import Diagnostic, MLGallinaError
from .elaborator.types import free_vars_ordered, show
from .evaluator import DEFAULT_FUEL, EvalOutcome, evaluate, show_value
from .frontend import parse_source
from .runtime import external_identifiers, validate_shims
from .translator import Translator


class EvalGateError(MLGallinaError):
    """The program fails when run, so its translation would be unsound."""

    stage = "evaluation"

    def __init__(self, outcome: EvalOutcome):
        super().__init__(f"{outcome.kind}: {outcome.message}", outcome.span)
        self.outcome = outcome


@dataclass
class Compiled:
    text: str
    sentences: list
    warnings: List[Diagnostic] = field(default_factory=list)
    outcome: Optional[EvalOutcome] = None


def compile_source(
    source: str,
    cfg: Optional[EmitConfig] = None,
    run_eval: bool = True,
    fuel: int = DEFAULT_FUEL,
) -> Compiled:
    """Raise the stage's MLGallinaError on failure; otherwise return the text."""
    decls, infix = parse_source(source)
    annotated, elab = elaborate_program(decls, infix)
    outcome = None
    if run_eval:
        outcome = evaluate(annotated, fuel)
        if not outcome.ok:
            raise EvalGateError(outcome)
    tr = Translator(elab.table)
    sentences = tr.program(annotated)
    warnings = list(elab.warnings) + tr.warnings
    warnings += [Diagnostic(m) for m in validate_shims(external_identifiers(sentences))]
    return Compiled(emit(sentences, cfg or EmitConfig()), sentences, warnings, outcome)


def run_source(source: str, fuel: int = DEFAULT_FUEL) -> Tuple[EvalOutcome, List[str]]:
    """Evaluate a program and report its top-level value bindings the way an
    SML toplevel would: ``val name = value : type``."""
    decls, infix = parse_source(source)
    annotated, elab = elaborate_program(decls, infix)
    outcome = evaluate(annotated, fuel)
    lines = []
    for name, v in outcome.values().items():
        info = elab.env.values.get(name)
        if info is None or info.kind != "var":
            continue
        body = elab.zonk(info.scheme.body)
        letters = {q: "'" + chr(ord("a") + i) for i, q in enumerate(free_vars_ordered(body))}
        lines.append(f"val {name} = {show_value(v, body)} : {show(body, letters)}")
    return outcome, lines
