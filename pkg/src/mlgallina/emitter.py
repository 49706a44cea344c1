"""Coq source text for a list of Gallina sentences."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Sequence

from .gallina import printer
from .gallina.syntax import GGeneralizable, GRequire

SHIM_MODULES = (
    "intSml", "listSml", "realSml", "stringSml", "charSml",
    "boolSml", "optionSml", "listPairSml", "notationsSml",
)


@dataclass
class EmitConfig:
    header_enabled: bool = True
    indent_width: int = 2
    line_width: int = 100
    normalize_fresh_names: bool = False

    def __post_init__(self):
        if self.indent_width < 1:
            raise ValueError("indent_width must be at least 1")


def header_sentences() -> List:
    out = [GRequire([m]) for m in SHIM_MODULES]
    out.append(GRequire(["Equations"], source="Equations"))
    out.append(GGeneralizable())
    return out


def emit_header(cfg: EmitConfig = EmitConfig()) -> str:
    if not cfg.header_enabled:
        return ""
    return "".join(printer.sentence(s)[0] + "\n" for s in header_sentences())


def emit(sentences: Sequence, cfg: EmitConfig = EmitConfig()) -> str:
    """Header, then each sentence separated by a blank line; LF endings and a
    trailing newline."""
    blocks = [
        "\n".join(printer.sentence(s, 0, cfg.line_width, cfg.indent_width)) for s in sentences
    ]
    body = "\n\n".join(blocks)
    head = emit_header(cfg)
    if head and body:
        head += "\n"
    text = head + body
    if body:
        text += "\n"
    if cfg.normalize_fresh_names:
        text = normalize_fresh_names(text)
    return text


# strings and comments are skipped; the rest are the four fresh-name families
_FRESH = re.compile(
    r'(?P<str>"(?:[^"]|"")*")'
    r"|(?P<com>\(\*.*?\*\))"
    r"|(?<![\w'])(?P<fam>rid_|mid_|_'|y)(?P<num>\d+)(?![\w'])",
    re.S,
)


def normalize_fresh_names(text: str) -> str:
    """Renumber ``rid_N``, ``mid_N``, ``_'N`` and ``yN`` by order of first
    appearance, so outputs that differ only in fresh-name counters compare
    equal."""
    seen: Dict[str, Dict[str, int]] = {}

    def sub(m: re.Match) -> str:
        if m.group("fam") is None:
            return m.group(0)
        fam = m.group("fam")
        table = seen.setdefault(fam, {})
        n = table.setdefault(m.group("num"), len(table) + 1)
        return f"{fam}{n}"

    return _FRESH.sub(sub, text)
