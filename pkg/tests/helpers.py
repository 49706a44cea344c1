"""Shared helpers for the test suite."""

from __future__ import annotations

import re
from pathlib import Path
from typing import List, Tuple

from mlgallina.elaborator import elaborate_program
from mlgallina.emitter import EmitConfig, normalize_fresh_names
from mlgallina.frontend import parse_source
from mlgallina.gallina.checker import tokenize as coq_tokenize
from mlgallina.pipeline import compile_source
from mlgallina.translator import Translator

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"
CORPUS = HERE / "corpus"

_COMPLETION = re.compile(r"\(\* completion(?::[^*]*)? \*\)(.*?)\(\* end \*\)", re.S)
_LISTING = re.compile(r"\(\* listing: (.*?) \*\)(.*?)\(\* end \*\)", re.S)


def elaborate(src: str):
    decls, infix = parse_source(src)
    return elaborate_program(decls, infix)


def translate(src: str):
    """Sentences for ``src`` (no evaluation gate)."""
    annotated, el = elaborate(src)
    return Translator(el.table).program(annotated)


def emit_text(src: str, header: bool = False, normalize: bool = True) -> str:
    cfg = EmitConfig(header_enabled=header, normalize_fresh_names=normalize)
    return compile_source(src, cfg, run_eval=False).text


def coq_tokens(text: str) -> List[Tuple[str, str]]:
    """Layout- and comment-insensitive token list, fresh names normalized."""
    return [(k, v) for k, v, _ in coq_tokenize(normalize_fresh_names(text)) if k != "eof"]


def as_listing(golden: str) -> str:
    """The golden text with every annotated completion removed and every
    annotated variant replaced by what the published listing shows."""
    text = _LISTING.sub(lambda m: m.group(1), golden)
    return _COMPLETION.sub("", text)


def annotations(golden: str) -> int:
    return len(_COMPLETION.findall(golden)) + len(_LISTING.findall(golden))
