"""Diagnostics shared by every pipeline stage."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

Span = Tuple[int, int]


class MLGallinaError(Exception):
    """Base class; carries an optional byte span into the source."""

    stage = "error"

    def __init__(self, message: str, span: Optional[Span] = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def render(self, filename: str, source: str) -> str:
        line, col = position(source, self.span[0]) if self.span else (1, 1)
        return f"{filename}:{line}:{col}: {self.stage}: {self.message}"


@dataclass(frozen=True)
class Diagnostic:
    """A non-fatal diagnostic."""

    message: str
    span: Optional[Span] = None

    def render(self, filename: str, source: str) -> str:
        line, col = position(source, self.span[0]) if self.span else (1, 1)
        return f"{filename}:{line}:{col}: warning: {self.message}"

    def __str__(self) -> str:
        return self.message


class LexError(MLGallinaError):
    stage = "lex error"


class ParseError(MLGallinaError):
    stage = "syntax error"


class ElabError(MLGallinaError):
    stage = "type error"


class UnsupportedConstruct(MLGallinaError):
    """Input lies outside the supported pure subset."""

    stage = "unsupported"


class TranslationError(UnsupportedConstruct):
    stage = "unsupported"


def position(source: str, offset: int) -> Tuple[int, int]:
    """1-based (line, column) of a byte offset."""
    data = source.encode("utf-8")[:offset]
    line = data.count(b"\n") + 1
    col = len(data) - (data.rfind(b"\n") + 1) + 1
    return line, col
