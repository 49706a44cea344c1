"""Deterministic fresh-name supply."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

RECORD = "record-type"
TYVAR = "tyvar"
MODULE = "module-lift"
EXISTENTIAL = "existential"

_FORMATS = {RECORD: "rid_{}", TYVAR: "_'{}", MODULE: "mid_{}", EXISTENTIAL: "y{}"}


@dataclass
class FreshNamer:
    counters: Dict[str, int] = field(default_factory=lambda: {k: 0 for k in _FORMATS})

    def fresh(self, kind: str) -> str:
        if kind not in _FORMATS:
            raise ValueError(f"unknown name kind {kind!r}")
        self.counters[kind] += 1
        return _FORMATS[kind].format(self.counters[kind])

    def peek(self, kind: str) -> int:
        return self.counters[kind]

    def reset(self, kind: str, value: int = 0) -> None:
        self.counters[kind] = value


def fresh_name(namer: FreshNamer, kind: str) -> str:
    return namer.fresh(kind)
