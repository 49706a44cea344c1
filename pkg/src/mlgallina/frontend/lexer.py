"""Tokenizer for the SML subset plus ``(!! ... !!)`` contract blocks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from ..errors import LexError

KEYWORDS = frozenset(
    """abstype and andalso as case datatype do else end eqtype exception fn fun
    functor handle if in include infix infixr let local nonfix of op open orelse
    raise rec sharing sig signature struct structure then type val where while
    with withtype""".split()
)

SYMBOL_CHARS = frozenset("!%&$#+-/:<=>?@\\~`^|*")
PUNCT = ("...", "(", ")", "[", "]", "{", "}", ",", ";", "_")

IDENT = "identifier"
SYMBOL = "symbolic-id"
KEYWORD = "keyword"
INT = "int-lit"
REAL = "real-lit"
STRING = "string-lit"
CHAR = "char-lit"
CONTRACT_OPEN = "contract-open"
CONTRACT_CLOSE = "contract-close"
PUNCTUATION = "punctuation"
EOF = "eof"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Tuple[int, int]

    def is_(self, kind: str, text: str | None = None) -> bool:
        return self.kind == kind and (text is None or self.text == text)

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r})"


def _alnum(c: str) -> bool:
    return c.isalnum() or c in "_'"


class _Lexer:
    def __init__(self, source: str):
        self.src = source
        self.n = len(source)
        self.i = 0
        # char offset -> byte offset, only needed for non-ASCII input
        if source.isascii():
            self.byte = None
        else:
            acc = [0]
            for ch in source:
                acc.append(acc[-1] + len(ch.encode("utf-8")))
            self.byte = acc

    def off(self, i: int) -> int:
        return i if self.byte is None else self.byte[i]

    def error(self, msg: str, at: int) -> LexError:
        return LexError(msg, (self.off(at), self.off(min(at + 1, self.n))))

    def tokens(self) -> List[Token]:
        out: List[Token] = []
        src = self.src
        while True:
            self.skip_trivia()
            if self.i >= self.n:
                out.append(Token(EOF, "", (self.off(self.n), self.off(self.n))))
                return out
            start = self.i
            c = src[start]
            if src.startswith("(!!", start):
                self.i += 3
                kind = CONTRACT_OPEN
            elif src.startswith("!!)", start):
                self.i += 3
                kind = CONTRACT_CLOSE
            elif c == '"':
                self.string(start)
                kind = STRING
            elif c == "#" and src.startswith('#"', start):
                self.i += 1
                self.string(start + 1)
                body = src[start + 2 : self.i - 1]
                if len(_unescape(body, self, start)) != 1:
                    raise self.error("character literal must contain one character", start)
                kind = CHAR
            elif c.isdigit() or (c == "~" and start + 1 < self.n and src[start + 1].isdigit()):
                kind = self.number(start)
            elif c.isalpha() or c == "'":
                self.long_ident(start)
                text = src[start : self.i]
                kind = KEYWORD if text in KEYWORDS else IDENT
            elif src.startswith("...", start):
                self.i += 3
                kind = PUNCTUATION
            elif c in "()[]{},;":
                self.i += 1
                kind = PUNCTUATION
            elif c == "_":
                self.i += 1
                if self.i < self.n and _alnum(src[self.i]):
                    raise self.error("identifiers may not start with '_'", start)
                kind = PUNCTUATION
            elif c in SYMBOL_CHARS:
                while self.i < self.n and src[self.i] in SYMBOL_CHARS:
                    if src.startswith("!!)", self.i) and self.i > start:
                        break
                    self.i += 1
                kind = SYMBOL
            else:
                raise self.error(f"unexpected character {c!r}", start)
            out.append(Token(kind, src[start : self.i], (self.off(start), self.off(self.i))))

    def skip_trivia(self) -> None:
        src = self.src
        while self.i < self.n:
            c = src[self.i]
            if c.isspace():
                self.i += 1
            elif src.startswith("(*", self.i):
                start = self.i
                depth = 0
                while True:
                    if self.i >= self.n:
                        raise self.error("unterminated comment", start)
                    if src.startswith("(*", self.i):
                        depth += 1
                        self.i += 2
                    elif src.startswith("*)", self.i):
                        depth -= 1
                        self.i += 2
                        if depth == 0:
                            break
                    else:
                        self.i += 1
            else:
                return

    def string(self, start: int) -> None:
        src = self.src
        self.i = start + 1
        while True:
            if self.i >= self.n or src[self.i] == "\n":
                raise self.error("unterminated string literal", start)
            c = src[self.i]
            if c == "\\":
                self.i += 2
                if self.i > self.n:
                    raise self.error("unterminated string literal", start)
                # \<whitespace>...\ gap
                if src[self.i - 1].isspace():
                    while self.i < self.n and src[self.i] != "\\":
                        if not src[self.i].isspace():
                            raise self.error("malformed string gap", self.i)
                        self.i += 1
                    self.i += 1
            elif c == '"':
                self.i += 1
                return
            else:
                self.i += 1

    def number(self, start: int) -> str:
        src = self.src
        i = start + (1 if src[start] == "~" else 0)
        if src.startswith("0x", i) or src.startswith("0w", i):
            raise self.error("hexadecimal and word literals are not supported", start)
        j = i
        while j < self.n and src[j].isdigit():
            j += 1
        kind = INT
        if j + 1 < self.n and src[j] == "." and src[j + 1].isdigit():
            kind = REAL
            j += 1
            while j < self.n and src[j].isdigit():
                j += 1
        if j < self.n and src[j] in "eE":
            k = j + 1
            if k < self.n and src[k] == "~":
                k += 1
            if k < self.n and src[k].isdigit():
                kind = REAL
                j = k
                while j < self.n and src[j].isdigit():
                    j += 1
        if j < self.n and (src[j].isalpha() or src[j] == "_"):
            raise self.error("malformed numeric literal", start)
        self.i = j
        return kind

    def long_ident(self, start: int) -> None:
        src = self.src
        self.i = start + 1
        while self.i < self.n and _alnum(src[self.i]):
            self.i += 1
        # qualified identifiers: Str.Sub.x or Str.+
        while (
            self.i + 1 < self.n
            and src[self.i] == "."
            and src[start] != "'"
            and (src[self.i + 1].isalpha() or src[self.i + 1] in SYMBOL_CHARS)
        ):
            self.i += 1
            if src[self.i].isalpha():
                while self.i < self.n and _alnum(src[self.i]):
                    self.i += 1
            else:
                while self.i < self.n and src[self.i] in SYMBOL_CHARS:
                    self.i += 1
                return


_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", '"': '"', "a": "\a", "b": "\b", "v": "\v", "f": "\f", "r": "\r"}


def _unescape(body: str, lexer=None, at: int = 0) -> str:
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c != "\\":
            out.append(c)
            i += 1
            continue
        nxt = body[i + 1] if i + 1 < len(body) else ""
        if nxt in _ESCAPES:
            out.append(_ESCAPES[nxt])
            i += 2
        elif nxt.isdigit() and body[i + 1 : i + 4].isdigit():
            out.append(chr(int(body[i + 1 : i + 4])))
            i += 4
        elif nxt == "^" and i + 2 < len(body):
            out.append(chr(ord(body[i + 2]) - 64))
            i += 3
        elif nxt.isspace():
            j = body.index("\\", i + 1)
            i = j + 1
        else:
            if lexer is not None:
                raise lexer.error(f"illegal escape \\{nxt}", at)
            raise LexError(f"illegal escape \\{nxt}")
    return "".join(out)


def literal_value(tok: Token):
    """Decoded value of a literal token."""
    if tok.kind == INT:
        return int(tok.text.replace("~", "-"))
    if tok.kind == REAL:
        return float(tok.text.replace("~", "-"))
    if tok.kind == STRING:
        return _unescape(tok.text[1:-1])
    if tok.kind == CHAR:
        return _unescape(tok.text[2:-1])
    raise ValueError(tok)


def tokenize(source: str) -> List[Token]:
    """Split ``source`` into tokens; the list always ends with an EOF token."""
    return _Lexer(source).tokens()
