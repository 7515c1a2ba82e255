"""Minimal s-expression reader shared by the formula, rule, argument and term formats."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


class ParseError(ValueError):
    """Malformed textual input; ``pos`` is a 0-based character offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


@dataclass(frozen=True)
class Sym:
    text: str
    pos: int

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class SList:
    items: tuple["SExpr", ...]
    pos: int

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Sym):
            return self.items[0].text
        return None


SExpr = Union[Sym, SList]

_DELIMS = "()"


def tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in _DELIMS:
            tokens.append((c, i))
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in _DELIMS and text[j] != ";":
                j += 1
            tokens.append((text[i:j], i))
            i = j
    return tokens


def read_all(text: str) -> list[SExpr]:
    tokens = tokenize(text)
    out: list[SExpr] = []
    i = 0
    while i < len(tokens):
        expr, i = _read(tokens, i, len(text))
        out.append(expr)
    return out


def read_one(text: str) -> SExpr:
    exprs = read_all(text)
    if not exprs:
        raise ParseError("empty input", 0)
    if len(exprs) > 1:
        extra = exprs[1]
        raise ParseError("trailing input", extra.pos)
    return exprs[0]


def _read(tokens, i, end):
    if i >= len(tokens):
        raise ParseError("unexpected end of input", end)
    tok, pos = tokens[i]
    if tok == ")":
        raise ParseError("unexpected ')'", pos)
    if tok != "(":
        return Sym(tok, pos), i + 1
    items = []
    i += 1
    while True:
        if i >= len(tokens):
            raise ParseError("unclosed '('", pos)
        if tokens[i][0] == ")":
            return SList(tuple(items), pos), i + 1
        item, i = _read(tokens, i, end)
        items.append(item)


def expect_sym(e: SExpr, what: str) -> str:
    if not isinstance(e, Sym):
        raise ParseError(f"expected {what}", e.pos)
    return e.text


def expect_list(e: SExpr, what: str) -> SList:
    if not isinstance(e, SList):
        raise ParseError(f"expected {what}", e.pos)
    return e
