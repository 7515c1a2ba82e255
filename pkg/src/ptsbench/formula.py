"""Propositional formulas over atoms, bot, and, or, imp.

Negation is not a constructor: ``not A`` is written ``(imp A bot)``.
The textual form is fully parenthesized prefix notation::

    formula := atom | "bot" | "(and" formula formula ")"
             | "(or" formula formula ")" | "(imp" formula formula ")"
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .syntax import ParseError, SExpr, SList, Sym, read_one

BOT_NAME = "bot"
ATOM_RE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        if not is_atom_name(self.name):
            raise ValueError(f"invalid atom name {self.name!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Bottom:
    def __str__(self) -> str:
        return BOT_NAME


@dataclass(frozen=True)
class Conj:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"(and {self.left} {self.right})"


@dataclass(frozen=True)
class Disj:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"(or {self.left} {self.right})"


@dataclass(frozen=True)
class Impl:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"(imp {self.left} {self.right})"


Formula = Union[Atom, Bottom, Conj, Disj, Impl]
BOT = Bottom()

_BINARY = {"and": Conj, "or": Disj, "imp": Impl}

# A finite map atom name -> Formula; atoms outside the map stay fixed.
AtomSubstitution = Mapping[str, Formula]


def is_atom_name(name: str) -> bool:
    return bool(ATOM_RE.match(name)) and name != BOT_NAME


def atom(name: str) -> Formula:
    """Atom by name, mapping the reserved ``bot`` token to Bottom."""
    return BOT if name == BOT_NAME else Atom(name)


def is_atomic(f: Formula) -> bool:
    """Atoms and bot both belong to the atom set of the language."""
    return isinstance(f, (Atom, Bottom))


def atom_name(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Bottom):
        return BOT_NAME
    raise TypeError(f"{f} is not atomic")


def neg(f: Formula) -> Formula:
    return Impl(f, BOT)


def parse_formula(text: str) -> Formula:
    return from_sexpr(read_one(text))


def from_sexpr(e: SExpr) -> Formula:
    if isinstance(e, Sym):
        if e.text == BOT_NAME:
            return BOT
        if not is_atom_name(e.text):
            raise ParseError(f"invalid atom {e.text!r}", e.pos)
        return Atom(e.text)
    head = e.head()
    if head not in _BINARY:
        raise ParseError("expected 'and', 'or' or 'imp'", e.pos)
    if len(e) != 3:
        raise ParseError(f"'{head}' takes exactly two formulas", e.pos)
    return _BINARY[head](from_sexpr(e[1]), from_sexpr(e[2]))


def print_formula(f: Formula) -> str:
    return str(f)


def atoms_of(f: Formula) -> frozenset[str]:
    """Names of the proper atoms occurring in ``f`` (bot excluded)."""
    if isinstance(f, Atom):
        return frozenset([f.name])
    if isinstance(f, Bottom):
        return frozenset()
    return atoms_of(f.left) | atoms_of(f.right)


def apply_substitution(s: AtomSubstitution, f: Formula) -> Formula:
    """Simultaneous, single-pass replacement of atoms; bot is never replaced."""
    if isinstance(f, Atom):
        return s.get(f.name, f)
    if isinstance(f, Bottom):
        return f
    return type(f)(apply_substitution(s, f.left), apply_substitution(s, f.right))


def is_harrop(f: Formula) -> bool:
    """No disjunction in strictly positive position."""
    if isinstance(f, (Atom, Bottom)):
        return True
    if isinstance(f, Conj):
        return is_harrop(f.left) and is_harrop(f.right)
    if isinstance(f, Impl):
        return is_harrop(f.right)
    return False


def size(f: Formula) -> int:
    if isinstance(f, (Atom, Bottom)):
        return 1
    return 1 + size(f.left) + size(f.right)


def parse_substitution(text: str) -> dict[str, Formula]:
    """``"p=(or p q); q=p"`` -> {p: (or p q), q: p}."""
    out: dict[str, Formula] = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        name, sep, rhs = part.partition("=")
        name = name.strip()
        if not sep or not is_atom_name(name):
            raise ParseError(f"bad substitution entry {part!r}", 0)
        out[name] = parse_formula(rhs)
    return out


SEQUENT_ARROW = "==>"


def parse_sequent(text: str) -> tuple[list[Formula], Formula]:
    """``"A1 , A2 ==> B"``: comma-separated antecedents, one succedent."""
    left, sep, right = text.partition(SEQUENT_ARROW)
    if not sep:
        raise ParseError(f"a sequent needs '{SEQUENT_ARROW}'", 0)
    gamma = [parse_formula(part) for part in left.split(",") if part.strip()]
    if not right.strip():
        raise ParseError("a sequent needs a succedent", len(left) + len(sep))
    return gamma, parse_formula(right)


def print_sequent(gamma, a: Formula) -> str:
    return " , ".join(map(str, gamma)) + (" " if gamma else "") + f"{SEQUENT_ARROW} {a}"
