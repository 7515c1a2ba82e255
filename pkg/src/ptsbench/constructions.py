"""Constructions in the BHK style for the conjunction-free fragment.

A construction of an atom is an atomic derivation of the base; of a
disjunction, a tagged construction of one disjunct; of an implication with an
atomic antecedent, a lambda term whose body, once its hole is filled with a
construction of the antecedent over any extension, is a construction of the
consequent there. Bodies are first-order terms: holes are explicit, either as
``Hole`` terms or as holes/open assumption leaves inside atomic witnesses.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .argstruct import (
    ArgStructure,
    AXIOM,
    arg_from_sexpr,
    assume,
    from_derivation,
    is_all_atomic,
    is_atomic_derivation,
    open_formulas,
    open_leaves,
    print_arg,
    replace_at,
    sub_at,
    nodes as arg_nodes,
    witnesses,
)
from .atomic_system import (
    AtomicRule,
    Derivation,
    Hole as DerivationHole,
    Prover,
    axiom,
    check_derivation,
    derivation_from_sexpr,
    derive,
    print_derivation,
    sorted_rules,
    uses_mark,
)
from .bes import ExtensionPool
from .formula import Atom, Conj, Disj, Formula, Impl, atom, atom_name, is_atomic
from .syntax import ParseError, Sym, expect_list, expect_sym, read_one
from .validity import INVALID, VALID

FRAK_MARK = "frak_p"


class ConjunctionError(ValueError):
    """Conjunctions are outside the fragment handled here."""


class UnsupportedFormula(ValueError):
    pass


class MalformedConstruction(ValueError):
    pass


@dataclass(frozen=True)
class AtomicWitness:
    derivation: Union[Derivation, DerivationHole, ArgStructure]


@dataclass(frozen=True)
class Tagged:
    index: int
    inner: "Construction"

    def __post_init__(self):
        if self.index not in (1, 2):
            raise MalformedConstruction(f"tag must be 1 or 2, got {self.index}")


@dataclass(frozen=True)
class Lambda:
    atom: str
    body: "Construction"


@dataclass(frozen=True)
class Hole:
    atom: str


Construction = Union[AtomicWitness, Tagged, Lambda, Hole]


@dataclass
class ConstructionVerdict:
    status: str
    reason: str = ""
    bounded: bool = False
    counterexample: dict | None = None

    @property
    def valid(self) -> bool:
        return self.status == VALID

    @property
    def tag(self) -> str:
        return self.status.capitalize()

    def describe(self) -> str:
        extra = " (within bounds)" if self.valid and self.bounded else ""
        return f"{self.tag}{extra}" + (f": {self.reason}" if self.reason else "")


# --- witnesses and filling ----------------------------------------------------


def as_structure(w: AtomicWitness) -> ArgStructure:
    d = w.derivation
    return d if isinstance(d, ArgStructure) else from_derivation(d)


def _fill_derivation(d, a: str, filler):
    if isinstance(d, DerivationHole):
        return filler if d.atom == a else d
    kids = tuple(_fill_derivation(s, a, filler) for s in d.premises)
    return Derivation(d.rule, kids, d.mark)


def _fill_witness(w: AtomicWitness, a: str, filler: AtomicWitness) -> AtomicWitness:
    d, f = w.derivation, filler.derivation
    if not isinstance(d, ArgStructure) and not isinstance(f, ArgStructure):
        return AtomicWitness(_fill_derivation(d, a, f))
    s = as_structure(w)
    img = as_structure(filler)
    for path in open_leaves(s):
        if sub_at(s, path).formula == atom(a):
            s = replace_at(s, path, img)
    return AtomicWitness(s)


def fill(k: Construction, a: str, filler: Construction) -> Construction:
    """Fill every free hole for atom ``a`` in ``k`` with ``filler``."""
    if isinstance(k, Hole):
        return filler if k.atom == a else k
    if isinstance(k, Tagged):
        return Tagged(k.index, fill(k.inner, a, filler))
    if isinstance(k, Lambda):
        return k if k.atom == a else Lambda(k.atom, fill(k.body, a, filler))
    if isinstance(k, AtomicWitness):
        if not _has_hole(k, a):
            return k
        if not isinstance(filler, AtomicWitness):
            raise MalformedConstruction(f"hole {a} inside an atomic witness needs an atomic filler")
        return _fill_witness(k, a, filler)
    raise TypeError(f"not a construction: {k!r}")


def _has_hole(w: AtomicWitness, a: str) -> bool:
    d = w.derivation
    if isinstance(d, ArgStructure):
        return atom(a) in open_formulas(d)
    return any(isinstance(n, DerivationHole) and n.atom == a for _, n in d.nodes())


def witness_checks(w: AtomicWitness, a: Formula, b: frozenset[AtomicRule]) -> bool:
    d = w.derivation
    if isinstance(d, ArgStructure):
        return d.formula == a and witnesses(d, b)
    if isinstance(d, DerivationHole):
        return False
    return atom(d.conclusion) == a and bool(check_derivation(d, (), b))


# --- checking ------------------------------------------------------------------

_PROVER = Prover()


def _pool_extensions(b: frozenset[AtomicRule], pool: ExtensionPool | None, limit: int) -> list[frozenset[AtomicRule]]:
    extra = [r for r in sorted_rules(pool.rules) if r not in b] if pool is not None else []
    out = []
    for k in range(len(extra) + 1):
        for combo in itertools.combinations(extra, k):
            if len(out) >= limit:
                return out
            out.append(b | frozenset(combo))
    return out


def atomic_constructions(x: str, c: frozenset[AtomicRule]) -> list[AtomicWitness]:
    """The constructions of an atom generated on ``c``: a derivation found by
    proof search, plus the bare axiom when ``c`` contains it."""
    out = []
    d = derive(x, (), c, prover=_PROVER)
    if d is not None:
        out.append(AtomicWitness(d))
    if axiom(x) in c:
        ax = AtomicWitness(Derivation(axiom(x)))
        if ax not in out:
            out.append(ax)
    return out


def _check_fragment(a: Formula):
    if isinstance(a, Conj):
        raise ConjunctionError("conjunctions are outside the fragment")
    if isinstance(a, (Disj, Impl)):
        _check_fragment(a.left)
        _check_fragment(a.right)


def is_construction(
    k: Construction,
    a: Formula,
    b: Iterable[AtomicRule],
    pool: ExtensionPool | None = None,
    max_extensions: int = 64,
) -> ConstructionVerdict:
    _check_fragment(a)
    return _is_construction(k, a, frozenset(b), pool, max_extensions)


def _is_construction(k, a, b, pool, limit) -> ConstructionVerdict:
    if is_atomic(a):
        if not isinstance(k, AtomicWitness):
            return ConstructionVerdict(INVALID, f"a construction of {a} must be an atomic derivation")
        if witness_checks(k, a, b):
            return ConstructionVerdict(VALID, "atomic derivation of the base")
        return ConstructionVerdict(INVALID, f"not a derivation of {a} in the base")
    if isinstance(a, Disj):
        if not isinstance(k, Tagged):
            return ConstructionVerdict(INVALID, f"a construction of {a} must be tagged")
        target = a.left if k.index == 1 else a.right
        v = _is_construction(k.inner, target, b, pool, limit)
        return ConstructionVerdict(v.status, v.reason, v.bounded, v.counterexample)
    if isinstance(a, Impl):
        if not is_atomic(a.left):
            raise UnsupportedFormula(f"implication with non-atomic antecedent {a.left}")
        if not isinstance(k, Lambda) or atom(k.atom) != a.left:
            return ConstructionVerdict(INVALID, f"a construction of {a} must abstract over {a.left}")
        return _from(k.body, [k.atom], a.right, b, pool, limit)
    raise TypeError(f"not a formula: {a!r}")


def _from(k, gamma: Sequence[str], a: Formula, b, pool, limit) -> ConstructionVerdict:
    for c in _pool_extensions(b, pool, limit):
        options = [atomic_constructions(x, c) for x in gamma]
        for combo in itertools.product(*options):
            filled = k
            for x, w in zip(gamma, combo):
                filled = fill(filled, x, w)
            v = _is_construction(filled, a, c, pool, limit)
            if not v.valid:
                return ConstructionVerdict(
                    INVALID,
                    v.reason,
                    True,
                    {"extension": [str(r) for r in sorted_rules(c - b)], "inputs": [describe(w) for w in combo]},
                )
    return ConstructionVerdict(VALID, "every generated input gives a construction", True)


def is_construction_from(
    k: Construction,
    gamma: Iterable[Formula | str],
    a: Formula,
    b: Iterable[AtomicRule],
    pool: ExtensionPool | None = None,
    max_extensions: int = 64,
) -> ConstructionVerdict:
    """``k`` with holes for the atoms of ``gamma`` is a construction of ``a``
    from them: over every pool extension and every tuple of generated atomic
    constructions of the inputs, filling the holes gives a construction of ``a``."""
    names = []
    for g in gamma:
        if isinstance(g, str):
            names.append(g)
        elif is_atomic(g):
            names.append(atom_name(g))
        else:
            raise UnsupportedFormula(f"non-atomic input {g}")
    _check_fragment(a)
    return _from(k, names, a, frozenset(b), pool, max_extensions)


# --- the Split construction -----------------------------------------------------


def holes_for_axiom(d: Derivation, a: str, mark: str | None = None) -> Derivation | DerivationHole:
    """Replace undischarged applications of axiom ``a`` (with ``mark`` if given) by holes."""
    ax = axiom(a)

    def walk(n, discharged):
        if isinstance(n, DerivationHole):
            return n
        if n.rule == ax and ax not in discharged and (mark is None or n.mark == mark):
            return DerivationHole(a)
        kids = tuple(walk(s, discharged | slot.discharge) for slot, s in zip(n.rule.premises, n.premises))
        return Derivation(n.rule, kids, n.mark)

    return walk(d, frozenset())


def replace_axiom(d: Derivation, a: str, mark: str | None = None) -> ArgStructure:
    """Every undischarged application of axiom ``a`` becomes an open assumption leaf."""
    return from_derivation(holes_for_axiom(d, a, mark))


def split_construction(k1: Construction, c: Iterable[AtomicRule]) -> Construction:
    """Turn a construction of p→q∨r on ``c`` into one of (p→q)∨(p→r) on ``c``.

    The body is run on a distinguished axiom for p over ``c`` plus that axiom;
    uses of it in the resulting derivation become assumptions again.
    """
    if not isinstance(k1, Lambda):
        raise MalformedConstruction("the input must be a lambda term")
    p = k1.atom
    c = frozenset(c)
    extended = c | {axiom(p)}
    k2 = AtomicWitness(Derivation(axiom(p), (), FRAK_MARK))
    out = fill(k1.body, p, k2)
    if not isinstance(out, Tagged) or not isinstance(out.inner, AtomicWitness):
        raise MalformedConstruction("the body did not evaluate to a tagged atomic witness")
    k3 = out.inner.derivation
    if isinstance(k3, ArgStructure):
        from .argstruct import read_derivation

        read = read_derivation(k3, extended)
        if read is None:
            raise MalformedConstruction("the tagged witness is not a derivation on the extended base")
        k3 = read
    if isinstance(k3, DerivationHole) or not check_derivation(k3, (), extended):
        raise MalformedConstruction("the tagged witness is not a derivation on the extended base")
    if not uses_mark(k3, FRAK_MARK):
        return Tagged(out.index, Lambda(p, AtomicWitness(k3)))
    return Tagged(out.index, Lambda(p, AtomicWitness(replace_axiom(k3, p, FRAK_MARK))))


theorem2_k = split_construction


def split_formula(p: str, q: str, r: str) -> Formula:
    return Disj(Impl(Atom(p), Atom(q)), Impl(Atom(p), Atom(r)))


def random_split_input(
    rng: random.Random, base: frozenset[AtomicRule], p: str = "p", q: str = "q", r: str = "r"
) -> Lambda | None:
    """A construction of p→q∨r on ``base``: derive q (or r) with an extra
    axiom for p, then turn the uses of that axiom into holes."""
    targets = [q, r]
    rng.shuffle(targets)
    for t in targets:
        d = derive(t, [axiom(p)], base, prover=_PROVER)
        if d is None:
            continue
        body = holes_for_axiom(d, p) if axiom(p) not in base else d
        idx = 1 if t == q else 2
        return Lambda(p, Tagged(idx, AtomicWitness(body)))
    return None


# --- text format ------------------------------------------------------------------


def parse_term(text: str) -> Construction:
    return term_from_sexpr(read_one(text))


def term_from_sexpr(e) -> Construction:
    lst = expect_list(e, "construction term")
    head = lst.head()
    if head == "hole":
        if len(lst) != 2:
            raise ParseError("expected (hole ATOM)", lst.pos)
        return Hole(expect_sym(lst[1], "atom"))
    if head == "lam":
        if len(lst) != 3:
            raise ParseError("expected (lam ATOM BODY)", lst.pos)
        return Lambda(expect_sym(lst[1], "atom"), term_from_sexpr(lst[2]))
    if head == "tag":
        if len(lst) != 3:
            raise ParseError("expected (tag I BODY)", lst.pos)
        idx = expect_sym(lst[1], "tag index")
        if idx not in ("1", "2"):
            raise ParseError("tag index must be 1 or 2", lst.pos)
        return Tagged(int(idx), term_from_sexpr(lst[2]))
    if head == "der":
        if len(lst) != 2:
            raise ParseError("expected (der DERIVATION)", lst.pos)
        return AtomicWitness(derivation_from_sexpr(lst[1]))
    if head == "der-arg":
        if len(lst) != 2:
            raise ParseError("expected (der-arg NODE)", lst.pos)
        return AtomicWitness(arg_from_sexpr(lst[1]))
    raise ParseError("expected hole, lam, tag, der or der-arg", lst.pos)


def print_term(k: Construction) -> str:
    if isinstance(k, Hole):
        return f"(hole {k.atom})"
    if isinstance(k, Lambda):
        return f"(lam {k.atom} {print_term(k.body)})"
    if isinstance(k, Tagged):
        return f"(tag {k.index} {print_term(k.inner)})"
    d = k.derivation
    if isinstance(d, ArgStructure):
        return f"(der-arg {print_arg(d, compact=True)})"
    return "(der " + " ".join(print_derivation(d).split()) + ")"


def describe(k: Construction) -> str:
    return print_term(k)
