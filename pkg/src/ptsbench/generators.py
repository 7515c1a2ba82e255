"""Seeded random generators for formulas, bases, argument structures and
reduction-domain samples. Everything draws from an explicit random.Random."""

from __future__ import annotations

import random
from typing import Callable, Sequence

from .argstruct import ArgStructure, assume, axiom_leaf, from_derivation, infer, open_formulas
from .atomic_system import AtomicRule, PremiseSlot, axiom, derive
from .formula import BOT, Atom, Conj, Disj, Formula, Impl, atom_name, is_atomic, is_harrop

ATOMS = ("p", "q", "r")
# Small label alphabet on purpose: inner binders often reuse outer labels.
LABELS = ("1", "2", "3", "4")

Scope = Sequence[tuple[str, Formula]]


def random_atom(rng: random.Random, atoms: Sequence[str] = ATOMS, bot: bool = False) -> Formula:
    if bot and rng.random() < 0.1:
        return BOT
    return Atom(rng.choice(atoms))


def random_formula(rng: random.Random, depth: int = 2, atoms: Sequence[str] = ATOMS, bot: bool = False) -> Formula:
    if depth <= 0 or rng.random() < 0.35:
        return random_atom(rng, atoms, bot)
    ctor = rng.choice((Conj, Disj, Impl, Impl))
    return ctor(random_formula(rng, depth - 1, atoms, bot), random_formula(rng, depth - 1, atoms, bot))


def random_harrop(rng: random.Random, depth: int = 2, atoms: Sequence[str] = ATOMS) -> Formula:
    for _ in range(50):
        f = random_formula(rng, depth, atoms)
        if is_harrop(f):
            return f
    return random_atom(rng, atoms)


def _visible(scope: Scope) -> dict[str, Formula]:
    out: dict[str, Formula] = {}
    for label, f in scope:
        out[label] = f
    return out


def random_structure(
    rng: random.Random,
    f: Formula,
    depth: int = 3,
    scope: Scope = (),
    allow_open: bool = True,
    atoms: Sequence[str] = ATOMS,
) -> ArgStructure:
    """A random structure concluding ``f``.

    Leaves are axioms, open assumptions (when ``allow_open``) or assumptions
    bound by a binder in ``scope`` with a matching formula.
    """
    visible = _visible(scope)
    matching = [lab for lab, g in visible.items() if g == f]
    if depth <= 0 or rng.random() < 0.2:
        roll = rng.random()
        if matching and roll < 0.55:
            return assume(f, rng.choice(matching))
        if allow_open and roll < 0.75:
            return assume(f)
        return axiom_leaf(f)
    roll = rng.random()
    sub = lambda g, extra=(): random_structure(rng, g, depth - 1, [*scope, *extra], allow_open, atoms)
    if roll < 0.35:
        if isinstance(f, Impl):
            if rng.random() < 0.75:
                lab = rng.choice(LABELS)
                return infer(f, sub(f.right, [(lab, f.left)]), binds=[lab])
            return infer(f, sub(f.right))
        if isinstance(f, Disj):
            return infer(f, sub(rng.choice((f.left, f.right))))
        if isinstance(f, Conj):
            return infer(f, sub(f.left), sub(f.right))
    if roll < 0.6:
        # elimination shape: major g -> f, minor g
        pool = [g for g in visible.values()] or [random_atom(rng, atoms)]
        g = rng.choice(pool) if rng.random() < 0.6 else random_formula(rng, 1, atoms)
        return infer(f, sub(Impl(g, f)), sub(g))
    if roll < 0.7 and is_atomic(f):
        # an atomic step that discharges a rule application below it
        lab = "r" + rng.choice(LABELS)
        g = random_atom(rng, atoms)
        return infer(f, axiom_leaf(g, lab), rule_binds=[lab])
    n = rng.choice((1, 1, 2))
    pool = list(visible.values()) + [random_formula(rng, 1, atoms) for _ in range(2)]
    return infer(f, *(sub(rng.choice(pool)) for _ in range(n)))


def random_atomic_derivation(
    rng: random.Random, f: Formula, depth: int = 3, atoms: Sequence[str] = ATOMS
) -> ArgStructure:
    """Rule applications only: axiom leaves and atomic inference nodes."""
    if depth <= 0 or rng.random() < 0.3:
        return axiom_leaf(f)
    if rng.random() < 0.15:
        lab = "r" + rng.choice(LABELS)
        return infer(f, axiom_leaf(random_atom(rng, atoms), lab), rule_binds=[lab])
    n = rng.choice((1, 1, 2))
    return infer(f, *(random_atomic_derivation(rng, random_atom(rng, atoms), depth - 1, atoms) for _ in range(n)))


def random_intro_structure(
    rng: random.Random,
    f: Formula,
    depth: int = 3,
    scope: Scope = (),
    atoms: Sequence[str] = ATOMS,
    base: frozenset[AtomicRule] | None = None,
) -> ArgStructure:
    """Introduction-shaped structures: intros for complex formulas, detours and
    eliminations on scoped assumptions, and (when ``base`` is given) atomic
    parts that are real derivations of it. Biased toward valid structures."""
    matching = [lab for lab, g in scope if g == f]
    if matching and rng.random() < 0.5:
        return assume(f, rng.choice(matching))
    if depth <= 0:
        return axiom_leaf(f)
    sub = lambda g, extra=(): random_intro_structure(rng, g, depth - 1, [*scope, *extra], atoms, base)
    if is_atomic(f):
        if scope and rng.random() < 0.3:
            lab, g = rng.choice(list(scope))
            return infer(f, sub(Impl(g, f)), assume(g, lab))
        if rng.random() < 0.25:
            g = random_formula(rng, 1, atoms)
            lab = rng.choice(LABELS)
            return infer(f, infer(Impl(g, f), sub(f, [(lab, g)]), binds=[lab]), sub(g))
        if base is not None and rng.random() < 0.8:
            der = derive(atom_name(f), [], base)
            if der is not None:
                return from_derivation(der)
        return random_atomic_derivation(rng, f, 2, atoms)
    if isinstance(f, Impl):
        lab = rng.choice(LABELS)
        return infer(f, sub(f.right, [(lab, f.left)]), binds=[lab])
    if isinstance(f, Conj):
        return infer(f, sub(f.left), sub(f.right))
    return infer(f, sub(rng.choice((f.left, f.right))))


def closed_image(rng: random.Random, f: Formula, depth: int = 2) -> ArgStructure:
    return random_structure(rng, f, depth, allow_open=False)


def random_sigma(rng: random.Random, d: ArgStructure) -> dict[Formula, ArgStructure]:
    return {f: closed_image(rng, f) for f in open_formulas(d)}


def _with_bound_leaf(
    rng: random.Random, f: Formula, label: str, a: Formula, depth: int, scope: Scope, allow_open: bool
) -> ArgStructure:
    """A random structure of ``f`` containing at least one ``[a]label`` leaf bound outside."""
    from .argstruct import bindings, sub_at

    for _ in range(8):
        s = random_structure(rng, f, depth, [*scope, (label, a)], allow_open)
        b = bindings(s)
        if any(t is None and sub_at(s, p).label == label for p, t in b.assumption.items()):
            return s
    rest = random_structure(rng, random_formula(rng, 1), depth - 1, [*scope, (label, a)], allow_open)
    return infer(f, assume(a, label), rest)


def split_conclusion(p: Formula, q: Formula, r: Formula) -> Formula:
    return Disj(Impl(p, q), Impl(p, r))


def sample_phi_imp(rng: random.Random):
    a, b = random_formula(rng), random_formula(rng)
    lab = rng.choice(LABELS)
    if rng.random() < 0.8:
        body = _with_bound_leaf(rng, b, lab, a, 3, (), True)
    else:
        body = random_structure(rng, b, 3, [(lab, a)])
    d = infer(b, infer(Impl(a, b), body, binds=[lab]), random_structure(rng, a, 2))
    return d, random_sigma(rng, d)


def sample_iota(rng: random.Random):
    a, b, c = random_formula(rng, 1), random_formula(rng, 1), random_formula(rng, 1)
    prem = random_structure(rng, Impl(a, Impl(b, c)), 3)
    d = infer(Impl(b, Impl(a, c)), prem)
    return d, random_sigma(rng, d)


def sample_phi1(rng: random.Random):
    p, q, r = (random_atom(rng) for _ in range(3))
    lab = rng.choice(LABELS)
    body = _with_bound_leaf(rng, Disj(q, r), lab, p, 3, (), False)
    d = infer(split_conclusion(p, q, r), infer(Impl(p, Disj(q, r)), body, binds=[lab]))
    return d, {}


def sample_phi2(rng: random.Random):
    p, q, r = (random_atom(rng) for _ in range(3))
    chosen = rng.choice((q, r))
    inner = random_atomic_derivation(rng, chosen, 3)
    d = infer(split_conclusion(p, q, r), infer(Impl(p, Disj(q, r)), infer(Disj(q, r), inner)))
    return d, {}


def sample_split_to_s(rng: random.Random):
    a = random_harrop(rng, 1)
    b, c = random_formula(rng, 1), random_formula(rng, 1)
    prem = random_structure(rng, Impl(a, Disj(b, c)), 3)
    d = infer(split_conclusion(a, b, c), prem)
    return d, random_sigma(rng, d)


def sample_phi_s(rng: random.Random):
    a, b1, b2 = random_formula(rng, 1), random_formula(rng, 1), random_formula(rng, 1)
    goal = random_formula(rng, 1)
    l1, l2, l3 = rng.sample(LABELS, 3)
    pick = rng.choice((b1, b2))
    d1 = random_structure(rng, pick, 3, [(l1, a)])
    m1 = random_structure(rng, goal, 3, [(l2, Impl(a, b1))])
    m2 = random_structure(rng, goal, 3, [(l3, Impl(a, b2))])
    d = infer(goal, infer(Disj(b1, b2), d1), m1, m2, binds=[l1, l2, l3])
    return d, random_sigma(rng, d)


SAMPLERS: dict[str, Callable[[random.Random], tuple]] = {
    "phi_imp": sample_phi_imp,
    "iota": sample_iota,
    "phi1": sample_phi1,
    "phi2": sample_phi2,
    "split_to_s": sample_split_to_s,
    "phi_s": sample_phi_s,
}


def random_split_structure(rng: random.Random) -> ArgStructure:
    """Closed structures ending with Split over atoms, biased toward both Split reduction shapes."""
    p, q, r = (random_atom(rng) for _ in range(3))
    concl = split_conclusion(p, q, r)
    roll = rng.random()
    if roll < 0.3:
        return sample_phi1(rng)[0]
    if roll < 0.6:
        return sample_phi2(rng)[0]
    lab = rng.choice(LABELS)
    if rng.random() < 0.5:
        pick = rng.choice((q, r))
        body = infer(Disj(q, r), random_structure(rng, pick, 3, [(lab, p)], allow_open=False))
    else:
        body = random_structure(rng, Disj(q, r), 3, [(lab, p)], allow_open=rng.random() < 0.2)
    binds = [lab] if rng.random() < 0.6 else []
    return infer(concl, infer(Impl(p, Disj(q, r)), body, binds=binds))


# --- bases --------------------------------------------------------------------


def random_rule(rng: random.Random, atoms: Sequence[str] = ATOMS, max_level: int = 2, bot: bool = True) -> AtomicRule:
    names = list(atoms) + (["bot"] if bot else [])
    concl = rng.choice(names)
    if max_level <= 0 or rng.random() < 0.3:
        return axiom(concl)
    n = rng.choice((1, 1, 2))
    prems = []
    for _ in range(n):
        dis = frozenset()
        if max_level >= 2 and rng.random() < 0.3:
            dis = frozenset([random_rule(rng, atoms, max_level - 2, bot=False)])
        prems.append(PremiseSlot(dis, rng.choice(names)))
    return AtomicRule(concl, tuple(prems))


def random_base(
    rng: random.Random, max_rules: int = 3, atoms: Sequence[str] = ATOMS, max_level: int = 2
) -> frozenset[AtomicRule]:
    return frozenset(random_rule(rng, atoms, max_level) for _ in range(rng.randint(0, max_rules)))
