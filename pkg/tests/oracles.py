"""Independent reference implementations used only by the tests.

Nothing here imports the package's evaluators or provers: formulas and rules
are read through their public dataclass fields only.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from ptsbench.formula import Atom, Bottom, Conj, Disj, Impl


# --- intuitionistic provability (contraction-free sequent calculus) ---------


def _is_atom(f) -> bool:
    return isinstance(f, Atom)


@lru_cache(maxsize=None)
def _prove(gamma: frozenset, goal) -> bool:
    if any(isinstance(g, Bottom) for g in gamma) or goal in gamma:
        return True
    # invertible left rules first
    for g in gamma:
        rest = gamma - {g}
        if isinstance(g, Conj):
            return _prove(rest | {g.left, g.right}, goal)
        if isinstance(g, Disj):
            return _prove(rest | {g.left}, goal) and _prove(rest | {g.right}, goal)
        if isinstance(g, Impl):
            x = g.left
            if _is_atom(x) and x in gamma:
                return _prove(rest | {g.right}, goal)
            if isinstance(x, Bottom):
                return _prove(rest, goal)
            if isinstance(x, Conj):
                return _prove(rest | {Impl(x.left, Impl(x.right, g.right))}, goal)
            if isinstance(x, Disj):
                return _prove(rest | {Impl(x.left, g.right), Impl(x.right, g.right)}, goal)
    # invertible right rules
    if isinstance(goal, Conj):
        return _prove(gamma, goal.left) and _prove(gamma, goal.right)
    if isinstance(goal, Impl):
        return _prove(gamma | {goal.left}, goal.right)
    # non-invertible choices
    if isinstance(goal, Disj) and (_prove(gamma, goal.left) or _prove(gamma, goal.right)):
        return True
    for g in gamma:
        if isinstance(g, Impl) and isinstance(g.left, Impl):
            c, d, b = g.left.left, g.left.right, g.right
            rest = gamma - {g}
            if _prove(rest | {Impl(d, b), c}, d) and _prove(rest | {b}, goal):
                return True
    return False


def il_provable(gamma, goal) -> bool:
    return _prove(frozenset(gamma), goal)


# --- atomic derivability and brute-force base extension ----------------------


def closure(rules: frozenset) -> frozenset:
    """Atoms derivable from ``rules``; ``bot`` derivable means every atom is."""
    known: set[str] = set()
    changed = True
    while changed:
        changed = False
        for r in rules:
            if r.conclusion in known:
                continue
            ok = True
            for slot in r.premises:
                if slot.discharge and not slot.discharge <= rules:
                    inner = closure(rules | slot.discharge)
                    ok = slot.premise in inner or "bot" in inner
                else:
                    ok = slot.premise in known or "bot" in known
                if not ok:
                    break
            if ok:
                known.add(r.conclusion)
                changed = True
    return frozenset(known)


def atom_holds(rules: frozenset, a: str) -> bool:
    c = closure(rules)
    return a in c or "bot" in c


def brute_force_atomic_sequent(gamma: list[str], a: str, base: frozenset, pool: list) -> bool:
    """Every pool subset added to the base that derives all of gamma derives a."""
    extra = [r for r in pool if r not in base]
    for k in range(len(extra) + 1):
        for combo in itertools.combinations(extra, k):
            c = base | frozenset(combo)
            if all(atom_holds(c, g) for g in gamma) and not atom_holds(c, a):
                return False
    return True
