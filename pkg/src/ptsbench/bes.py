"""Consequence over atomic bases, with "every extension" cut down to a finite pool.

An evaluation fixes a root base B and a pool of candidate rules. The worlds
are the bases ``B ∪ S`` for ``S`` a subset of the pool rules not already in
B, ordered by inclusion. Atoms hold at a world when derivable there;
``A → C`` holds when every larger world satisfying A satisfies C. With a
nonempty antecedent set the sequent holds at a world when every larger world
satisfying all antecedents satisfies the succedent.

Refutations name a concrete extension. A refutation is marked ``certified``
when every affirmation it relies on is exact (does not depend on the pool
being complete); certified refutations hold for the unbounded quantifier.
Affirmations are always relative to the pool.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .atomic_system import (
    AtomicRule,
    PremiseSlot,
    axiom,
    derivable_atoms,
    print_base,
    rule,
    rule_key,
    sorted_rules,
)
from .formula import (
    BOT_NAME,
    AtomSubstitution,
    Atom,
    Bottom,
    Conj,
    Disj,
    Formula,
    Impl,
    apply_substitution,
    atom_name,
    is_atomic,
)

DEFAULT_MAX_POOL = 14


class PoolError(ValueError):
    pass


class PoolBudgetExceeded(PoolError):
    pass


@dataclass(frozen=True)
class PoolParams:
    atoms: tuple[str, ...]
    max_level: int = 1
    max_premises: int = 1
    cap: int | None = None


@dataclass(frozen=True)
class ExtensionPool:
    rules: tuple[AtomicRule, ...]
    params: PoolParams | None = None

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def describe(self) -> str:
        if self.params is None:
            return f"pool of {len(self.rules)} explicit rules"
        p = self.params
        return (
            f"pool over atoms {{{', '.join(p.atoms)}}}, level <= {p.max_level}, "
            f"premises <= {p.max_premises}, {len(self.rules)} rules"
        )


def pool_from_rules(rules: Iterable[AtomicRule]) -> ExtensionPool:
    return ExtensionPool(tuple(sorted_rules(set(rules))))


def make_pool(
    atoms: Iterable[str],
    max_level: int = 1,
    max_premises: int = 1,
    cap: int | None = None,
) -> ExtensionPool:
    """Deterministic candidate rules over ``atoms``.

    Level 0: one axiom per atom. Level 1: ``S => a`` for every nonempty premise
    set ``S`` of at most ``max_premises`` atoms. Level 2: ``from y, discharging
    axiom x, infer z``. Sorted by (level, text) and truncated to ``cap``.
    """
    names = tuple(sorted(set(atoms)))
    if not names:
        raise PoolError("pool needs at least one atom")
    if not 0 <= max_level <= 2:
        raise PoolError("pool level must be 0, 1 or 2")
    if not 0 <= max_premises <= 2:
        raise PoolError("max premises must be 0, 1 or 2")
    out = [axiom(a) for a in names]
    if max_level >= 1:
        for k in range(1, max_premises + 1):
            for prem in itertools.combinations(names, k):
                out.extend(rule(prem, a) for a in names)
    if max_level >= 2:
        for x, y, z in itertools.product(names, repeat=3):
            out.append(AtomicRule(z, (PremiseSlot(frozenset([axiom(x)]), y),)))
    out = sorted_rules(set(out))
    if cap is not None:
        out = out[:cap]
    return ExtensionPool(tuple(out), PoolParams(names, max_level, max_premises, cap))


@dataclass(frozen=True)
class Refutation:
    """At ``extension`` every antecedent holds and ``failing`` does not."""

    extension: frozenset[AtomicRule]
    antecedents: tuple[Formula, ...]
    failing: Formula


@dataclass
class SequentVerdict:
    holds: bool
    refutation: Refutation | None = None
    trace: list[str] = field(default_factory=list)
    certified: bool = False
    pool: str = ""

    @property
    def extension(self) -> frozenset[AtomicRule] | None:
        return self.refutation.extension if self.refutation else None

    @property
    def tag(self) -> str:
        return "HoldsWithinPool" if self.holds else "RefutedBy"


class Evaluator:
    """Memoized evaluation over the worlds spanned by a root base and a pool.

    Worlds are bitmasks over ``self.free`` (pool rules not in the root base).
    """

    def __init__(self, base: Iterable[AtomicRule], pool: ExtensionPool, max_pool: int = DEFAULT_MAX_POOL):
        self.base = frozenset(base)
        self.free = tuple(r for r in pool.rules if r not in self.base)
        if len(self.free) > max_pool:
            raise PoolBudgetExceeded(
                f"{len(self.free)} pool rules outside the base exceeds budget {max_pool}"
            )
        self.pool = pool
        self.n = len(self.free)
        self.full = (1 << self.n) - 1
        self._atoms: dict[int, tuple[frozenset[str], bool]] = {}
        self._memo: dict[tuple[int, Formula], bool] = {}

    # worlds

    def rules_of(self, m: int) -> frozenset[AtomicRule]:
        return self.base | {self.free[i] for i in range(self.n) if m >> i & 1}

    def mask_of(self, rules: Iterable[AtomicRule]) -> int:
        rules = frozenset(rules)
        if not rules >= self.base:
            raise PoolError("not an extension of the root base")
        m = 0
        for i, r in enumerate(self.free):
            if r in rules:
                m |= 1 << i
        if self.rules_of(m) != rules:
            raise PoolError("extension uses rules outside the pool")
        return m

    def supersets(self, m: int):
        """All masks containing ``m``: by number of added rules, then lexicographic."""
        free = [i for i in range(self.n) if not m >> i & 1]
        for k in range(len(free) + 1):
            for combo in itertools.combinations(free, k):
                ext = m
                for i in combo:
                    ext |= 1 << i
                yield ext

    def derivable(self, m: int, a: str) -> bool:
        hit = self._atoms.get(m)
        if hit is None:
            hit = derivable_atoms(self.rules_of(m))
            self._atoms[m] = hit
        atoms, bot = hit
        return a in atoms or bot

    # clauses

    def holds(self, m: int, f: Formula) -> bool:
        key = (m, f)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if isinstance(f, (Atom, Bottom)):
            val = self.derivable(m, atom_name(f))
        elif isinstance(f, Conj):
            val = self.holds(m, f.left) and self.holds(m, f.right)
        elif isinstance(f, Disj):
            val = self.holds(m, f.left) or self.holds(m, f.right)
        else:
            # persistence lets us check the local step and the one-rule-larger worlds
            val = (not self.holds(m, f.left) or self.holds(m, f.right)) and all(
                self.holds(m | 1 << i, f) for i in range(self.n) if not m >> i & 1
            )
        self._memo[key] = val
        return val

    def refute_sequent(self, m: int, gamma: Sequence[Formula], a: Formula) -> int | None:
        """First world above ``m`` where all of ``gamma`` hold and ``a`` fails."""
        if not gamma:
            if isinstance(a, Impl):
                return self.refute_sequent(m, (a.left,), a.right)
            return None if self.holds(m, a) else m
        for ext in self.supersets(m):
            if all(self.holds(ext, g) for g in gamma) and not self.holds(ext, a):
                return ext
        return None

    # certificates

    def exact_holds(self, m: int, f: Formula) -> bool:
        """Sufficient test for holding in every extension, not just the pool's."""
        if isinstance(f, (Atom, Bottom)):
            return self.derivable(m, atom_name(f))
        if isinstance(f, Conj):
            return self.exact_holds(m, f.left) and self.exact_holds(m, f.right)
        if isinstance(f, Disj):
            return self.exact_holds(m, f.left) or self.exact_holds(m, f.right)
        x, y = f.left, f.right
        if x == y or self.exact_holds(m, y):
            return True
        conj = _atomic_conjuncts(x)
        if conj is None:
            return False
        if BOT_NAME in conj:
            return True
        if is_atomic(y):
            hyp = self.rules_of(m) | {axiom(c) for c in conj}
            atoms, bot = derivable_atoms(frozenset(hyp))
            return atom_name(y) in atoms or bot
        return False

    def failure_certified(self, m: int, f: Formula) -> bool:
        """Whether the pool failure of ``f`` at ``m`` is a failure for every extension."""
        if isinstance(f, (Atom, Bottom)):
            return True
        if isinstance(f, Conj):
            side = f.left if not self.holds(m, f.left) else f.right
            return self.failure_certified(m, side)
        if isinstance(f, Disj):
            return self.failure_certified(m, f.left) and self.failure_certified(m, f.right)
        w = self.refute_sequent(m, (f.left,), f.right)
        return w is not None and self.exact_holds(w, f.left) and self.failure_certified(w, f.right)

    def explain_failure(self, m: int, f: Formula, depth: int = 0, limit: int = 6) -> list[str]:
        pad = "  " * depth
        here = self.describe_world(m)
        lines = [f"{pad}{f} fails at {here}"]
        if depth >= limit:
            return lines
        if isinstance(f, Conj):
            side = f.left if not self.holds(m, f.left) else f.right
            lines += self.explain_failure(m, side, depth + 1, limit)
        elif isinstance(f, Disj):
            lines += self.explain_failure(m, f.left, depth + 1, limit)
            lines += self.explain_failure(m, f.right, depth + 1, limit)
        elif isinstance(f, Impl):
            w = self.refute_sequent(m, (f.left,), f.right)
            lines.append(f"{pad}  {f.left} holds at {self.describe_world(w)}")
            lines += self.explain_failure(w, f.right, depth + 1, limit)
        return lines

    def describe_world(self, m: int) -> str:
        added = [str(self.free[i]) for i in range(self.n) if m >> i & 1]
        if not added:
            return "the base"
        return "base + {" + ", ".join(added) + "}"


def _atomic_conjuncts(f: Formula) -> list[str] | None:
    if is_atomic(f):
        return [atom_name(f)]
    if isinstance(f, Conj):
        left, right = _atomic_conjuncts(f.left), _atomic_conjuncts(f.right)
        if left is None or right is None:
            return None
        return left + right
    return None


def _normalize(gamma: Iterable[Formula], a: Formula) -> tuple[tuple[Formula, ...], Formula]:
    """Empty antecedent with an implication is evaluated as the sequent ``X => Y``."""
    gamma = tuple(dict.fromkeys(gamma))
    if not gamma and isinstance(a, Impl):
        return (a.left,), a.right
    return gamma, a


def bes_holds(
    gamma: Iterable[Formula],
    a: Formula,
    b: Iterable[AtomicRule],
    pool: ExtensionPool,
    max_pool: int = DEFAULT_MAX_POOL,
    evaluator: Evaluator | None = None,
) -> SequentVerdict:
    ev = evaluator or Evaluator(b, pool, max_pool)
    gamma = tuple(gamma)
    m = ev.mask_of(frozenset(b))
    w = ev.refute_sequent(m, gamma, a)
    if w is None:
        return SequentVerdict(True, pool=pool.describe())
    ants, failing = _normalize(gamma, a)
    ref = Refutation(ev.rules_of(w), ants, failing)
    certified = all(ev.exact_holds(w, g) for g in ants) and ev.failure_certified(w, failing)
    trace = [f"{g} holds at {ev.describe_world(w)}" for g in ants]
    trace += ev.explain_failure(w, failing)
    return SequentVerdict(False, ref, trace, certified, pool.describe())


def bes_logical(
    gamma: Iterable[Formula], a: Formula, pool: ExtensionPool, max_pool: int = DEFAULT_MAX_POOL
) -> SequentVerdict:
    """Logical consequence: evaluation at the empty base."""
    return bes_holds(gamma, a, frozenset(), pool, max_pool)


def replay_refutation(
    verdict: SequentVerdict,
    b: Iterable[AtomicRule],
    pool: ExtensionPool,
    max_pool: int = DEFAULT_MAX_POOL,
) -> bool:
    """Re-evaluate the clauses at the certificate's extension from scratch."""
    ref = verdict.refutation
    if ref is None:
        return False
    if not ref.extension >= frozenset(b):
        return False
    ev = Evaluator(ref.extension, pool, max_pool)
    return all(ev.holds(0, g) for g in ref.antecedents) and not ev.holds(0, ref.failing)


def refute_substitution_closure(
    gamma: Iterable[Formula],
    a: Formula,
    subs: Sequence[AtomSubstitution],
    pool: ExtensionPool,
    max_pool: int = DEFAULT_MAX_POOL,
) -> tuple[AtomSubstitution, SequentVerdict] | None:
    """First substitution whose instance of the sequent is refuted at the empty base."""
    gamma = tuple(gamma)
    for s in subs:
        g2 = [apply_substitution(s, g) for g in gamma]
        v = bes_logical(g2, apply_substitution(s, a), pool, max_pool)
        if not v.holds:
            return s, v
    return None


def format_verdict(v: SequentVerdict) -> str:
    if v.holds:
        return f"HoldsWithinPool ({v.pool})"
    lines = [f"RefutedBy ({'certified' if v.certified else 'pool-relative'}; {v.pool})"]
    lines.append("extension: " + print_base(v.refutation.extension).replace("\n", "\n  "))
    lines += ["  " + t for t in v.trace]
    return "\n".join(lines)


__all__ = [
    "ExtensionPool",
    "Evaluator",
    "PoolBudgetExceeded",
    "PoolError",
    "PoolParams",
    "Refutation",
    "SequentVerdict",
    "bes_holds",
    "bes_logical",
    "format_verdict",
    "make_pool",
    "pool_from_rules",
    "refute_substitution_closure",
    "replay_refutation",
    "rule_key",
]
