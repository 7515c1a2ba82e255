"""Higher-level atomic rules, bases, atomic derivations and derivability search.

Atoms here are plain names; ``"bot"`` is absurdity. Every base implicitly
contains the explosion rules ``bot => a`` for every atom ``a``; they are
never stored.

Rule text::

    (rule => p)                      axiom, level 0
    (rule (p) (q) => r)              level 1
    (rule (((rule => p)) q) => r)    from q, discharging axiom p, infer r

Base text: ``(base RULE*)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Union

from .formula import BOT_NAME, is_atom_name
from .syntax import ParseError, SExpr, SList, Sym, expect_list, expect_sym, read_all, read_one


def _check_atom(name: str) -> str:
    if name != BOT_NAME and not is_atom_name(name):
        raise ValueError(f"invalid atom {name!r}")
    return name


@dataclass(frozen=True)
class PremiseSlot:
    """One premise of a rule, with the lower-level rules it discharges."""

    discharge: frozenset["AtomicRule"]
    premise: str

    def __post_init__(self):
        _check_atom(self.premise)

    def __str__(self) -> str:
        if not self.discharge:
            return f"({self.premise})"
        inner = " ".join(str(r) for r in sorted(self.discharge, key=rule_key))
        return f"(({inner}) {self.premise})"


@dataclass(frozen=True)
class AtomicRule:
    conclusion: str
    premises: tuple[PremiseSlot, ...] = ()

    def __post_init__(self):
        _check_atom(self.conclusion)

    @cached_property
    def level(self) -> int:
        return rule_level(self)

    @cached_property
    def text(self) -> str:
        slots = "".join(f" {s}" for s in self.premises)
        return f"(rule{slots} => {self.conclusion})"

    def __str__(self) -> str:
        return self.text

    @property
    def is_axiom(self) -> bool:
        return not self.premises


def axiom(a: str) -> AtomicRule:
    return AtomicRule(a)


def rule(premises: Iterable[str], conclusion: str) -> AtomicRule:
    """Level-1 rule (or an axiom when ``premises`` is empty)."""
    return AtomicRule(conclusion, tuple(PremiseSlot(frozenset(), p) for p in premises))


def explosion(a: str) -> AtomicRule:
    return AtomicRule(a, (PremiseSlot(frozenset(), BOT_NAME),))


def is_explosion(r: AtomicRule) -> bool:
    return (
        len(r.premises) == 1
        and r.premises[0].premise == BOT_NAME
        and not r.premises[0].discharge
        and r.conclusion != BOT_NAME
    )


def rule_level(r: AtomicRule) -> int:
    if not r.premises:
        return 0
    discharged = [d for s in r.premises for d in s.discharge]
    if not discharged:
        return 1
    return max(rule_level(d) for d in discharged) + 2


def rule_key(r: AtomicRule) -> tuple[int, str]:
    return (rule_level(r), r.text)


def rule_atoms(r: AtomicRule) -> frozenset[str]:
    out = {r.conclusion}
    for s in r.premises:
        out.add(s.premise)
        for d in s.discharge:
            out |= rule_atoms(d)
    return frozenset(out)


Base = frozenset  # frozenset[AtomicRule]
EMPTY_BASE: frozenset[AtomicRule] = frozenset()


def base_level(b: Iterable[AtomicRule]) -> int:
    return max((rule_level(r) for r in b), default=0)


def extends(c: Iterable[AtomicRule], b: Iterable[AtomicRule]) -> bool:
    """``c`` is an extension of ``b`` (superset of rules)."""
    return frozenset(c) >= frozenset(b)


def sorted_rules(rules: Iterable[AtomicRule]) -> list[AtomicRule]:
    return sorted(rules, key=rule_key)


def print_base(b: Iterable[AtomicRule]) -> str:
    rules = sorted_rules(b)
    if not rules:
        return "(base)"
    return "(base\n" + "\n".join(f"  {r}" for r in rules) + ")"


# --- derivations ------------------------------------------------------------


@dataclass(frozen=True)
class Hole:
    """Open leaf standing for a construction of ``atom`` (used by constructions)."""

    atom: str

    @property
    def conclusion(self) -> str:
        return self.atom


@dataclass(frozen=True)
class Derivation:
    """Application of ``rule`` to one sub-derivation per premise slot.

    ``mark`` is a provenance tag (e.g. for a distinguished axiom); it takes no
    part in equality.
    """

    rule: AtomicRule
    premises: tuple[Union["Derivation", Hole], ...] = ()
    mark: str | None = field(default=None, compare=False)

    @property
    def conclusion(self) -> str:
        return self.rule.conclusion

    def nodes(self) -> Iterator[tuple[tuple[int, ...], Union["Derivation", Hole]]]:
        stack: list[tuple[tuple[int, ...], Derivation | Hole]] = [((), self)]
        while stack:
            path, node = stack.pop()
            yield path, node
            if isinstance(node, Derivation):
                for i in reversed(range(len(node.premises))):
                    stack.append((path + (i,), node.premises[i]))


AtomicDerivation = Derivation


def uses_mark(d: Derivation | Hole, mark: str) -> bool:
    return any(isinstance(n, Derivation) and n.mark == mark for _, n in d.nodes())


class MalformedDerivation(ValueError):
    def __init__(self, message: str, path: tuple[int, ...]):
        super().__init__(f"{message} at node {list(path)}")
        self.path = path


@dataclass(frozen=True)
class DerivationCheck:
    ok: bool
    path: tuple[int, ...] | None = None
    reason: str = ""
    undischarged: frozenset[AtomicRule] = frozenset()

    def __bool__(self) -> bool:
        return self.ok


def check_derivation(
    d: Derivation | Hole,
    assumed: Iterable[AtomicRule],
    b: Iterable[AtomicRule],
) -> DerivationCheck:
    """Accept iff every rule applied and undischarged in ``d`` is assumed, in
    ``b``, or an explosion rule. Reports the first offending node otherwise."""
    allowed = frozenset(assumed) | frozenset(b)
    used: set[AtomicRule] = set()
    failure: list[tuple[tuple[int, ...], str]] = []

    def walk(node, path, discharged: frozenset[AtomicRule]):
        if isinstance(node, Hole):
            failure.append((path, f"open assumption {node.atom}"))
            return
        r = node.rule
        if len(node.premises) != len(r.premises):
            raise MalformedDerivation(
                f"rule {r} has {len(r.premises)} premises, node has {len(node.premises)}", path
            )
        for i, (slot, sub) in enumerate(zip(r.premises, node.premises)):
            if sub.conclusion != slot.premise:
                raise MalformedDerivation(
                    f"premise {i} concludes {sub.conclusion}, rule {r} expects {slot.premise}", path
                )
        if r not in discharged:
            used.add(r)
            if r not in allowed and not is_explosion(r) and not failure:
                failure.append((path, f"rule {r} is applied undischarged but not available"))
        for i, (slot, sub) in enumerate(zip(r.premises, node.premises)):
            walk(sub, path + (i,), discharged | slot.discharge)

    walk(d, (), frozenset())
    if failure:
        path, reason = failure[0]
        return DerivationCheck(False, path, reason, frozenset(used))
    return DerivationCheck(True, undischarged=frozenset(used))


class DepthCapExhausted(RuntimeError):
    """The derivability search hit its nesting cap before settling."""


class Prover:
    """Least-fixpoint derivability per context (set of available rules).

    For a context the derivable atoms are computed by saturation; a premise
    whose slot discharges rules is attacked in the enlarged context, which is
    solved recursively. Contexts only grow along the recursion and are bounded
    by the rules nested in the start context, so the search terminates; the
    depth cap is a safety valve. Results are memoized per context.
    """

    def __init__(self, depth_cap: int = 64):
        if depth_cap < 1:
            raise ValueError("depth_cap must be >= 1")
        self.depth_cap = depth_cap
        self._memo: dict[frozenset[AtomicRule], dict[str, tuple[AtomicRule, tuple[bool, ...]]]] = {}

    def closure(self, ctx: frozenset[AtomicRule], depth: int = 0):
        """atom -> (rule, per-slot explosion flags) for every derivable atom."""
        hit = self._memo.get(ctx)
        if hit is not None:
            return hit
        if depth >= self.depth_cap:
            raise DepthCapExhausted(f"context nesting exceeded {self.depth_cap}")
        derived: dict[str, tuple[AtomicRule, tuple[bool, ...]]] = {}
        rules = sorted_rules(ctx)
        changed = True
        while changed:
            changed = False
            for r in rules:
                if r.conclusion in derived:
                    continue
                flags = []
                for slot in r.premises:
                    inner = ctx | slot.discharge
                    table = derived if inner == ctx else self.closure(inner, depth + 1)
                    if slot.premise in table:
                        flags.append(False)
                    elif BOT_NAME in table:
                        flags.append(True)
                    else:
                        break
                else:
                    derived[r.conclusion] = (r, tuple(flags))
                    changed = True
        self._memo[ctx] = derived
        return derived

    def derivable(self, goal: str, ctx: frozenset[AtomicRule]) -> bool:
        table = self.closure(ctx)
        return goal in table or BOT_NAME in table

    def build(self, goal: str, ctx: frozenset[AtomicRule]) -> Derivation | None:
        table = self.closure(ctx)
        if goal in table:
            r, flags = table[goal]
            subs = []
            for slot, exploded in zip(r.premises, flags):
                inner = ctx | slot.discharge
                if exploded:
                    sub = Derivation(explosion(slot.premise), (self.build(BOT_NAME, inner),))
                else:
                    sub = self.build(slot.premise, inner)
                subs.append(sub)
            return Derivation(r, tuple(subs))
        if BOT_NAME in table:
            return Derivation(explosion(goal), (self.build(BOT_NAME, ctx),))
        return None


def derive(
    goal: str,
    assumed: Iterable[AtomicRule],
    b: Iterable[AtomicRule],
    depth_cap: int = 64,
    prover: Prover | None = None,
) -> Derivation | None:
    """A derivation of ``goal`` from ``assumed`` in ``b``, or None when none exists.

    Raises DepthCapExhausted when the cap is hit (inconclusive, not failure).
    """
    _check_atom(goal)
    prover = prover or Prover(depth_cap)
    return prover.build(goal, frozenset(assumed) | frozenset(b))


_shared = Prover()


def derivable_atoms(b: frozenset[AtomicRule]) -> tuple[frozenset[str], bool]:
    """(atoms derivable in ``b``, whether bot is derivable) via a shared memo."""
    table = _shared.closure(frozenset(b))
    return frozenset(table), BOT_NAME in table


def is_derivable(goal: str, b: frozenset[AtomicRule]) -> bool:
    return _shared.derivable(goal, frozenset(b))


# --- text formats -----------------------------------------------------------


def parse_rule(text: str) -> AtomicRule:
    return rule_from_sexpr(read_one(text))


def rule_from_sexpr(e: SExpr) -> AtomicRule:
    lst = expect_list(e, "rule")
    if lst.head() != "rule":
        raise ParseError("expected (rule ...)", lst.pos)
    items = lst.items[1:]
    arrows = [i for i, x in enumerate(items) if isinstance(x, Sym) and x.text == "=>"]
    if len(arrows) != 1 or arrows[0] != len(items) - 2:
        raise ParseError("rule must end with '=> ATOM'", lst.pos)
    conclusion = _atom_sym(items[-1])
    slots = tuple(_slot_from_sexpr(s) for s in items[: arrows[0]])
    return AtomicRule(conclusion, slots)


def _atom_sym(e: SExpr) -> str:
    name = expect_sym(e, "atom")
    if name != BOT_NAME and not is_atom_name(name):
        raise ParseError(f"invalid atom {name!r}", e.pos)
    return name


def _slot_from_sexpr(e: SExpr) -> PremiseSlot:
    lst = expect_list(e, "premise slot")
    if len(lst) == 1:
        return PremiseSlot(frozenset(), _atom_sym(lst[0]))
    if len(lst) == 2:
        disc = expect_list(lst[0], "list of discharged rules")
        return PremiseSlot(frozenset(rule_from_sexpr(r) for r in disc.items), _atom_sym(lst[1]))
    raise ParseError("premise slot is (ATOM) or ((RULE*) ATOM)", lst.pos)


def parse_base(text: str) -> frozenset[AtomicRule]:
    exprs = read_all(text)
    if len(exprs) != 1:
        raise ParseError("expected a single (base ...) form", exprs[1].pos if exprs[1:] else 0)
    lst = expect_list(exprs[0], "(base ...)")
    if lst.head() != "base":
        raise ParseError("expected (base ...)", lst.pos)
    return frozenset(rule_from_sexpr(r) for r in lst.items[1:])


def print_derivation(d: Derivation | Hole, indent: int = 0) -> str:
    """Derivation text: ``(by RULE SUB*)``; holes print as ``(hole ATOM)``."""
    pad = "  " * indent
    if isinstance(d, Hole):
        return f"{pad}(hole {d.atom})"
    mark = f" :mark {d.mark}" if d.mark else ""
    if not d.premises:
        return f"{pad}(by {d.rule}{mark})"
    subs = "\n".join(print_derivation(s, indent + 1) for s in d.premises)
    return f"{pad}(by {d.rule}{mark}\n{subs})"


def derivation_from_sexpr(e: SExpr) -> Derivation | Hole:
    lst = expect_list(e, "derivation")
    head = lst.head()
    if head == "hole":
        if len(lst) != 2:
            raise ParseError("(hole ATOM)", lst.pos)
        return Hole(_atom_sym(lst[1]))
    if head != "by" or len(lst) < 2:
        raise ParseError("expected (by RULE SUB*) or (hole ATOM)", lst.pos)
    r = rule_from_sexpr(lst[1])
    rest = list(lst.items[2:])
    mark = None
    if len(rest) >= 2 and isinstance(rest[0], Sym) and rest[0].text == ":mark":
        mark = expect_sym(rest[1], "mark")
        rest = rest[2:]
    return Derivation(r, tuple(derivation_from_sexpr(s) for s in rest), mark)


def parse_derivation(text: str) -> Derivation | Hole:
    return derivation_from_sexpr(read_one(text))
