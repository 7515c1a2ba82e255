"""Reductions on argument structures, the rewrite relation they induce, and the
standard catalog: implication detours, the exchange expansion, the two Split
reductions, and the Split*/S pair.

A reduction is a domain predicate plus a transform that is total on the
domain. Transforms take only the structure: they see no base and no set of
reductions, so their behaviour is the same over every base.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .argstruct import (
    ASSUMPTION,
    AXIOM,
    ArgError,
    ArgStructure,
    INFERENCE,
    Path,
    all_labels,
    assume,
    audit,
    axiom_leaf,
    bindings,
    canonical_kind,
    fresh_label,
    graft,
    infer,
    is_atomic_derivation,
    is_closed,
    nodes,
    open_formulas,
    print_arg,
    replace_at,
    sigma_instance,
    sub_at,
    substitute,
)
from .formula import Disj, Formula, Impl, is_atomic, is_harrop


class DomainViolation(ValueError):
    pass


class NonHarropError(DomainViolation):
    pass


class ReductionCapExhausted(RuntimeError):
    """The rewrite search ran out of steps or states before settling."""


@dataclass(frozen=True, eq=False)
class Reduction:
    name: str
    domain: Callable[[ArgStructure], bool]
    transform: Callable[[ArgStructure], ArgStructure]
    summary: str = ""

    def __eq__(self, other):
        return isinstance(other, Reduction) and other.name == self.name

    def __hash__(self):
        return hash(self.name)

    def __call__(self, d: ArgStructure) -> ArgStructure:
        if not self.domain(d):
            raise DomainViolation(f"{self.name} is not defined on this structure")
        return self.transform(d)

    def __repr__(self):
        return f"Reduction({self.name})"


Justification = frozenset  # frozenset[Reduction]


def justification(*reds: Reduction | Iterable[Reduction]) -> frozenset[Reduction]:
    out: set[Reduction] = set()
    for r in reds:
        if isinstance(r, Reduction):
            out.add(r)
        else:
            out |= set(r)
    return frozenset(out)


def names(j: Iterable[Reduction]) -> list[str]:
    return sorted(r.name for r in j)


# --- shape helpers ----------------------------------------------------------


def _nothing_bound_here(d: ArgStructure) -> bool:
    b = bindings(d)
    return d.label is None and not b.bound_at(()) and not b.rule_bound_at(())


def split_shape(d: ArgStructure) -> tuple[Formula, Formula, Formula] | None:
    """(A, B, C) when ``d`` ends with the step A→B∨C ⊢ (A→B)∨(A→C)."""
    if d.kind != INFERENCE or len(d.premises) != 1:
        return None
    f, g = d.formula, d.premises[0].formula
    if not (isinstance(g, Impl) and isinstance(g.right, Disj)):
        return None
    a, b, c = g.left, g.right.left, g.right.right
    if f != Disj(Impl(a, b), Impl(a, c)):
        return None
    if not _nothing_bound_here(d):
        return None
    return a, b, c


def _atomic_split(d: ArgStructure):
    s = split_shape(d)
    if s is None or not all(is_atomic(x) for x in s):
        return None
    return s


def _leaf_labels(d: ArgStructure, paths: Iterable[Path]) -> frozenset[str]:
    return frozenset(sub_at(d, p).label for p in paths)


# --- implication detour -----------------------------------------------------


def in_phi_imp_domain(d: ArgStructure) -> bool:
    if d.kind != INFERENCE or len(d.premises) != 2 or not _nothing_bound_here(d):
        return False
    major, minor = d.premises
    return canonical_kind(major) == "imp" and major.formula == Impl(minor.formula, d.formula)


def phi_imp(d: ArgStructure) -> ArgStructure:
    """Graft the minor premise onto the assumptions bound by the major's last step."""
    if not in_phi_imp_domain(d):
        raise DomainViolation("phi_imp needs an elimination whose major premise ends with an introduction")
    major, minor = d.premises
    return graft(major.premises[0], major.binds, minor)


# --- exchange expansion -----------------------------------------------------


def in_iota_domain(d: ArgStructure) -> bool:
    if d.kind != INFERENCE or len(d.premises) != 1 or not _nothing_bound_here(d):
        return False
    f, g = d.formula, d.premises[0].formula
    if not (isinstance(g, Impl) and isinstance(g.right, Impl)):
        return False
    a, b, c = g.left, g.right.left, g.right.right
    return f == Impl(b, Impl(a, c))


def iota(d: ArgStructure) -> ArgStructure:
    """From A→(B→C) to B→(A→C) in one step, expanded into eliminations and introductions."""
    if not in_iota_domain(d):
        raise DomainViolation("iota needs a one-step exchange A→(B→C) / B→(A→C)")
    prem = d.premises[0]
    a, b, c = prem.formula.left, prem.formula.right.left, prem.formula.right.right
    used = all_labels(prem)
    l1, l2 = fresh_label(used), fresh_label(used)
    e1 = infer(Impl(b, c), prem, assume(a, l1))
    e2 = infer(c, e1, assume(b, l2))
    return infer(d.formula, infer(Impl(a, c), e2, binds=[l1]), binds=[l2])


# --- the two atomic Split reductions ----------------------------------------


def in_phi1_domain(d: ArgStructure) -> bool:
    if _atomic_split(d) is None or not is_closed(d):
        return False
    intro = d.premises[0]
    return canonical_kind(intro) == "imp" and bool(bindings(intro).bound_at(()))


def phi1(d: ArgStructure) -> ArgStructure:
    """Turn the discharged antecedent assumptions into axioms; the introduction becomes vacuous."""
    if not in_phi1_domain(d):
        raise DomainViolation("phi1 needs a closed Split over an introduction with an open immediate sub-structure")
    intro = d.premises[0]
    body = graft(intro.premises[0], intro.binds, lambda leaf: axiom_leaf(leaf.formula, mark=leaf.mark))
    return infer(d.formula, infer(intro.formula, body))


def in_phi2_domain(d: ArgStructure) -> bool:
    if _atomic_split(d) is None or not is_closed(d):
        return False
    intro = d.premises[0]
    if canonical_kind(intro) != "imp" or bindings(intro).bound_at(()):
        return False
    disj = intro.premises[0]
    return canonical_kind(disj) == "or" and is_atomic_derivation(disj.premises[0])


def phi2(d: ArgStructure) -> ArgStructure:
    """Undischarged axiom applications of the antecedent become assumptions,
    and the disjunction introduction moves below the implication introduction."""
    if not in_phi2_domain(d):
        raise DomainViolation(
            "phi2 needs a closed Split over a vacuous introduction over a disjunction "
            "introduction over an atomic derivation"
        )
    p = d.premises[0].formula.left
    inner = d.premises[0].premises[0].premises[0]
    b = bindings(inner)
    targets = [path for path, binder in b.rule.items() if binder is None and sub_at(inner, path).kind == AXIOM and sub_at(inner, path).formula == p]
    binds: list[str] = []
    if targets:
        label = fresh_label(all_labels(inner))
        binds.append(label)
        for path in targets:
            leaf = sub_at(inner, path)
            inner = replace_at(inner, path, assume(p, label, leaf.mark))
    return infer(d.formula, infer(Impl(p, inner.formula), inner, binds=binds))


# --- Split* and S -----------------------------------------------------------


def in_split_to_s_shape(d: ArgStructure) -> bool:
    return split_shape(d) is not None


def in_split_to_s_domain(d: ArgStructure) -> bool:
    s = split_shape(d)
    return s is not None and is_harrop(s[0])


def split_to_s(d: ArgStructure) -> ArgStructure:
    """Unfold Split* on a Harrop antecedent into an S step with two disjunction-introduction branches."""
    s = split_shape(d)
    if s is None:
        raise DomainViolation("split_to_s needs a structure ending with Split*")
    a, b, c = s
    if not is_harrop(a):
        raise NonHarropError(f"antecedent {a} is not a Harrop formula")
    prem = d.premises[0]
    used = all_labels(prem)
    l1, l2, l3 = fresh_label(used), fresh_label(used), fresh_label(used)
    major = infer(Disj(b, c), prem, assume(a, l1))
    left = infer(d.formula, assume(Impl(a, b), l2))
    right = infer(d.formula, assume(Impl(a, c), l3))
    return infer(d.formula, major, left, right, binds=[l1, l2, l3])


def _s_analysis(d: ArgStructure):
    """For an S step: (A or None, B1, B2, leaf paths bound here per premise)."""
    if d.kind != INFERENCE or len(d.premises) != 3 or d.label is not None:
        return None
    b = bindings(d)
    if b.rule_bound_at(()):
        return None
    major, m1, m2 = d.premises
    if not (m1.formula == d.formula == m2.formula):
        return None
    if canonical_kind(major) != "or":
        return None
    b1, b2 = major.formula.left, major.formula.right
    groups: dict[int, list[Path]] = {0: [], 1: [], 2: []}
    for leaf in b.bound_at(()):
        groups[leaf[0]].append(leaf)
    antecedents = set()
    for leaf in groups[0]:
        antecedents.add(sub_at(d, leaf).formula)
    for idx, target in ((1, b1), (2, b2)):
        for leaf in groups[idx]:
            f = sub_at(d, leaf).formula
            if not (isinstance(f, Impl) and f.right == target):
                return None
            antecedents.add(f.left)
    if len(antecedents) > 1:
        return None
    a = next(iter(antecedents)) if antecedents else None
    return a, b1, b2, groups


def in_phi_s_domain(d: ArgStructure) -> bool:
    return _s_analysis(d) is not None


def phi_s(d: ArgStructure) -> ArgStructure:
    """Contract S over a disjunction introduction: abstract the major branch and
    graft it onto the selected minor branch's bound implication assumptions."""
    info = _s_analysis(d)
    if info is None:
        raise DomainViolation("phi_s needs an S step whose major premise ends with a disjunction introduction")
    a, b1, b2, groups = info
    major = d.premises[0]
    d1 = major.premises[0]
    i = 1 if d1.formula == b1 else 2
    target = d.premises[i]
    hits = groups[i]
    if not hits:
        return target
    labels_major = _leaf_labels(d, groups[0])
    abstracted = infer(Impl(a, d1.formula), d1, binds=labels_major)
    labels_target = _leaf_labels(d, hits)
    return graft(target, labels_target, abstracted)


# --- catalog ----------------------------------------------------------------

PHI_IMP = Reduction("phi_imp", in_phi_imp_domain, phi_imp, "implication introduction followed by elimination")
IOTA = Reduction("iota", in_iota_domain, iota, "exchange of antecedents, expanded")
PHI1 = Reduction("phi1", in_phi1_domain, phi1, "Split over an open-bodied introduction: antecedent to axiom")
PHI2 = Reduction("phi2", in_phi2_domain, phi2, "Split over vacuous introduction over disjunction introduction")
SPLIT_TO_S = Reduction("split_to_s", in_split_to_s_domain, split_to_s, "Split* on a Harrop antecedent to S")
PHI_S = Reduction("phi_s", in_phi_s_domain, phi_s, "S over a disjunction introduction")

CATALOG: dict[str, Reduction] = {r.name: r for r in (PHI_IMP, IOTA, PHI1, PHI2, SPLIT_TO_S, PHI_S)}
SPLIT_PAIR = frozenset([PHI1, PHI2])


def parse_justification(text: str, extra: Mapping[str, Reduction] | None = None) -> frozenset[Reduction]:
    table = dict(CATALOG)
    if extra:
        table.update(extra)
    out = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if part not in table:
            raise ValueError(f"unknown reduction {part!r}; known: {', '.join(sorted(table))}")
        out.add(table[part])
    return frozenset(out)


# --- rewriting --------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    path: Path
    reduction: str
    result: ArgStructure


def apply_at(d: ArgStructure, path: Sequence[int], phi: Reduction) -> ArgStructure:
    """One immediate reduction: replace the sub-structure at ``path`` by its image."""
    sub = sub_at(d, path)
    return substitute(d, path, phi(sub), strict=False)


def immediate_reductions(d: ArgStructure, j: Iterable[Reduction]) -> Iterator[Step]:
    """All one-step reducts, by position (preorder) then reduction name."""
    ordered = sorted(j, key=lambda r: r.name)
    for path, sub in nodes(d):
        if sub.kind != INFERENCE:
            continue
        for phi in ordered:
            if phi.domain(sub):
                yield Step(path, phi.name, substitute(d, path, phi.transform(sub), strict=False))


@dataclass
class SearchOutcome:
    trace: list[Step] | None
    exhausted: bool
    visited: int

    @property
    def found(self) -> bool:
        return self.trace is not None


def search(
    d: ArgStructure,
    j: Iterable[Reduction],
    goal: Callable[[ArgStructure], bool],
    step_cap: int = 8,
    state_cap: int = 2000,
) -> SearchOutcome:
    """Breadth-first search from ``d`` for a reduct satisfying ``goal``.

    ``exhausted`` is true when every reachable reduct (within no cap) was seen.
    """
    if step_cap < 0:
        raise ValueError("step_cap must be >= 0")
    j = list(j)
    if goal(d):
        return SearchOutcome([], True, 1)
    parent: dict[ArgStructure, tuple[ArgStructure, Step] | None] = {d: None}
    frontier = deque([(d, 0)])
    capped = False
    while frontier:
        cur, depth = frontier.popleft()
        if depth >= step_cap:
            if any(True for _ in immediate_reductions(cur, j)):
                capped = True
            continue
        for step in immediate_reductions(cur, j):
            nxt = step.result
            if nxt in parent:
                continue
            if len(parent) >= state_cap:
                capped = True
                break
            parent[nxt] = (cur, step)
            if goal(nxt):
                trace = []
                node = nxt
                while parent[node] is not None:
                    prev, st = parent[node]
                    trace.append(st)
                    node = prev
                return SearchOutcome(trace[::-1], False, len(parent))
            frontier.append((nxt, depth + 1))
    return SearchOutcome(None, not capped, len(parent))


def reduces_to(
    d: ArgStructure,
    target: ArgStructure,
    j: Iterable[Reduction],
    step_cap: int = 8,
    state_cap: int = 2000,
) -> list[Step] | None:
    """Trace from ``d`` to ``target`` modulo ``j``; None when unreachable.

    Raises ReductionCapExhausted when the caps stop the search first.
    """
    out = search(d, j, lambda x: x == target, step_cap, state_cap)
    if out.found:
        return out.trace
    if not out.exhausted:
        raise ReductionCapExhausted(f"no trace within {step_cap} steps / {state_cap} states")
    return None


def replay_trace(d: ArgStructure, trace: Sequence[Step], j: Iterable[Reduction]) -> bool:
    table = {r.name: r for r in j}
    cur = d
    for st in trace:
        phi = table.get(st.reduction)
        if phi is None:
            return False
        try:
            sub = sub_at(cur, st.path)
        except ArgError:
            return False
        if not phi.domain(sub):
            return False
        cur = apply_at(cur, st.path, phi)
        if cur != st.result:
            return False
    return True


def trace_end(d: ArgStructure, trace: Sequence[Step]) -> ArgStructure:
    return trace[-1].result if trace else d


def lift_trace(trace: Sequence[Step], host: ArgStructure, at: Path) -> list[Step]:
    """Re-express a trace computed on the sub-structure at ``at`` as a trace on ``host``."""
    out = []
    cur = host
    for st in trace:
        cur = replace_at(cur, at, st.result)
        out.append(Step(tuple(at) + st.path, st.reduction, cur))
    return out


def format_trace(d: ArgStructure, trace: Sequence[Step]) -> str:
    lines = [f"0. {print_arg(d, compact=True)}"]
    for k, st in enumerate(trace, 1):
        lines.append(f"{k}. [{st.reduction} at {list(st.path)}] {print_arg(st.result, compact=True)}")
    return "\n".join(lines)


# --- law checking -----------------------------------------------------------

Sample = tuple[ArgStructure, Mapping[Formula, ArgStructure]]


@dataclass
class LawFailure:
    law: int
    reason: str
    sample: str


@dataclass
class LawReport:
    reduction: str
    samples: int = 0
    failures: list[LawFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.samples > 0 and not self.failures

    @property
    def first(self) -> LawFailure | None:
        return self.failures[0] if self.failures else None


def check_laws_on(phi: Reduction, d: ArgStructure, sigma: Mapping[Formula, ArgStructure]) -> LawFailure | None:
    shown = print_arg(d, compact=True)
    try:
        out = phi(d)
    except Exception as exc:  # law 1: the transform must produce a structure
        return LawFailure(1, f"transform failed: {exc}", shown)
    if not isinstance(out, ArgStructure):
        return LawFailure(1, "transform did not return an argument structure", shown)
    problems = audit(out)
    if problems:
        return LawFailure(1, "ill-formed output: " + "; ".join(problems), shown)
    if out.formula != d.formula:
        return LawFailure(3, f"conclusion changed from {d.formula} to {out.formula}", shown)
    extra = open_formulas(out) - open_formulas(d)
    if extra:
        return LawFailure(3, "new open assumptions " + ", ".join(map(str, extra)), shown)
    try:
        ds = sigma_instance(d, sigma)
    except ArgError as exc:
        return LawFailure(2, f"sigma-instance failed: {exc}", shown)
    if not phi.domain(ds):
        return LawFailure(2, "sigma-instance left the domain", shown)
    try:
        lhs = phi.transform(ds)
        rhs = sigma_instance(out, sigma)
    except Exception as exc:
        return LawFailure(4, f"evaluation failed: {exc}", shown)
    if lhs != rhs:
        return LawFailure(4, "image of the instance differs from the instance of the image", shown)
    return None


def check_reduction_laws(
    phi: Reduction,
    sample_count: int,
    seed: int = 0,
    generator: Callable[[random.Random], Sample] | None = None,
    stop_at_first: bool = False,
) -> LawReport:
    """Property-check the four reduction laws on generated domain members."""
    if generator is None:
        from .generators import SAMPLERS

        if phi.name not in SAMPLERS:
            raise ValueError(f"no sample generator registered for {phi.name}")
        generator = SAMPLERS[phi.name]
    rng = random.Random(seed)
    report = LawReport(phi.name)
    for _ in range(sample_count):
        d, sigma = generator(rng)
        if not phi.domain(d):
            report.failures.append(LawFailure(2, "generator produced a non-member", print_arg(d, compact=True)))
        else:
            fail = check_laws_on(phi, d, sigma)
            if fail:
                report.failures.append(fail)
        report.samples += 1
        if stop_at_first and report.failures:
            break
    return report


def open_leaf_mutant(phi: Reduction) -> Reduction:
    """A broken variant: the first leaf of each output that is not already an
    open assumption is turned into a fresh open assumption."""

    def transform(d: ArgStructure) -> ArgStructure:
        out = phi.transform(d)
        opens = {p for p, t in bindings(out).assumption.items() if t is None}
        for path, n in nodes(out):
            if n.kind != INFERENCE and path not in opens:
                return replace_at(out, path, assume(n.formula))
        return out

    return Reduction(phi.name + "_mutant", phi.domain, transform, "deliberately unsound")
