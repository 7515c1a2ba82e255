"""Validity of argument structures relative to a set of reductions over an
atomic base, with explicit bounds where the definition quantifies over
infinitely many objects.

Closed structures are decided by reduction search: an atomic conclusion needs a
reduct that is an atomic derivation of the base, a complex conclusion needs a
canonical reduct whose immediate sub-structures are valid. Open structures are
checked against every closed instance assembled from a catalog of valid closed
structures, over every base extension drawn from a finite pool. All-atomic open
structures get an exact certificate instead (axiomize the assumptions and read
the result as a derivation).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .argstruct import (
    ASSUMPTION,
    AXIOM,
    ArgStructure,
    INFERENCE,
    all_labels,
    assume,
    axiomize,
    bindings,
    canonical_kind,
    free_labels,
    fresh_label,
    from_derivation,
    infer,
    is_all_atomic,
    is_closed,
    nodes,
    open_formulas,
    open_leaves,
    parse_arg,
    arg_from_sexpr,
    print_arg,
    read_derivation,
    rename_binders,
    replace_at,
    sigma_instance,
    sub_at,
    witnesses,
)
from .atomic_system import AtomicRule, Derivation, Prover, axiom, derive, sorted_rules
from .bes import ExtensionPool, pool_from_rules
from .formula import Conj, Disj, Formula, Impl, atom_name, from_sexpr, is_atomic
from .reduction import (
    PHI1,
    PHI2,
    PHI_IMP,
    CATALOG,
    Reduction,
    Step,
    apply_at,
    lift_trace,
    names,
    replay_trace,
    search,
    trace_end,
)
from .syntax import ParseError, expect_list, expect_sym, read_one

VALID = "valid"
INVALID = "invalid"
INCONCLUSIVE = "inconclusive"


class PreconditionError(ValueError):
    pass


@dataclass
class Check:
    """One sub-judgement a verdict rests on."""

    structure: ArgStructure
    just: frozenset[Reduction]
    base: frozenset[AtomicRule]
    verdict: "ValidityVerdict"


@dataclass
class ValidityVerdict:
    status: str
    reason: str = ""
    trace: list[Step] = field(default_factory=list)
    certificate: Derivation | None = None
    bounded: bool = False
    checks: list[Check] = field(default_factory=list)
    counterexample: dict | None = None

    @property
    def valid(self) -> bool:
        return self.status == VALID

    @property
    def invalid(self) -> bool:
        return self.status == INVALID

    @property
    def inconclusive(self) -> bool:
        return self.status == INCONCLUSIVE

    @property
    def tag(self) -> str:
        return self.status.capitalize()

    def describe(self) -> str:
        extra = " (within bounds)" if self.valid and self.bounded else ""
        return f"{self.tag}{extra}" + (f": {self.reason}" if self.reason else "")


# --- catalogs ---------------------------------------------------------------


@dataclass(frozen=True)
class CatalogEntry:
    formula: Formula
    structure: ArgStructure
    just: frozenset[Reduction] = frozenset()

    def __post_init__(self):
        if self.structure.formula != self.formula:
            raise ValueError(f"catalog entry concludes {self.structure.formula}, stated {self.formula}")
        if not is_closed(self.structure):
            raise ValueError(f"catalog entry for {self.formula} is not closed")


class ClosedArgCatalog:
    """Closed structures used as images of open assumptions.

    Fixed entries apply over every base; with ``generate`` set, entries built
    from derivations in the base at hand are added as well.
    """

    def __init__(self, entries: Iterable[CatalogEntry] = (), generate: bool = True, per_formula: int = 4):
        self.fixed = list(entries)
        self.generate = generate
        self.per_formula = per_formula
        self._memo: dict = {}

    def entries(self, f: Formula, base: frozenset[AtomicRule]) -> list[CatalogEntry]:
        key = (f, base)
        if key not in self._memo:
            out = [e for e in self.fixed if e.formula == f]
            if self.generate:
                out += _generated(f, base, self.per_formula)
            seen, uniq = set(), []
            for e in out:
                k = (e.structure, frozenset(r.name for r in e.just))
                if k not in seen:
                    seen.add(k)
                    uniq.append(e)
            self._memo[key] = uniq
        return self._memo[key]


_PROVER = Prover()


def _atomic_witness(a: str, base: frozenset[AtomicRule], assumed: Sequence[AtomicRule] = ()) -> ArgStructure | None:
    d = derive(a, assumed, base, prover=_PROVER)
    return None if d is None else from_derivation(d)


def _hypothetical(x: str, y: str, base: frozenset[AtomicRule]) -> ArgStructure | None:
    """Structure from assumption x to y: derive y with axiom x added, then turn
    the undischarged uses of that axiom into assumptions labelled 1."""
    d = derive(y, [axiom(x)], base, prover=_PROVER)
    if d is None:
        return None
    s = from_derivation(d)
    for path, n in list(nodes(s)):
        if n.kind == AXIOM and n.label is None and atom_name(n.formula) == x:
            s = replace_at(s, path, assume(n.formula, "1"))
    return s


def _generated(f: Formula, base: frozenset[AtomicRule], cap: int) -> list[CatalogEntry]:
    out: list[CatalogEntry] = []
    if is_atomic(f):
        w = _atomic_witness(atom_name(f), base)
        if w is not None:
            out.append(CatalogEntry(f, w))
            ident = infer(Impl(f, f), assume(f, "1"), binds=["1"])
            out.append(CatalogEntry(f, infer(f, ident, w), frozenset([PHI_IMP])))
    elif isinstance(f, Conj):
        left, right = _generated(f.left, base, 1), _generated(f.right, base, 1)
        if left and right:
            out.append(
                CatalogEntry(f, infer(f, left[0].structure, right[0].structure), left[0].just | right[0].just)
            )
    elif isinstance(f, Disj):
        for side in (f.left, f.right):
            sub = _generated(side, base, 1)
            if sub:
                out.append(CatalogEntry(f, infer(f, sub[0].structure), sub[0].just))
    elif isinstance(f, Impl):
        x, y = f.left, f.right
        if x == y:
            out.append(CatalogEntry(f, infer(f, assume(x, "1"), binds=["1"])))
        if is_atomic(x):
            targets = [y] if is_atomic(y) else [y.left, y.right] if isinstance(y, Disj) and all(map(is_atomic, (y.left, y.right))) else []
            for t in targets:
                body = _hypothetical(atom_name(x), atom_name(t), base)
                if body is None:
                    continue
                if t != y:
                    body = infer(y, body)
                out.append(CatalogEntry(f, infer(f, body, binds=["1"])))
        for e in _generated(y, base, 1):
            out.append(CatalogEntry(f, infer(f, e.structure), e.just))
    return out[:cap]


def parse_catalog(text: str, extra: dict[str, Reduction] | None = None) -> ClosedArgCatalog:
    """``(catalog (entry FORMULA NODE (just NAME*))*)``."""
    table = dict(CATALOG)
    if extra:
        table.update(extra)
    e = expect_list(read_one(text), "(catalog ...)")
    if e.head() != "catalog":
        raise ParseError("expected (catalog ...)", e.pos)
    entries = []
    for item in e.items[1:]:
        lst = expect_list(item, "(entry ...)")
        if lst.head() != "entry" or len(lst) not in (3, 4):
            raise ParseError("expected (entry FORMULA NODE [(just NAME*)])", lst.pos)
        f = from_sexpr(lst[1])
        s = arg_from_sexpr(lst[2])
        just = frozenset()
        if len(lst) == 4:
            jl = expect_list(lst[3], "(just ...)")
            if jl.head() != "just":
                raise ParseError("expected (just NAME*)", jl.pos)
            try:
                just = frozenset(table[expect_sym(x, "reduction")] for x in jl.items[1:])
            except KeyError as exc:
                raise ParseError(f"unknown reduction {exc.args[0]}", jl.pos) from None
        try:
            entries.append(CatalogEntry(f, s, just))
        except ValueError as exc:
            raise ParseError(str(exc), lst.pos) from None
    return ClosedArgCatalog(entries)


# --- bounds and the checker -------------------------------------------------


@dataclass
class Bounds:
    step_cap: int = 8
    state_cap: int = 1500
    pool: ExtensionPool | None = None
    catalog: ClosedArgCatalog | None = None
    max_extensions: int = 64
    max_instances: int = 32

    def describe(self) -> str:
        pool = "none" if self.pool is None else f"{len(self.pool)} rules"
        return (
            f"steps<={self.step_cap}, states<={self.state_cap}, pool {pool}, "
            f"extensions<={self.max_extensions}, instances<={self.max_instances}"
        )


def _extensions(b: frozenset[AtomicRule], pool: ExtensionPool | None, limit: int) -> tuple[list[frozenset[AtomicRule]], bool]:
    """b itself, then b plus subsets of the pool rules outside b by size. Second value: truncated."""
    extra = [r for r in sorted_rules(pool.rules)] if pool is not None else []
    extra = [r for r in extra if r not in b]
    out = []
    for k in range(len(extra) + 1):
        for combo in itertools.combinations(extra, k):
            if len(out) >= limit:
                return out, True
            out.append(b | frozenset(combo))
    return out, False


class Validator:
    def __init__(self, bounds: Bounds | None = None):
        self.bounds = bounds or Bounds()
        self.catalog = self.bounds.catalog or ClosedArgCatalog()
        self._memo: dict = {}

    def closed(self, d: ArgStructure, j: Iterable[Reduction], b: Iterable[AtomicRule]) -> ValidityVerdict:
        if not is_closed(d):
            raise PreconditionError("valid_closed needs a closed structure")
        j, b = frozenset(j), frozenset(b)
        key = ("c", d, frozenset(r.name for r in j), b)
        if key not in self._memo:
            self._memo[key] = self._closed(d, j, b)
        return self._memo[key]

    def _closed(self, d, j, b) -> ValidityVerdict:
        caps = self.bounds
        if is_atomic(d.formula):
            out = search(d, j, lambda x: witnesses(x, b), caps.step_cap, caps.state_cap)
            if out.found:
                return ValidityVerdict(VALID, "reduces to an atomic derivation of the base", trace=out.trace)
            if out.exhausted:
                return ValidityVerdict(INVALID, "no reduct is an atomic derivation of the base")
            return ValidityVerdict(INCONCLUSIVE, f"search caps reached ({caps.describe()})", bounded=True)

        results: dict[ArgStructure, ValidityVerdict] = {}
        failed: dict[ArgStructure, list[Check]] = {}
        unsure = [False]

        def goal(x: ArgStructure) -> bool:
            if canonical_kind(x) is None:
                return False
            checks = self._sub_checks(x, j, b)
            ok = all(c.verdict.valid for c in checks)
            if not ok and any(c.verdict.inconclusive for c in checks):
                unsure[0] = True
            results[x] = ValidityVerdict(VALID, "", checks=checks, bounded=any(c.verdict.bounded for c in checks)) if ok else None
            if not ok:
                failed.setdefault(x, checks)
            return ok

        out = search(d, j, goal, caps.step_cap, caps.state_cap)
        if out.found:
            end = trace_end(d, out.trace)
            v = results[end]
            v.trace = out.trace
            v.reason = "reduces to a canonical structure with valid immediate sub-structures"
            return v
        if out.exhausted and not unsure[0]:
            # report the failing sub-structure of the input itself when it is canonical
            bad = [c for c in failed.get(d, []) if c.verdict.invalid]
            return ValidityVerdict(
                INVALID,
                "no canonical reduct with valid immediate sub-structures",
                checks=bad[:1],
                counterexample=bad[0].verdict.counterexample if bad else None,
            )
        why = "search caps reached" if not out.exhausted else "a sub-structure check was inconclusive"
        return ValidityVerdict(INCONCLUSIVE, f"{why} ({caps.describe()})", bounded=True)

    def _sub_checks(self, x: ArgStructure, j, b) -> list[Check]:
        checks = []
        for sub in x.premises:
            if is_closed(sub):
                v = self.closed(sub, j, b)
            else:
                v = self.open(sub, j, b)
            checks.append(Check(sub, j, b, v))
        return checks

    def open(self, d: ArgStructure, j: Iterable[Reduction], b: Iterable[AtomicRule]) -> ValidityVerdict:
        j, b = frozenset(j), frozenset(b)
        if is_closed(d):
            return self.closed(d, j, b)
        key = ("o", d, frozenset(r.name for r in j), b)
        if key not in self._memo:
            v = axiom_certificate(d, b)
            if not v.valid:
                v = self._open_bounded(d, j, b)
            self._memo[key] = v
        return self._memo[key]

    def _open_bounded(self, d, j, b) -> ValidityVerdict:
        caps = self.bounds
        gamma = sorted(open_formulas(d), key=str)
        exts, truncated = _extensions(b, caps.pool, caps.max_extensions)
        checks: list[Check] = []
        unsure = False
        for c in exts:
            options = []
            for a in gamma:
                good = []
                for e in self.catalog.entries(a, c):
                    v = self.closed(e.structure, j | e.just, c)
                    if v.valid:
                        good.append(e)
                    elif v.inconclusive:
                        unsure = True
                options.append(good)
            for k, combo in enumerate(itertools.product(*options)):
                if k >= caps.max_instances:
                    truncated = True
                    break
                sigma = {a: e.structure for a, e in zip(gamma, combo)}
                h = j.union(*(e.just for e in combo))
                inst = sigma_instance(d, sigma)
                v = self.closed(inst, h, c)
                if v.invalid:
                    return ValidityVerdict(
                        INVALID,
                        "a valid closed instance of the assumptions gives an invalid structure",
                        bounded=True,
                        checks=[Check(inst, h, c, v)],
                        counterexample={
                            "extension": sorted_rules(c - b),
                            "sigma": {str(a): print_arg(s, compact=True) for a, s in sigma.items()},
                            "just": names(h),
                        },
                    )
                if v.inconclusive:
                    unsure = True
                else:
                    checks.append(Check(inst, h, c, v))
        if unsure:
            return ValidityVerdict(INCONCLUSIVE, f"open check not settled within bounds ({caps.describe()})", bounded=True, checks=checks)
        note = ", enumeration truncated" if truncated else ""
        return ValidityVerdict(VALID, f"every catalog instance valid ({caps.describe()}{note})", bounded=True, checks=checks)


def valid_closed(
    d: ArgStructure, j: Iterable[Reduction], b: Iterable[AtomicRule], bounds: Bounds | None = None, step_cap: int | None = None
) -> ValidityVerdict:
    bounds = bounds or Bounds()
    if step_cap is not None:
        bounds = Bounds(**{**bounds.__dict__, "step_cap": step_cap})
    return Validator(bounds).closed(d, j, b)


def valid_open_bounded(
    d: ArgStructure, j: Iterable[Reduction], b: Iterable[AtomicRule], bounds: Bounds | None = None
) -> ValidityVerdict:
    if is_closed(d):
        raise PreconditionError("valid_open_bounded needs an open structure")
    return Validator(bounds)._open_bounded(d, frozenset(j), frozenset(b))


def check_valid(
    d: ArgStructure, j: Iterable[Reduction], b: Iterable[AtomicRule], bounds: Bounds | None = None
) -> ValidityVerdict:
    """Closed or open, whichever applies."""
    v = Validator(bounds)
    return v.closed(d, j, b) if is_closed(d) else v.open(d, j, b)


# --- certificates -----------------------------------------------------------


def axiom_certificate(d: ArgStructure, b: Iterable[AtomicRule]) -> ValidityVerdict:
    """Exact check for all-atomic structures from atomic assumptions: axiomize
    the open assumptions and read the result as a derivation of the base plus
    those axioms. Not applicable (inconclusive) otherwise."""
    if not is_all_atomic(d) or any(n.binds for _, n in nodes(d)):
        return ValidityVerdict(INCONCLUSIVE, "not an all-atomic structure")
    b = frozenset(b)
    axioms = frozenset(axiom(atom_name(f)) for f in open_formulas(d))
    der = read_derivation(axiomize(d), b | axioms)
    if der is None:
        return ValidityVerdict(INCONCLUSIVE, "axiomized structure is not a derivation of the extended base")
    return ValidityVerdict(VALID, "axiomized structure is a derivation of the base plus the assumption axioms", certificate=der)


def valid_by_axiom_certificate(d: ArgStructure, b: Iterable[AtomicRule]) -> ValidityVerdict:
    if not is_all_atomic(d):
        raise PreconditionError("the certificate check needs an all-atomic structure")
    if any(n.binds for _, n in nodes(d)):
        raise PreconditionError("the certificate check needs a structure without assumption discharge")
    v = axiom_certificate(d, b)
    if not v.valid:
        return ValidityVerdict(INVALID, v.reason)
    return v


valid_by_prop13 = valid_by_axiom_certificate


def replay_verdict(v: ValidityVerdict, d: ArgStructure, j: Iterable[Reduction], b: Iterable[AtomicRule]) -> bool:
    """Re-run the evidence carried by a Valid verdict."""
    if not v.valid:
        return False
    j, b = frozenset(j), frozenset(b)
    if v.certificate is not None:
        axioms = frozenset(axiom(atom_name(f)) for f in open_formulas(d))
        return read_derivation(axiomize(d), b | axioms) is not None
    if is_closed(d):
        if not replay_trace(d, v.trace, j):
            return False
        end = trace_end(d, v.trace)
        if is_atomic(end.formula):
            return witnesses(end, b)
        if canonical_kind(end) is None or len(v.checks) != len(end.premises):
            return False
        return all(c.structure == p and replay_verdict(c.verdict, c.structure, c.just, c.base) for c, p in zip(v.checks, end.premises))
    # bounded open verdict: every recorded instance must replay
    return all(replay_verdict(c.verdict, c.structure, c.just, c.base) for c in v.checks)


# --- grafting reduction for one-step rules ----------------------------------


def graft_reduction(d: ArgStructure, gamma: Sequence[Formula] | None = None, name: str | None = None) -> Reduction:
    """Reduction on one-step inferences A1..An / A (no discharge): the
    premise structures replace the open assumptions of ``d`` formula by formula."""
    if gamma is None:
        gamma = []
        for p in open_leaves(d):
            f = sub_at(d, p).formula
            if f not in gamma:
                gamma.append(f)
    gamma = list(gamma)
    if len(set(gamma)) != len(gamma):
        raise ValueError("premise formulas must be distinct")
    if not open_formulas(d) <= set(gamma):
        raise ValueError("every open assumption of the structure must be a premise formula")
    concl = d.formula

    def domain(n: ArgStructure) -> bool:
        if n.kind != INFERENCE or n.formula != concl or n.label is not None or n.binds or n.rule_binds:
            return False
        return [p.formula for p in n.premises] == gamma

    def transform(n: ArgStructure) -> ArgStructure:
        used = all_labels(d)
        fa, fr = set(), set()
        for p in n.premises:
            a, r = free_labels(p)
            fa |= a
            fr |= r
            used |= all_labels(p)
        body = rename_binders(d, fa, fr, used)
        by_formula = dict(zip(gamma, n.premises))
        for path in open_leaves(body):
            body = replace_at(body, path, by_formula[sub_at(body, path).formula])
        return body

    label = name or "graft[" + ",".join(map(str, gamma)) + "=>" + str(concl) + "]"
    return Reduction(label, domain, transform, "graft premises onto a fixed derivation")


def rule_valid_bounded(
    premises: Sequence[Formula],
    conclusion: Formula,
    j: Iterable[Reduction],
    b: Iterable[AtomicRule],
    bounds: Bounds | None = None,
) -> ValidityVerdict:
    """Check a one-step rule: every tuple of valid closed catalog premises,
    closed by the rule, must give a valid structure (over pool extensions)."""
    if not premises:
        raise PreconditionError("a rule needs at least one premise")
    j, b = frozenset(j), frozenset(b)
    leaf_rule = infer(conclusion, *(assume(f) for f in premises))
    return Validator(bounds)._open_bounded(leaf_rule, j, b)


# --- Split pipeline ---------------------------------------------------------


@dataclass
class SplitResult:
    d2: ArgStructure
    final: ArgStructure
    trace: list[Step]
    case: int
    verdict: ValidityVerdict
    just: frozenset[Reduction]


def _split_parts(f: Formula):
    if isinstance(f, Impl) and isinstance(f.right, Disj) and all(is_atomic(x) for x in (f.left, f.right.left, f.right.right)):
        return f.left, f.right.left, f.right.right
    return None


def split_transform(
    d1: ArgStructure,
    j: Iterable[Reduction],
    c: Iterable[AtomicRule],
    bounds: Bounds | None = None,
    check_input: bool = True,
) -> SplitResult:
    """Append Split to a closed valid structure for p→q∨r and drive the result,
    through the two Split reductions and reductions from ``j``, to a canonical
    structure for (p→q)∨(p→r)."""
    bounds = bounds or Bounds()
    j, c = frozenset(j), frozenset(c)
    parts = _split_parts(d1.formula)
    if parts is None:
        raise PreconditionError(f"expected a structure for an atomic p→q∨r, got {d1.formula}")
    if not is_closed(d1):
        raise PreconditionError("the input structure must be closed")
    p, q, r = parts
    validator = Validator(bounds)
    if check_input:
        v = validator.closed(d1, j, c)
        if v.invalid:
            raise PreconditionError("the input structure is not valid: " + v.reason)
    if canonical_kind(d1) != "imp":
        out = search(d1, j, lambda x: canonical_kind(x) == "imp", bounds.step_cap, bounds.state_cap)
        if not out.found:
            raise PreconditionError("the input structure does not reduce to a canonical implication introduction")
        d1 = trace_end(d1, out.trace)
    concl = Disj(Impl(p, q), Impl(p, r))
    d2 = infer(concl, d1)
    h = j | {PHI1, PHI2}
    trace: list[Step] = []
    cur = d2
    inner = d1.premises[0]
    if is_closed(inner):
        case, scratch = 1, c
    else:
        case, scratch = 2, c | {axiom(atom_name(p))}
        cur = apply_at(cur, (), PHI1)
        trace.append(Step((), PHI1.name, cur))
    target = sub_at(cur, (0, 0))

    def ready(x: ArgStructure) -> bool:
        return canonical_kind(x) == "or" and witnesses(x.premises[0], scratch)

    out = search(target, j, ready, bounds.step_cap, bounds.state_cap)
    if not out.found:
        status = INVALID if out.exhausted else INCONCLUSIVE
        v = ValidityVerdict(status, "the disjunction part does not reduce to an introduction over an atomic derivation", bounded=not out.exhausted)
        return SplitResult(d2, cur, trace, case, v, h)
    lifted = lift_trace(out.trace, cur, (0, 0))
    trace += lifted
    cur = trace_end(cur, lifted)
    cur = apply_at(cur, (), PHI2)
    trace.append(Step((), PHI2.name, cur))
    verdict = validator.closed(cur, h, c)
    return SplitResult(d2, cur, trace, case, verdict, h)
