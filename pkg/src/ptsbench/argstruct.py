"""Argument structures: formula-labelled trees with explicit discharge bookkeeping.

Each node is an assumption leaf, an axiom leaf, or an inference node with at
least one premise. Discharge is recorded with labels and nearest-binder
scoping:

* an assumption leaf carries an optional label; it is discharged at the
  nearest ancestor whose ``binds`` contains that label, and open otherwise;
* an axiom leaf or an inference node may carry a rule label; it counts as a
  discharged rule application at the nearest ancestor whose ``rule_binds``
  contains it (atomic nodes only).

Equality ignores label spelling (alpha-equivalence) and provenance marks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .atomic_system import (
    AtomicRule,
    Derivation,
    Hole,
    explosion,
    is_explosion,
    sorted_rules,
)
from .formula import (
    BOT_NAME,
    Conj,
    Disj,
    Formula,
    Impl,
    atom,
    atom_name,
    from_sexpr,
    is_atomic,
)
from .syntax import ParseError, SList, Sym, expect_list, expect_sym, read_one

ASSUMPTION = "assumption"
AXIOM = "axiom"
INFERENCE = "inference"
KINDS = (ASSUMPTION, AXIOM, INFERENCE)

LABEL_RE = re.compile(r"[A-Za-z0-9_]+\Z")

Path = tuple[int, ...]


class ArgError(ValueError):
    pass


class ConclusionMismatch(ArgError):
    pass


class DanglingBinderError(ArgError):
    pass


class MissingAssignment(ArgError):
    pass


class MalformedDischarge(ArgError):
    pass


@dataclass(frozen=True, eq=False)
class ArgStructure:
    formula: Formula
    premises: tuple["ArgStructure", ...] = ()
    kind: str = INFERENCE
    label: str | None = None
    binds: frozenset[str] = frozenset()
    rule_binds: frozenset[str] = frozenset()
    mark: str | None = field(default=None)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ArgError(f"unknown node kind {self.kind!r}")
        if self.kind == INFERENCE:
            if not self.premises:
                raise ArgError("an inference node needs at least one premise")
        else:
            if self.premises:
                raise ArgError(f"{self.kind} leaves have no premises")
            if self.binds or self.rule_binds:
                raise ArgError("leaves cannot discharge")
        for lab in (self.label, *self.binds, *self.rule_binds):
            if lab is not None and not LABEL_RE.match(lab):
                raise ArgError(f"bad label {lab!r}")

    @property
    def conclusion(self) -> Formula:
        return self.formula

    @property
    def is_leaf(self) -> bool:
        return self.kind != INFERENCE

    @cached_property
    def key(self):
        return _key(self, [], [])

    def __eq__(self, other):
        if not isinstance(other, ArgStructure):
            return NotImplemented
        return self is other or self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"ArgStructure({print_arg(self, compact=True)})"


def _key(n: ArgStructure, ascope: list[frozenset[str]], rscope: list[frozenset[str]]):
    def dist(label, scope):
        if label is None:
            return None
        for k in range(len(scope) - 1, -1, -1):
            if label in scope[k]:
                return len(scope) - k
        return None

    if n.kind == ASSUMPTION:
        return (n.formula, 0, dist(n.label, ascope))
    if n.kind == AXIOM:
        return (n.formula, 1, dist(n.label, rscope))
    ascope.append(n.binds)
    rscope.append(n.rule_binds)
    kids = tuple(_key(c, ascope, rscope) for c in n.premises)
    ascope.pop()
    rscope.pop()
    return (n.formula, 2, dist(n.label, rscope), kids)


# --- constructors -----------------------------------------------------------


def assume(f: Formula, label: str | None = None, mark: str | None = None) -> ArgStructure:
    return ArgStructure(f, (), ASSUMPTION, label, mark=mark)


def axiom_leaf(f: Formula, label: str | None = None, mark: str | None = None) -> ArgStructure:
    return ArgStructure(f, (), AXIOM, label, mark=mark)


def infer(
    f: Formula,
    *premises: ArgStructure,
    binds: Iterable[str] = (),
    rule_binds: Iterable[str] = (),
    label: str | None = None,
    mark: str | None = None,
) -> ArgStructure:
    return ArgStructure(f, tuple(premises), INFERENCE, label, frozenset(binds), frozenset(rule_binds), mark)


def imp_intro(body: ArgStructure, antecedent: Formula, label: str | None = None) -> ArgStructure:
    """Implication introduction binding the open ``antecedent`` leaves labelled ``label``."""
    return infer(Impl(antecedent, body.formula), body, binds=[label] if label else [])


def imp_elim(major: ArgStructure, minor: ArgStructure) -> ArgStructure:
    if not isinstance(major.formula, Impl) or major.formula.left != minor.formula:
        raise ConclusionMismatch(f"cannot apply {major.formula} to {minor.formula}")
    return infer(major.formula.right, major, minor)


def or_intro(d: ArgStructure, other: Formula, side: int = 1) -> ArgStructure:
    f = Disj(d.formula, other) if side == 1 else Disj(other, d.formula)
    return infer(f, d)


def and_intro(left: ArgStructure, right: ArgStructure) -> ArgStructure:
    return infer(Conj(left.formula, right.formula), left, right)


# --- traversal and binding ---------------------------------------------------


def nodes(d: ArgStructure) -> Iterator[tuple[Path, ArgStructure]]:
    """Preorder (path, node) pairs; the preorder is the canonical position order."""
    stack: list[tuple[Path, ArgStructure]] = [((), d)]
    while stack:
        path, n = stack.pop()
        yield path, n
        for i in range(len(n.premises) - 1, -1, -1):
            stack.append((path + (i,), n.premises[i]))


def positions(d: ArgStructure) -> list[Path]:
    return [p for p, _ in nodes(d)]


def sub_at(d: ArgStructure, path: Sequence[int]) -> ArgStructure:
    for i in path:
        if d.kind != INFERENCE or not 0 <= i < len(d.premises):
            raise ArgError(f"no node at path {list(path)}")
        d = d.premises[i]
    return d


def size(d: ArgStructure) -> int:
    return sum(1 for _ in nodes(d))


def depth(d: ArgStructure) -> int:
    if not d.premises:
        return 1
    return 1 + max(depth(c) for c in d.premises)


def replace_at(d: ArgStructure, path: Sequence[int], new: ArgStructure) -> ArgStructure:
    """Structural replacement without any binding checks."""
    if not path:
        return new
    i = path[0]
    kids = list(d.premises)
    kids[i] = replace_at(kids[i], path[1:], new)
    return _with(d, premises=tuple(kids))


def _with(n: ArgStructure, **changes) -> ArgStructure:
    data = dict(
        formula=n.formula,
        premises=n.premises,
        kind=n.kind,
        label=n.label,
        binds=n.binds,
        rule_binds=n.rule_binds,
        mark=n.mark,
    )
    data.update(changes)
    return ArgStructure(**data)


@dataclass
class Bindings:
    """Resolution of every labelled node to its binder (``None`` = unresolved)."""

    assumption: dict[Path, Path | None]
    rule: dict[Path, Path | None]

    def bound_at(self, binder: Path) -> list[Path]:
        return [leaf for leaf, b in self.assumption.items() if b == binder]

    def rule_bound_at(self, binder: Path) -> list[Path]:
        return [n for n, b in self.rule.items() if b == binder]


def bindings(d: ArgStructure, outer_a: Mapping[str, Path] | None = None) -> Bindings:
    amap: dict[Path, Path | None] = {}
    rmap: dict[Path, Path | None] = {}

    def walk(n: ArgStructure, path: Path, aenv: dict, renv: dict):
        if n.kind == ASSUMPTION:
            amap[path] = aenv.get(n.label) if n.label is not None else None
            return
        if n.label is not None or n.kind == AXIOM:
            rmap[path] = renv.get(n.label) if n.label is not None else None
        if n.kind == AXIOM:
            return
        if n.binds:
            aenv = {**aenv, **{lab: path for lab in n.binds}}
        if n.rule_binds:
            renv = {**renv, **{lab: path for lab in n.rule_binds}}
        for i, c in enumerate(n.premises):
            walk(c, path + (i,), aenv, renv)

    walk(d, (), dict(outer_a or {}), {})
    return Bindings(amap, rmap)


def open_leaves(d: ArgStructure) -> list[Path]:
    return [p for p, b in bindings(d).assumption.items() if b is None]


def open_formulas(d: ArgStructure) -> frozenset[Formula]:
    """The assumption formulas left undischarged."""
    return frozenset(sub_at(d, p).formula for p in open_leaves(d))


def is_closed(d: ArgStructure) -> bool:
    return not open_leaves(d)


def free_labels(d: ArgStructure) -> tuple[frozenset[str], frozenset[str]]:
    """Labels carried by nodes that resolve outside ``d`` (assumption, rule)."""
    b = bindings(d)
    fa = {sub_at(d, p).label for p, t in b.assumption.items() if t is None}
    fr = {sub_at(d, p).label for p, t in b.rule.items() if t is None}
    return frozenset(fa - {None}), frozenset(fr - {None})


def all_labels(d: ArgStructure) -> set[str]:
    out: set[str] = set()
    for _, n in nodes(d):
        if n.label is not None:
            out.add(n.label)
        out |= n.binds | n.rule_binds
    return out


def fresh_label(used: set[str], prefix: str = "") -> str:
    i = 1
    while f"{prefix}{i}" in used:
        i += 1
    label = f"{prefix}{i}"
    used.add(label)
    return label


def strip_free_labels(d: ArgStructure) -> ArgStructure:
    """Drop labels that resolve nowhere (they carry no binding information)."""
    b = bindings(d)
    dead = {p for p, t in b.assumption.items() if t is None and sub_at(d, p).label is not None}
    dead |= {p for p, t in b.rule.items() if t is None and sub_at(d, p).label is not None}
    for p in dead:
        d = replace_at(d, p, _with(sub_at(d, p), label=None))
    return d


def rename_binders(d: ArgStructure, clash_a: Iterable[str], clash_r: Iterable[str], used: set[str]) -> ArgStructure:
    """Alpha-rename every binder of ``d`` whose label is in a clash set."""
    clash_a, clash_r = frozenset(clash_a), frozenset(clash_r)
    if not clash_a and not clash_r:
        return d

    def walk(n: ArgStructure, aenv: dict, renv: dict) -> ArgStructure:
        if n.kind == ASSUMPTION:
            return _with(n, label=aenv.get(n.label, n.label)) if n.label in aenv else n
        new_label = renv.get(n.label, n.label) if n.label is not None else None
        if n.kind == AXIOM:
            return n if new_label == n.label else _with(n, label=new_label)
        binds, rbinds = set(), set()
        aenv, renv = dict(aenv), dict(renv)
        for lab in n.binds:
            new = fresh_label(used) if lab in clash_a else lab
            aenv[lab] = new
            binds.add(new)
        for lab in n.rule_binds:
            new = fresh_label(used) if lab in clash_r else lab
            renv[lab] = new
            rbinds.add(new)
        kids = tuple(walk(c, aenv, renv) for c in n.premises)
        return _with(n, premises=kids, label=new_label, binds=frozenset(binds), rule_binds=frozenset(rbinds))

    return walk(d, {}, {})


def graft(
    body: ArgStructure,
    labels: Iterable[str],
    replacement: ArgStructure | Callable[[ArgStructure], ArgStructure],
) -> ArgStructure:
    """Replace the assumption leaves of ``body`` carrying one of ``labels`` and
    resolving outside ``body`` by ``replacement`` (a structure, or a function of
    the leaf). Binders of ``body`` that would capture free labels of the
    replacement are renamed first."""
    labels = frozenset(labels)
    if not labels:
        return body
    fixed = replacement if isinstance(replacement, ArgStructure) else None
    if fixed is not None:
        fa, fr = free_labels(fixed)
        used = all_labels(body) | all_labels(fixed)
        body = rename_binders(body, fa, fr, used)

    def walk(n: ArgStructure, bound: frozenset[str]) -> ArgStructure:
        if n.kind == ASSUMPTION:
            if n.label in labels and n.label not in bound:
                new = fixed if fixed is not None else replacement(n)
                if new.formula != n.formula:
                    raise ConclusionMismatch(f"graft of {new.formula} onto leaf {n.formula}")
                return new
            return n
        if n.kind == AXIOM:
            return n
        inner = bound | n.binds
        kids = tuple(walk(c, inner) for c in n.premises)
        if all(a is b for a, b in zip(kids, n.premises)):
            return n
        return _with(n, premises=kids)

    return walk(body, frozenset())


def substitute(d: ArgStructure, path: Sequence[int], replacement: ArgStructure, strict: bool = True) -> ArgStructure:
    """Replace the sub-structure at ``path``.

    Free labels of the replacement are read in the context at ``path``. With
    ``strict``, a free label that no surviving ancestor binds but that was bound
    inside the removed sub-structure is a dangling binder reference.
    """
    path = tuple(path)
    target = sub_at(d, path)
    if target.formula != replacement.formula:
        raise ConclusionMismatch(f"replacement concludes {replacement.formula}, target {target.formula}")
    if strict:
        ctx_a: set[str] = set()
        ctx_r: set[str] = set()
        n = d
        for i in path:
            ctx_a |= n.binds
            ctx_r |= n.rule_binds
            n = n.premises[i]
        inner_a: set[str] = set()
        inner_r: set[str] = set()
        for _, m in nodes(target):
            inner_a |= m.binds
            inner_r |= m.rule_binds
        fa, fr = free_labels(replacement)
        dangling = (fa - ctx_a) & inner_a | (fr - ctx_r) & inner_r
        if dangling:
            raise DanglingBinderError(
                f"labels {sorted(dangling)} would refer to binders inside the removed sub-structure"
            )
    return replace_at(d, path, replacement)


SigmaAssignment = Mapping[Formula, ArgStructure]


def sigma_instance(d: ArgStructure, sigma: SigmaAssignment) -> ArgStructure:
    """Replace every open assumption leaf by the closed image of its formula."""
    leaves = open_leaves(d)
    if not leaves:
        return d
    images: dict[Formula, ArgStructure] = {}
    for p in leaves:
        f = sub_at(d, p).formula
        if f in images:
            continue
        if f not in sigma:
            raise MissingAssignment(f"no closed structure assigned to {f}")
        img = sigma[f]
        if img.formula != f:
            raise ConclusionMismatch(f"assigned structure concludes {img.formula}, expected {f}")
        if not is_closed(img):
            raise ArgError(f"assigned structure for {f} is not closed")
        images[f] = strip_free_labels(img)
    for p in leaves:
        d = replace_at(d, p, images[sub_at(d, p).formula])
    return d


# --- structural checks ------------------------------------------------------


def audit(d: ArgStructure) -> list[str]:
    """Violations of the discharge-map side conditions (empty when well formed)."""
    problems = []
    b = bindings(d)
    f_targets = {t for t in b.assumption.values() if t is not None}
    for p, t in b.rule.items():
        if t is None:
            continue
        node, binder = sub_at(d, p), sub_at(d, t)
        where = list(p)
        if not is_atomic(node.formula):
            problems.append(f"rule-discharged node {where} is not atomic")
        for m in (node, binder):
            if m.kind == INFERENCE and not all(is_atomic(c.formula) for c in m.premises):
                problems.append(f"rule discharge at {list(t)} involves non-atomic children")
        if not is_atomic(binder.formula):
            problems.append(f"rule binder {list(t)} is not atomic")
        if t in f_targets:
            problems.append(f"node {list(t)} discharges both assumptions and rules")
        if node.kind == INFERENCE and p in f_targets:
            problems.append(f"rule-discharged node {where} also discharges assumptions")
    return problems


def canonical_kind(d: ArgStructure) -> str | None:
    """``"and"``, ``"or"`` or ``"imp"`` when the last step is an introduction."""
    if d.kind != INFERENCE or d.label is not None:
        return None
    f, kids = d.formula, d.premises
    b = bindings(d)
    bound_here = b.bound_at(())
    if b.rule_bound_at(()):
        return None
    if isinstance(f, Conj) and len(kids) == 2:
        if (kids[0].formula, kids[1].formula) == (f.left, f.right) and not bound_here:
            return "and"
    if isinstance(f, Disj) and len(kids) == 1:
        if kids[0].formula in (f.left, f.right) and not bound_here:
            return "or"
    if isinstance(f, Impl) and len(kids) == 1 and kids[0].formula == f.right:
        if all(sub_at(d, p).formula == f.left for p in bound_here):
            return "imp"
    return None


def is_canonical(d: ArgStructure) -> bool:
    return canonical_kind(d) is not None


def is_all_atomic(d: ArgStructure) -> bool:
    return all(is_atomic(n.formula) for _, n in nodes(d))


def is_atomic_derivation(d: ArgStructure) -> bool:
    """All nodes atomic and no assumption leaves at all (rule applications only)."""
    return all(is_atomic(n.formula) and n.kind != ASSUMPTION and not n.binds for _, n in nodes(d))


# --- inferences -------------------------------------------------------------


@dataclass(frozen=True)
class Discharge:
    """New bindings made by a final step: assumption labels, rule labels."""

    assumptions: frozenset[str] = frozenset()
    rules: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Inference:
    premises: tuple[ArgStructure, ...]
    conclusion: Formula
    discharge: Discharge = Discharge()


def build_inference(inf: Inference) -> ArgStructure:
    if not inf.premises:
        raise MalformedDischarge("an inference needs at least one premise structure")
    free_a: set[str] = set()
    free_r: set[str] = set()
    for p in inf.premises:
        fa, fr = free_labels(p)
        free_a |= fa
        free_r |= fr
    for lab in inf.discharge.assumptions:
        if lab not in free_a:
            raise MalformedDischarge(f"label {lab} marks no open assumption of the premises")
    for lab in inf.discharge.rules:
        if lab not in free_r:
            raise MalformedDischarge(f"rule label {lab} marks no undischarged rule of the premises")
    out = infer(
        inf.conclusion,
        *inf.premises,
        binds=inf.discharge.assumptions,
        rule_binds=inf.discharge.rules,
    )
    problems = audit(out)
    if problems:
        raise MalformedDischarge("; ".join(problems))
    return out


# --- atomic derivations -----------------------------------------------------


def from_derivation(d: Derivation | Hole) -> ArgStructure:
    """Atomic derivation as an argument structure; holes become open assumptions."""
    counter = [0]

    def walk(n, env: dict[AtomicRule, str]) -> ArgStructure:
        if isinstance(n, Hole):
            return assume(atom(n.atom))
        r = n.rule
        label = env.get(r)
        if not r.premises:
            return axiom_leaf(atom(r.conclusion), label, n.mark)
        kids, rbinds = [], []
        for slot, sub in zip(r.premises, n.premises):
            inner = env
            if slot.discharge:
                counter[0] += 1
                lab = f"r{counter[0]}"
                rbinds.append(lab)
                inner = {**env, **{x: lab for x in slot.discharge}}
            kids.append(walk(sub, inner))
        return infer(atom(r.conclusion), *kids, rule_binds=rbinds, label=label, mark=n.mark)

    return walk(d, {})


def read_derivation(
    s: ArgStructure,
    base: Iterable[AtomicRule],
    assumed: Iterable[AtomicRule] = (),
    allow_holes: bool = False,
) -> Derivation | Hole | None:
    """Read ``s`` as an atomic derivation whose undischarged rules lie in
    ``base``, ``assumed`` or the explosion family. None when impossible."""
    if not is_all_atomic(s):
        return None
    pool = frozenset(base) | frozenset(assumed)
    by_shape: dict[tuple[str, tuple[str, ...]], list[AtomicRule]] = {}
    for r in sorted_rules(pool):
        by_shape.setdefault((r.conclusion, tuple(x.premise for x in r.premises)), []).append(r)

    def candidates(n: ArgStructure, env: dict[str, frozenset[AtomicRule]]):
        concl = atom_name(n.formula)
        prem = tuple(atom_name(c.formula) for c in n.premises)
        if n.label is not None and n.label in env:
            return [r for r in sorted_rules(env[n.label]) if r.conclusion == concl and tuple(x.premise for x in r.premises) == prem]
        out = list(by_shape.get((concl, prem), ()))
        if prem == (BOT_NAME,) and concl != BOT_NAME:
            out.append(explosion(concl))
        return out

    def walk(n: ArgStructure, env: dict[str, frozenset[AtomicRule]]):
        if n.kind == ASSUMPTION:
            if allow_holes and (n.label is None or n.label not in env):
                return Hole(atom_name(n.formula))
            return None
        if n.binds:
            return None
        for r in candidates(n, env):
            subs = []
            for i, (slot, c) in enumerate(zip(r.premises, n.premises)):
                inner = env
                if n.rule_binds:
                    inner = {**env, **{lab: slot.discharge for lab in n.rule_binds}}
                sub = walk(c, inner)
                if sub is None:
                    break
                subs.append(sub)
            else:
                return Derivation(r, tuple(subs), n.mark)
        return None

    # labels that resolve nowhere behave as unlabelled nodes
    return walk(strip_free_labels(s), {})


def witnesses(s: ArgStructure, base: Iterable[AtomicRule]) -> bool:
    """``s`` is an atomic derivation of the base (no assumptions, rules in base or explosion)."""
    return is_atomic_derivation(s) and read_derivation(s, base) is not None


def axiomize(d: ArgStructure) -> ArgStructure:
    """Turn every open assumption leaf into an axiom leaf."""
    for p in open_leaves(d):
        n = sub_at(d, p)
        d = replace_at(d, p, axiom_leaf(n.formula, mark=n.mark))
    return d


# --- text format ------------------------------------------------------------


def parse_arg(text: str) -> ArgStructure:
    return arg_from_sexpr(read_one(text))


def arg_from_sexpr(e) -> ArgStructure:
    lst = expect_list(e, "(node ...)")
    if lst.head() != "node" or len(lst) < 3:
        raise ParseError("expected (node FORMULA (CHILD*) OPTION*)", lst.pos)
    formula = from_sexpr(lst[1])
    kids_e = expect_list(lst[2], "child list")
    kids = tuple(arg_from_sexpr(k) for k in kids_e.items)
    kind = INFERENCE
    label = None
    binds: list[str] = []
    rbinds: list[str] = []
    mark = None
    items = list(lst.items[3:])
    i = 0

    def optional_label():
        nonlocal i
        if i < len(items) and isinstance(items[i], Sym) and not items[i].text.startswith(":"):
            lab = items[i].text
            i += 1
            return _check_label(lab, items[i - 1].pos)
        return None

    while i < len(items):
        opt = expect_sym(items[i], "option keyword")
        pos = items[i].pos
        i += 1
        if opt == ":assume":
            kind = ASSUMPTION
            label = optional_label()
        elif opt == ":axiom":
            kind = AXIOM
            label = optional_label()
        elif opt in (":bind", ":bind-rule"):
            if i >= len(items):
                raise ParseError(f"{opt} needs a label list", pos)
            labs = expect_list(items[i], "label list")
            i += 1
            target = binds if opt == ":bind" else rbinds
            target.extend(_check_label(expect_sym(x, "label"), x.pos) for x in labs.items)
        elif opt == ":discharged":
            if i >= len(items):
                raise ParseError(":discharged needs a label", pos)
            label = _check_label(expect_sym(items[i], "label"), items[i].pos)
            i += 1
        elif opt == ":mark":
            if i >= len(items):
                raise ParseError(":mark needs a value", pos)
            mark = expect_sym(items[i], "mark")
            i += 1
        else:
            raise ParseError(f"unknown option {opt}", pos)
    try:
        return ArgStructure(formula, kids, kind, label, frozenset(binds), frozenset(rbinds), mark)
    except ArgError as exc:
        raise ParseError(str(exc), lst.pos) from None


def _check_label(lab: str, pos: int) -> str:
    if not LABEL_RE.match(lab):
        raise ParseError(f"bad label {lab!r}", pos)
    return lab


def print_arg(d: ArgStructure, indent: int = 0, compact: bool = False) -> str:
    if compact:
        return _print_node(d, None)
    return "  " * indent + _print_node(d, 2 * indent)


def _print_node(d: ArgStructure, col: int | None) -> str:
    opts = []
    if d.kind == ASSUMPTION:
        opts.append(":assume" + (f" {d.label}" if d.label else ""))
    elif d.kind == AXIOM:
        opts.append(":axiom" + (f" {d.label}" if d.label else ""))
    else:
        if d.binds:
            opts.append(f":bind ({' '.join(sorted(d.binds))})")
        if d.rule_binds:
            opts.append(f":bind-rule ({' '.join(sorted(d.rule_binds))})")
        if d.label:
            opts.append(f":discharged {d.label}")
    if d.mark:
        opts.append(f":mark {d.mark}")
    tail = "".join(" " + o for o in opts)
    if not d.premises:
        return f"(node {d.formula} (){tail})"
    if col is None:
        kids = " ".join(_print_node(c, None) for c in d.premises)
        return f"(node {d.formula} ({kids}){tail})"
    inner = col + 2
    sep = "\n" + " " * (inner + 1)
    kids = sep.join(_print_node(c, inner + 1) for c in d.premises)
    return f"(node {d.formula}\n{' ' * inner}({kids}){tail})"


def render_tree(d: ArgStructure) -> str:
    """Indented human-readable view, root first."""
    b = bindings(d)
    lines = []
    for path, n in nodes(d):
        pad = "  " * len(path)
        if n.kind == ASSUMPTION:
            tag = "[open]" if b.assumption.get(path) is None else f"[discharged at {list(b.assumption[path])}]"
            lines.append(f"{pad}{n.formula}  assumption {tag}")
        elif n.kind == AXIOM:
            extra = "" if b.rule.get(path) is None else f" (rule discharged at {list(b.rule[path])})"
            lines.append(f"{pad}{n.formula}  axiom{extra}")
        else:
            extra = []
            if n.binds:
                extra.append("binds " + ",".join(sorted(n.binds)))
            if n.rule_binds:
                extra.append("binds rules " + ",".join(sorted(n.rule_binds)))
            lines.append(f"{pad}{n.formula}" + (f"  ({'; '.join(extra)})" if extra else ""))
    return "\n".join(lines)


