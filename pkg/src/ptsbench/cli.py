"""Command-line entry point.

Exit codes: 0 success / holds / valid, 1 refuted / invalid / not derivable,
2 usage or parse error, 3 inconclusive (a search cap was reached).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .argstruct import ArgError, ArgStructure, nodes, parse_arg, print_arg
from .atomic_system import (
    DepthCapExhausted,
    derive,
    parse_base,
    parse_rule,
    print_derivation,
    rule_atoms,
)
from .bes import (
    DEFAULT_MAX_POOL,
    ExtensionPool,
    PoolError,
    bes_holds,
    format_verdict,
    make_pool,
    pool_from_rules,
    refute_substitution_closure,
    replay_refutation,
)
from .constructions import (
    ConjunctionError,
    MalformedConstruction,
    UnsupportedFormula,
    is_construction,
    is_construction_from,
    parse_term,
    print_term,
    split_formula,
    split_construction,
)
from .formula import atoms_of, parse_formula, parse_sequent, parse_substitution, print_sequent
from .reduction import format_trace, immediate_reductions, names, parse_justification
from .syntax import ParseError
from .validity import Bounds, PreconditionError, ValidityVerdict, check_valid, parse_catalog, split_transform

SCHEMA = "ptsbench/1"

OK, FAIL, USAGE, INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _base(path: str | None):
    return parse_base(_read(path)) if path else frozenset()


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps({"schema": SCHEMA, "command": args.command_name, **payload}, indent=2, sort_keys=True))
    else:
        print(text)


def _pool(args, atoms: set[str]) -> ExtensionPool:
    if args.pool_rule:
        return pool_from_rules(parse_rule(r) for r in args.pool_rule)
    names_ = set(atoms)
    if args.pool_atoms:
        names_ |= {a.strip() for a in args.pool_atoms.split(",") if a.strip()}
    for k in range(args.pool_extra):
        names_.add(f"x{k + 1}")
    names_.discard("bot")
    if not names_:
        return ExtensionPool(())
    return make_pool(sorted(names_), args.pool_level, args.pool_premises, args.pool_cap)


def _base_atoms(b) -> set[str]:
    out: set[str] = set()
    for r in b:
        out |= rule_atoms(r)
    return out


def _arg_atoms(d: ArgStructure) -> set[str]:
    out: set[str] = set()
    for _, n in nodes(d):
        out |= atoms_of(n.formula)
    return out


def _verdict_json(v: ValidityVerdict) -> dict:
    return {
        "status": v.status,
        "bounded": v.bounded,
        "reason": v.reason,
        "trace": [{"reduction": s.reduction, "path": list(s.path)} for s in v.trace],
        "certificate": print_derivation(v.certificate) if v.certificate is not None else None,
        "counterexample": (
            {**v.counterexample, "extension": [str(r) for r in v.counterexample["extension"]]}
            if v.counterexample
            else None
        ),
    }


def _verdict_code(v) -> int:
    return {"valid": OK, "invalid": FAIL, "inconclusive": INCONCLUSIVE}[v.status]


# --- subcommands ----------------------------------------------------------------


def cmd_derive(args) -> int:
    b = _base(args.base)
    assumed = [parse_rule(r) for r in args.assume]
    d = derive(args.goal, assumed, b)
    if d is None:
        _emit(args, {"status": "underivable", "goal": args.goal}, f"not derivable: {args.goal}")
        return FAIL
    text = print_derivation(d)
    _emit(args, {"status": "derivable", "goal": args.goal, "derivation": text}, text)
    return OK


def cmd_bes_check(args) -> int:
    gamma, a = parse_sequent(args.sequent)
    b = _base(args.base)
    atoms = set().union(*(atoms_of(f) for f in [*gamma, a])) | _base_atoms(b)
    pool = _pool(args, atoms)
    v = bes_holds(gamma, a, b, pool, args.max_pool)
    payload = {
        "status": "holds" if v.holds else "refuted",
        "sequent": print_sequent(gamma, a),
        "pool": v.pool,
        "certified": v.certified,
        "extension": [str(r) for r in sorted(v.extension, key=str)] if v.extension is not None else None,
        "trace": v.trace,
    }
    _emit(args, payload, format_verdict(v))
    return OK if v.holds else FAIL


def cmd_bes_refute_subst(args) -> int:
    gamma, a = parse_sequent(args.sequent)
    subs = [parse_substitution(s) for s in args.subst]
    if not subs:
        raise UsageError("give at least one --subst")
    pool = _pool(args, set())
    if not len(pool):
        raise UsageError("give a pool (--pool-rule or --pool-atoms)")
    hit = refute_substitution_closure(gamma, a, subs, pool, args.max_pool)
    if hit is None:
        _emit(args, {"status": "holds", "pool": pool.describe()}, f"no substitution instance refuted ({pool.describe()})")
        return OK
    s, v = hit
    replayed = replay_refutation(v, frozenset(), pool, args.max_pool)
    shown = "; ".join(f"{k}={f}" for k, f in s.items())
    payload = {
        "status": "refuted",
        "substitution": {k: str(f) for k, f in s.items()},
        "certified": v.certified,
        "replayed": replayed,
        "extension": [str(r) for r in sorted(v.extension, key=str)],
        "trace": v.trace,
    }
    _emit(args, payload, f"substitution {shown}\n{format_verdict(v)}\nreplay: {'ok' if replayed else 'FAILED'}")
    return FAIL


def cmd_arg_reduce(args) -> int:
    d = parse_arg(_read(args.arg))
    j = parse_justification(args.just)
    cur, trace = d, []
    for _ in range(args.steps):
        step = next(immediate_reductions(cur, j), None)
        if step is None:
            break
        trace.append(step)
        cur = step.result
    normal = next(immediate_reductions(cur, j), None) is None
    status = "normal" if normal else "steps-exhausted"
    lines = []
    if args.trace:
        lines.append(format_trace(d, trace))
    lines.append(print_arg(cur))
    lines.append(f"{len(trace)} step(s); {'normal form' if normal else 'step cap reached'}")
    payload = {
        "status": status,
        "steps": [{"reduction": s.reduction, "path": list(s.path)} for s in trace],
        "result": print_arg(cur, compact=True),
    }
    _emit(args, payload, "\n".join(lines))
    return OK if normal else INCONCLUSIVE


def _bounds(args, atoms: set[str]) -> Bounds:
    catalog = parse_catalog(_read(args.catalog)) if args.catalog else None
    pool = _pool(args, atoms)
    return Bounds(step_cap=args.steps, state_cap=args.states, pool=pool, catalog=catalog)


def cmd_arg_check_valid(args) -> int:
    d = parse_arg(_read(args.arg))
    j = parse_justification(args.just)
    b = _base(args.base)
    bounds = _bounds(args, _arg_atoms(d) | _base_atoms(b))
    v = check_valid(d, j, b, bounds)
    text = f"{v.describe()}\njustification: {{{', '.join(names(j))}}}\nbounds: {bounds.describe()}"
    if v.trace:
        text += "\n" + format_trace(d, v.trace)
    if v.counterexample:
        cx = v.counterexample
        text += "\ncounterexample: extension {" + ", ".join(map(str, cx["extension"])) + "}"
        for f, s in cx.get("sigma", {}).items():
            text += f"\n  {f} := {s}"
    _emit(args, {**_verdict_json(v), "justification": names(j), "bounds": bounds.describe()}, text)
    return _verdict_code(v)


def cmd_split_transform(args) -> int:
    d1 = parse_arg(_read(args.arg))
    j = parse_justification(args.just)
    c = _base(args.base)
    bounds = _bounds(args, _arg_atoms(d1) | _base_atoms(c))
    res = split_transform(d1, j, c, bounds)
    out_text = print_arg(res.final)
    if args.out:
        Path(args.out).write_text(out_text + "\n")
    lines = [
        f"case {res.case}",
        format_trace(res.d2, res.trace),
        out_text,
        f"verdict relative to {{{', '.join(names(res.just))}}}: {res.verdict.describe()}",
    ]
    payload = {
        **_verdict_json(res.verdict),
        "case": res.case,
        "justification": names(res.just),
        "output": print_arg(res.final, compact=True),
        "steps": [{"reduction": s.reduction, "path": list(s.path)} for s in res.trace],
    }
    _emit(args, payload, "\n".join(lines))
    return _verdict_code(res.verdict)


def cmd_construct_check(args) -> int:
    k = parse_term(_read(args.term))
    a = parse_formula(args.formula)
    b = _base(args.base)
    gamma = [parse_formula(g) for g in args.gamma.split(",") if g.strip()] if args.gamma else []
    atoms = atoms_of(a) | _base_atoms(b) | set().union(*(atoms_of(g) for g in gamma))
    pool = _pool(args, atoms)
    if gamma:
        v = is_construction_from(k, gamma, a, b, pool)
    else:
        v = is_construction(k, a, b, pool)
    payload = {"status": v.status, "bounded": v.bounded, "reason": v.reason, "counterexample": v.counterexample, "pool": pool.describe()}
    _emit(args, payload, f"{v.describe()}\n{pool.describe()}")
    return OK if v.valid else FAIL


def cmd_construct_split_k(args) -> int:
    k1 = parse_term(_read(args.term))
    c = _base(args.base)
    out = split_construction(k1, c)
    p = k1.atom
    if args.formula:
        target = parse_formula(args.formula)
    else:
        q, r = args.atoms.split(",")
        target = split_formula(p, q.strip(), r.strip())
    pool = _pool(args, atoms_of(target) | _base_atoms(c))
    v = is_construction(out, target, c, pool)
    text = f"{print_term(out)}\ncheck for {target}: {v.describe()}\n{pool.describe()}"
    _emit(args, {"status": v.status, "output": print_term(out), "bounded": v.bounded, "pool": pool.describe()}, text)
    return OK if v.valid else FAIL


# --- parser -------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_pool(p) -> None:
    g = p.add_argument_group("extension pool")
    g.add_argument("--pool-atoms", help="comma-separated atoms added to the input's atoms")
    g.add_argument("--pool-extra", type=int, default=0, help="number of fresh atoms x1, x2, ... to add")
    g.add_argument("--pool-level", type=int, default=1, choices=(0, 1, 2), help="highest rule level generated")
    g.add_argument("--pool-premises", type=int, default=1, choices=(0, 1, 2), help="premises per level-1 rule")
    g.add_argument("--pool-cap", type=int, default=None, help="keep only the first N generated rules")
    g.add_argument("--pool-rule", action="append", default=[], help="explicit pool rule (repeatable; replaces the generated pool)")
    g.add_argument("--max-pool", type=int, default=DEFAULT_MAX_POOL, help="refuse pools with more free rules than this")


def _add_caps(p) -> None:
    p.add_argument("--steps", type=int, default=8, help="reduction step cap")
    p.add_argument("--states", type=int, default=1500, help="reduction search state cap")
    p.add_argument("--catalog", help="closed-argument catalog file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ptsbench", description="Atomic bases, argument structures, reductions and validity checks.")
    parser.add_argument("--version", action="version", version=f"ptsbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def leaf(subparsers, name, func, help_):
        p = subparsers.add_parser(name, help=help_)
        p.add_argument("--json", action="store_true", help=f"machine-readable output (schema {SCHEMA})")
        p.set_defaults(func=func)
        return p

    p = leaf(sub, "derive", cmd_derive, "search for an atomic derivation")
    p.add_argument("--base", help="base file")
    p.add_argument("--goal", required=True, help="atom to derive")
    p.add_argument("--assume", action="append", default=[], help="assumed rule (repeatable)")

    bes = sub.add_parser("bes", help="base-extension consequence").add_subparsers(dest="bes_command", required=True, parser_class=_Parser)
    p = leaf(bes, "check", cmd_bes_check, "evaluate a sequent over a pool")
    p.add_argument("--sequent", required=True, help='"A1 , A2 ==> B"')
    p.add_argument("--base", help="base file")
    _add_pool(p)
    p = leaf(bes, "refute-subst", cmd_bes_refute_subst, "refute closure under substitution")
    p.add_argument("--sequent", required=True, help='"A1 , A2 ==> B"')
    p.add_argument("--subst", action="append", default=[], help='"p=(or p q); q=p" (repeatable)')
    _add_pool(p)

    arg = sub.add_parser("arg", help="argument structures").add_subparsers(dest="arg_command", required=True, parser_class=_Parser)
    p = leaf(arg, "reduce", cmd_arg_reduce, "rewrite with a set of reductions")
    p.add_argument("--arg", required=True, help="argument structure file")
    p.add_argument("--just", default="", help="comma-separated reduction names")
    p.add_argument("--steps", type=int, default=16, help="maximum number of rewrite steps")
    p.add_argument("--trace", action="store_true", help="print every intermediate structure")
    p = leaf(arg, "check-valid", cmd_arg_check_valid, "validity relative to reductions over a base")
    p.add_argument("--arg", required=True, help="argument structure file")
    p.add_argument("--just", default="", help="comma-separated reduction names")
    p.add_argument("--base", help="base file")
    _add_caps(p)
    _add_pool(p)

    split = sub.add_parser("split", help="the Split pipeline").add_subparsers(dest="split_command", required=True, parser_class=_Parser)
    p = leaf(split, "transform", cmd_split_transform, "append Split and reduce to canonical form")
    p.add_argument("--arg", required=True, help="argument structure file")
    p.add_argument("--just", default="", help="comma-separated reduction names")
    p.add_argument("--base", help="base file")
    p.add_argument("--out", help="write the output structure here")
    _add_caps(p)
    _add_pool(p)

    con = sub.add_parser("construct", help="constructions").add_subparsers(dest="construct_command", required=True, parser_class=_Parser)
    p = leaf(con, "check", cmd_construct_check, "check a construction")
    p.add_argument("--term", required=True, help="construction term file")
    p.add_argument("--formula", required=True, help="formula the term should construct")
    p.add_argument("--gamma", help="comma-separated atomic inputs (construction from)")
    p.add_argument("--base", help="base file")
    _add_pool(p)
    p = leaf(con, "split-k", cmd_construct_split_k, "turn a construction of p→q∨r into one of (p→q)∨(p→r)")
    p.add_argument("--term", required=True, help="construction term file")
    p.add_argument("--base", help="base file")
    p.add_argument("--atoms", default="q,r", help="disjunct atoms q,r of the input formula")
    p.add_argument("--formula", help="target formula (overrides --atoms)")
    _add_pool(p)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.command_name = " ".join(
            x for x in (args.command, getattr(args, "bes_command", None), getattr(args, "arg_command", None),
                        getattr(args, "split_command", None), getattr(args, "construct_command", None)) if x
        )
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return USAGE
    except (ValueError, ArgError, PoolError, ConjunctionError, UnsupportedFormula, MalformedConstruction, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except DepthCapExhausted as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return INCONCLUSIVE


def main() -> None:
    sys.exit(run())
