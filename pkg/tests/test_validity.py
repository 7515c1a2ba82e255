import pytest
from hypothesis import given, settings
from strategies import rngs

from ptsbench.argstruct import assume, axiom_leaf, axiomize, infer, is_closed, parse_arg
from ptsbench.atomic_system import axiom, parse_base, rule
from ptsbench.bes import make_pool
from ptsbench.formula import Atom, Disj, Impl
from ptsbench.generators import random_formula, random_intro_structure
from ptsbench.reduction import PHI1, PHI2, PHI_IMP
from ptsbench.syntax import ParseError
from ptsbench.validity import (
    Bounds,
    PreconditionError,
    check_valid,
    graft_reduction,
    parse_catalog,
    replay_verdict,
    rule_valid_bounded,
    split_transform,
    valid_by_axiom_certificate,
    valid_closed,
    valid_open_bounded,
)

p, q, r = Atom("p"), Atom("q"), Atom("r")
POOL = make_pool(("p", "q"), 1, 1)
BOUNDS = Bounds(pool=POOL)


def load(fixtures_dir, name):
    text = (fixtures_dir / name).read_text()
    return parse_base(text) if name.endswith(".base") else parse_arg(text)


def test_atomic_leaf_needs_a_derivation():
    assert valid_closed(axiom_leaf(p), [], [axiom("p")]).valid
    assert valid_closed(axiom_leaf(p), [], []).invalid


def test_detour_needs_its_reduction(fixtures_dir):
    d = load(fixtures_dir, "mp_redex.arg")
    b = load(fixtures_dir, "p_axiom_q_rule.base")
    v = valid_closed(d, [PHI_IMP], b)
    assert v.valid and [s.reduction for s in v.trace] == ["phi_imp"]
    assert replay_verdict(v, d, [PHI_IMP], b)
    assert valid_closed(d, [], b).invalid


def test_step_cap_zero_is_inconclusive(fixtures_dir):
    d = load(fixtures_dir, "mp_redex.arg")
    b = load(fixtures_dir, "p_axiom_q_rule.base")
    assert valid_closed(d, [PHI_IMP], b, step_cap=0).inconclusive


def test_implication_over_bases():
    d = infer(Impl(p, q), infer(q, assume(p, "1")), binds=["1"])
    v = valid_closed(d, [], [rule(["p"], "q")], BOUNDS)
    assert v.valid and replay_verdict(v, d, [], [rule(["p"], "q")])
    bad = valid_closed(d, [], [], BOUNDS)
    assert bad.invalid
    assert bad.counterexample["extension"] == [axiom("p")]


def test_certificate_for_all_atomic_structures():
    s = infer(q, assume(p))
    v = valid_by_axiom_certificate(s, [rule(["p"], "q")])
    assert v.valid and v.certificate is not None
    assert replay_verdict(v, s, [], [rule(["p"], "q")])
    assert valid_by_axiom_certificate(s, []).invalid
    with pytest.raises(PreconditionError):
        valid_by_axiom_certificate(infer(Impl(p, q), assume(q)), [])
    # the certificate's axiomized structure is itself valid with no reductions
    axioms = [rule(["p"], "q"), axiom("p")]
    assert valid_closed(axiomize(s), [], axioms).valid


def test_interface_aliases():
    from ptsbench.constructions import split_construction, theorem2_k
    from ptsbench.validity import valid_by_prop13

    assert theorem2_k is split_construction
    assert valid_by_prop13 is valid_by_axiom_certificate


def test_dispatch_and_preconditions():
    open_s = infer(q, assume(p))
    assert check_valid(open_s, [], [rule(["p"], "q")], BOUNDS).valid
    with pytest.raises(PreconditionError):
        valid_open_bounded(axiom_leaf(p), [], [])
    with pytest.raises(PreconditionError):
        valid_closed(open_s, [], [])


def test_catalog_restricts_open_checks(fixtures_dir):
    catalog = parse_catalog((fixtures_dir / "p_axiom.catalog").read_text())
    bounds = Bounds(pool=make_pool(("p",), 0), catalog=catalog)
    v = valid_open_bounded(infer(q, assume(p), infer(q, axiom_leaf(q))), [], [], bounds)
    assert v.invalid
    with pytest.raises(ParseError):
        parse_catalog("(catalog (entry p (node q () :axiom)))")
    with pytest.raises(ParseError):
        parse_catalog("(catalog (entry p (node p () :axiom) (just nope)))")


def test_elimination_rule_with_its_reduction():
    bounds = Bounds(pool=make_pool(("p", "q"), 1, 1, cap=4))
    v = rule_valid_bounded([Impl(p, q), p], q, [PHI_IMP], [], bounds)
    assert v.valid and v.bounded
    assert rule_valid_bounded([Impl(p, q), p], q, [], [], bounds).invalid


def test_split_rule_with_its_reductions():
    bounds = Bounds(pool=make_pool(("p", "q", "r"), 1, 1, cap=6), max_extensions=16)
    v = rule_valid_bounded([Impl(p, Disj(q, r))], Disj(Impl(p, q), Impl(p, r)), [PHI1, PHI2], [], bounds)
    assert v.valid


def test_graft_reduction_for_a_base_rule():
    b = frozenset([rule(["p", "q"], "r")])
    d = infer(r, assume(p), assume(q))
    g = graft_reduction(d, name="pq_to_r")
    assert g.domain(infer(r, axiom_leaf(p), axiom_leaf(q)))
    bounds = Bounds(pool=make_pool(("p", "q"), 0))
    assert rule_valid_bounded([p, q], r, [g], b, bounds).valid


def test_split_transform_cases(fixtures_dir):
    res2 = split_transform(load(fixtures_dir, "split_case2.arg"), [], load(fixtures_dir, "p_to_q.base"))
    assert res2.case == 2 and res2.trace[0].reduction == "phi1" and res2.trace[-1].reduction == "phi2"
    res1 = split_transform(load(fixtures_dir, "split_case1.arg"), [], load(fixtures_dir, "axiom_q.base"))
    assert res1.case == 1 and [s.reduction for s in res1.trace] == ["phi2"]
    for res, base in ((res2, "p_to_q.base"), (res1, "axiom_q.base")):
        assert is_closed(res.final) and res.verdict.valid
        assert replay_verdict(res.verdict, res.final, res.just, load(fixtures_dir, base))


def test_split_transform_preconditions(fixtures_dir):
    with pytest.raises(PreconditionError):
        split_transform(load(fixtures_dir, "mp_redex.arg"), [], [])
    # the input for p -> q or r is not valid over the empty base
    bounds = Bounds(pool=make_pool(("p", "q", "r"), 0))
    with pytest.raises(PreconditionError):
        split_transform(load(fixtures_dir, "split_case2.arg"), [], [], bounds)


@settings(max_examples=80, deadline=None)
@given(rngs)
def test_valid_verdicts_replay(rng):
    base = frozenset(rng.sample(POOL.rules, rng.randint(0, 4)))
    d = random_intro_structure(rng, random_formula(rng, 2, ("p", "q")), atoms=("p", "q"), base=base)
    bounds = Bounds(step_cap=4, state_cap=200, pool=POOL)
    for j in ([], [PHI_IMP]):
        v = valid_closed(d, j, base, bounds)
        if v.valid:
            assert replay_verdict(v, d, j, base)
