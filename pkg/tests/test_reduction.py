import inspect
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import rngs

from ptsbench.argstruct import assume, axiom_leaf, canonical_kind, infer, is_closed, parse_arg
from ptsbench.formula import Atom, Conj, Disj, Impl
from ptsbench.generators import SAMPLERS
from ptsbench.reduction import (
    CATALOG,
    IOTA,
    PHI1,
    PHI2,
    PHI_IMP,
    PHI_S,
    SPLIT_TO_S,
    DomainViolation,
    NonHarropError,
    ReductionCapExhausted,
    Step,
    check_laws_on,
    immediate_reductions,
    open_leaf_mutant,
    parse_justification,
    reduces_to,
    replay_trace,
    search,
    split_to_s,
    trace_end,
)

p, q, r = Atom("p"), Atom("q"), Atom("r")


def mp_redex(body_concl=q, minor=None):
    body = infer(body_concl, assume(p, "1"))
    return infer(body_concl, infer(Impl(p, body_concl), body, binds=["1"]), minor or axiom_leaf(p))


def test_phi_imp_grafts_the_minor(fixtures_dir):
    d = parse_arg((fixtures_dir / "mp_redex.arg").read_text())
    assert PHI_IMP.domain(d)
    assert PHI_IMP(d) == infer(q, axiom_leaf(p))


def test_phi_imp_vacuous_body_drops_minor():
    d = infer(q, infer(Impl(p, q), axiom_leaf(q)), assume(p))
    assert PHI_IMP(d) == axiom_leaf(q)


def test_iota_exchanges_antecedents():
    prem = assume(Impl(p, Impl(q, r)))
    d = infer(Impl(q, Impl(p, r)), prem)
    out = IOTA(d)
    assert out.formula == d.formula
    assert canonical_kind(out) == "imp"
    # still depends on the same open premise and nothing else
    assert not is_closed(out)


def test_split_pair_examples(fixtures_dir):
    case2 = parse_arg((fixtures_dir / "split_case2.arg").read_text())
    d2 = infer(Disj(Impl(p, q), Impl(p, r)), case2)
    assert PHI1.domain(d2) and not PHI2.domain(d2)
    case1 = parse_arg((fixtures_dir / "split_case1.arg").read_text())
    d1 = infer(Disj(Impl(p, q), Impl(p, r)), case1)
    assert PHI2.domain(d1) and not PHI1.domain(d1)
    out = PHI2(d1)
    assert canonical_kind(out) == "or" and canonical_kind(out.premises[0]) == "imp"


def test_domain_violation():
    with pytest.raises(DomainViolation):
        PHI_IMP(axiom_leaf(p))


def test_split_to_s_needs_harrop():
    bad = infer(Disj(Impl(Disj(p, q), r), Impl(Disj(p, q), p)), assume(Impl(Disj(p, q), Disj(r, p))))
    assert not SPLIT_TO_S.domain(bad)
    # (or p q) is not Harrop, so the unfolding is refused with a specific error
    with pytest.raises(NonHarropError):
        split_to_s(infer(Disj(Impl(Disj(p, q), r), Impl(Disj(p, q), p)), assume(Impl(Disj(p, q), Disj(r, p)))))
    good = infer(Disj(Impl(p, q), Impl(p, r)), assume(Impl(p, Disj(q, r))))
    out = SPLIT_TO_S(good)
    assert PHI_S.domain(out) is False
    assert out.formula == good.formula


def test_transforms_are_base_blind():
    # a reduction sees the structure and nothing else
    for phi in CATALOG.values():
        params = inspect.signature(phi.transform).parameters
        assert list(params) == ["d"], phi.name


def test_justification_parsing():
    assert parse_justification("phi_imp, iota") == frozenset([PHI_IMP, IOTA])
    assert parse_justification("") == frozenset()
    with pytest.raises(ValueError):
        parse_justification("nope")


def test_two_redexes_enumerated_in_order():
    d = infer(Conj(q, q), mp_redex(), mp_redex())
    steps = list(immediate_reductions(d, [PHI_IMP]))
    assert [s.path for s in steps] == [(0,), (1,)]
    normal = infer(Conj(q, q), infer(q, axiom_leaf(p)), infer(q, axiom_leaf(p)))
    # every order of contraction reaches the same normal form
    for first, second in itertools.permutations([(0,), (1,)]):
        cur = d
        for path in (first, second):
            cur = next(s.result for s in immediate_reductions(cur, [PHI_IMP]) if s.path == path)
        assert cur == normal
    trace = reduces_to(d, normal, [PHI_IMP])
    assert [s.path for s in trace] == [(0,), (1,)]
    assert replay_trace(d, trace, [PHI_IMP])


def test_search_is_deterministic():
    d = infer(Conj(q, q), mp_redex(), mp_redex())
    a = search(d, CATALOG.values(), lambda x: not any(True for _ in immediate_reductions(x, [PHI_IMP])))
    b = search(d, CATALOG.values(), lambda x: not any(True for _ in immediate_reductions(x, [PHI_IMP])))
    assert a.trace == b.trace and a.visited == b.visited


def test_caps_and_unreachable():
    d = infer(Conj(q, q), mp_redex(), mp_redex())
    normal = infer(Conj(q, q), infer(q, axiom_leaf(p)), infer(q, axiom_leaf(p)))
    with pytest.raises(ReductionCapExhausted):
        reduces_to(d, normal, [PHI_IMP], step_cap=1)
    assert reduces_to(d, axiom_leaf(Conj(q, q)), [PHI_IMP]) is None
    assert reduces_to(d, d, []) == []


def test_replay_rejects_tampering():
    d = mp_redex()
    trace = reduces_to(d, infer(q, axiom_leaf(p)), [PHI_IMP])
    assert replay_trace(d, trace, [PHI_IMP])
    assert not replay_trace(d, trace, [IOTA])
    forged = [Step(trace[0].path, trace[0].reduction, axiom_leaf(q))]
    assert not replay_trace(d, forged, [PHI_IMP])
    assert trace_end(d, trace) == infer(q, axiom_leaf(p))


@settings(max_examples=60, deadline=None)
@given(rngs, st.sampled_from(sorted(SAMPLERS)))
def test_laws_hold_on_samples(rng, name):
    d, sigma = SAMPLERS[name](rng)
    assert check_laws_on(CATALOG[name], d, sigma) is None


def test_mutant_breaks_a_law():
    import random

    rng = random.Random(0)
    mutant = open_leaf_mutant(PHI_IMP)
    failures = [check_laws_on(mutant, *SAMPLERS["phi_imp"](rng)) for _ in range(20)]
    assert all(f is not None for f in failures)
    assert {f.law for f in failures} <= {3, 4}
