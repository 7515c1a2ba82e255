import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from oracles import il_provable
from strategies import formulas, rngs

from ptsbench.atomic_system import axiom, parse_rule, rule
from ptsbench.bes import (
    Evaluator,
    PoolBudgetExceeded,
    PoolError,
    bes_holds,
    format_verdict,
    make_pool,
    pool_from_rules,
    replay_refutation,
)
from ptsbench.formula import BOT, Atom, parse_formula, parse_sequent
from ptsbench.generators import random_formula

PQR = make_pool(("p", "q", "r"), 1, 1)
SMALL = make_pool(("p", "q"), 1, 1)


def sequent(text):
    return parse_sequent(text)


def test_pool_shape():
    assert len(PQR) == 12
    assert len(make_pool(("p", "q"), 0)) == 2
    assert len(make_pool(("p", "q"), 2, 1)) == 2 + 4 + 8
    assert make_pool(("q", "p"), 1, 1) == make_pool(("p", "q"), 1, 1)
    assert len(make_pool(("p", "q", "r"), 1, 1, cap=5)) == 5
    with pytest.raises(PoolError):
        make_pool((), 1)
    with pytest.raises(PoolError):
        make_pool(("p",), 3)


def test_budget():
    with pytest.raises(PoolBudgetExceeded):
        bes_holds([], Atom("p"), frozenset(), make_pool(("p", "q", "r"), 2, 1), max_pool=10)


def test_bot_is_refuted_with_certificate():
    v = bes_holds(*sequent("==> bot"), frozenset(), SMALL)
    assert not v.holds and v.certified
    assert v.extension == frozenset()
    assert replay_refutation(v, frozenset(), SMALL)
    assert "RefutedBy (certified" in format_verdict(v)


def test_bot_holds_over_inconsistent_base():
    v = bes_holds([], parse_formula("(and p (imp q r))"), frozenset([axiom("bot")]), SMALL)
    assert v.holds


def test_excluded_middle_refuted():
    v = bes_holds(*sequent("==> (or p (imp p bot))"), frozenset(), pool_from_rules([axiom("p")]))
    assert not v.holds and v.certified


def test_split_holds_within_pool():
    gamma, a = sequent("(imp p (or q r)) ==> (or (imp p q) (imp p r))")
    assert bes_holds(gamma, a, frozenset(), PQR).holds
    assert bes_holds(gamma, a, frozenset([rule(["p"], "q")]), PQR).holds


def test_implication_over_base():
    b = frozenset([rule(["p"], "q")])
    assert bes_holds(*sequent("==> (imp p q)"), b, SMALL).holds
    v = bes_holds(*sequent("==> (imp p q)"), frozenset(), SMALL)
    assert not v.holds and v.certified
    assert axiom("p") in v.extension


def test_antecedents_of_empty_gamma_implication():
    # ==> (imp A B) and A ==> B agree
    for text in ["(imp p q)", "(imp (or p q) p)", "(imp (imp p q) q)"]:
        f = parse_formula(text)
        for b in (frozenset(), frozenset([axiom("q")])):
            assert bes_holds([], f, b, SMALL).holds == bes_holds([f.left], f.right, b, SMALL).holds


@settings(max_examples=200, deadline=None)
@given(formulas, st.integers(0, 2**6 - 1))
def test_persistence(f, seed):
    ev = Evaluator(frozenset(), SMALL)
    m = seed & ev.full
    if ev.holds(m, f):
        assert all(ev.holds(ext, f) for ext in ev.supersets(m))


@settings(max_examples=150, deadline=None)
@given(rngs)
def test_refutations_replay(rng):
    gamma = [random_formula(rng, 1, ("p", "q"), bot=True) for _ in range(rng.randint(0, 2))]
    a = random_formula(rng, 2, ("p", "q"), bot=True)
    b = frozenset(rng.sample(SMALL.rules, rng.randint(0, 2)))
    v = bes_holds(gamma, a, b, SMALL)
    if not v.holds:
        assert v.extension >= b
        assert replay_refutation(v, b, SMALL)


@settings(max_examples=150, deadline=None)
@given(rngs)
def test_certified_refutations_survive_larger_pools(rng):
    gamma = [random_formula(rng, 1, ("p", "q"), bot=True) for _ in range(rng.randint(0, 2))]
    a = random_formula(rng, 2, ("p", "q"), bot=True)
    small = pool_from_rules(rng.sample(SMALL.rules, rng.randint(1, 4)))
    v = bes_holds(gamma, a, frozenset(), small)
    if not v.holds and v.certified:
        assert not bes_holds(gamma, a, frozenset(), SMALL).holds


@settings(max_examples=200, deadline=None)
@given(st.lists(formulas, max_size=2), formulas)
def test_intuitionistic_theorems_hold(gamma, a):
    assume(il_provable(gamma, a))
    pool = make_pool(("p", "q", "r"), 1, 1, cap=8)
    assert bes_holds(gamma, a, frozenset(), pool).holds


def test_level_two_pool_rules():
    # s follows once r is derivable from a hypothetical axiom p
    b = frozenset([parse_rule("(rule (((rule => p)) r) => s)")])
    pool = make_pool(("p", "r", "s"), 1, 1, cap=10)
    assert not bes_holds([], parse_formula("(imp p r)"), b, pool).holds
    assert bes_holds([parse_formula("(imp p r)")], Atom("s"), b, pool).holds
    assert bes_holds([], Atom("s"), b | {rule(["p"], "r")}, pool).holds


def test_bot_antecedent():
    assert bes_holds([BOT], Atom("q"), frozenset(), SMALL).holds
