import pytest
from hypothesis import given, settings
from strategies import rngs

from ptsbench.argstruct import ArgStructure, open_formulas
from ptsbench.atomic_system import Derivation, axiom, parse_base, rule
from ptsbench.bes import make_pool
from ptsbench.constructions import (
    FRAK_MARK,
    AtomicWitness,
    ConjunctionError,
    Hole,
    Lambda,
    MalformedConstruction,
    Tagged,
    UnsupportedFormula,
    fill,
    is_construction,
    is_construction_from,
    parse_term,
    print_term,
    random_split_input,
    split_formula,
    split_construction,
)
from ptsbench.formula import Atom, parse_formula
from ptsbench.generators import random_base
from ptsbench.syntax import ParseError

POOL = make_pool(("p", "q", "r"), 1, 1)
P_TO_Q = frozenset([rule(["p"], "q")])
SPLIT_IN = parse_formula("(imp p (or q r))")


def term(fixtures_dir, name):
    return parse_term((fixtures_dir / name).read_text())


def test_identity(fixtures_dir):
    k = term(fixtures_dir, "identity_p.term")
    assert is_construction(k, parse_formula("(imp p p)"), [], POOL).valid
    assert not is_construction(k, parse_formula("(imp p q)"), [], POOL).valid


def test_split_input_depends_on_the_base(fixtures_dir):
    k = term(fixtures_dir, "split_k_input.term")
    assert is_construction(k, SPLIT_IN, P_TO_Q, POOL).valid
    v = is_construction(k, SPLIT_IN, [], POOL)
    assert not v.valid and v.counterexample is not None


def test_split_construction_turns_marked_axiom_into_assumption(fixtures_dir):
    k1 = term(fixtures_dir, "split_k_input.term")
    k = split_construction(k1, P_TO_Q)
    assert isinstance(k, Tagged) and k.index == 1
    assert isinstance(k.inner, Lambda) and k.inner.atom == "p"
    body = k.inner.body.derivation
    assert isinstance(body, ArgStructure) and open_formulas(body) == {Atom("p")}
    assert is_construction(k, split_formula("p", "q", "r"), P_TO_Q, POOL).valid


def test_split_construction_without_using_the_input(fixtures_dir):
    k1 = term(fixtures_dir, "split_k_vacuous.term")
    base = frozenset([axiom("q")])
    k = split_construction(k1, base)
    assert isinstance(k.inner.body.derivation, Derivation)
    assert is_construction(k, split_formula("p", "q", "r"), base, POOL).valid


def test_split_constructioneeps_base_axiom_apart():
    # the base already has axiom p: only the marked application becomes an assumption
    base = frozenset([axiom("p"), rule(["p"], "q")])
    k1 = Lambda("p", Tagged(1, AtomicWitness(Derivation(rule(["p"], "q"), (Derivation(axiom("p")),)))))
    k = split_construction(k1, base)
    assert not isinstance(k.inner.body.derivation, ArgStructure)
    assert is_construction(k, split_formula("p", "q", "r"), base, POOL).valid


def test_split_construction_rejects_non_lambda():
    with pytest.raises(MalformedConstruction):
        split_construction(Tagged(1, Hole("p")), [])


def test_fragment_errors():
    with pytest.raises(ConjunctionError):
        is_construction(Hole("p"), parse_formula("(and p q)"), [])
    with pytest.raises(UnsupportedFormula):
        is_construction(Lambda("p", Hole("p")), parse_formula("(imp (imp p q) r)"), [])


def test_fill_and_shadowing():
    k = Lambda("q", Tagged(2, Hole("p")))
    w = AtomicWitness(Derivation(axiom("p")))
    assert fill(k, "p", w) == Lambda("q", Tagged(2, w))
    # a lambda over the same atom shadows its holes
    assert fill(Lambda("p", Hole("p")), "p", w) == Lambda("p", Hole("p"))


def test_construction_from_inputs():
    k = Tagged(1, AtomicWitness(Derivation(rule(["p"], "q"), (Derivation(axiom("p")),))))
    assert not is_construction_from(k, ["p"], parse_formula("(or q r)"), [], POOL).valid
    hole = parse_term("(tag 1 (der (by (rule (p) => q) (hole p))))")
    assert is_construction_from(hole, ["p"], parse_formula("(or q r)"), P_TO_Q, POOL).valid


def test_term_round_trip(fixtures_dir):
    for name in ("identity_p.term", "split_k_input.term", "split_k_vacuous.term"):
        k = term(fixtures_dir, name)
        assert parse_term(print_term(k)) == k
    k = split_construction(term(fixtures_dir, "split_k_input.term"), P_TO_Q)
    assert parse_term(print_term(k)) == k
    with pytest.raises(ParseError):
        parse_term("(tag 3 (hole p))")
    with pytest.raises(ParseError):
        parse_term("(lam p)")


@settings(max_examples=40, deadline=None)
@given(rngs)
def test_split_construction_on_generated_inputs(rng):
    base = random_base(rng, 3, max_level=1)
    k1 = random_split_input(rng, base)
    if k1 is None or not is_construction(k1, SPLIT_IN, base, POOL).valid:
        return
    k = split_construction(k1, base)
    assert is_construction(k, split_formula("p", "q", "r"), base, POOL).valid
    assert not any(
        isinstance(n, Derivation) and n.mark == FRAK_MARK
        for _, n in (k.inner.body.derivation.nodes() if isinstance(k.inner.body.derivation, Derivation) else [])
    )
