import pytest
from hypothesis import given
from strategies import formulas

from ptsbench.formula import (
    BOT,
    Atom,
    Conj,
    Disj,
    Impl,
    apply_substitution,
    atoms_of,
    is_harrop,
    neg,
    parse_formula,
    parse_sequent,
    parse_substitution,
    print_formula,
    print_sequent,
    size,
)
from ptsbench.syntax import ParseError

p, q, r = Atom("p"), Atom("q"), Atom("r")


def test_parse_examples():
    assert parse_formula("p") == p
    assert parse_formula("bot") == BOT
    assert parse_formula("(imp p (or q r))") == Impl(p, Disj(q, r))
    assert parse_formula("(and (imp p bot) q)") == Conj(neg(p), q)


@pytest.mark.parametrize("text", ["", "(imp p)", "(xor p q)", "(and p q r)", "(imp p q", "p q", "(imp p 1bad)"])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        parse_formula(text)


@given(formulas)
def test_print_parse_round_trip(f):
    assert parse_formula(print_formula(f)) == f


@given(formulas)
def test_identity_substitution(f):
    assert apply_substitution({}, f) == f


def test_substitution_is_simultaneous():
    s = {"p": q, "q": p}
    assert apply_substitution(s, Impl(p, q)) == Impl(q, p)
    assert apply_substitution({"p": Disj(p, q)}, Conj(p, BOT)) == Conj(Disj(p, q), BOT)


@given(formulas)
def test_substitution_preserves_shape(f):
    s = {"p": Disj(p, q), "q": p, "r": q}
    g = apply_substitution(s, f)
    assert atoms_of(g) <= {"p", "q"}
    assert size(g) >= size(f)


def test_harrop():
    assert is_harrop(Impl(Disj(p, q), r))
    assert not is_harrop(Impl(p, Disj(q, r)))
    assert is_harrop(Conj(p, Impl(q, r)))
    assert not is_harrop(Disj(p, q))


def test_sequents_round_trip():
    gamma, a = parse_sequent("(imp p q) , p ==> q")
    assert gamma == [Impl(p, q), p] and a == q
    assert parse_sequent(print_sequent(gamma, a)) == (gamma, a)
    assert parse_sequent("==> (imp p p)") == ([], Impl(p, p))
    with pytest.raises(ParseError):
        parse_sequent("p , q")
    with pytest.raises(ParseError):
        parse_sequent("p ==>")


def test_parse_substitution():
    assert parse_substitution("p=(or p q); q=p; r=q") == {"p": Disj(p, q), "q": p, "r": q}
    with pytest.raises(ParseError):
        parse_substitution("p:=q")
