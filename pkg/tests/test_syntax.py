import pytest

from lpspec.syntax import (
    ArityError,
    Literal,
    NegatedQuery,
    ParseError,
    PrimeError,
    Program,
    erase_primes,
    format_program,
    parse_atom,
    parse_clause,
    parse_program,
    parse_query,
    prime_transform,
)
from lpspec.terms import Struct


def test_parse_program_keeps_order_and_negation():
    p = parse_program("p(X) :- q(X), not r(X).\nq(a).\n% comment\nr(b).")
    assert len(p) == 3
    c = p.clauses[0]
    assert c.body[1] == Literal(parse_atom("r(X)"), False)
    assert str(c) == "p(X) :- q(X), not r(X)."
    assert parse_program(format_program(p)) == p


def test_anonymous_variables_are_distinct():
    c = parse_clause("m(E, [_|_]).")
    assert len(c.variables()) == 3


def test_parse_error_position():
    with pytest.raises(ParseError) as e:
        parse_program("p(a).\nq(b :- r.")
    assert e.value.line == 2
    assert e.value.column > 1


def test_arity_mismatch():
    with pytest.raises(ParseError, match="arity conflict"):
        parse_program("p(a). p(a, b).")
    with pytest.raises(ArityError):
        Program((parse_clause("p(a)."), parse_clause("p(a, b).")))


def test_query_and_lists():
    q = parse_query("p(a, [b, c | T]), not q")
    assert len(q) == 2
    assert q[1].negative
    assert parse_query("") == ()


def test_prime_transforms():
    c = parse_clause("p(X) :- q(X), not r(X).")
    neg = prime_transform(c, "negative")
    assert str(neg) == "p(X) :- q(X), not r'(X)."
    pos = prime_transform(c, "positive")
    assert str(pos) == "p'(X) :- q'(X), not r(X)."
    assert erase_primes(neg) == c
    nq = prime_transform(NegatedQuery(parse_query("a, not b")), "positive")
    assert str(nq) == "not (a', not b)"


def test_prime_twice_is_an_error():
    with pytest.raises(PrimeError):
        prime_transform(prime_transform(parse_clause("p :- not q."), "negative"), "negative")


def test_quoted_atoms():
    a = parse_atom('p("hello world")')
    assert a.args[0] == Struct("hello world")
    assert str(a) == 'p("hello world")'
