import pickle

from hypothesis import given, settings
from hypothesis import strategies as st

from lpspec.syntax import parse_term
from lpspec.terms import (
    Struct,
    Var,
    apply,
    format_term,
    list_items,
    match,
    mklist,
    rename,
    resolve,
    term_key,
    term_size,
    unify,
    variables,
)

X, Y, Z = Var("X"), Var("Y"), Var("Z")
a, b = Struct("a"), Struct("b")


def f(*args):
    return Struct("f", args)


def test_depth_and_size():
    assert a.depth == 1
    assert f(a).depth == 2
    assert f(a, f(b)).depth == 3
    assert term_size(f(a, f(b))) == 4
    assert not f(X).is_ground


def test_equal_terms_are_shared():
    assert f(a, b) is f(a, b)
    assert Var("Q") is Var("Q")
    assert f(a) == pickle.loads(pickle.dumps(f(a)))


def test_unify_and_occurs_check():
    s = unify(f(X, b), f(a, Y))
    assert apply(f(X, Y), s) == f(a, b)
    assert unify(X, f(X)) is None
    assert unify(f(X, X), f(a, b)) is None
    assert unify(a, b) is None


def test_unify_prefers_binding_renamed_variables():
    fresh = Var("X#1")
    s = unify(X, fresh)
    assert s == {fresh: X}


def test_resolve_is_idempotent():
    s = unify(f(X, Y), f(Y, f(Z)))
    r = resolve(s, [X, Y])
    assert r[X] == f(Z) and r[Y] == f(Z)


def test_match_is_one_way():
    assert match(f(X, X), f(a, a), {}) == {X: a}
    assert match(f(X, X), f(a, b), {}) is None


def test_lists():
    lst = mklist([a, b])
    assert list_items(lst) == [a, b]
    assert format_term(lst) == "[a,b]"
    assert format_term(mklist([a], X)) == "[a|X]"


def test_rename_fresh():
    counter = iter(range(100))
    t = rename(f(X, Y, X), {}, lambda v: Var(f"{v.name}#{next(counter)}"))
    assert t == f(Var("X#0"), Var("Y#1"), Var("X#0"))


def test_term_key_orders_variables_first():
    assert sorted([f(a), X, a], key=term_key) == [X, a, f(a)]


terms = st.recursive(
    st.sampled_from([a, b, X, Y, Struct("[]")]),
    lambda kids: st.builds(lambda x, y: Struct("g", (x, y)), kids, kids) | st.builds(mklist, st.lists(kids, max_size=3)),
    max_leaves=8,
)


@settings(max_examples=200, derandomize=True)
@given(terms)
def test_format_parse_roundtrip(t):
    assert parse_term(format_term(t)) == t


@settings(max_examples=200, derandomize=True)
@given(terms, terms)
def test_unifier_unifies(s, t):
    u = unify(s, t)
    if u is not None:
        assert apply(s, u) == apply(t, u)
    for v in variables(s):
        assert isinstance(v, Var)
