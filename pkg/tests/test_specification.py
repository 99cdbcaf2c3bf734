import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpspec.interp import FourValuedInterp
from lpspec.specification import (
    Complement,
    Extensional,
    LeastModel,
    LevelError,
    SpecError,
    check_proper,
    encoded_models4,
    eval_spec_set,
    from_sets,
    level_less,
    make_I4_compl,
    make_I4_corr,
    parse_level_table,
    parse_spec,
    shortest_path_levels,
    spec_models,
)
from lpspec.syntax import Literal, NegatedQuery, parse_atom, parse_atoms, parse_program, parse_query
from lpspec.terms import Struct
from lpspec.universe import GroundUniverse
from conftest import corpus_path

A = [Struct(n) for n in "abcd"]


def names(atoms):
    return sorted(str(a) for a in atoms)


def test_set_algebra():
    u = GroundUniverse({("a", 0), ("b", 0)}, 1, {("p", 1), ("q", 1)})
    e = Extensional(tuple(parse_atoms("p(a), q(b)")))
    assert names(eval_spec_set(Complement(e, ("p", 1)), u)) == ["p(b)"]
    lm = LeastModel(parse_program("p(a). q(X) :- p(X)."))
    assert names(eval_spec_set(lm, u)) == ["p(a)", "q(a)"]


def test_least_model_generator_is_depth_bounded():
    u = GroundUniverse({("0", 0), ("s", 1)}, 3, {("n", 1)})
    lm = LeastModel(parse_program("n(0). n(s(X)) :- n(X)."))
    assert names(eval_spec_set(lm, u)) == ["n(0)", "n(s(0))", "n(s(s(0)))"]


def test_parse_odd_spec():
    text = open(corpus_path("odd.spec")).read()
    spec = parse_spec(text)
    u = spec.make_universe(parse_program("o(s(X)) :- not o(X)."))
    assert u.depth == 6
    es = spec.evaluate(u)
    assert names(es.snf) == ["o(s(0))", "o(s(s(s(0))))", "o(s(s(s(s(s(0))))))"]
    assert parse_atom("o(a)") in es.st and parse_atom("o(s(s(0)))") not in es.st
    assert es.is_proper
    assert spec.level.value(parse_atom("o(s(s(0)))")) == 3


def test_spec_errors_carry_lines():
    with pytest.raises(SpecError) as e:
        parse_spec("[snf]\nextensional { p(a). }\n[st]\nunion(nosuch)\n")
    assert e.value.line == 4
    with pytest.raises(SpecError):
        parse_spec("[snf]\nempty\n")


def test_level_table_and_shortest_paths():
    table = parse_level_table("p(a, b) 1\np(a, a) 0\n% comment\n")
    assert table[parse_atom("p(a,b)")] == 1
    a, b, c = (Struct(x) for x in "abc")
    levels = shortest_path_levels([(a, b), (b, a), (b, c)])
    assert levels[Struct("p", (a, c))] == 2
    assert Struct("p", (c, a)) not in levels


def test_level_order():
    assert level_less(1, 2) and level_less((0, 5), (1, 0))
    with pytest.raises(LevelError):
        level_less(1, (1, 2))


def test_path2_levels_file():
    from lpspec.specification import load_spec

    spec = load_spec(corpus_path("path2.spec"))
    assert spec.level.value(parse_atom("p(a, c)")) == 2
    assert spec.level.value(parse_atom("e(a, b)")) == 0
    assert not spec.level.defined(parse_atom("p(d, a)"))


def test_proper_and_interpretations():
    u = GroundUniverse({("a", 0), ("b", 0)}, 1, {("w", 1)})
    es = from_sets(parse_atoms("w(a), w(b)"), parse_atoms("w(b)"), u)
    pr = check_proper(es)
    assert not pr.proper and names(pr.witnesses) == ["w(a)"]
    corr = make_I4_corr(es)
    assert names(corr.true_set) == ["w(b)"] and corr.false_set == frozenset()
    compl = make_I4_compl(es)
    assert names(compl.false_set) == ["w(a)"]


atoms = st.sampled_from(A)


@settings(max_examples=200, derandomize=True)
@given(
    st.frozensets(atoms),
    st.frozensets(atoms),
    st.lists(st.tuples(atoms, st.booleans()), max_size=3),
    st.booleans(),
)
def test_primed_encoding_matches_four_valued(x, y, lits, negate):
    # X ∪ ¬(HB ∖ Y) ⊨₄ Q  iff  X ∪ Y′ ⊨ Q′ (and the ¬Q″ form for negations)
    hb = frozenset(A)
    interp = FourValuedInterp(x, hb - y)
    q = tuple(Literal(a, pos) for a, pos in lits)
    if negate:
        q = NegatedQuery(q)
    assert interp.models(q) == encoded_models4(x, y, q)


def test_spec_models_uses_st_and_snf():
    u = GroundUniverse({("a", 0)}, 1, {("p", 1), ("q", 1)})
    es = from_sets(parse_atoms("p(a)"), parse_atoms("p(a), q(a)"), u)
    assert spec_models(es, parse_query("q(a)"))
    assert spec_models(es, parse_query("not q(a)"))
    assert not spec_models(es, NegatedQuery(parse_query("p(a)")))
