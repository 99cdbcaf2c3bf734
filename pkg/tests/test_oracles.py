import pytest

from lpspec.oracles import (
    NotDefinite,
    StableCapExceeded,
    bottom_up_model,
    fitting_fixpoint,
    gl_reduct,
    is_stable,
    least_model,
    stable_models,
    well_founded_model,
)
from lpspec.syntax import parse_atom, parse_program
from lpspec.universe import GroundUniverse, ground_program


def gp(text, depth=1, **kw):
    p = parse_program(text)
    u = GroundUniverse.for_program(p, depth, **kw)
    return ground_program(p, u), list(u.herbrand_base())


def names(atoms):
    return sorted(str(a) for a in atoms)


def test_least_model():
    g, _ = gp("p(a). q(X) :- p(X). r :- q(b).")
    assert names(least_model(g)) == ["p(a)", "q(a)"]
    with pytest.raises(NotDefinite):
        least_model(gp("p :- not q.")[0])


def test_fitting_cycles():
    g, hb = gp(
        "e(a,b). e(b,a). p(X,Y) :- e(X,Y). p(X,Z) :- e(X,Y), p(Y,Z).",
        functions={("c", 0)},
    )
    fit = fitting_fixpoint(g, hb).interp
    val = lambda s: fit.value(parse_atom(s))
    assert str(val("p(a,b)")) == "t"
    assert str(val("p(c,a)")) == "f"
    assert str(val("p(a,c)")) == "u"


def test_wf_win():
    g, hb = gp("w(X) :- mov(X, Y), not w(Y). mov(a, b). mov(b, a). mov(c, d).")
    wf = well_founded_model(g, hb)
    assert "w(c)" in names(wf.true_set)
    assert "w(d)" in names(wf.false_set)
    assert names(wf.undefined(hb)) == ["w(a)", "w(b)"]


def test_wf_positive_loop_is_false():
    g, hb = gp("a :- a.")
    assert names(well_founded_model(g, hb).false_set) == ["a"]
    assert fitting_fixpoint(g, hb).interp.undefined(hb) == [parse_atom("a")]


def test_stable_models():
    g, hb = gp("a :- not b. b :- not a.")
    assert [names(m) for m in stable_models(g, hb)] == [["a"], ["b"]]
    g, hb = gp("a :- not b. b :- not c. c :- not a.")
    assert stable_models(g, hb) == []
    g, _ = gp("a :- not b. b :- not a.")
    assert is_stable(g, [parse_atom("a")])
    assert [str(c) for c in gl_reduct(g, [parse_atom("a")])] == ["a."]


def test_stable_cap():
    text = " ".join(f"a{i} :- not b{i}. b{i} :- not a{i}." for i in range(4))
    g, hb = gp(text)
    with pytest.raises(StableCapExceeded):
        stable_models(g, hb, cap=6)


def test_bottom_up_matches_grounding():
    p = parse_program("nat(0). nat(s(X)) :- nat(X). even(0). even(s(s(X))) :- even(X).")
    u = GroundUniverse.for_program(p, 5)
    assert bottom_up_model(p, u) == least_model(ground_program(p, u))
