import itertools

import pytest

from lpspec.checker import (
    FAIL,
    FAIL_AT_DEPTH,
    PASS,
    Verdict,
    check_correctness_ks,
    check_correctness_wfs,
    check_coverage,
    check_primed_model,
    check_stable_proposition,
    clause_satisfied,
    covered,
    covered_by_program,
)
from lpspec.specification import from_sets, load_spec
from lpspec.syntax import parse_atom, parse_clause, parse_program
from lpspec.terms import Struct, mklist
from lpspec.universe import GroundUniverse
from conftest import corpus_path


def test_verdict_invariants():
    with pytest.raises(ValueError):
        Verdict("x", FAIL)


def test_member_passes(corpus):
    p, es = corpus("member.pl", "member.spec")
    rep = check_correctness_ks(es, p)
    assert rep.condition1.status == PASS and rep.condition2.status == PASS


def test_member_guard_witness(corpus):
    p, es = corpus("member_guard.pl", "member.spec")
    cov = covered(parse_atom("m(a, [c, a])"), p.clauses[1], es)
    assert cov.covered
    assert str(cov.instance) == "m(a,[c,a]) :- m(a,[a]), not m(a,[b])."


def test_member_bad_fact(corpus):
    p, es = corpus("member_bad_fact.pl", "member.spec")
    v = check_primed_model(es, p)
    assert v.status == FAIL
    texts = [w.text for w in v.witnesses]
    assert texts[0] == "m([],[a])."
    assert "m(a,[b])." in texts
    assert len(texts) == 5 and v.violations > 5


def test_primed_model_counts_only_premises(corpus):
    p, es = corpus("odd.pl", "odd.spec")
    v = check_primed_model(es, p)
    assert v.status == PASS
    # every instance o(s(t)) :- not o(t) with o(t) ∉ Snf
    assert v.checked == 8


def test_clause_satisfied():
    u = GroundUniverse({("a", 0)}, 1, {("p", 0), ("q", 0)})
    es = from_sets([], [Struct("q")], u)
    assert clause_satisfied(es, parse_clause("q :- p."))
    assert not clause_satisfied(es, parse_clause("p :- not q."))


def test_cycles(corpus):
    p, es = corpus("cycles.pl", "cycles.spec")
    assert check_correctness_ks(es, p).passed


def test_odd_coverage_fail_at_depth():
    # with Snf taken from a deeper universe, o(s^5(0)) needs o(s^4(0)) ∉ St
    spec = load_spec(corpus_path("odd.spec"))
    p = parse_program("o(s(X)) :- not o(X).")
    es = spec.evaluate(spec.make_universe(p, 6))
    assert check_coverage(es, p).passed


def test_path_ks(corpus):
    p, es = corpus("path.pl", "path.spec")
    rep = check_correctness_ks(es, p)
    assert rep.passed, rep.describe()


def test_path_c20_fails(corpus):
    p, es = corpus("path_c20.pl", "path.spec")
    v = check_primed_model(es, p)
    assert v.status == FAIL
    assert v.witnesses[0].text == "p(a,b,[a,b],[b]) :- e(a,b), p(b,b,[b],[a,b])."


def _simple_paths(edges, nodes, max_len):
    out = []
    for n in range(1, max_len + 1):
        for path in itertools.permutations(nodes, n):
            if all((x, y) in edges for x, y in zip(path, path[1:])):
                out.append(path)
    return out


def test_literal_bypass_definition_leaves_an_atom_uncovered(corpus):
    # "bypasses" read as: no interior node of the path is in u.  Then
    # p(a,b,[a,b],[b]) is in Snf but no clause instance covers it.
    p, es = corpus("path.pl", "path.spec")
    u = es.universe
    nodes = "abcd"
    edges = {("a", "b"), ("b", "a"), ("a", "c"), ("b", "c"), ("c", "d")}
    lists = [x for n in range(5) for x in itertools.product(nodes, repeat=n)]
    snf = set(a for a in es.snf if a.functor != "p")
    for path in _simple_paths(edges, nodes, 4):
        interior = set(path[1:-1])
        for avoid in lists:
            if interior.isdisjoint(avoid):
                atom = Struct(
                    "p",
                    (
                        Struct(path[0]),
                        Struct(path[-1]),
                        mklist([Struct(x) for x in path]),
                        mklist([Struct(x) for x in avoid]),
                    ),
                )
                if u.contains_atom(atom):
                    snf.add(atom)
    literal = from_sets(snf, es.st | snf, u)
    target = parse_atom("p(a, b, [a, b], [b])")
    assert target in literal.snf
    assert not covered_by_program(target, p, literal).covered
    v = check_coverage(literal, p, k=50)
    assert "p(a,b,[a,b],[b])" in [w.text for w in v.witnesses]


def test_path2_wfs_and_flat_levels(corpus):
    p, es = corpus("path2.pl", "path2.spec")
    assert check_correctness_wfs(es, p).passed
    p, flat = corpus("path2.pl", "path2_flat.spec")
    rep = check_correctness_wfs(flat, p)
    assert rep.condition1.passed and rep.condition2.status == FAIL
    assert any(w.kind == "level" for w in rep.condition2.witnesses)
    # the same spec is fine under KS: the level condition is what fails
    assert check_correctness_ks(flat, p).passed


def test_win_wfs(corpus):
    p, es = corpus("win.pl", "win.spec")
    assert check_correctness_wfs(es, p).passed
    assert not es.is_proper


def test_win_ks_fails_coverage_without_levels(corpus):
    # w(c) :- mov(c, d), not w(d) covers w(c) under KS too
    p, es = corpus("win.pl", "win.spec")
    assert check_correctness_ks(es, p).passed


def test_fail_at_depth_annotation():
    p = parse_program("n(0). n(s(X)) :- n(s(s(X))).")
    u2 = GroundUniverse.for_program(p, 2)
    u3 = GroundUniverse.for_program(p, 3)
    snf = [parse_atom("n(s(0))"), parse_atom("n(s(s(0)))")]
    es = from_sets(snf, snf, u2)
    deeper = from_sets(snf, snf, u3)
    v = check_coverage(es, p, deeper=deeper)
    assert v.status == FAIL
    assert [w.note for w in v.witnesses] == [FAIL_AT_DEPTH]


def test_stable_proposition_examples(corpus):
    p, es = corpus("two_choice.pl", "two_choice.spec")
    rep = check_stable_proposition(es, p)
    assert rep.passed and len(rep.models) == 2
    for spec in ("cycle3_a.spec", "cycle3_ab.spec"):
        p, es = corpus("cycle3.pl", spec)
        assert check_stable_proposition(es, p).passed


def test_stable_proposition_inconclusive():
    p = parse_program("a :- not b. b :- not a.")
    u = GroundUniverse.for_program(p, 1)
    es = from_sets([Struct("a")], [], u)
    rep = check_stable_proposition(es, p)
    assert rep.status == "inconclusive"
