import itertools

import pytest
from hypothesis import given, settings

from lpspec.syntax import parse_atom, parse_clause, parse_program
from lpspec.terms import Struct
from lpspec.universe import (
    AtomIndex,
    EnumSort,
    GroundUniverse,
    ListSort,
    UniverseTooLarge,
    ground_program,
    instances,
)
from strategies import datalog_programs


def test_hu_levels():
    u = GroundUniverse({("0", 0), ("s", 1)}, 3)
    assert [str(t) for t in u.hu()] == ["0", "s(0)", "s(s(0))"]
    assert u.hu_size() == 3
    assert u.hu_size(1) == 1


def test_hu_with_pairs():
    u = GroundUniverse({("a", 0), ("f", 2)}, 2)
    assert len(u.hu()) == 2  # a, f(a,a)
    assert u.hu_size(3) == 2  # clipped at the depth bound


def test_depth_must_be_positive():
    with pytest.raises(ValueError):
        GroundUniverse({("a", 0)}, 0)


def test_contains_atom_respects_depth_and_alphabet():
    u = GroundUniverse({("0", 0), ("s", 1)}, 2, {("n", 1)})
    assert u.contains_atom(parse_atom("n(s(0))"))
    assert not u.contains_atom(parse_atom("n(s(s(0)))"))
    assert not u.contains_atom(parse_atom("n(a)"))
    assert not u.contains_atom(parse_atom("m(0)"))


def test_typed_sorts():
    u = GroundUniverse(
        {("a", 0), ("b", 0)},
        4,
        {("p", 1)},
        sorts={"node": EnumSort([Struct("a"), Struct("b")]), "l": ListSort("node", 2)},
        signatures={("p", 1): ("l",)},
    )
    atoms = [str(x) for x in u.atoms(("p", 1))]
    assert len(atoms) == 1 + 2 + 4
    assert "p([])" in atoms and "p([a,b])" in atoms


def test_cap():
    u = GroundUniverse({("a", 0), ("f", 2)}, 6, cap=1000)
    with pytest.raises(UniverseTooLarge):
        u.hu()


def test_ground_program_counts():
    p = parse_program("p(X, Y) :- q(X), not q(Y).\nq(a).")
    u = GroundUniverse.for_program(p, 1, functions={("b", 0)})
    gp = ground_program(p, u)
    assert len(gp) == 4 + 1
    assert all(c.is_ground for c in gp)


def test_instances_with_head_and_sources():
    c = parse_clause("p(X, Z) :- e(X, Y), p(Y, Z).")
    u = GroundUniverse({("a", 0), ("b", 0), ("c", 0)}, 1, {("p", 2), ("e", 2)})
    src = AtomIndex([parse_atom(s) for s in ("e(a,b)", "e(b,c)", "p(b,c)", "p(c,c)")])
    got = [str(i) for i in instances(c, u, head=parse_atom("p(a,c)"), sources=src)]
    assert got == ["p(a,c) :- e(a,b), p(b,c)."]


@settings(max_examples=100, derandomize=True, deadline=None)
@given(datalog_programs(max_clauses=3))
def test_join_agrees_with_enumeration(prog):
    u = GroundUniverse.for_program(prog, 1, functions={("a", 0), ("b", 0)})
    hb = list(u.herbrand_base())
    src = frozenset(a for i, a in enumerate(hb) if i % 2 == 0)
    idx = AtomIndex(src)
    for c in prog.clauses:
        full = [i for i in instances(c, u) if all(l.atom in src for l in i.body if l.positive)]
        joined = list(instances(c, u, sources=idx))
        assert sorted(map(str, full)) == sorted(map(str, joined))
        for h in hb:
            by_head = sorted(str(i) for i in instances(c, u, head=h))
            assert by_head == sorted(str(i) for i in instances(c, u) if i.head == h)


def test_herbrand_base_is_product():
    u = GroundUniverse({("a", 0), ("b", 0)}, 1, {("e", 2)})
    assert set(u.herbrand_base()) == {
        Struct("e", (Struct(x), Struct(y))) for x, y in itertools.product("ab", repeat=2)
    }
