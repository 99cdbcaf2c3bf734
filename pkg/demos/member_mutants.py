"""List membership: the correct program, a covering instance, and two wrong choices.

    python3 demos/member_mutants.py
"""

from _corpus import path, read

from lpspec import Budget, build_main_tree, check_correctness_ks, covered, load_spec, parse_program
from lpspec.syntax import format_clause, parse_atom

spec = load_spec(path("member.spec"))
member = parse_program(read("member.pl"))
es = spec.evaluate(spec.make_universe(member))
print(f"HB at depth {es.depth} has {es.universe.hb_size()} atoms\n")

print(check_correctness_ks(es, member).describe(), "\n")

# A clause with a negative guard still covers m(a,[c,a]): the guarded atom
# m(a,[b]) lies outside St.
guard = parse_program(read("member_guard.pl"))
cov = covered(parse_atom("m(a, [c, a])"), guard.clauses[1], es)
print("covering instance:", format_clause(cov.instance), "\n")

# Wrong choice 1: a fact that covers everything, including atoms outside St.
bad_fact = parse_program(read("member_bad_fact.pl"))
print(check_correctness_ks(es, bad_fact, k=3).describe(), "\n")

# Wrong choice 2: correct and covering, but the tree for a false atom is infinite.
loop = parse_program(read("member_loop.pl"))
print("member_loop correct:", check_correctness_ks(es, loop).passed)
for depth in (8, 16, 32):
    tree = build_main_tree(loop, "m(a, [b])", Budget(max_depth=depth))
    print(f"  m(a,[b]) with depth budget {depth}: {tree.status}")
