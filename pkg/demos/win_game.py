"""A game with a drawn cycle: well-founded checking and SLS trees.

    python3 demos/win_game.py
"""

from _corpus import path, read

from lpspec import (
    GroundUniverse,
    build_main_tree,
    check_correctness_wfs,
    check_semi_completeness_empirical,
    ground_program,
    load_spec,
    parse_program,
    well_founded_model,
)
from lpspec.specification import check_proper
from lpspec.syntax import parse_atom

program = parse_program(read("win.pl"))
spec = load_spec(path("win.spec"))
es = spec.evaluate(spec.make_universe(program))
print(read("win.pl"))

print(check_correctness_wfs(es, program).describe(), "\n")

# Snf is larger than St here: a and b are neither won nor lost.
proper = check_proper(es)
print("proper:", proper.proper, "atoms in Snf but not in St:", ", ".join(map(str, proper.witnesses)), "\n")

u = GroundUniverse.for_program(program, 1).with_predicates(program.predicates)
wf = well_founded_model(ground_program(program, u), u.herbrand_base())
for x in "abcd":
    atom = f"w({x})"
    tree = build_main_tree(program, atom, semantics="sls", universe=u)
    print(f"{atom}: well-founded value {wf.value(parse_atom(atom)).name}, SLS tree {tree.status}")
print()

semi = check_semi_completeness_empirical(es, program, semantics="sls", allow_nonproper=True)
print(semi.describe())
