"""Odd numbers with negation: a static check, then SLDNF trees that agree with it.

    python3 demos/odd_numbers.py
"""

from _corpus import path, read

from lpspec import (
    build_main_tree,
    check_correctness_ks,
    check_semi_completeness_empirical,
    load_spec,
    parse_program,
)

program = parse_program(read("odd.pl"))
spec = load_spec(path("odd.spec"))
print(read("odd.pl"))

# The spec is evaluated inside HB(6): numerals up to s^5(0), plus terms over a.
es = spec.evaluate(spec.make_universe(program))
print(f"Snf has {len(es.snf)} atoms, St has {len(es.st)} atoms, at depth {es.depth}\n")

report = check_correctness_ks(es, program)
print(report.describe(), "\n")

# The check implies every ground query that has a finite, flounder-free
# tree gets the answer the spec predicts.  Here every tree is finite.
tree = build_main_tree(program, "o(s(s(s(0))))")
print(tree.to_text())
print("status:", tree.status, "\n")

semi = check_semi_completeness_empirical(es, program)
print(semi.describe())
