"""Sufficient conditions for correctness of normal programs.

Under Kunen's semantics a program is correct w.r.t. (Snf, St) if

1. ``St ∪ Snf′ ⊨ P′``: for every ground clause instance whose positive body
   atoms are in St and whose negated atoms are outside Snf, the head is in
   St; and
2. every atom of Snf is *covered*: it is the head of a ground instance whose
   positive body atoms are in Snf and whose negated atoms are outside St.

Under the well-founded semantics condition 2 additionally requires the
positive body atoms of the covering instance to have a strictly smaller
level than the head.  All quantifiers range over HU(d)/HB(d).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Optional

from .oracles import DEFAULT_STABLE_CAP, stable_models
from .specification import (
    DEFAULT_WITNESS_CAP,
    EvaluatedSpec,
    LevelMap,
    level_less,
)
from .syntax import Clause, Program, format_clause
from .terms import Struct, term_key, term_size
from .universe import AtomIndex, GroundUniverse, ground_program, instances

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

FAIL_AT_DEPTH = "fail-at-depth"


@dataclass(frozen=True)
class Witness:
    """One counterexample: a clause instance, an uncovered atom, or a stable model."""

    kind: str
    text: str
    key: tuple = field(compare=False, repr=False)
    clause: Optional[int] = None
    note: Optional[str] = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "text": self.text}
        if self.clause is not None:
            out["clause"] = self.clause
        if self.note is not None:
            out["note"] = self.note
        return out

    def __str__(self):
        extra = f" [{self.note}]" if self.note else ""
        where = f" (clause {self.clause + 1})" if self.clause is not None else ""
        return f"{self.text}{where}{extra}"


def _atom_key(a: Struct) -> tuple:
    return (term_size(a), term_key(a))


def _instance_key(c: Clause) -> tuple:
    return (_atom_key(c.head), tuple(_atom_key(l.atom) for l in c.body))


@dataclass(frozen=True)
class Verdict:
    condition: str
    status: str
    witnesses: tuple = ()
    depth: int = 0
    checked: int = 0
    violations: int = 0
    message: str = ""

    def __post_init__(self):
        if self.status == FAIL and not self.witnesses:
            raise ValueError("a failing verdict needs a witness")
        if self.status == PASS and self.witnesses:
            raise ValueError("a passing verdict has no witnesses")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "status": self.status,
            "depth": self.depth,
            "checked": self.checked,
            "violations": self.violations,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "message": self.message,
        }

    def describe(self) -> str:
        lines = [f"{self.condition}: {self.status} (depth {self.depth}, {self.checked} checked)"]
        if self.message:
            lines.append(f"  {self.message}")
        for w in self.witnesses:
            lines.append(f"  witness: {w}")
        if self.violations > len(self.witnesses):
            lines.append(f"  ... {self.violations - len(self.witnesses)} more")
        return "\n".join(lines)


def _combine(statuses) -> str:
    statuses = list(statuses)
    if any(s == FAIL for s in statuses):
        return FAIL
    if any(s == INCONCLUSIVE for s in statuses):
        return INCONCLUSIVE
    return PASS


# -- condition 1 -----------------------------------------------------------------


def primed_model_violations(spec: EvaluatedSpec, program: Program, counter: Optional[list] = None):
    """Yield ``(clause_index, instance)`` for instances violating ``St ∪ Snf′ ⊨ C′``.

    Such an instance has its positive body atoms in St, its negated atoms
    outside Snf and its head outside St.  Instances are found by joining
    positive body literals against St, so only candidates whose premise can
    hold are considered; ``counter[0]`` is increased by the number of
    instances whose premise holds.
    """
    u = spec.universe.with_predicates(program.predicates)
    snf, st = spec.snf, spec.st
    # witnesses are ranked afterwards, so candidate order does not matter
    st_index = AtomIndex(st, ordered=False)
    if counter is None:
        counter = [0]

    def keep(head, negated):
        for a in negated:
            if a in snf:
                return False
        counter[0] += 1
        return head not in st

    for ci, clause in enumerate(program.clauses):
        for inst in instances(clause, u, sources=st_index, keep=keep):
            yield ci, inst


def check_primed_model(
    spec: EvaluatedSpec, program: Program, k: int = DEFAULT_WITNESS_CAP
) -> Verdict:
    """Condition ``St ∪ Snf′ ⊨ P′`` over the ground instances in HU(d)."""
    counter = [0]
    bad = list(primed_model_violations(spec, program, counter))
    top = heapq.nsmallest(k, bad, key=lambda x: (_instance_key(x[1]), x[0]))
    witnesses = tuple(
        Witness("instance", format_clause(inst), _instance_key(inst), ci) for ci, inst in top
    )
    return Verdict(
        "primed-model",
        FAIL if bad else PASS,
        witnesses,
        spec.depth,
        counter[0],
        len(bad),
        "St ∪ Snf′ ⊨ P′" + ("" if not bad else " fails"),
    )


def clause_satisfied(spec: EvaluatedSpec, instance: Clause) -> bool:
    """Whether one ground instance satisfies ``St ∪ Snf′ ⊨ C′``."""
    premise = all(
        (l.atom in spec.st) if l.positive else (l.atom not in spec.snf) for l in instance.body
    )
    return not premise or instance.head in spec.st


# -- coverage --------------------------------------------------------------------


@dataclass(frozen=True)
class Coverage:
    atom: Struct
    covered: bool
    instance: Optional[Clause] = None
    clause: Optional[int] = None
    # a covering instance exists but none with decreasing levels
    level_blocked: Optional[Clause] = None

    def __bool__(self):
        return self.covered


def _covering_instances(a: Struct, clause: Clause, spec: EvaluatedSpec, u: GroundUniverse, index):
    for inst in instances(clause, u, head=a, sources=index):
        if all(l.atom not in spec.st for l in inst.body if l.negative):
            yield inst


def _levels_decrease(inst: Clause, level: LevelMap) -> bool:
    top = level.value(inst.head)
    return all(level_less(level.value(l.atom), top) for l in inst.body if l.positive)


def covered(
    a: Struct,
    clause: Clause,
    spec: EvaluatedSpec,
    u: Optional[GroundUniverse] = None,
    level: Optional[LevelMap] = None,
    *,
    _index=None,
) -> Coverage:
    """Is ``a`` covered by ``clause`` w.r.t. ``spec``?

    Searches ground instances with head ``a`` (matching the head first, then
    joining positive body literals against Snf) whose negated atoms lie
    outside St.  With ``level`` given, the positive body atoms must also have
    strictly smaller level than ``a``.  Returns the first witness instance
    in the deterministic enumeration order.
    """
    u = (u or spec.universe).with_predicates({x.indicator for x in clause.atoms()})
    index = _index if _index is not None else AtomIndex(spec.snf)
    blocked = None
    for inst in _covering_instances(a, clause, spec, u, index):
        if level is None or _levels_decrease(inst, level):
            return Coverage(a, True, inst)
        if blocked is None:
            blocked = inst
    return Coverage(a, False, None, None, blocked)


def covered_by_program(
    a: Struct,
    program: Program,
    spec: EvaluatedSpec,
    level: Optional[LevelMap] = None,
    *,
    _index=None,
) -> Coverage:
    u = spec.universe.with_predicates(program.predicates)
    index = _index if _index is not None else AtomIndex(spec.snf)
    blocked = None
    for ci, clause in program.procedure(a.indicator):
        c = covered(a, clause, spec, u, level, _index=index)
        if c.covered:
            return Coverage(a, True, c.instance, ci)
        if blocked is None and c.level_blocked is not None:
            blocked = c.level_blocked
    return Coverage(a, False, None, None, blocked)


def _coverage_verdict(
    condition: str,
    spec: EvaluatedSpec,
    program: Program,
    level: Optional[LevelMap],
    k: int,
    deeper: Optional[EvaluatedSpec],
) -> Verdict:
    index = AtomIndex(spec.snf)
    deeper_index = AtomIndex(deeper.snf) if deeper is not None else None
    bad = []
    for a in sorted(spec.snf, key=_atom_key):
        cov = covered_by_program(a, program, spec, level, _index=index)
        if cov.covered:
            continue
        note = None
        if deeper is not None and a in deeper.snf:
            if covered_by_program(a, program, deeper, level, _index=deeper_index).covered:
                note = FAIL_AT_DEPTH
        if cov.level_blocked is not None:
            text = f"{a}: covering instance without level decrease: {format_clause(cov.level_blocked)}"
            bad.append(Witness("level", text, _atom_key(a), None, note))
        else:
            bad.append(Witness("uncovered", str(a), _atom_key(a), None, note))
    witnesses = tuple(bad[:k])
    if level is None:
        msg = "every atom of Snf is covered"
    else:
        msg = "every atom of Snf is covered with decreasing levels"
    if bad:
        msg = msg.replace("every atom", "not every atom")
        if all(w.note == FAIL_AT_DEPTH for w in bad):
            msg += "; all failures are due to the depth bound"
    return Verdict(condition, FAIL if bad else PASS, witnesses, spec.depth, len(spec.snf), len(bad), msg)


def check_coverage(
    spec: EvaluatedSpec,
    program: Program,
    k: int = DEFAULT_WITNESS_CAP,
    deeper: Optional[EvaluatedSpec] = None,
) -> Verdict:
    """Every atom of Snf is covered by some clause of ``program``.

    ``deeper`` is the same spec evaluated one level deeper; when given,
    atoms that become covered there are annotated ``fail-at-depth``.
    """
    return _coverage_verdict("coverage", spec, program, None, k, deeper)


def check_level_coverage(
    spec: EvaluatedSpec,
    program: Program,
    level: LevelMap,
    k: int = DEFAULT_WITNESS_CAP,
    deeper: Optional[EvaluatedSpec] = None,
) -> Verdict:
    return _coverage_verdict("level-coverage", spec, program, level, k, deeper)


# -- the two theorems ---------------------------------------------------------------


@dataclass(frozen=True)
class CorrectnessReport:
    semantics: str
    condition1: Verdict
    condition2: Verdict
    depth: int
    note: str = ""

    @property
    def overall(self) -> str:
        return _combine([self.condition1.status, self.condition2.status])

    @property
    def passed(self) -> bool:
        return self.overall == PASS

    def to_dict(self) -> dict:
        return {
            "semantics": self.semantics,
            "depth": self.depth,
            "overall": self.overall,
            "condition1": self.condition1.to_dict(),
            "condition2": self.condition2.to_dict(),
            "note": self.note,
        }

    def describe(self) -> str:
        lines = [
            f"correctness under {self.semantics.upper()} at depth {self.depth}: {self.overall}",
            self.condition1.describe(),
            self.condition2.describe(),
        ]
        if self.note:
            lines.append(self.note)
        return "\n".join(lines)


def check_correctness_ks(
    spec: EvaluatedSpec,
    program: Program,
    k: int = DEFAULT_WITNESS_CAP,
    deeper: Optional[EvaluatedSpec] = None,
) -> CorrectnessReport:
    c1 = check_primed_model(spec, program, k)
    c2 = check_coverage(spec, program, k, deeper)
    note = ""
    if c1.passed and c2.passed:
        note = (
            f"correct w.r.t. the spec under KS at depth {spec.depth}; "
            "hence SLDNF-semi-complete for ground queries"
        )
    return CorrectnessReport("ks", c1, c2, spec.depth, note)


def check_correctness_wfs(
    spec: EvaluatedSpec,
    program: Program,
    level: Optional[LevelMap] = None,
    k: int = DEFAULT_WITNESS_CAP,
    deeper: Optional[EvaluatedSpec] = None,
) -> CorrectnessReport:
    level = level if level is not None else spec.level
    if level is None:
        raise ValueError("the well-founded check needs a level mapping")
    c1 = check_primed_model(spec, program, k)
    c2 = check_level_coverage(spec, program, level, k, deeper)
    note = ""
    if c1.passed and c2.passed:
        note = (
            f"correct w.r.t. the spec under WFS at depth {spec.depth}; "
            "hence SLS-semi-complete for ground queries"
        )
    return CorrectnessReport("wfs", c1, c2, spec.depth, note)


# -- stable models ----------------------------------------------------------------------


@dataclass(frozen=True)
class StableReport:
    status: str
    primed_model: Verdict
    models: tuple = ()
    # per model: (contains Snf, contained in St)
    instances: tuple = ()
    witnesses: tuple = ()
    depth: int = 0
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "depth": self.depth,
            "primed_model": self.primed_model.to_dict(),
            "models": [
                {
                    "atoms": [str(a) for a in sorted(m, key=term_key)],
                    "snf_subset": pre,
                    "st_superset": post,
                }
                for m, (pre, post) in zip(self.models, self.instances)
            ],
            "witnesses": [w.to_dict() for w in self.witnesses],
            "message": self.message,
        }

    def describe(self) -> str:
        lines = [f"stable-model proposition at depth {self.depth}: {self.status}"]
        if self.message:
            lines.append(f"  {self.message}")
        if not self.models and self.status != INCONCLUSIVE:
            lines.append("  no stable models")
        for m, (pre, post) in zip(self.models, self.instances):
            body = ", ".join(str(a) for a in sorted(m, key=term_key))
            lines.append(f"  model {{{body}}}: Snf ⊆ I is {pre}, I ⊆ St is {post}")
        for w in self.witnesses:
            lines.append(f"  witness: {w}")
        return "\n".join(lines)


def check_stable_proposition(
    spec: EvaluatedSpec,
    program: Program,
    cap: int = DEFAULT_STABLE_CAP,
    k: int = DEFAULT_WITNESS_CAP,
) -> StableReport:
    """If ``St ∪ Snf′ ⊨ P′`` then every stable model containing Snf is contained in St."""
    c1 = check_primed_model(spec, program, k)
    if not c1.passed:
        return StableReport(
            INCONCLUSIVE,
            c1,
            depth=spec.depth,
            message="hypothesis St ∪ Snf′ ⊨ P′ does not hold",
        )
    u = spec.universe.with_predicates(program.predicates)
    gp = ground_program(program, u)
    models = stable_models(gp, u.herbrand_base(), cap=cap)
    rows = []
    bad = []
    for m in models:
        pre = spec.snf <= m
        post = m <= spec.st
        rows.append((pre, post))
        if pre and not post:
            extra = sorted(m - spec.st, key=term_key)
            text = "{" + ", ".join(map(str, sorted(m, key=term_key))) + "} ⊄ St: " + ", ".join(map(str, extra))
            bad.append(Witness("model", text, tuple(term_key(a) for a in sorted(m, key=term_key))))
    status = FAIL if bad else PASS
    return StableReport(
        status,
        c1,
        tuple(models),
        tuple(rows),
        tuple(bad[:k]),
        spec.depth,
        f"{len(models)} stable model(s) checked",
    )


def stable_models_of(program: Program, u: GroundUniverse, cap: int = DEFAULT_STABLE_CAP) -> list:
    u = u.with_predicates(program.predicates)
    return stable_models(ground_program(program, u), u.herbrand_base(), cap=cap)


__all__ = [
    "PASS",
    "FAIL",
    "INCONCLUSIVE",
    "FAIL_AT_DEPTH",
    "Witness",
    "Verdict",
    "Coverage",
    "CorrectnessReport",
    "StableReport",
    "check_primed_model",
    "clause_satisfied",
    "covered",
    "covered_by_program",
    "check_coverage",
    "check_level_coverage",
    "check_correctness_ks",
    "check_correctness_wfs",
    "check_stable_proposition",
    "stable_models_of",
]
