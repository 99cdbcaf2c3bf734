"""Main SLDNF- and SLS-trees under the leftmost selection rule.

A tree is built depth-first with clauses tried in program order.  Selecting
a positive literal resolves it with every unifiable clause (renamed apart);
selecting a negative literal ``not A`` either flounders (``A`` non-ground)
or builds a subsidiary tree for ``A`` one rank deeper:

* subsidiary success: the node is a failed leaf;
* subsidiary failure: the node has one child with ``not A`` removed;
* anything else: the node is a floundered or budget leaf.

In SLS mode infinite failure is approximated on a finite universe: a
ground query repeating one of its ancestors is a failed leaf (the loop
cannot contribute an answer that is not found elsewhere), and ground goals
that exhaust the budget are decided by the well-founded model of the
depth-bounded grounding when it gives them a classical value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .interp import ThreeValuedInterp
from .oracles import well_founded_model
from .specification import DEFAULT_WITNESS_CAP, EvaluatedSpec
from .syntax import ArityError, Literal, Program, as_query, format_query
from .terms import FRESH_MARK, Struct, Var, apply, format_term, rename, resolve, term_key, unify
from .universe import GroundUniverse, ground_program

SLDNF = "sldnf"
SLS = "sls"
SEMANTICS = (SLDNF, SLS)

# leaf statuses
SUCCESS = "success"
FAILED = "failed"
FLOUNDERED = "floundered"
BUDGET = "budget"
INTERNAL = "internal"

# tree statuses
SUCCEEDS = "succeeds"
FAILS = "fails"
FLOUNDERS = "flounders"
EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class Budget:
    """Resource bounds that stand in for "the tree is finite"."""

    max_depth: int = 64
    max_nodes: int = 20_000
    max_rank: int = 12

    def __post_init__(self):
        for name in ("max_depth", "max_nodes", "max_rank"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"budget {name} must be a positive integer, got {v!r}")


@dataclass
class Node:
    id: int
    parent: Optional[int]
    query: tuple
    depth: int
    # root query instantiated by the mgus along the branch
    answer: tuple
    # clause index for a resolution step, "ε" for an eliminated negative literal
    edge: Optional[object] = None
    status: str = INTERNAL
    selected: Optional[int] = None
    children: list = field(default_factory=list)
    subsidiary: Optional[MainTree] = None
    note: str = ""

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "parent": self.parent,
            "query": format_query(self.query),
            "selected": self.selected,
            "status": self.status,
            "edge": self.edge,
        }
        if self.status == SUCCESS:
            out["answer"] = format_query(self.answer)
        if self.note:
            out["note"] = self.note
        if self.subsidiary is not None:
            out["subsidiary"] = self.subsidiary.to_dict()
        return out


@dataclass
class MainTree:
    root: tuple
    semantics: str
    nodes: list
    rank: int = 0
    stopped_at_success: bool = False

    def leaves(self) -> list:
        return [n for n in self.nodes if n.status != INTERNAL]

    def _has(self, status: str) -> bool:
        return any(n.status == status for n in self.nodes)

    @property
    def has_success(self) -> bool:
        return self._has(SUCCESS)

    @property
    def floundered(self) -> bool:
        return self._has(FLOUNDERED)

    @property
    def exhausted(self) -> bool:
        return self._has(BUDGET)

    @property
    def diverging(self) -> bool:
        """Floundered or cut off by the budget (so not known to be finite)."""
        return self.floundered or self.exhausted

    @property
    def status(self) -> str:
        if self.has_success:
            return SUCCEEDS
        if self.exhausted:
            return EXHAUSTED
        if self.floundered:
            return FLOUNDERS
        return FAILS

    def to_dict(self) -> dict:
        return {
            "root": format_query(self.root),
            "semantics": self.semantics,
            "rank": self.rank,
            "status": self.status,
            "nodes": [n.to_dict() for n in self.nodes],
        }

    def to_text(self, indent: str = "  ") -> str:
        lines: list = []
        self._text(lines, indent, 0)
        return "\n".join(lines)

    def _text(self, lines, indent, base):
        depth_of = {}
        order = []

        def visit(nid, d):
            order.append(nid)
            depth_of[nid] = d
            for c in self.nodes[nid].children:
                visit(c, d + 1)

        if self.nodes:
            visit(0, 0)
        for nid in order:
            n = self.nodes[nid]
            pad = indent * (base + depth_of[nid])
            label = ""
            if n.edge is not None:
                label = f"[{n.edge}] " if n.edge == "ε" else f"[c{n.edge + 1}] "
            q = format_query(n.query) if n.query else "□"
            if n.status == SUCCESS:
                tail = f"  success: {format_query(n.answer)}"
            elif n.status == INTERNAL:
                tail = ""
            else:
                tail = f"  {n.status}"
            if n.note:
                tail += f" ({n.note})"
            lines.append(f"{pad}{label}{q}{tail}")
            if n.subsidiary is not None:
                lines.append(f"{pad}{indent}subsidiary tree ({n.subsidiary.status}):")
                n.subsidiary._text(lines, indent, base + depth_of[nid] + 2)


def answers(tree: MainTree) -> list:
    """Computed answers in left-to-right order, duplicates kept."""
    return [n.answer for n in tree.nodes if n.status == SUCCESS]


class Engine:
    """Tree builder for one program, with the WF oracle computed on demand."""

    def __init__(
        self,
        program: Program,
        budget: Budget = Budget(),
        semantics: str = SLDNF,
        universe: Optional[GroundUniverse] = None,
    ):
        if semantics not in SEMANTICS:
            raise ValueError(f"unknown semantics {semantics!r}")
        self.program = program
        self.budget = budget
        self.semantics = semantics
        self.universe = universe.with_predicates(program.predicates) if universe is not None else None
        self._wf: Optional[ThreeValuedInterp] = None
        self._arity = {}
        for name, n in program.predicates:
            self._arity.setdefault(name, set()).add(n)
        self._memo: dict = {}
        # ground atoms whose subsidiary trees are under construction
        self._active: tuple = ()

    # -- oracle -------------------------------------------------------------

    @property
    def wf(self) -> Optional[ThreeValuedInterp]:
        if self.universe is None:
            return None
        if self._wf is None:
            gp = ground_program(self.program, self.universe)
            self._wf = well_founded_model(gp, self.universe.herbrand_base())
        return self._wf

    def _oracle(self, atoms) -> Optional[str]:
        """WF value ("t", "f" or "u") of a ground conjunction inside HB(d)."""
        if self.semantics != SLS or self.universe is None:
            return None
        if not all(self.universe.contains_atom(a) for a in atoms):
            return None
        wf = self.wf
        if any(a in wf.false_set for a in atoms):
            return "f"
        if all(a in wf.true_set for a in atoms):
            return "t"
        return "u"

    def _query_oracle(self, query: tuple) -> Optional[str]:
        if not all(l.is_ground for l in query) or self.semantics != SLS or self.universe is None:
            return None
        pos = [l.atom for l in query if l.positive]
        neg = [l.atom for l in query if l.negative]
        if not all(self.universe.contains_atom(a) for a in pos + neg):
            return None
        wf = self.wf
        if any(a in wf.false_set for a in pos) or any(a in wf.true_set for a in neg):
            return "f"
        if all(a in wf.true_set for a in pos) and all(a in wf.false_set for a in neg):
            return "t"
        return "u"

    # -- building -----------------------------------------------------------

    def check_query(self, query: tuple) -> None:
        for lit in query:
            name, n = lit.atom.indicator
            known = self._arity.get(name)
            if known is not None and n not in known:
                arities = ", ".join(str(k) for k in sorted(known))
                raise ArityError(f"{name}/{n} used but the program defines {name} with arity {arities}")

    def build(self, query, rank: int = 0, stop_at_success: bool = False) -> MainTree:
        query = as_query(query)
        self.check_query(query)
        if rank == 0 and len(query) == 1 and query[0].positive and query[0].is_ground:
            self._active = (query[0].atom,)
        elif rank == 0:
            self._active = ()
        b = self.budget
        counter = itertools.count()

        def fresh(v: Var) -> Var:
            return Var(f"{v.name.split(FRESH_MARK)[0]}{FRESH_MARK}{next(counter)}")

        nodes: list = []
        tree = MainTree(query, self.semantics, nodes, rank)
        # (parent, query, answer, depth, edge), popped in left-to-right order
        stack = [(None, query, query, 0, None)]
        while stack:
            parent, q, ans, depth, edge = stack.pop()
            node = Node(len(nodes), parent, q, depth, ans, edge)
            nodes.append(node)
            if parent is not None:
                nodes[parent].children.append(node.id)
            if not q:
                node.status = SUCCESS
                if stop_at_success:
                    tree.stopped_at_success = True
                    break
                continue
            if self.semantics == SLS and self._repeats_ancestor(nodes, node):
                node.status = FAILED
                node.note = "repeats an ancestor"
                continue
            if depth >= b.max_depth or len(nodes) >= b.max_nodes:
                self._budget_leaf(node)
                continue
            node.selected = 0
            lit = q[0]
            if lit.positive:
                kids = []
                for idx, clause in self.program.procedure(lit.atom.indicator):
                    mapping: dict = {}
                    head = rename(clause.head, mapping, fresh)
                    s = unify(lit.atom, head)
                    if s is None:
                        continue
                    body = tuple(Literal(rename(l.atom, mapping, fresh), l.positive) for l in clause.body)
                    new_q = body + q[1:]
                    names = set()
                    for l in new_q + ans:
                        _vars(l.atom, names)
                    s = resolve(s, names)
                    new_q = tuple(Literal(apply(l.atom, s), l.positive) for l in new_q)
                    new_ans = tuple(Literal(apply(l.atom, s), l.positive) for l in ans)
                    kids.append((node.id, new_q, new_ans, depth + 1, idx))
                if not kids:
                    node.status = FAILED
                stack.extend(reversed(kids))
                continue
            self._negative(node, lit, rank, stack)
        return tree

    def _repeats_ancestor(self, nodes, node) -> bool:
        if not all(l.is_ground for l in node.query):
            return False
        p = node.parent
        while p is not None:
            if nodes[p].query == node.query:
                return True
            p = nodes[p].parent
        return False

    def _budget_leaf(self, node: Node) -> None:
        verdict = self._query_oracle(node.query)
        if verdict == "f":
            node.status = FAILED
            node.note = "false in the well-founded model"
        elif verdict == "u":
            node.status = FLOUNDERED
            node.note = "undefined in the well-founded model"
        else:
            node.status = BUDGET

    def _negative(self, node: Node, lit: Literal, rank: int, stack: list) -> None:
        a = lit.atom
        if not a.is_ground:
            node.status = FLOUNDERED
            node.note = "non-ground negative literal"
            return
        if rank + 1 > self.budget.max_rank:
            outcome = EXHAUSTED
        elif a in self._active:
            # the subsidiary tree would repeat one under construction
            outcome = EXHAUSTED
            node.note = f"{format_term(a)} depends on itself through negation"
        else:
            key = (a, rank + 1, frozenset(self._active))
            sub = self._memo.get(key)
            if sub is None:
                saved = self._active
                self._active = saved + (a,)
                try:
                    sub = self.build((Literal(a),), rank + 1, stop_at_success=True)
                finally:
                    self._active = saved
                self._memo[key] = sub
            node.subsidiary = sub
            outcome = sub.status
        if outcome == EXHAUSTED:
            verdict = self._oracle([a])
            if verdict == "f":
                outcome = FAILS
                node.note = f"{format_term(a)} false in the well-founded model"
            elif verdict == "t":
                outcome = SUCCEEDS
                node.note = f"{format_term(a)} true in the well-founded model"
            elif verdict == "u":
                node.status = FLOUNDERED
                node.note = f"{format_term(a)} undefined in the well-founded model"
                return
        if outcome == SUCCEEDS:
            node.status = FAILED
        elif outcome == FAILS:
            stack.append((node.id, node.query[1:], node.answer, node.depth + 1, "ε"))
        elif outcome == FLOUNDERS:
            node.status = FLOUNDERED
            node.note = f"subsidiary tree for {format_term(a)} flounders"
        else:
            node.status = BUDGET


def _vars(t, acc: set) -> None:
    if isinstance(t, Var):
        acc.add(t)
    elif not t._ground:
        for x in t.args:
            _vars(x, acc)


def build_main_tree(
    program: Program,
    query,
    budget: Budget = Budget(),
    semantics: str = SLDNF,
    universe: Optional[GroundUniverse] = None,
) -> MainTree:
    """Main SLDNF- or SLS-tree for ``query``.

    ``universe`` enables the well-founded oracle in SLS mode; without it
    budget-stuck SLS goals stay budget-exhausted.
    """
    return Engine(program, budget, semantics, universe).build(query)


# -- empirical semi-completeness -------------------------------------------------------


class NonProperSpec(ValueError):
    pass


@dataclass(frozen=True)
class AtomOutcome:
    atom: Struct
    tree: str
    expected: str
    ok: bool
    note: str = ""

    def to_dict(self) -> dict:
        out = {"atom": format_term(self.atom), "tree": self.tree, "expected": self.expected, "ok": self.ok}
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class SemiCompletenessReport:
    semantics: str
    depth: int
    outcomes: tuple
    skipped_nonproper: tuple = ()
    witness_cap: int = DEFAULT_WITNESS_CAP

    @property
    def decided(self) -> list:
        return [o for o in self.outcomes if o.tree in (SUCCEEDS, FAILS)]

    @property
    def skipped(self) -> list:
        return [o for o in self.outcomes if o.tree not in (SUCCEEDS, FAILS)]

    @property
    def violations(self) -> list:
        return [o for o in self.outcomes if not o.ok]

    @property
    def status(self) -> str:
        return "fail" if self.violations else "pass"

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "semantics": self.semantics,
            "depth": self.depth,
            "status": self.status,
            "checked": len(self.outcomes),
            "decided": len(self.decided),
            "skipped": [o.to_dict() for o in self.skipped],
            "skipped_nonproper": [format_term(a) for a in self.skipped_nonproper],
            "violations": [o.to_dict() for o in self.violations[: self.witness_cap]],
            "violation_count": len(self.violations),
        }

    def describe(self) -> str:
        lines = [
            f"{self.semantics.upper()} semi-completeness at depth {self.depth}: {self.status} "
            f"({len(self.outcomes)} atoms, {len(self.decided)} decided, {len(self.skipped)} skipped)"
        ]
        for o in self.skipped:
            lines.append(f"  skipped {format_term(o.atom)}: {o.tree}" + (f" ({o.note})" if o.note else ""))
        for o in self.violations[: self.witness_cap]:
            lines.append(f"  violation {format_term(o.atom)}: tree {o.tree}, expected {o.expected}")
        return "\n".join(lines)


def _expected(a: Struct, spec: EvaluatedSpec) -> str:
    if a in spec.snf:
        return SUCCEEDS
    if a not in spec.st:
        return FAILS
    return "any"


def check_semi_completeness_empirical(
    spec: EvaluatedSpec,
    program: Program,
    budget: Budget = Budget(),
    semantics: str = SLDNF,
    allow_nonproper: bool = False,
    atoms: Optional[Iterable[Struct]] = None,
    k: int = DEFAULT_WITNESS_CAP,
) -> SemiCompletenessReport:
    """Run every ground atom of HB(d) (or ``atoms``) and compare with the spec.

    An atom in Snf must succeed and an atom outside St must fail, whenever
    its main tree is decided: it has a success leaf, or it is free of
    floundering and budget leaves.  Other trees are reported as skipped.
    """
    skipped_np: list = []
    if not spec.is_proper:
        if not allow_nonproper:
            raise NonProperSpec(
                "the specification is not proper (Snf ⊄ St); completeness w.r.t. it is meaningless"
            )
    u = spec.universe.with_predicates(program.predicates)
    engine = Engine(program, budget, semantics, u)
    pool = sorted(set(atoms) if atoms is not None else u.herbrand_base(), key=term_key)
    outcomes = []
    for a in pool:
        tree = engine.build((Literal(a),))
        if a in spec.snf and a not in spec.st:
            skipped_np.append(a)
            outcomes.append(AtomOutcome(a, tree.status, "unchecked", True, "in Snf but not in St"))
            continue
        status = tree.status
        if status == SUCCEEDS and (tree.floundered or tree.exhausted):
            note = "success found in a diverging tree"
        else:
            note = ""
        exp = _expected(a, spec)
        if status == SUCCEEDS:
            ok = exp != FAILS
        elif status == FAILS:
            ok = exp != SUCCEEDS
        else:
            ok = True
        outcomes.append(AtomOutcome(a, status, exp, ok, note))
    return SemiCompletenessReport(semantics, u.depth, tuple(outcomes), tuple(skipped_np), k)


__all__ = [
    "SLDNF",
    "SLS",
    "SUCCESS",
    "FAILED",
    "FLOUNDERED",
    "BUDGET",
    "INTERNAL",
    "SUCCEEDS",
    "FAILS",
    "FLOUNDERS",
    "EXHAUSTED",
    "Budget",
    "Node",
    "MainTree",
    "Engine",
    "answers",
    "build_main_tree",
    "NonProperSpec",
    "AtomOutcome",
    "SemiCompletenessReport",
    "check_semi_completeness_empirical",
]
