"""Reference semantics of finite ground programs.

These are the independent oracles the checker and the resolution engine are
compared against: the least Herbrand model of a definite program, the
least fixpoint of Fitting's three-valued operator (the finite stand-in for
Kunen's completion semantics), the well-founded model, and stable models.

Every function takes a list of ground clauses.  ``atoms`` names the Herbrand
base to interpret over; atoms in it without any clause are false.  It
defaults to the atoms mentioned in the program.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .interp import ThreeValuedInterp
from .syntax import Clause, Program
from .terms import term_key
from .universe import AtomIndex, GroundUniverse, instances, variable_domains

DEFAULT_STABLE_CAP = 22


class NotDefinite(ValueError):
    pass


class IterationLimit(RuntimeError):
    pass


class StableCapExceeded(RuntimeError):
    def __init__(self, free: int, cap: int):
        super().__init__(
            f"stable model search over {free} undecided atoms exceeds the cap of {cap}"
        )
        self.free = free
        self.cap = cap


class _Compiled:
    """Ground program with atoms numbered, for the fixpoint loops."""

    def __init__(self, gp: Iterable[Clause], atoms: Optional[Iterable] = None):
        gp = list(gp)
        universe = set(atoms) if atoms is not None else set()
        for c in gp:
            if not c.is_ground:
                raise ValueError(f"clause is not ground: {c}")
            universe.update(c.atoms())
        self.atoms = sorted(universe, key=term_key)
        self.ids = {a: i for i, a in enumerate(self.atoms)}
        self.clauses = []
        for c in gp:
            pos = tuple(self.ids[l.atom] for l in c.body if l.positive)
            neg = tuple(self.ids[l.atom] for l in c.body if l.negative)
            self.clauses.append((self.ids[c.head], pos, neg))
        self.by_head: list = [[] for _ in self.atoms]
        for k, (h, _, _) in enumerate(self.clauses):
            self.by_head[h].append(k)

    def to_set(self, ids) -> frozenset:
        return frozenset(self.atoms[i] for i in ids)

    def least_model(self, clause_ids: Iterable[int]) -> set:
        """Least model of the positive parts of the selected clauses."""
        count = {}
        watch: dict = {}
        queue = []
        for k in clause_ids:
            h, pos, _ = self.clauses[k]
            need = set(pos)
            if not need:
                queue.append(h)
            else:
                count[k] = len(need)
                for a in need:
                    watch.setdefault(a, []).append(k)
        model = set()
        while queue:
            a = queue.pop()
            if a in model:
                continue
            model.add(a)
            for k in watch.get(a, ()):
                count[k] -= 1
                if count[k] == 0:
                    queue.append(self.clauses[k][0])
        return model

    def reduct(self, interp: set) -> list:
        """Clause ids surviving the Gelfond-Lifschitz reduct w.r.t. ``interp``."""
        return [k for k, (_, _, neg) in enumerate(self.clauses) if not any(b in interp for b in neg)]


def least_model(gp: Iterable[Clause]) -> frozenset:
    """Least Herbrand model of a ground definite program."""
    gp = list(gp)
    for c in gp:
        if not c.is_definite:
            raise NotDefinite(f"negative literal in clause {c}")
    comp = _Compiled(gp)
    return comp.to_set(comp.least_model(range(len(comp.clauses))))


def gl_reduct(gp: Iterable[Clause], interp: Iterable) -> list:
    """``H(P, I)``: drop clauses with a negative literal ¬B, B ∈ I; strip the rest."""
    interp = set(interp)
    out = []
    for c in gp:
        if any(l.negative and l.atom in interp for l in c.body):
            continue
        out.append(Clause(c.head, tuple(l for l in c.body if l.positive)))
    return out


# -- Fitting operator ------------------------------------------------------------


@dataclass(frozen=True)
class FittingResult:
    interp: ThreeValuedInterp
    iterations: int


def _fitting_step(comp: _Compiled, t: set, f: set) -> tuple:
    new_t, new_f = set(), set()
    for a in range(len(comp.atoms)):
        bodies = comp.by_head[a]
        some_true = False
        all_false = True
        for k in bodies:
            _, pos, neg = comp.clauses[k]
            if all(b in t for b in pos) and all(b in f for b in neg):
                some_true = True
            if not (any(b in f for b in pos) or any(b in t for b in neg)):
                all_false = False
        if some_true:
            new_t.add(a)
        if all_false:
            new_f.add(a)
    return new_t, new_f


def fitting_stages(gp: Iterable[Clause], atoms: Optional[Iterable] = None) -> Iterator[ThreeValuedInterp]:
    """Successive stages Φ↑0, Φ↑1, ... up to and including the fixpoint."""
    comp = _Compiled(gp, atoms)
    t: set = set()
    f: set = set()
    yield ThreeValuedInterp(frozenset(), frozenset())
    while True:
        nt, nf = _fitting_step(comp, t, f)
        if nt == t and nf == f:
            return
        t, f = nt, nf
        yield ThreeValuedInterp(comp.to_set(t), comp.to_set(f))


def fitting_fixpoint(
    gp: Iterable[Clause], atoms: Optional[Iterable] = None, max_iters: Optional[int] = None
) -> FittingResult:
    """Least fixpoint of Fitting's operator Φ, iterated from the all-``u`` interpretation.

    An atom becomes true once some clause body is true and false once every
    clause body is false (so atoms without clauses are false).  The result
    reports how many applications of Φ changed the interpretation.
    """
    gp = list(gp)
    comp = _Compiled(gp, atoms)
    limit = len(comp.atoms) + 1 if max_iters is None else max_iters
    t: set = set()
    f: set = set()
    for i in range(limit + 1):
        nt, nf = _fitting_step(comp, t, f)
        if nt == t and nf == f:
            return FittingResult(ThreeValuedInterp(comp.to_set(t), comp.to_set(f)), i)
        t, f = nt, nf
    raise IterationLimit(f"Fitting iteration did not converge within {limit} steps")


# -- well-founded model ------------------------------------------------------------


def well_founded_model(gp: Iterable[Clause], atoms: Optional[Iterable] = None) -> ThreeValuedInterp:
    """Well-founded model by the alternating fixpoint.

    Starting from the over-estimate O = HB, alternately compute the
    under-estimate T = LM(P reduced by O) and the over-estimate
    O = LM(P reduced by T) until both are stable.  True atoms are T,
    false atoms are HB ∖ O.
    """
    comp = _Compiled(gp, atoms)
    over = set(range(len(comp.atoms)))
    under: set = set()
    while True:
        new_under = comp.least_model(comp.reduct(over))
        new_over = comp.least_model(comp.reduct(new_under))
        if new_under == under and new_over == over:
            break
        under, over = new_under, new_over
    false = set(range(len(comp.atoms))) - over
    return ThreeValuedInterp(comp.to_set(under), comp.to_set(false))


# -- stable models -----------------------------------------------------------------


def is_stable(gp: Sequence[Clause], interp: Iterable) -> bool:
    interp = frozenset(interp)
    return least_model(gl_reduct(gp, interp)) == interp


def stable_models(
    gp: Iterable[Clause], atoms: Optional[Iterable] = None, cap: int = DEFAULT_STABLE_CAP
) -> list:
    """All stable models, in canonical order (by size, then atom order).

    Candidates are restricted to supersets of the well-founded true atoms
    that avoid its false atoms; ``cap`` bounds the number of undecided atoms
    over which subsets are enumerated.
    """
    gp = list(gp)
    comp = _Compiled(gp, atoms)
    wf = well_founded_model(gp, atoms)
    true_ids = {comp.ids[a] for a in wf.true_set}
    false_ids = {comp.ids[a] for a in wf.false_set}
    free = [i for i in range(len(comp.atoms)) if i not in true_ids and i not in false_ids]
    if len(free) > cap:
        raise StableCapExceeded(len(free), cap)
    found = []
    for r in range(len(free) + 1):
        for chosen in itertools.combinations(free, r):
            candidate = true_ids | set(chosen)
            if comp.least_model(comp.reduct(candidate)) == candidate:
                found.append(comp.to_set(candidate))
    return found


# -- bottom-up evaluation of non-ground definite programs ------------------------


def bottom_up_model(program: Program, universe: GroundUniverse) -> frozenset:
    """Least model of a definite program restricted to HB(d), without grounding it.

    Semi-naive evaluation: each round joins clause bodies against the atoms
    derived so far, requiring at least one atom from the previous round.
    Agrees with ``least_model(ground_program(program, universe))``.
    """
    if not program.is_definite:
        bad = next(c for c in program.clauses if not c.is_definite)
        raise NotDefinite(f"negative literal in clause {bad}")
    universe = universe.with_predicates(program.predicates)
    doms = [variable_domains(c, universe) for c in program.clauses]
    known: set = set()
    delta: set = set()
    for c, d in zip(program.clauses, doms):
        if not any(l.positive for l in c.body):
            delta.update(i.head for i in instances(c, universe, domains=d))
    rules = [(c, d) for c, d in zip(program.clauses, doms) if c.body]
    while delta:
        known |= delta
        full = AtomIndex(known, ordered=False)
        fresh = AtomIndex(delta, ordered=False)
        new: set = set()
        for c, d in rules:
            n = len(c.body)
            for i in range(n):
                srcs = [full] * n
                srcs[i] = fresh
                # the delta is usually the smallest source, so join it first
                for inst in instances(c, universe, sources=srcs, domains=d, lead=i):
                    if inst.head not in known:
                        new.add(inst.head)
        delta = new
    return frozenset(known)
