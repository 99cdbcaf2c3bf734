"""Depth-bounded Herbrand universes and grounding.

``GroundUniverse(functions, depth)`` describes HU(d), the ground terms of
depth at most ``d`` over the given function symbols, and HB(d), the atoms
over the universe's predicates whose arguments lie in HU(d).  Optionally a
predicate's argument positions can be restricted to named *sorts* (finite
term sets such as "lists of nodes of length at most 4"), which keeps HB(d)
small enough to enumerate for programs over structured data.

All enumeration is deterministic: terms come out in :func:`terms.term_key`
order.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Iterable, Iterator, Optional

from .syntax import Clause, Literal, Program
from .terms import (
    CONS,
    NIL,
    Struct,
    Var,
    apply,
    match,
    mklist,
    substitute,
    symbols,
    variables,
    term_key,
)

DEFAULT_CAP = 2_000_000


class UniverseTooLarge(RuntimeError):
    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what} has {size} elements, over the cap of {cap}")
        self.what = what
        self.size = size
        self.cap = cap


# -- argument domains ----------------------------------------------------------


class Domain:
    """A finite set of ground terms that an argument position may take."""

    def terms(self) -> tuple:
        raise NotImplementedError

    def __contains__(self, t) -> bool:
        raise NotImplementedError

    def __len__(self) -> int:
        raise NotImplementedError

    def project(self, functor: str, arity: int, i: int) -> Domain:
        raise NotImplementedError

    def intersect(self, other: Domain) -> Domain:
        raise NotImplementedError


class AnyDomain(Domain):
    """HU(k) of a universe."""

    def __init__(self, universe: GroundUniverse, k: int):
        self.universe = universe
        self.k = k

    def terms(self):
        return self.universe.hu(self.k)

    def __contains__(self, t):
        return t._ground and t._depth <= self.k and self.universe.in_alphabet(t)

    def __len__(self):
        return self.universe.hu_size(self.k)

    def project(self, functor, arity, i):
        if (functor, arity) in self.universe.functions and self.k >= 2:
            return AnyDomain(self.universe, self.k - 1)
        return FiniteDomain(())

    def intersect(self, other):
        if isinstance(other, AnyDomain):
            return self if self.k <= other.k else other
        return other.intersect(self)

    def __eq__(self, other):
        return isinstance(other, AnyDomain) and other.k == self.k and other.universe is self.universe

    def __hash__(self):
        return hash(("any", self.k))

    def __repr__(self):
        return f"HU({self.k})"


class FiniteDomain(Domain):
    def __init__(self, terms: Iterable):
        self._set = frozenset(terms)
        self._projections: dict = {}

    @cached_property
    def _ordered(self):
        return tuple(sorted(self._set, key=term_key))

    def terms(self):
        return self._ordered

    def __contains__(self, t):
        return t in self._set

    def __len__(self):
        return len(self._set)

    def project(self, functor, arity, i):
        key = (functor, arity, i)
        out = self._projections.get(key)
        if out is None:
            out = FiniteDomain(
                t.args[i] for t in self._set if t.functor == functor and len(t.args) == arity
            )
            self._projections[key] = out
        return out

    def intersect(self, other):
        if isinstance(other, AnyDomain):
            return FiniteDomain(t for t in self._set if t in other)
        return FiniteDomain(self._set & other._set)

    def __eq__(self, other):
        return isinstance(other, FiniteDomain) and other._set == self._set

    def __hash__(self):
        return hash(self._set)

    def __repr__(self):
        return f"FiniteDomain({len(self._set)} terms)"


# -- sorts ---------------------------------------------------------------------


class SortDecl:
    """Declarative description of a sort, resolved against a universe."""

    def resolve(self, universe: GroundUniverse, sorts: dict) -> set:
        raise NotImplementedError

    def symbols(self) -> set:
        return set()


class EnumSort(SortDecl):
    def __init__(self, terms: Iterable):
        self.members = tuple(terms)

    def resolve(self, universe, sorts):
        return {t for t in self.members if t.depth <= universe.depth}

    def symbols(self):
        acc: set = set()
        for t in self.members:
            symbols(t, acc)
        return acc

    def __repr__(self):
        return "{" + ", ".join(map(str, self.members)) + "}"


class ListSort(SortDecl):
    """Proper lists with elements from another sort, of bounded length."""

    def __init__(self, element: str, max_length: Optional[int] = None):
        self.element = element
        self.max_length = max_length

    def resolve(self, universe, sorts):
        elems = sorted(sorts[self.element].terms(), key=term_key)
        out = set()
        layer = [Struct(NIL)]
        length = 0
        while layer:
            out.update(t for t in layer if t.depth <= universe.depth)
            length += 1
            if self.max_length is not None and length > self.max_length:
                break
            layer = [
                Struct(CONS, (e, t))
                for t in layer
                for e in elems
                if max(e.depth, t.depth) + 1 <= universe.depth
            ]
        return out

    def symbols(self):
        return {(CONS, 2), (NIL, 0)}

    def __repr__(self):
        return f"list({self.element}{'' if self.max_length is None else f', {self.max_length}'})"


class UnionSort(SortDecl):
    def __init__(self, parts: Iterable[str]):
        self.parts = tuple(parts)

    def resolve(self, universe, sorts):
        out = set()
        for p in self.parts:
            out.update(sorts[p].terms())
        return out

    def __repr__(self):
        return " | ".join(self.parts)


# -- the universe ----------------------------------------------------------------


class GroundUniverse:
    """Finite carrier HU(d) / HB(d) for checking programs at depth ``d``.

    ``functions`` and ``predicates`` are iterables of ``(name, arity)``.
    ``sorts`` maps a sort name to a :class:`SortDecl`; ``signatures`` maps a
    predicate indicator to a tuple of sort names (``"any"`` means HU(d)).
    """

    def __init__(
        self,
        functions: Iterable,
        depth: int,
        predicates: Iterable = (),
        sorts: Optional[dict] = None,
        signatures: Optional[dict] = None,
        cap: int = DEFAULT_CAP,
    ):
        if depth < 1:
            raise ValueError("depth bound must be at least 1")
        self.sort_decls = dict(sorts or {})
        functions = set(tuple(f) for f in functions)
        for decl in self.sort_decls.values():
            functions |= decl.symbols()
        self.functions = frozenset(functions)
        self.depth = depth
        self.predicates = frozenset(tuple(p) for p in predicates)
        self.signatures = {tuple(k): tuple(v) for k, v in (signatures or {}).items()}
        self.cap = cap
        self._levels: dict = {}
        self._alphabet_cache: dict = {}
        self._arg_domains: dict = {}
        self._names = frozenset(f[0] for f in self.functions)
        for ind, sig in self.signatures.items():
            if len(sig) != ind[1]:
                raise ValueError(f"signature for {ind[0]}/{ind[1]} has {len(sig)} sorts")
            for s in sig:
                if s != "any" and s not in self.sort_decls:
                    raise ValueError(f"unknown sort {s!r} in signature of {ind[0]}/{ind[1]}")

    @classmethod
    def for_program(cls, program: Program, depth: int, *, functions=(), predicates=(), **kw):
        funcs = set(program.function_symbols()) | set(functions)
        preds = set(program.predicates) | set(predicates)
        return cls(funcs, depth, preds, **kw)

    def _derived(self, **changes) -> GroundUniverse:
        kw = dict(
            functions=self.functions,
            depth=self.depth,
            predicates=self.predicates,
            sorts=self.sort_decls,
            signatures=self.signatures,
            cap=self.cap,
        )
        kw.update(changes)
        return GroundUniverse(**kw)

    def with_predicates(self, extra: Iterable) -> GroundUniverse:
        extra = frozenset(tuple(p) for p in extra)
        if extra <= self.predicates:
            return self
        return self._derived(predicates=self.predicates | extra)

    def with_functions(self, extra: Iterable) -> GroundUniverse:
        extra = frozenset(tuple(f) for f in extra)
        if extra <= self.functions:
            return self
        return self._derived(functions=self.functions | extra)

    def with_depth(self, depth: int) -> GroundUniverse:
        return self._derived(depth=depth)

    def describe(self) -> dict:
        return {
            "depth": self.depth,
            "functions": [f"{n}/{a}" for n, a in sorted(self.functions)],
            "predicates": [f"{n}/{a}" for n, a in sorted(self.predicates)],
            "signatures": {
                f"{n}/{a}": list(sig) for (n, a), sig in sorted(self.signatures.items())
            },
            "sorts": {name: repr(d) for name, d in sorted(self.sort_decls.items())},
        }

    # terms

    def in_alphabet(self, t) -> bool:
        if isinstance(t, Var):
            return False
        hit = self._alphabet_cache.get(t)
        if hit is None:
            hit = (t.functor, len(t.args)) in self.functions and all(self.in_alphabet(a) for a in t.args)
            self._alphabet_cache[t] = hit
        return hit

    def hu_size(self, k: Optional[int] = None) -> int:
        k = self.depth if k is None else min(k, self.depth)
        consts = sum(1 for f in self.functions if f[1] == 0)
        size = consts if k >= 1 else 0
        for _ in range(k - 1):
            size = consts + sum(size**n for _, n in self.functions if n > 0)
            if size > 10 * self.cap:
                break
        return size

    def hu(self, k: Optional[int] = None) -> tuple:
        """HU(k) for k <= d, in canonical order."""
        k = self.depth if k is None else min(k, self.depth)
        if k < 1:
            return ()
        if k in self._levels:
            return self._levels[k]
        size = self.hu_size(k)
        if size > self.cap:
            raise UniverseTooLarge(f"HU({k})", size, self.cap)
        consts = [Struct(n) for n, a in self.functions if a == 0]
        if k == 1:
            out = consts
        else:
            below = self.hu(k - 1)
            out = list(consts)
            for name, arity in self.functions:
                if arity:
                    out.extend(Struct(name, args) for args in itertools.product(below, repeat=arity))
        result = tuple(sorted(out, key=term_key))
        self._levels[k] = result
        return result

    @cached_property
    def sorts(self) -> dict:
        resolved: dict = {}
        pending = dict(self.sort_decls)
        while pending:
            progress = False
            for name, decl in list(pending.items()):
                deps = getattr(decl, "parts", ()) or (
                    (decl.element,) if isinstance(decl, ListSort) else ()
                )
                if all(d in resolved for d in deps):
                    resolved[name] = FiniteDomain(decl.resolve(self, resolved))
                    del pending[name]
                    progress = True
            if not progress:
                raise ValueError(f"unresolvable or cyclic sorts: {sorted(pending)}")
        return resolved

    def domain(self, sort: str) -> Domain:
        if sort == "any":
            return AnyDomain(self, self.depth)
        return self.sorts[sort]

    def arg_domains(self, indicator) -> tuple:
        hit = self._arg_domains.get(indicator)
        if hit is not None:
            return hit
        indicator = tuple(indicator)
        sig = self.signatures.get(indicator)
        if sig is None:
            out = (AnyDomain(self, self.depth),) * indicator[1]
        else:
            out = tuple(self.domain(s) for s in sig)
        self._arg_domains[indicator] = out
        return out

    # atoms

    def contains_atom(self, a: Struct) -> bool:
        ind = (a.functor, len(a.args))
        if ind not in self.predicates or not a._ground:
            return False
        return all(t in d for t, d in zip(a.args, self.arg_domains(ind)))

    def hb_size(self, indicator=None) -> int:
        if indicator is None:
            return sum(self.hb_size(p) for p in self.predicates)
        size = 1
        for d in self.arg_domains(indicator):
            size *= len(d)
        return size

    def check_hb_cap(self, indicator=None) -> None:
        size = self.hb_size(indicator)
        if size > self.cap:
            what = "HB" if indicator is None else f"HB slice {indicator[0]}/{indicator[1]}"
            raise UniverseTooLarge(f"{what} at depth {self.depth}", size, self.cap)

    def atoms(self, indicator) -> Iterator[Struct]:
        """The slice of HB(d) for one predicate, in canonical order."""
        indicator = tuple(indicator)
        self.check_hb_cap(indicator)
        name = indicator[0]
        domains = [d.terms() for d in self.arg_domains(indicator)]
        for args in itertools.product(*domains):
            yield Struct(name, args)

    def herbrand_base(self) -> Iterator[Struct]:
        self.check_hb_cap()
        for p in sorted(self.predicates):
            yield from self.atoms(p)

    def __repr__(self):
        return (
            f"GroundUniverse(depth={self.depth}, functions={sorted(self.functions)}, "
            f"predicates={sorted(self.predicates)})"
        )


# -- instance enumeration ----------------------------------------------------------


class AtomIndex:
    """Ground atoms grouped by predicate, with lazy per-argument indexes.

    With ``ordered`` (the default) candidates come out in canonical order;
    unordered indexes are cheaper and suit callers that only collect sets.
    """

    def __init__(self, atoms: Iterable[Struct], ordered: bool = True):
        groups: dict = {}
        for a in atoms:
            groups.setdefault(a.indicator, []).append(a)
        if ordered:
            self.groups = {k: tuple(sorted(v, key=term_key)) for k, v in groups.items()}
        else:
            self.groups = {k: tuple(v) for k, v in groups.items()}
        self._by_arg: dict = {}

    def __contains__(self, a) -> bool:
        return a in self._sets.get(a.indicator, ())

    @cached_property
    def _sets(self):
        return {k: frozenset(v) for k, v in self.groups.items()}

    def candidates(self, pattern: Struct) -> tuple:
        """Atoms that may match ``pattern`` (a superset; caller still matches).

        Atoms are indexed on the ground subterms of the pattern together with
        the functors leading to them, so only repeated variables remain to be
        checked.
        """
        group = self.groups.get(pattern.indicator, ())
        if pattern._ground:
            return (pattern,) if pattern in self else ()
        found = []
        _ground_paths(pattern, (), found)
        if not found:
            return group
        paths = tuple(p for p, _ in found)
        key = (pattern.indicator, paths)
        idx = self._by_arg.get(key)
        if idx is None:
            idx = {}
            for a in group:
                vals = _values_at(a, paths)
                if vals is not None:
                    idx.setdefault(vals, []).append(a)
            self._by_arg[key] = idx
        return idx.get(tuple(v for _, v in found), ())


def _ground_paths(t: Struct, prefix: tuple, out: list) -> None:
    # maximal ground subterms of a non-ground term, keyed by the path to them
    for i, a in enumerate(t.args):
        step = prefix + ((t.functor, len(t.args), i),)
        if a._ground:
            out.append((step, a))
        elif a.__class__ is not Var:
            _ground_paths(a, step, out)


def _values_at(a: Struct, paths: tuple) -> Optional[tuple]:
    vals = []
    for path in paths:
        t = a
        for f, n, i in path:
            if t.__class__ is not Struct or t.functor != f or len(t.args) != n:
                return None
            t = t.args[i]
        vals.append(t)
    return tuple(vals)


def variable_domains(clause: Clause, universe: GroundUniverse) -> dict:
    """For each clause variable, the domain implied by all its occurrences."""
    out: dict = {}

    def visit(t, dom):
        if isinstance(t, Var):
            prev = out.get(t)
            out[t] = dom if prev is None else prev.intersect(dom)
            return
        for i, a in enumerate(t.args):
            if not a.is_ground:
                visit(a, dom.project(t.functor, len(t.args), i))

    for atom in clause.atoms():
        for arg, dom in zip(atom.args, universe.arg_domains(atom.indicator)):
            if not arg.is_ground:
                visit(arg, dom)
    return out


def _new_bindings_ok(s, s2, domains) -> bool:
    # values come from atoms of HB(d), so they are in the alphabet already
    for v, t in s2.items():
        if v in s:
            continue
        d = domains[v]
        if type(d) is AnyDomain:
            if t._depth > d.k:
                return False
        elif t not in d:
            return False
    return True


def _always_in_hb(atom: Struct, universe: GroundUniverse, domains: dict) -> bool:
    """Whether every instance of ``atom`` with values from ``domains`` lies in HB(d).

    Holds when each position is an unrestricted HU(k) whose variables range
    over a HU(k') that already accounts for their nesting.
    """
    if atom.indicator not in universe.predicates:
        return False

    def fits(t, dom):
        if type(dom) is not AnyDomain:
            return False
        if t.__class__ is Var:
            return type(domains[t]) is AnyDomain
        if t._ground:
            return t in dom
        if (t.functor, len(t.args)) not in universe.functions or dom.k < 2:
            return False
        return all(fits(a, dom.project(t.functor, len(t.args), i)) for i, a in enumerate(t.args))

    return all(fits(a, d) for a, d in zip(atom.args, universe.arg_domains(atom.indicator)))


def instances(
    clause: Clause,
    universe: GroundUniverse,
    *,
    head: Optional[Struct] = None,
    sources=None,
    domains: Optional[dict] = None,
    lead: Optional[int] = None,
    keep=None,
) -> Iterator[Clause]:
    """Ground instances of ``clause`` all of whose atoms lie in HB(d).

    ``head`` restricts to instances with that head.  With ``sources`` given,
    only instances whose positive body atoms all belong to ``sources`` are
    produced; these are found by joining rather than by enumeration.
    ``sources`` may also be a sequence with one index per positive literal;
    source atoms are assumed to lie in HB(d).  Remaining variables range
    over the domains implied by their occurrences.  ``lead`` names the
    positive literal (counting positive literals only) to join first; this
    changes the order of the instances but not the set.  ``keep``, when
    given, is called as ``keep(head, negated_atoms)`` for every instance
    before its clause is built; instances it rejects are skipped.
    """
    if domains is None:
        domains = variable_domains(clause, universe)
    s: dict = {}
    if head is not None:
        if head.indicator != clause.head.indicator or match(clause.head, head, s) is None:
            return
        if not universe.contains_atom(head):
            return
    for v, t in s.items():
        if t not in domains[v]:
            return
    body = clause.body
    joined = [i for i, lit in enumerate(body) if lit.positive] if sources is not None else []
    if isinstance(sources, AtomIndex):
        sources = [sources] * len(joined)
    if lead:
        joined = [joined[lead]] + joined[:lead] + joined[lead + 1 :]
        sources = [sources[lead]] + list(sources[:lead]) + list(sources[lead + 1 :])
    order = clause.variables()
    contains = universe.contains_atom
    head_known = head is not None
    head_safe = head_known or _always_in_hb(clause.head, universe, domains)
    body_safe = [_always_in_hb(lit.atom, universe, domains) for lit in body]

    # every joined literal is bound by the time rest() runs, so the free
    # variables are known up front
    bound = set(s)
    for i in joined:
        bound.update(variables(body[i].atom))
    free = [v for v in order if v not in bound]
    pools = [domains[v].terms() for v in free] if free else []
    # matched[i] is the literal already found for joined position i
    matched: list = [None] * len(body)
    make = Clause.trusted

    unmatched = [i for i in range(len(body)) if i not in joined]
    negated = [i for i, lit in enumerate(body) if not lit.positive]
    atoms: list = [None] * len(body)

    def build(s):
        h = head if head_known else substitute(clause.head, s)
        if not head_safe and not contains(h):
            return None
        for i in unmatched:
            a = substitute(body[i].atom, s)
            if not body_safe[i] and not contains(a):
                return None
            atoms[i] = a
        if keep is not None and not keep(h, [atoms[i] for i in negated]):
            return None
        lits = []
        for i, lit in enumerate(body):
            a = matched[i]
            lits.append(a if a is not None else Literal(atoms[i], lit.positive))
        return make(h, tuple(lits))

    def rest(s):
        if not free:
            inst = build(s)
            if inst is not None:
                yield inst
            return
        for values in itertools.product(*pools):
            s2 = dict(s)
            s2.update(zip(free, values))
            inst = build(s2)
            if inst is not None:
                yield inst

    def join(k, s):
        if k == len(joined):
            yield from rest(s)
            return
        i = joined[k]
        lit = body[i]
        pattern = substitute(lit.atom, s)
        for atom in sources[k].candidates(pattern):
            s2 = match(pattern, atom, dict(s))
            if s2 is None:
                continue
            if len(s2) > len(s) and not _new_bindings_ok(s, s2, domains):
                continue
            matched[i] = lit if lit.atom is atom else Literal(atom, True)
            yield from join(k + 1, s2)

    yield from join(0, s)


def ground_program(program: Program, universe: GroundUniverse, cap: Optional[int] = None) -> list:
    """ground(P, d): every instance of every clause valued in HU(d).

    Raises :class:`UniverseTooLarge` when HB(d) or the number of candidate
    instances exceeds the cap.
    """
    cap = universe.cap if cap is None else cap
    universe = universe.with_predicates(program.predicates)
    universe.check_hb_cap()
    out = []
    for clause in program.clauses:
        domains = variable_domains(clause, universe)
        estimate = 1
        for v in clause.variables():
            estimate *= len(domains[v])
        if estimate > cap:
            raise UniverseTooLarge(f"grounding of clause {clause}", estimate, cap)
        out.extend(instances(clause, universe, domains=domains))
        if len(out) > cap:
            raise UniverseTooLarge("ground program", len(out), cap)
    return out


def universe_symbols(*programs: Program) -> set:
    acc: set = set()
    for p in programs:
        acc |= p.function_symbols()
    return acc


def list_sort_terms(elements: Iterable, max_length: int) -> list:
    """All lists over ``elements`` up to ``max_length`` (for tests and demos)."""
    elements = list(elements)
    out = []
    for n in range(max_length + 1):
        out.extend(mklist(c) for c in itertools.product(elements, repeat=n))
    return out
