"""Three- and four-valued Herbrand interpretations.

A four-valued interpretation is stored as a pair (true_set, false_set) of
ground atoms, standing for ``true_set ∪ ¬false_set``.  An atom's value is the
set of classical values it carries: ``t`` (only true), ``f`` (only false),
``tf`` (both) or ``u`` (neither).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Union

from .syntax import Literal, NegatedQuery
from .terms import Struct, term_key


class TruthValue(enum.Enum):
    T = (True, False)
    F = (False, True)
    U = (False, False)
    TF = (True, True)

    @classmethod
    def of(cls, has_t: bool, has_f: bool) -> TruthValue:
        return cls((bool(has_t), bool(has_f)))

    @property
    def has_t(self) -> bool:
        return self.value[0]

    @property
    def has_f(self) -> bool:
        return self.value[1]

    def __invert__(self) -> TruthValue:
        return TruthValue.of(self.has_f, self.has_t)

    def __and__(self, other: TruthValue) -> TruthValue:
        # glb in the truth ordering
        return TruthValue.of(self.has_t and other.has_t, self.has_f or other.has_f)

    def __or__(self, other: TruthValue) -> TruthValue:
        return TruthValue.of(self.has_t or other.has_t, self.has_f and other.has_f)

    def leq_t(self, other: TruthValue) -> bool:
        """``self ≼_t other`` with f ≼ u ≼ t, f ≼ tf ≼ t, u and tf incomparable."""
        return (not self.has_t or other.has_t) and (not other.has_f or self.has_f)

    def __str__(self):
        return {TruthValue.T: "t", TruthValue.F: "f", TruthValue.U: "u", TruthValue.TF: "tf"}[self]


T, F, U, TF = TruthValue.T, TruthValue.F, TruthValue.U, TruthValue.TF

QueryLike = Union[tuple, NegatedQuery, Literal, Struct]


class NonGroundQuery(ValueError):
    pass


@dataclass(frozen=True)
class FourValuedInterp:
    true_set: frozenset
    false_set: frozenset

    def __post_init__(self):
        object.__setattr__(self, "true_set", frozenset(self.true_set))
        object.__setattr__(self, "false_set", frozenset(self.false_set))

    @property
    def is_three_valued(self) -> bool:
        return self.true_set.isdisjoint(self.false_set)

    def inconsistent_atoms(self) -> frozenset:
        return self.true_set & self.false_set

    def value(self, atom: Struct) -> TruthValue:
        return TruthValue.of(atom in self.true_set, atom in self.false_set)

    def truth_value(self, q: QueryLike) -> TruthValue:
        """Value of a ground atom, literal, conjunction or negated conjunction."""
        if isinstance(q, NegatedQuery):
            return ~self.truth_value(q.query)
        if isinstance(q, Struct):
            q = Literal(q)
        if isinstance(q, Literal):
            if not q.atom.is_ground:
                raise NonGroundQuery(f"query literal {q} is not ground")
            v = self.value(q.atom)
            return v if q.positive else ~v
        out = T
        for lit in q:
            out = out & self.truth_value(lit)
        return out

    def models(self, q: QueryLike) -> bool:
        """``I ⊨₄ q``: the value of ``q`` contains t."""
        return self.truth_value(q).has_t

    def leq_info(self, other: FourValuedInterp) -> bool:
        """Information ordering: every t/f fact of self is also in other."""
        return self.true_set <= other.true_set and self.false_set <= other.false_set

    def undefined(self, atoms: Iterable[Struct]) -> list:
        return sorted(
            (a for a in atoms if a not in self.true_set and a not in self.false_set),
            key=term_key,
        )

    def as_literal_set(self) -> frozenset:
        return frozenset(Literal(a) for a in self.true_set) | frozenset(
            Literal(a, False) for a in self.false_set
        )


class ThreeValuedInterp(FourValuedInterp):
    def __post_init__(self):
        super().__post_init__()
        if not self.is_three_valued:
            clash = sorted(self.inconsistent_atoms(), key=term_key)[:3]
            raise ValueError(f"3-valued interpretation with atoms both true and false: {clash}")


def models3(i: ThreeValuedInterp, q: QueryLike) -> bool:
    return i.models(q)


def truth_value(i: FourValuedInterp, q: QueryLike) -> TruthValue:
    return i.truth_value(q)


def models4(i: FourValuedInterp, q: QueryLike) -> bool:
    return i.models(q)
