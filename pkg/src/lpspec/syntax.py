"""Normal logic programs: literals, clauses, programs, queries.

Surface syntax (one clause per ``.``)::

    % comment
    o(s(X)) :- not o(X).
    m(E, [E|_]).

Variables start with an upper-case letter or ``_``; a bare ``_`` is a fresh
anonymous variable.  Names start with a lower-case letter, are digit strings,
or are double-quoted.  ``not`` is a keyword that negates the following atom.
There are no operators besides ``,`` and ``:-``.  Predicate names ending in
the prime suffix ``'`` are reserved for the primed encoding and rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

from .terms import (
    CONS,
    NIL,
    Struct,
    Term,
    Var,
    format_term,
    mklist,
    symbols,
    variables,
)

PRIME = "'"


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class ArityError(ValueError):
    pass


class PrimeError(ValueError):
    pass


@dataclass(frozen=True)
class Literal:
    atom: Struct
    positive: bool = True

    def __post_init__(self):
        if not isinstance(self.atom, Struct):
            raise TypeError(f"literal atom must be a compound term, got {self.atom!r}")

    @property
    def negative(self) -> bool:
        return not self.positive

    @property
    def is_ground(self) -> bool:
        return self.atom.is_ground

    def negate(self) -> Literal:
        return Literal(self.atom, not self.positive)

    def __str__(self):
        text = format_term(self.atom)
        return text if self.positive else f"not {text}"


@dataclass(frozen=True)
class Clause:
    head: Struct
    body: tuple = ()

    def __post_init__(self):
        if not isinstance(self.head, Struct):
            raise TypeError("clause head must be an atom")
        object.__setattr__(self, "body", tuple(self.body))

    @classmethod
    def trusted(cls, head: Struct, body: tuple) -> Clause:
        """Build a clause from an atom and a tuple of literals without checks."""
        c = object.__new__(cls)
        object.__setattr__(c, "head", head)
        object.__setattr__(c, "body", body)
        return c

    @property
    def is_fact(self) -> bool:
        return not self.body

    @property
    def is_definite(self) -> bool:
        return all(lit.positive for lit in self.body)

    @property
    def is_ground(self) -> bool:
        return self.head.is_ground and all(lit.is_ground for lit in self.body)

    def atoms(self) -> Iterator[Struct]:
        yield self.head
        for lit in self.body:
            yield lit.atom

    def variables(self) -> list:
        acc: dict = {}
        for a in self.atoms():
            variables(a, acc)
        return list(acc)

    def __str__(self):
        return format_clause(self)


Query = tuple  # tuple[Literal, ...]


@dataclass(frozen=True)
class NegatedQuery:
    """The formula ``¬(L1 ∧ ... ∧ Ln)``."""

    query: tuple

    def __str__(self):
        return f"not ({format_query(self.query)})"


@dataclass(frozen=True)
class Program:
    clauses: tuple = ()
    predicates: frozenset = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        declared = set(self.predicates or ())
        for c in self.clauses:
            for a in c.atoms():
                declared.add(a.indicator)
        _check_arities(declared)
        object.__setattr__(self, "predicates", frozenset(declared))
        index: dict = {}
        for i, c in enumerate(self.clauses):
            index.setdefault(c.head.indicator, []).append(i)
        object.__setattr__(self, "_index", {k: tuple(v) for k, v in index.items()})

    def procedure(self, indicator) -> list:
        """Clauses defining ``indicator``, in program order, with their indices."""
        return [(i, self.clauses[i]) for i in self._index.get(tuple(indicator), ())]

    @property
    def is_definite(self) -> bool:
        return all(c.is_definite for c in self.clauses)

    @property
    def is_ground(self) -> bool:
        return all(c.is_ground for c in self.clauses)

    def function_symbols(self) -> set:
        acc: set = set()
        for c in self.clauses:
            for a in c.atoms():
                for t in a.args:
                    symbols(t, acc)
        return acc

    def with_predicates(self, extra: Iterable) -> Program:
        return Program(self.clauses, self.predicates | frozenset(extra))

    def __add__(self, other: Program) -> Program:
        return Program(self.clauses + other.clauses, self.predicates | other.predicates)

    def __len__(self):
        return len(self.clauses)

    def __iter__(self):
        return iter(self.clauses)

    def __str__(self):
        return format_program(self)


def _check_arities(indicators) -> None:
    seen: dict = {}
    for name, arity in sorted(indicators):
        if name in seen and seen[name] != arity:
            raise ArityError(f"predicate {name} used with arities {seen[name]} and {arity}")
        seen[name] = arity


# -- printing ----------------------------------------------------------------


def format_clause(c: Clause) -> str:
    head = format_term(c.head)
    if not c.body:
        return f"{head}."
    return f"{head} :- {format_query(c.body)}."


def format_query(q) -> str:
    return ", ".join(str(lit) for lit in q)


def format_program(p: Program) -> str:
    return "".join(format_clause(c) + "\n" for c in p.clauses)


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<neck>:-)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<name>[a-z][A-Za-z0-9_]*|[0-9]+)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<punct>[()\[\],|.])
  | (?P<prime>')
    """,
    re.VERBOSE,
)

_ANON = "_?"


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "prime":
            raise ParseError("primed names are reserved for the primed encoding", line, col)
        if kind != "ws":
            if kind == "str":
                chunk = re.sub(r"\\(.)", r"\1", chunk[1:-1])
                kind = "name"
            out.append(_Tok(kind, chunk, line, col))
        newlines = m.group().count("\n")
        if newlines:
            line += newlines
            line_start = pos + m.group().rfind("\n") + 1
        pos = m.end()
    out.append(_Tok("eof", "", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.anon = 0
        # predicate name -> (arity, line) of first use
        self.first_use: dict = {}

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def expect(self, kind: str, text: Optional[str] = None) -> _Tok:
        tok = self.tok
        if tok.kind != kind or (text is not None and tok.text != text):
            want = repr(text) if text else kind
            got = repr(tok.text) if tok.kind != "eof" else "end of input"
            raise self.error(f"expected {want}, got {got}")
        self.i += 1
        return tok

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        tok = self.tok
        return tok.kind == kind and (text is None or tok.text == text)

    # terms

    def term(self) -> Term:
        tok = self.tok
        if tok.kind == "var":
            self.i += 1
            if tok.text == "_":
                self.anon += 1
                return Var(f"{_ANON}{self.anon}")
            return Var(tok.text)
        if tok.kind == "name":
            self.i += 1
            if self.at("punct", "("):
                return Struct(tok.text, self.args())
            return Struct(tok.text)
        if self.at("punct", "["):
            return self.list_term()
        raise self.error(f"expected a term, got {tok.text!r}" if tok.kind != "eof" else "unexpected end of input")

    def args(self) -> tuple:
        self.expect("punct", "(")
        out = [self.term()]
        while self.at("punct", ","):
            self.i += 1
            out.append(self.term())
        self.expect("punct", ")")
        return tuple(out)

    def list_term(self) -> Term:
        self.expect("punct", "[")
        if self.at("punct", "]"):
            self.i += 1
            return Struct(NIL)
        items = [self.term()]
        while self.at("punct", ","):
            self.i += 1
            items.append(self.term())
        tail = None
        if self.at("punct", "|"):
            self.i += 1
            tail = self.term()
        self.expect("punct", "]")
        return mklist(items, tail)

    # atoms and literals

    def atom(self) -> Struct:
        tok = self.tok
        if tok.kind != "name":
            raise self.error(f"expected an atom, got {tok.text!r}" if tok.kind != "eof" else "expected an atom")
        t = self.term()
        name, arity = t.indicator
        known = self.first_use.setdefault(name, (arity, tok.line))
        if known[0] != arity:
            raise ParseError(
                f"arity conflict: predicate {name} used with arity {arity}, "
                f"earlier with arity {known[0]} at line {known[1]}",
                tok.line,
                tok.col,
            )
        return t

    def literal(self) -> Literal:
        if self.at("name", "not"):
            nxt = self.toks[self.i + 1]
            if nxt.kind != "name":
                raise self.error("expected an atom after 'not'", nxt)
            self.i += 1
            return Literal(self.atom(), positive=False)
        return Literal(self.atom())

    def body(self) -> tuple:
        out = [self.literal()]
        while self.at("punct", ","):
            self.i += 1
            out.append(self.literal())
        return tuple(out)

    def clause(self) -> Clause:
        head_tok = self.tok
        if self.at("name", "not") and self.toks[self.i + 1].kind == "name":
            raise self.error("clause head cannot be negated", head_tok)
        head = self.atom()
        body: tuple = ()
        if self.at("neck"):
            self.i += 1
            body = self.body()
        self.expect("punct", ".")
        return _name_anonymous(Clause(head, body))

    def program(self) -> Program:
        clauses = []
        while not self.at("eof"):
            clauses.append(self.clause())
        return Program(tuple(clauses))


def _name_anonymous(c: Clause) -> Clause:
    names = {v.name for v in c.variables()}
    anon = sorted((n for n in names if n.startswith(_ANON)), key=lambda n: int(n[len(_ANON):]))
    if not anon:
        return c
    mapping = {}
    k = 0
    for n in anon:
        k += 1
        while f"_{k}" in names:
            k += 1
        mapping[Var(n)] = Var(f"_{k}")
    from .terms import apply

    return Clause(apply(c.head, mapping), tuple(Literal(apply(l.atom, mapping), l.positive) for l in c.body))


def parse_program(text: str) -> Program:
    """Parse program text; clause order is preserved."""
    return _Parser(text).program()


def parse_clause(text: str) -> Clause:
    p = _Parser(text)
    c = p.clause()
    p.expect("eof")
    return c


def parse_query(text: str) -> tuple:
    """Parse ``L1, ..., Ln`` (a trailing ``.`` is optional)."""
    p = _Parser(text)
    if p.at("eof"):
        return ()
    body = p.body()
    if p.at("punct", "."):
        p.i += 1
    p.expect("eof")
    c = _name_anonymous(Clause(Struct("$query"), body))
    return c.body


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.expect("eof")
    return t


def parse_atom(text: str) -> Struct:
    p = _Parser(text)
    t = p.atom()
    if p.at("punct", "."):
        p.i += 1
    p.expect("eof")
    return t


def parse_atoms(text: str) -> list:
    """Comma- or whitespace-separated atoms, e.g. ``p(a), q(b)``."""
    p = _Parser(text)
    out = []
    while not p.at("eof"):
        out.append(p.atom())
        if p.at("punct", ",") or p.at("punct", "."):
            p.i += 1
    return out


def as_query(q) -> tuple:
    if isinstance(q, str):
        return parse_query(q)
    if isinstance(q, Literal):
        return (q,)
    if isinstance(q, Struct):
        return (Literal(q),)
    return tuple(Literal(x) if isinstance(x, Struct) else x for x in q)


# -- primed encoding ---------------------------------------------------------


def primed(name: str) -> str:
    return name + PRIME


def is_primed(name: str) -> bool:
    return name.endswith(PRIME)


def prime_atom(a: Struct) -> Struct:
    if a.functor == "=":
        return a
    return Struct(primed(a.functor), a.args)


def unprime_atom(a: Struct) -> Struct:
    if is_primed(a.functor):
        return Struct(a.functor[: -len(PRIME)], a.args)
    return a


Primeable = Union[Program, Clause, tuple, NegatedQuery, Literal]


def _prime_literal(lit: Literal, mode: str) -> Literal:
    if (mode == "negative" and lit.negative) or (mode == "positive" and lit.positive):
        return Literal(prime_atom(lit.atom), lit.positive)
    return lit


def _check_unprimed(atoms) -> None:
    for a in atoms:
        if is_primed(a.functor):
            raise PrimeError(f"input already contains primed predicate {a.functor}")


def prime_transform(obj: Primeable, mode: str = "negative"):
    """Rename predicates to their primed copies.

    ``mode="negative"`` primes every negative literal (F'),
    ``mode="positive"`` primes every positive literal, including clause heads
    (F'').  Applying the transform to already primed input is an error.
    """
    if mode not in ("negative", "positive"):
        raise ValueError(f"mode must be 'negative' or 'positive', not {mode!r}")
    if isinstance(obj, Program):
        _check_unprimed(a for c in obj.clauses for a in c.atoms())
        return Program(tuple(prime_transform(c, mode) for c in obj.clauses))
    if isinstance(obj, Clause):
        _check_unprimed(obj.atoms())
        head = prime_atom(obj.head) if mode == "positive" else obj.head
        return Clause(head, tuple(_prime_literal(l, mode) for l in obj.body))
    if isinstance(obj, NegatedQuery):
        return NegatedQuery(prime_transform(obj.query, mode))
    if isinstance(obj, Literal):
        _check_unprimed([obj.atom])
        return _prime_literal(obj, mode)
    query = tuple(obj)
    _check_unprimed(l.atom for l in query)
    return tuple(_prime_literal(l, mode) for l in query)


def erase_primes(obj):
    """Inverse of :func:`prime_transform` (either mode)."""
    if isinstance(obj, Program):
        return Program(tuple(erase_primes(c) for c in obj.clauses))
    if isinstance(obj, Clause):
        return Clause(unprime_atom(obj.head), tuple(erase_primes(l) for l in obj.body))
    if isinstance(obj, NegatedQuery):
        return NegatedQuery(erase_primes(obj.query))
    if isinstance(obj, Literal):
        return Literal(unprime_atom(obj.atom), obj.positive)
    return tuple(erase_primes(l) for l in obj)
