"""Approximate specifications (Snf, St) and level mappings.

A specification is a pair of ground-atom sets given by set expressions
evaluated inside HB(d): extensional lists, least models of definite
generator programs, per-predicate complements, unions and intersections.
``Snf`` lists atoms that must not fail; atoms outside ``St`` must not
succeed.
"""

from __future__ import annotations

import ast
import os
import re
import typing
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

from .interp import FourValuedInterp
from .oracles import NotDefinite, bottom_up_model
from .syntax import (
    Clause,
    Literal,
    NegatedQuery,
    ParseError,
    Program,
    as_query,
    parse_atom,
    parse_atoms,
    parse_program,
    parse_term,
    prime_atom,
    prime_transform,
)
from .terms import Struct, Var, list_items, match, symbols, term_key, term_size
from .universe import EnumSort, GroundUniverse, ListSort, SortDecl, UnionSort

DEFAULT_WITNESS_CAP = 5


class SpecError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, source: Optional[str] = None):
        where = ""
        if source:
            where = f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line


class LevelError(ValueError):
    pass


def _ind(ind) -> str:
    return f"{ind[0]}/{ind[1]}"


# -- set expressions ----------------------------------------------------------


class SetExpr:
    def predicates(self) -> set:
        raise NotImplementedError

    def symbols(self) -> set:
        return set()


@dataclass(frozen=True)
class Extensional(SetExpr):
    atoms: tuple = ()

    def __post_init__(self):
        for a in self.atoms:
            if not a.is_ground:
                raise SpecError(f"extensional atom {a} is not ground")
        object.__setattr__(self, "atoms", tuple(self.atoms))

    def predicates(self):
        return {a.indicator for a in self.atoms}

    def symbols(self):
        acc: set = set()
        for a in self.atoms:
            for t in a.args:
                symbols(t, acc)
        return acc


@dataclass(frozen=True)
class LeastModel(SetExpr):
    """Least model of a definite generator, restricted to ``filter`` predicates."""

    program: Program
    filter: Optional[tuple] = None

    def __post_init__(self):
        if not self.program.is_definite:
            bad = next(c for c in self.program.clauses if not c.is_definite)
            raise NotDefinite(f"generator program is not definite: {bad}")
        if self.filter is not None:
            object.__setattr__(self, "filter", tuple(sorted(tuple(f) for f in self.filter)))

    def predicates(self):
        return set(self.filter) if self.filter is not None else set(self.program.predicates)

    def symbols(self):
        return self.program.function_symbols()


@dataclass(frozen=True)
class Complement(SetExpr):
    """``HB(d)`` slice of one predicate minus the value of ``expr``."""

    expr: SetExpr
    indicator: tuple

    def predicates(self):
        return {tuple(self.indicator)} | self.expr.predicates()

    def symbols(self):
        return self.expr.symbols()


@dataclass(frozen=True)
class Union(SetExpr):
    parts: tuple

    def predicates(self):
        return set().union(*(p.predicates() for p in self.parts))

    def symbols(self):
        return set().union(*(p.symbols() for p in self.parts))


@dataclass(frozen=True)
class Intersect(SetExpr):
    parts: tuple

    def predicates(self):
        return set().union(*(p.predicates() for p in self.parts))

    def symbols(self):
        return set().union(*(p.symbols() for p in self.parts))


def union(*parts: SetExpr) -> Union:
    return Union(tuple(parts))


def intersect(*parts: SetExpr) -> Intersect:
    return Intersect(tuple(parts))


EMPTY = Extensional(())


def eval_spec_set(e: SetExpr, u: GroundUniverse, dropped: Optional[list] = None) -> frozenset:
    """Evaluate a set expression inside ``HB(d)`` of ``u``.

    Extensional atoms outside HB(d) are dropped and, when a ``dropped`` list
    is given, appended to it.
    """
    cache: dict = {}
    return _eval(e, u, dropped, cache)


def _eval(e, u, dropped, cache):
    key = id(e)
    if key in cache:
        return cache[key][1]
    if isinstance(e, Extensional):
        keep = []
        for a in e.atoms:
            if u.contains_atom(a):
                keep.append(a)
            elif dropped is not None:
                dropped.append(a)
        out = frozenset(keep)
    elif isinstance(e, LeastModel):
        gen_u = u.with_predicates(e.program.predicates)
        model = bottom_up_model(e.program, gen_u)
        wanted = e.predicates()
        out = frozenset(a for a in model if a.indicator in wanted and u.contains_atom(a))
    elif isinstance(e, Complement):
        inner = _eval(e.expr, u, dropped, cache)
        out = frozenset(a for a in u.atoms(e.indicator) if a not in inner)
    elif isinstance(e, Union):
        out = frozenset().union(*(_eval(p, u, dropped, cache) for p in e.parts))
    elif isinstance(e, Intersect):
        vals = [_eval(p, u, dropped, cache) for p in e.parts]
        out = frozenset.intersection(*vals) if vals else frozenset()
    else:
        raise TypeError(f"not a set expression: {e!r}")
    cache[key] = (e, out)
    return out


# -- level mappings -------------------------------------------------------------


Level = typing.Union[int, tuple]


def level_less(a: Level, b: Level) -> bool:
    """``a ≺ b`` on naturals or on equal-width tuples of naturals."""
    if isinstance(a, tuple) != isinstance(b, tuple):
        raise LevelError(f"cannot compare levels {a!r} and {b!r}")
    if isinstance(a, tuple) and len(a) != len(b):
        raise LevelError(f"level tuples of different width: {a!r}, {b!r}")
    return a < b


def _check_level(v, atom) -> Level:
    if isinstance(v, bool):
        raise LevelError(f"level of {atom} is not a natural number: {v!r}")
    if isinstance(v, int):
        if v < 0:
            raise LevelError(f"level of {atom} is negative: {v}")
        return v
    if isinstance(v, tuple) and all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        if any(x < 0 for x in v):
            raise LevelError(f"level of {atom} has a negative component: {v}")
        return v
    raise LevelError(f"level of {atom} is not a natural or tuple of naturals: {v!r}")


class LevelMap:
    def value(self, atom: Struct) -> Level:
        raise NotImplementedError

    def defined(self, atom: Struct) -> bool:
        try:
            self.value(atom)
        except LevelError:
            return False
        return True


_ALLOWED_CALLS = {"size", "depth", "len", "max", "min"}


def _list_length(t, var):
    items = list_items(t)
    if items is None:
        raise LevelError(f"list-length measure applied to non-list {t} (variable {var})")
    return len(items)


class _ExprCompiler(ast.NodeVisitor):
    def __init__(self, variables: set, text: str):
        self.variables = variables
        self.text = text

    def fail(self, what):
        raise LevelError(f"{what} not allowed in level expression {self.text!r}")

    def generic_visit(self, node):
        self.fail(type(node).__name__)

    def visit_Expression(self, node):
        self.visit(node.body)

    def visit_Constant(self, node):
        if not isinstance(node.value, int) or isinstance(node.value, bool):
            self.fail(f"constant {node.value!r}")

    def visit_Tuple(self, node):
        for e in node.elts:
            self.visit(e)

    def visit_BinOp(self, node):
        if not isinstance(node.op, (ast.Add, ast.Sub, ast.Mult)):
            self.fail(type(node.op).__name__)
        self.visit(node.left)
        self.visit(node.right)

    def visit_Name(self, node):
        self.fail(f"bare name {node.id!r}")

    def visit_Call(self, node):
        if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_CALLS or node.keywords:
            self.fail("call")
        if node.func.id in ("max", "min"):
            if not node.args:
                self.fail("empty max/min")
            for a in node.args:
                self.visit(a)
            return
        if len(node.args) != 1 or not isinstance(node.args[0], ast.Name):
            self.fail(f"{node.func.id} needs a single variable argument")
        if node.args[0].id not in self.variables:
            raise LevelError(f"variable {node.args[0].id} not in the atom pattern of {self.text!r}")


def _eval_expr(node, env):
    if isinstance(node, ast.Expression):
        return _eval_expr(node.body, env)
    if isinstance(node, ast.Constant):
        return node.value
    if isinstance(node, ast.Tuple):
        return tuple(_eval_expr(e, env) for e in node.elts)
    if isinstance(node, ast.BinOp):
        a, b = _eval_expr(node.left, env), _eval_expr(node.right, env)
        if isinstance(a, tuple) or isinstance(b, tuple):
            raise LevelError("arithmetic on tuples")
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        return a * b
    name = node.func.id
    if name in ("max", "min"):
        vals = [_eval_expr(a, env) for a in node.args]
        return max(vals) if name == "max" else min(vals)
    var = node.args[0].id
    t = env[var]
    if name == "size":
        return term_size(t)
    if name == "depth":
        return t.depth
    return _list_length(t, var)


@dataclass(frozen=True)
class ExprRule:
    """Level of atoms matching ``pattern``, given by an arithmetic expression."""

    pattern: Struct
    text: str

    @cached_property
    def _code(self):
        try:
            tree = ast.parse(self.text.strip(), mode="eval")
        except SyntaxError as exc:
            raise LevelError(f"bad level expression {self.text!r}: {exc.msg}") from None
        names = {v.name for v in _pattern_vars(self.pattern)}
        _ExprCompiler(names, self.text).visit(tree)
        return tree

    def compile(self) -> None:
        self._code

    def value(self, atom: Struct) -> Level:
        s = match(self.pattern, atom, {})
        if s is None:
            raise LevelError(f"atom {atom} does not match level pattern {self.pattern}")
        env = {v.name: t for v, t in s.items()}
        return _check_level(_eval_expr(self._code, env), atom)


def _pattern_vars(t) -> list:
    if isinstance(t, Var):
        return [t]
    out = []
    for a in t.args:
        out.extend(_pattern_vars(a))
    return out


class ExprMap(LevelMap):
    """Per-predicate expressions over argument measures (``size``, ``depth``, ``len``)."""

    def __init__(self, rules: Iterable[ExprRule] = (), default: Optional[str] = None):
        self.rules: dict = {}
        for r in rules:
            r.compile()
            self.rules[r.pattern.indicator] = r
        self.default = None
        if default is not None:
            self.default = ExprRule(Struct("$any"), default)
            self.default.compile()

    def value(self, atom):
        rule = self.rules.get(atom.indicator)
        if rule is not None:
            return rule.value(atom)
        if self.default is not None:
            return _check_level(_eval_expr(self.default._code, {}), atom)
        raise LevelError(f"no level given for predicate {_ind(atom.indicator)}")


class TableMap(LevelMap):
    """Explicit finite map from ground atoms to levels."""

    def __init__(self, table: dict):
        self.table = {a: _check_level(v, a) for a, v in table.items()}

    def value(self, atom):
        try:
            return self.table[atom]
        except KeyError:
            raise LevelError(f"atom {atom} is outside the level table") from None


class PerPredicate(LevelMap):
    """Different level maps for different predicates, with an optional fallback."""

    def __init__(self, parts: dict, default: Optional[LevelMap] = None):
        self.parts = {tuple(k): v for k, v in parts.items()}
        self.default = default

    def value(self, atom):
        lm = self.parts.get(atom.indicator, self.default)
        if lm is None:
            raise LevelError(f"no level given for predicate {_ind(atom.indicator)}")
        return lm.value(atom)


class ConstantLevel(LevelMap):
    def __init__(self, value: Level):
        self.const = _check_level(value, "every atom")

    def value(self, atom):
        return self.const


def eval_level(lm: LevelMap, atom: Struct) -> Level:
    return lm.value(atom)


def missing_levels(lm: LevelMap, atoms: Iterable[Struct]) -> list:
    """Atoms at which ``lm`` is undefined, in canonical order."""
    return sorted((a for a in atoms if not lm.defined(a)), key=term_key)


def shortest_path_levels(edges: Iterable[tuple], pred: str = "p") -> dict:
    """``|p(t,u)|`` = number of edges on a shortest path from t to u (0 when t = u)."""
    adj: dict = {}
    nodes = set()
    for a, b in edges:
        adj.setdefault(a, set()).add(b)
        nodes.update((a, b))
    out = {}
    for s in sorted(nodes, key=term_key):
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for x in frontier:
                for y in sorted(adj.get(x, ()), key=term_key):
                    if y not in dist:
                        dist[y] = dist[x] + 1
                        nxt.append(y)
            frontier = nxt
        for t, d in dist.items():
            out[Struct(pred, (s, t))] = d
    return out


# -- specifications ---------------------------------------------------------------


@dataclass(frozen=True)
class UniverseDecl:
    """The ``[universe]`` part of a spec file."""

    symbols: frozenset = frozenset()
    sorts: tuple = ()
    signatures: tuple = ()
    depth: Optional[int] = None

    def sort_dict(self) -> dict:
        return dict(self.sorts)

    def signature_dict(self) -> dict:
        return dict(self.signatures)


@dataclass(frozen=True)
class Spec:
    snf: SetExpr
    st: SetExpr
    level: Optional[LevelMap] = field(default=None, compare=False)
    universe: UniverseDecl = UniverseDecl()
    name: Optional[str] = None

    def predicates(self) -> set:
        return self.snf.predicates() | self.st.predicates()

    def symbols(self) -> set:
        return self.snf.symbols() | self.st.symbols() | set(self.universe.symbols)

    def make_universe(self, program: Optional[Program], depth: Optional[int] = None, **kw) -> GroundUniverse:
        """The universe shared by ``program`` and this spec at depth ``d``.

        The depth defaults to the one declared by the spec, then to 1.
        """
        if depth is None:
            depth = self.universe.depth if self.universe.depth is not None else 1
        funcs = set(self.symbols())
        preds = set(self.predicates())
        if program is not None:
            funcs |= program.function_symbols()
            preds |= set(program.predicates)
        return GroundUniverse(
            funcs,
            depth,
            preds,
            sorts=self.universe.sort_dict(),
            signatures=self.universe.signature_dict(),
            **kw,
        )

    def evaluate(self, u: GroundUniverse) -> EvaluatedSpec:
        dropped: list = []
        snf = eval_spec_set(self.snf, u, dropped)
        st = eval_spec_set(self.st, u, dropped)
        return EvaluatedSpec(snf, st, u, tuple(sorted(set(dropped), key=term_key)), self.level)


@dataclass(frozen=True)
class EvaluatedSpec:
    snf: frozenset
    st: frozenset
    universe: GroundUniverse = field(compare=False)
    dropped: tuple = ()
    level: Optional[LevelMap] = field(default=None, compare=False)

    @cached_property
    def hb(self) -> frozenset:
        return frozenset(self.universe.herbrand_base())

    @property
    def depth(self) -> int:
        return self.universe.depth

    @property
    def is_proper(self) -> bool:
        return self.snf <= self.st


def from_sets(snf: Iterable[Struct], st: Iterable[Struct], u: GroundUniverse, level=None) -> EvaluatedSpec:
    """An evaluated spec given directly by two atom sets (restricted to HB(d))."""
    snf = frozenset(a for a in snf if u.contains_atom(a))
    st = frozenset(a for a in st if u.contains_atom(a))
    return EvaluatedSpec(snf, st, u, (), level)


def make_I4_corr(spec: EvaluatedSpec) -> FourValuedInterp:
    """``I⁴(Snf, St) = St ∪ ¬(HB ∖ Snf)``."""
    return FourValuedInterp(spec.st, spec.hb - spec.snf)


def make_I4_compl(spec: EvaluatedSpec) -> FourValuedInterp:
    """``I₄(Snf, St) = Snf ∪ ¬(HB ∖ St)``."""
    return FourValuedInterp(spec.snf, spec.hb - spec.st)


@dataclass(frozen=True)
class ProperResult:
    proper: bool
    witnesses: tuple
    count: int

    def __bool__(self):
        return self.proper


def check_proper(spec: EvaluatedSpec, k: int = DEFAULT_WITNESS_CAP) -> ProperResult:
    bad = sorted(spec.snf - spec.st, key=term_key)
    return ProperResult(not bad, tuple(bad[:k]), len(bad))


# -- the primed two-valued encoding --------------------------------------------


def primed_model(x: Iterable[Struct], y: Iterable[Struct]) -> frozenset:
    """The 2-valued interpretation ``X ∪ Y′``."""
    return frozenset(x) | frozenset(prime_atom(a) for a in y)


def holds2(model: frozenset, formula) -> bool:
    """Classical truth of a ground literal, query, negated query or clause."""
    if isinstance(formula, Clause):
        body = all(holds2(model, l) for l in formula.body)
        return not body or formula.head in model
    if isinstance(formula, NegatedQuery):
        return not holds2(model, formula.query)
    if isinstance(formula, Struct):
        return formula in model
    if isinstance(formula, Literal):
        if not formula.atom.is_ground:
            raise ValueError(f"literal {formula} is not ground")
        return (formula.atom in model) == formula.positive
    return all(holds2(model, l) for l in formula)


def encoded_models4(x: Iterable[Struct], y: Iterable[Struct], q) -> bool:
    """``X ∪ ¬(HB∖Y) ⊨₄ q`` decided in 2-valued logic.

    For a query, checks ``X ∪ Y′ ⊨ Q′``; for a negated query ``¬Q`` checks
    ``X ∪ Y′ ⊨ ¬Q″``.
    """
    m = primed_model(x, y)
    if isinstance(q, NegatedQuery):
        return holds2(m, NegatedQuery(prime_transform(as_query(q.query), "positive")))
    return holds2(m, prime_transform(as_query(q), "negative"))


def spec_models(spec: EvaluatedSpec, q) -> bool:
    """``St ∪ Snf′ ⊨ Q′`` (or ``⊨ ¬Q″`` for a negated query)."""
    return encoded_models4(spec.st, spec.snf, q)


# -- spec file format ---------------------------------------------------------------

_SECTION = re.compile(r"^\s*\[(\w+)\]\s*(?:%.*)?$")
_KNOWN_SECTIONS = ("universe", "define", "snf", "st", "level")


def _strip_comment(line: str) -> str:
    out = []
    quoted = False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        if ch == "%" and not quoted:
            break
        out.append(ch)
    return "".join(out)


def _split_sections(text: str, source):
    sections: dict = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        m = _SECTION.match(line)
        if m:
            current = m.group(1)
            if current not in _KNOWN_SECTIONS:
                raise SpecError(f"unknown section [{current}]", lineno, source)
            if current in sections:
                raise SpecError(f"duplicate section [{current}]", lineno, source)
            sections[current] = (lineno + 1, [])
            continue
        if current is None:
            if _strip_comment(line).strip():
                raise SpecError("text before the first section", lineno, source)
            continue
        sections[current][1].append(line)
    return {k: (start, "\n".join(lines)) for k, (start, lines) in sections.items()}


def _parse_indicator(text: str, line=None, source=None) -> tuple:
    m = re.fullmatch(r"\s*([a-z][A-Za-z0-9_]*|[0-9]+|\[\]|\.|\"(?:[^\"\\]|\\.)*\")\s*/\s*(\d+)\s*", text)
    if not m:
        raise SpecError(f"expected name/arity, got {text.strip()!r}", line, source)
    name = m.group(1)
    if name.startswith('"'):
        name = re.sub(r"\\(.)", r"\1", name[1:-1])
    return (name, int(m.group(2)))


class _ExprParser:
    """Recursive descent over the set-expression language."""

    def __init__(self, text: str, first_line: int, source, base_dir, defs: dict):
        self.text = text
        self.pos = 0
        self.first_line = first_line
        self.source = source
        self.base_dir = base_dir
        self.defs = defs

    def line(self, pos=None) -> int:
        pos = self.pos if pos is None else pos
        return self.first_line + self.text.count("\n", 0, pos)

    def error(self, msg, pos=None):
        raise SpecError(msg, self.line(pos), self.source)

    def skip(self):
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch.isspace():
                self.pos += 1
            elif ch == "%":
                nl = self.text.find("\n", self.pos)
                self.pos = len(self.text) if nl < 0 else nl
            else:
                break

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def expect(self, s: str):
        if not self.peek(s):
            found = self.text[self.pos : self.pos + 12] or "end of section"
            self.error(f"expected {s!r}, found {found!r}")
        self.pos += len(s)

    def ident(self) -> str:
        self.skip()
        m = re.compile(r"[A-Za-z_][A-Za-z0-9_]*").match(self.text, self.pos)
        if not m:
            self.error("expected a name")
        self.pos = m.end()
        return m.group(0)

    def string(self) -> str:
        self.skip()
        m = re.compile(r'"((?:[^"\\]|\\.)*)"').match(self.text, self.pos)
        if not m:
            self.error("expected a quoted file name")
        self.pos = m.end()
        return re.sub(r"\\(.)", r"\1", m.group(1))

    def braced(self) -> tuple:
        self.expect("{")
        start = self.pos
        depth = 1
        quoted = False
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if quoted:
                if ch == "\\":
                    self.pos += 1
                elif ch == '"':
                    quoted = False
            elif ch == '"':
                quoted = True
            elif ch == "%":
                nl = self.text.find("\n", self.pos)
                self.pos = len(self.text) - 1 if nl < 0 else nl
            elif ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    body = self.text[start : self.pos]
                    self.pos += 1
                    return body, start
            self.pos += 1
        self.error("unterminated '{'", start)

    def indicator(self):
        self.skip()
        m = re.compile(r"([a-z][A-Za-z0-9_]*|[0-9]+|\[\]|\"(?:[^\"\\]|\\.)*\")\s*/\s*(\d+)").match(
            self.text, self.pos
        )
        if not m:
            self.error("expected name/arity")
        self.pos = m.end()
        return _parse_indicator(m.group(0))

    def sub_program(self, body: str, start: int) -> Program:
        try:
            return parse_program(body)
        except ParseError as exc:
            raise SpecError(f"in generator: {exc.message}", self.line(start) + exc.line - 1, self.source) from None

    def expr(self) -> SetExpr:
        self.skip()
        start = self.pos
        name = self.ident()
        if name in ("union", "intersect"):
            self.expect("(")
            parts = [self.expr()]
            while self.peek(","):
                self.pos += 1
                parts.append(self.expr())
            self.expect(")")
            return Union(tuple(parts)) if name == "union" else Intersect(tuple(parts))
        if name == "complement":
            self.expect("(")
            ind = self.indicator()
            self.expect(",")
            inner = self.expr()
            self.expect(")")
            return Complement(inner, ind)
        if name == "all":
            self.expect("(")
            ind = self.indicator()
            self.expect(")")
            return Complement(EMPTY, ind)
        if name == "empty":
            return EMPTY
        if name == "extensional":
            body, bstart = self.braced()
            try:
                return Extensional(tuple(parse_atoms(body)))
            except ParseError as exc:
                raise SpecError(
                    f"in extensional set: {exc.message}", self.line(bstart) + exc.line - 1, self.source
                ) from None
        if name == "generator":
            if self.peek("{"):
                body, bstart = self.braced()
                program = self.sub_program(body, bstart)
            else:
                program = self._load_program(self.string())
            filt = None
            self.skip()
            m = re.compile(r"filter\b").match(self.text, self.pos)
            if m:
                self.pos = m.end()
                filt = [self.indicator()]
                while self.peek(","):
                    save = self.pos
                    self.pos += 1
                    try:
                        filt.append(self.indicator())
                    except SpecError:
                        self.pos = save
                        break
            try:
                return LeastModel(program, tuple(filt) if filt else None)
            except NotDefinite as exc:
                self.error(str(exc), start)
        if name in self.defs:
            return self.defs[name]
        self.error(f"unknown set or operator {name!r}", start)

    def _load_program(self, rel: str) -> Program:
        path = os.path.join(self.base_dir or ".", rel)
        try:
            with open(path, encoding="utf-8") as fh:
                return parse_program(fh.read())
        except OSError as exc:
            self.error(f"cannot read generator file {rel!r}: {exc.strerror}")
        except ParseError as exc:
            self.error(f"in generator file {rel!r}: {exc}")


def _parse_universe(body: str, first: int, source) -> UniverseDecl:
    syms: set = set()
    sorts: dict = {}
    sigs: dict = {}
    depth = None
    for off, raw in enumerate(body.splitlines()):
        lineno = first + off
        line = _strip_comment(raw).strip()
        if not line:
            continue
        m = re.fullmatch(r"symbols\s*=\s*(.*)", line)
        if m:
            for part in filter(None, (p.strip() for p in m.group(1).split(","))):
                syms.add(_parse_indicator(part, lineno, source))
            continue
        m = re.fullmatch(r"depth\s*=\s*(\d+)", line)
        if m:
            depth = int(m.group(1))
            if depth < 1:
                raise SpecError("depth must be at least 1", lineno, source)
            continue
        m = re.fullmatch(r"sort\s+([a-z][A-Za-z0-9_]*)\s*=\s*(.*)", line)
        if m:
            name, rhs = m.group(1), m.group(2).strip()
            if name == "any" or name in sorts:
                raise SpecError(f"sort {name!r} redefined", lineno, source)
            sorts[name] = _parse_sort(rhs, lineno, source)
            continue
        m = re.fullmatch(r"pred\s+(\S+)\s*:\s*(.*)", line)
        if m:
            ind = _parse_indicator(m.group(1), lineno, source)
            sig = tuple(s.strip() for s in m.group(2).split(","))
            if len(sig) != ind[1]:
                raise SpecError(f"{_ind(ind)} needs {ind[1]} sorts, got {len(sig)}", lineno, source)
            sigs[ind] = sig
            continue
        raise SpecError(f"cannot parse universe line {line!r}", lineno, source)
    for ind, sig in sigs.items():
        for s in sig:
            if s != "any" and s not in sorts:
                raise SpecError(f"unknown sort {s!r} in signature of {_ind(ind)}", None, source)
    return UniverseDecl(
        frozenset(syms),
        tuple(sorted(sorts.items())),
        tuple(sorted(sigs.items())),
        depth,
    )


def _parse_sort(rhs: str, lineno, source) -> SortDecl:
    if rhs.startswith("{"):
        if not rhs.endswith("}"):
            raise SpecError("unterminated sort enumeration", lineno, source)
        inner = rhs[1:-1].strip()
        terms = []
        if inner:
            try:
                # parse as the arguments of a dummy compound to reuse the term parser
                terms = list(parse_term(f"s({inner})").args)
            except ParseError as exc:
                raise SpecError(f"bad sort member: {exc.message}", lineno, source) from None
        for t in terms:
            if not t.is_ground:
                raise SpecError(f"sort member {t} is not ground", lineno, source)
        return EnumSort(terms)
    m = re.fullmatch(r"list\(\s*([a-z][A-Za-z0-9_]*)\s*(?:,\s*(\d+)\s*)?\)", rhs)
    if m:
        return ListSort(m.group(1), int(m.group(2)) if m.group(2) else None)
    parts = [p.strip() for p in rhs.split("|")]
    if len(parts) > 1 and all(re.fullmatch(r"[a-z][A-Za-z0-9_]*", p) for p in parts):
        return UnionSort(parts)
    raise SpecError(f"cannot parse sort {rhs!r}", lineno, source)


_TABLE_LINE = re.compile(r"^(.*?)\s+(\d+|\(\s*\d+(?:\s*,\s*\d+)*\s*\))\s*$")


def parse_level_table(text: str, source=None) -> dict:
    """Lines ``atom value`` where value is a natural or a tuple ``(n1, ..., nk)``."""
    table = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        m = _TABLE_LINE.match(line)
        if not m:
            raise SpecError(f"expected 'atom value', got {line!r}", lineno, source)
        try:
            atom = parse_atom(m.group(1))
        except ParseError as exc:
            raise SpecError(f"bad atom in level table: {exc.message}", lineno, source) from None
        if not atom.is_ground:
            raise SpecError(f"level table atom {atom} is not ground", lineno, source)
        raw_v = m.group(2)
        if raw_v.startswith("("):
            value = tuple(int(x) for x in raw_v.strip("() ").split(","))
        else:
            value = int(raw_v)
        if atom in table and table[atom] != value:
            raise SpecError(f"conflicting levels for {atom}", lineno, source)
        table[atom] = value
    return table


def _parse_level(body: str, first: int, source, base_dir) -> LevelMap:
    parts: dict = {}
    default = None

    def load_table(rel, lineno):
        path = os.path.join(base_dir or ".", rel)
        try:
            with open(path, encoding="utf-8") as fh:
                return parse_level_table(fh.read(), rel)
        except OSError as exc:
            raise SpecError(f"cannot read level table {rel!r}: {exc.strerror}", lineno, source) from None

    for off, raw in enumerate(body.splitlines()):
        lineno = first + off
        line = _strip_comment(raw).strip()
        if not line:
            continue
        m = re.fullmatch(r'table\s+"((?:[^"\\]|\\.)*)"', line)
        if m:
            table = load_table(m.group(1), lineno)
            by_pred: dict = {}
            for a, v in table.items():
                by_pred.setdefault(a.indicator, {})[a] = v
            for ind, t in by_pred.items():
                if ind in parts:
                    raise SpecError(f"level for {_ind(ind)} given twice", lineno, source)
                parts[ind] = TableMap(t)
            continue
        if "=" not in line:
            raise SpecError(f"expected 'pattern = expression', got {line!r}", lineno, source)
        lhs, rhs = (s.strip() for s in line.split("=", 1))
        try:
            if lhs == "default":
                default = ExprMap((), rhs)
                continue
            if re.fullmatch(r"[^()]+/\d+", lhs):
                ind = _parse_indicator(lhs, lineno, source)
                pattern = Struct(ind[0], tuple(Var(f"A{i + 1}") for i in range(ind[1])))
            else:
                try:
                    pattern = parse_atom(lhs)
                except ParseError as exc:
                    raise SpecError(f"bad level pattern: {exc.message}", lineno, source) from None
                vs = _pattern_vars(pattern)
                if len({v.name for v in vs}) != len(vs):
                    raise SpecError(f"level pattern {lhs} repeats a variable", lineno, source)
            ind = pattern.indicator
            if ind in parts:
                raise SpecError(f"level for {_ind(ind)} given twice", lineno, source)
            tm = re.fullmatch(r'table\s+"((?:[^"\\]|\\.)*)"', rhs)
            if tm:
                table = load_table(tm.group(1), lineno)
                bad = [a for a in table if a.indicator != ind]
                if bad:
                    raise SpecError(f"level table for {_ind(ind)} contains {bad[0]}", lineno, source)
                parts[ind] = TableMap(table)
            else:
                parts[ind] = ExprMap([ExprRule(pattern, rhs)])
        except LevelError as exc:
            raise SpecError(str(exc), lineno, source) from None
    return PerPredicate(parts, default)


def parse_spec(text: str, base_dir: Optional[str] = None, source: Optional[str] = None) -> Spec:
    """Parse the sectioned spec format (see the README for the grammar)."""
    sections = _split_sections(text, source)
    for need in ("snf", "st"):
        if need not in sections:
            raise SpecError(f"missing [{need}] section", None, source)
    universe = UniverseDecl()
    if "universe" in sections:
        first, body = sections["universe"]
        universe = _parse_universe(body, first, source)
    defs: dict = {}
    if "define" in sections:
        first, body = sections["define"]
        p = _ExprParser(body, first, source, base_dir, defs)
        while not p.at_end():
            name_pos = p.pos
            name = p.ident()
            if name in defs or name in ("union", "intersect", "complement", "all", "empty", "extensional", "generator"):
                p.error(f"cannot define {name!r}", name_pos)
            p.expect("=")
            defs[name] = p.expr()
    exprs = {}
    for which in ("snf", "st"):
        first, body = sections[which]
        p = _ExprParser(body, first, source, base_dir, defs)
        if p.at_end():
            raise SpecError(f"empty [{which}] section", first, source)
        exprs[which] = p.expr()
        if not p.at_end():
            p.error("unexpected text after the set expression")
    level = None
    if "level" in sections:
        first, body = sections["level"]
        level = _parse_level(body, first, source, base_dir)
    return Spec(exprs["snf"], exprs["st"], level, universe, source)


def load_spec(path: str) -> Spec:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_spec(text, os.path.dirname(os.path.abspath(path)), os.path.basename(path))
