"""First-order terms, substitutions and unification.

Terms are immutable.  A variable is a :class:`Var`; everything else is a
:class:`Struct` (constants are 0-ary structs).  Lists use the functor ``.``/2
and the constant ``[]``.
"""

from __future__ import annotations

import weakref
from typing import Iterable, Iterator, Mapping, Optional

CONS = "."
NIL = "[]"


_VARS: weakref.WeakValueDictionary = weakref.WeakValueDictionary()


class Var:
    """A logic variable.  Interned by name, so equality is identity."""

    __slots__ = ("name", "__weakref__")

    def __new__(cls, name: str):
        v = _VARS.get(name)
        if v is not None:
            return v
        if not name:
            raise ValueError("variable name must be nonempty")
        v = object.__new__(cls)
        object.__setattr__(v, "name", name)
        _VARS[name] = v
        return v

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __repr__(self):
        return f"Var({self.name!r})"

    def __str__(self):
        return self.name

    def __reduce__(self):
        return (Var, (self.name,))

    is_ground = False
    depth = 0
    _ground = False
    _depth = 0
    _size = 1


# Hash-consing table.  Equality stays structural, so dropping the table
# when it grows past the cap only costs speed.
_INTERNED: dict = {}
INTERN_CAP = 4_000_000


class Struct:
    """Compound term ``functor(args...)``; ``args`` is a tuple.

    Terms are hash-consed: constructing an equal term usually returns the
    existing object, so most equality tests end at the identity check.  They
    are treated as immutable (attributes are never reassigned; this class is
    on the hot path of grounding, so it skips the ``__setattr__`` guard that
    :class:`Var` has).
    """

    __slots__ = ("functor", "args", "_hash", "_ground", "_depth", "_size", "_key")

    def __new__(cls, functor: str, args: Iterable[Term] = ()):
        if type(args) is not tuple:
            args = tuple(args)
        key = (functor, args)
        t = _INTERNED.get(key)
        if t is not None:
            return t
        t = object.__new__(cls)
        t.functor = functor
        t.args = args
        t._hash = hash(key)
        if args:
            ground = True
            depth = 0
            size = 1
            for a in args:
                if not a._ground:
                    ground = False
                d = a._depth
                if d > depth:
                    depth = d
                size += a._size
            t._ground = ground
            t._depth = depth + 1
            t._size = size
        else:
            t._ground = True
            t._depth = 1
            t._size = 1
        t._key = None
        if len(_INTERNED) >= INTERN_CAP:
            _INTERNED.clear()
        _INTERNED[key] = t
        return t

    def __reduce__(self):
        return (Struct, (self.functor, self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def indicator(self) -> tuple[str, int]:
        return (self.functor, len(self.args))

    @property
    def is_ground(self) -> bool:
        return self._ground

    @property
    def depth(self) -> int:
        """Constants have depth 1; ``f(t1..tn)`` has 1 + max child depth.

        Variables count as depth 0, so for non-ground terms this is a lower
        bound on the depth of any instance.
        """
        return self._depth

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Struct)
            and self._hash == other._hash
            and self.functor == other.functor
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Struct({self.functor!r}, {self.args!r})"

    def __str__(self):
        return format_term(self)


Term = "Var | Struct"


def const(name: str) -> Struct:
    return Struct(name, ())


def mklist(items: Iterable[Term], tail: Optional[Term] = None) -> Term:
    items = list(items)
    out = tail if tail is not None else Struct(NIL)
    for item in reversed(items):
        out = Struct(CONS, (item, out))
    return out


def list_items(t: Term) -> Optional[list]:
    """Elements of a proper list, or None if ``t`` is not one."""
    items = []
    while isinstance(t, Struct) and t.functor == CONS and len(t.args) == 2:
        items.append(t.args[0])
        t = t.args[1]
    if isinstance(t, Struct) and t.functor == NIL and not t.args:
        return items
    return None


def is_list(t: Term) -> bool:
    return list_items(t) is not None


def term_size(t: Term) -> int:
    return t._size


def variables(t: Term, acc: Optional[dict] = None) -> dict:
    """Variables of ``t`` in first-occurrence order (dict used as ordered set)."""
    if acc is None:
        acc = {}
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            acc.setdefault(x, None)
        elif not x._ground:
            stack.extend(reversed(x.args))
    return acc


def symbols(t: Term, acc: Optional[set] = None) -> set:
    """Function symbols (name, arity) occurring in ``t``."""
    if acc is None:
        acc = set()
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Struct):
            acc.add((x.functor, len(x.args)))
            stack.extend(x.args)
    return acc


def term_key(t: Term):
    """Canonical sort key: variables first, then by functor name, arity, args."""
    if isinstance(t, Var):
        return (0, t.name)
    key = t._key
    if key is None:
        key = (1, t.functor, len(t.args), tuple(term_key(a) for a in t.args))
        t._key = key
    return key


# -- substitutions ---------------------------------------------------------

Subst = Mapping  # Var -> Term


def walk(t: Term, s: Subst) -> Term:
    while isinstance(t, Var) and t in s:
        t = s[t]
    return t


def apply(t: Term, s: Subst) -> Term:
    """Apply a (triangular or idempotent) substitution to ``t``."""
    if not s:
        return t
    if isinstance(t, Var):
        u = walk(t, s)
        if u is t or isinstance(u, Var):
            return u
        return apply(u, s)
    if t._ground:
        return t
    return Struct(t.functor, tuple(apply(a, s) for a in t.args))


def substitute(t: Term, s: Mapping) -> Term:
    """Apply an idempotent substitution (no chains through bound variables)."""
    if t.__class__ is Var:
        return s.get(t, t)
    if t._ground:
        return t
    # leaves are handled inline: this runs once per candidate clause instance
    args = tuple(
        [
            s.get(a, a) if a.__class__ is Var else a if a._ground else substitute(a, s)
            for a in t.args
        ]
    )
    hit = _INTERNED.get((t.functor, args))
    return hit if hit is not None else Struct(t.functor, args)


def occurs(v: Var, t: Term, s: Subst) -> bool:
    stack = [t]
    while stack:
        x = walk(stack.pop(), s)
        if isinstance(x, Var):
            if x == v:
                return True
        elif not x._ground:
            stack.extend(x.args)
    return False


def _bind_rank(v: Var):
    return (FRESH_MARK not in v.name, v.name)


FRESH_MARK = "#"


def unify(a: Term, b: Term, s: Optional[dict] = None) -> Optional[dict]:
    """Most general unifier (with occurs check) extending ``s``.

    Returns a triangular substitution, or None if the terms do not unify.
    The input dict is never mutated.
    """
    s = dict(s) if s else {}
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = walk(x, s)
        y = walk(y, s)
        if x is y or x == y:
            continue
        if isinstance(x, Var):
            if isinstance(y, Var) and _bind_rank(y) < _bind_rank(x):
                # renamed-apart variables are bound first, so answers keep
                # the query's own variable names
                x, y = y, x
            if occurs(x, y, s):
                return None
            s[x] = y
        elif isinstance(y, Var):
            if occurs(y, x, s):
                return None
            s[y] = x
        else:
            if x.functor != y.functor or len(x.args) != len(y.args):
                return None
            stack.extend(zip(reversed(x.args), reversed(y.args)))
    return s


def resolve(s: Subst, keep: Optional[Iterable[Var]] = None) -> dict:
    """Idempotent form of a triangular substitution, optionally restricted."""
    names = list(keep) if keep is not None else list(s)
    out = {}
    for v in sorted(names, key=lambda v: v.name):
        t = apply(v, s)
        if t != v:
            out[v] = t
    return out


def match(pattern: Term, ground: Term, s: dict) -> Optional[dict]:
    """One-way matching of ``pattern`` against a ground term.

    Extends ``s`` in place and returns it, or returns None on mismatch (in
    which case ``s`` may have been partially extended; callers pass a copy).
    """
    if pattern.__class__ is Var:
        bound = s.get(pattern)
        if bound is None:
            s[pattern] = ground
            return s
        return s if bound is ground or bound == ground else None
    if pattern._ground:
        return s if pattern is ground or pattern == ground else None
    if (
        ground.__class__ is not Struct
        or ground.functor != pattern.functor
        or len(ground.args) != len(pattern.args)
    ):
        return None
    # hot path: variable and ground arguments are handled inline
    for p, g in zip(pattern.args, ground.args):
        if p.__class__ is Var:
            bound = s.get(p)
            if bound is None:
                s[p] = g
            elif bound is not g and bound != g:
                return None
        elif p._ground:
            if p is not g and p != g:
                return None
        elif match(p, g, s) is None:
            return None
    return s


def rename(t: Term, mapping: dict, fresh) -> Term:
    """Rename variables of ``t`` using ``fresh(var)`` for unseen ones."""
    if isinstance(t, Var):
        v = mapping.get(t)
        if v is None:
            v = mapping[t] = fresh(t)
        return v
    if t._ground:
        return t
    return Struct(t.functor, tuple(rename(a, mapping, fresh) for a in t.args))


def subterms_with_nesting(t: Term, level: int = 0) -> Iterator[tuple[Term, int]]:
    yield t, level
    if isinstance(t, Struct):
        for a in t.args:
            yield from subterms_with_nesting(a, level + 1)


# -- printing ----------------------------------------------------------------

_PLAIN_ATOM = None


def _atom_text(name: str) -> str:
    global _PLAIN_ATOM
    if _PLAIN_ATOM is None:
        import re

        _PLAIN_ATOM = re.compile(r"[a-z][A-Za-z0-9_]*'?\Z|[0-9]+\Z|\[\]\Z")
    if _PLAIN_ATOM.match(name):
        return name
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if t.functor == CONS and len(t.args) == 2:
        items = []
        x = t
        while isinstance(x, Struct) and x.functor == CONS and len(x.args) == 2:
            items.append(format_term(x.args[0]))
            x = x.args[1]
        inner = ",".join(items)
        if isinstance(x, Struct) and x.functor == NIL and not x.args:
            return f"[{inner}]"
        return f"[{inner}|{format_term(x)}]"
    name = _atom_text(t.functor)
    if not t.args:
        return name
    return f"{name}({','.join(format_term(a) for a in t.args)})"
