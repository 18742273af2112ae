"""Abstract syntax of FNM terms and their canonical printed form.

Terms are frozen dataclasses, so structurally equal terms compare and hash
equal.  A restricted action ``a'`` is an :class:`Action` with
``restricted=True``; it only arises when a restriction is pushed into the
places of a net.

Constants are referenced by name and resolved through a :class:`ConstEnv`.
The environment also hosts *derived* constants such as ``A{c'/c}``; their
bodies are computed on demand from the base constant and a name renaming.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from ..errors import DefinitionError


@dataclass(frozen=True, order=True)
class Action:
    kind: str  # "in", "out" or "tau"
    name: str = ""
    restricted: bool = False

    def __post_init__(self):
        if self.kind not in ("in", "out", "tau"):
            raise ValueError(f"bad action kind {self.kind!r}")

    @property
    def is_tau(self) -> bool:
        return self.kind == "tau"

    @property
    def is_input(self) -> bool:
        return self.kind == "in"

    @property
    def is_output(self) -> bool:
        return self.kind == "out"

    def complement(self) -> "Action":
        if self.kind == "tau":
            raise ValueError("tau has no complement")
        return Action("out" if self.kind == "in" else "in", self.name, self.restricted)

    def subject(self) -> str:
        """Name with a trailing prime when restricted; empty for tau."""
        if self.kind == "tau":
            return ""
        return self.name + ("'" if self.restricted else "")

    def __str__(self) -> str:
        if self.kind == "tau":
            return "tau"
        return ("~" if self.kind == "out" else "") + self.subject()


TAU = Action("tau")


def inp(name: str, restricted: bool = False) -> Action:
    return Action("in", name, restricted)


def out(name: str, restricted: bool = False) -> Action:
    return Action("out", name, restricted)


class Term:
    """Base class of all term nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True)
class Nil(Term):
    pass


@dataclass(frozen=True)
class Prefix(Term):
    act: Action
    cont: Term


@dataclass(frozen=True)
class Strong(Term):
    """Strong prefix ``<a>.s``: the input ``a`` must be followed atomically by ``s``."""

    act: Action
    cont: Term


@dataclass(frozen=True)
class Sum(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Par(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Restrict(Term):
    name: str
    body: Term


NIL = Nil()


# -- categories ---------------------------------------------------------------------
def is_guarded(t: Term) -> bool:
    return isinstance(t, (Nil, Prefix, Strong, Sum))


def is_sequential(t: Term) -> bool:
    return is_guarded(t) or isinstance(t, (Const, Var))


def is_restriction_free(t: Term) -> bool:
    return not isinstance(t, Restrict)


def category(t: Term) -> str:
    """Most specific syntactic category: ``guarded``, ``sequential``, ``parallel`` or ``general``."""
    if is_guarded(t):
        return "guarded"
    if is_sequential(t):
        return "sequential"
    if isinstance(t, Par):
        return "parallel"
    return "general"


# -- builders -------------------------------------------------------------------------
def sum_of(terms: list) -> Term:
    """Left-nested sum; the empty sum is ``0``."""
    if not terms:
        return NIL
    acc = terms[0]
    for t in terms[1:]:
        acc = Sum(acc, t)
    return acc


def par_of(terms: list) -> Term:
    """Left-nested parallel composition; the empty product is ``0``."""
    if not terms:
        return NIL
    acc = terms[0]
    for t in terms[1:]:
        acc = Par(acc, t)
    return acc


def restrict_all(names, body: Term) -> Term:
    """``(nu a1)(nu a2)...body`` with the names in the given order."""
    for a in reversed(list(names)):
        body = Restrict(a, body)
    return body


def par_components(t: Term) -> list:
    if isinstance(t, Par):
        return par_components(t.left) + par_components(t.right)
    return [t]


def sum_components(t: Term) -> list:
    if isinstance(t, Sum):
        return sum_components(t.left) + sum_components(t.right)
    return [t]


# -- printing -------------------------------------------------------------------------------
def _wrap(t: Term, ok: Callable[[Term], bool]) -> str:
    s = show(t)
    return s if ok(t) else f"({s})"


@lru_cache(maxsize=200_000)
def show(t: Term) -> str:
    """Canonical concrete syntax; ``parse(show(t))`` rebuilds ``t``.

    Precedence from tightest: prefix ``.``, sum ``+``, parallel ``|``,
    restriction.  Sums and parallel compositions associate to the left.
    """
    if isinstance(t, Nil):
        return "0"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return t.name
    if isinstance(t, Prefix):
        return f"{t.act}." + _wrap(t.cont, lambda c: isinstance(c, (Nil, Prefix, Strong, Const, Var)))
    if isinstance(t, Strong):
        return f"<{t.act.subject()}>." + _wrap(t.cont, lambda c: isinstance(c, (Nil, Prefix, Strong, Const, Var)))
    if isinstance(t, Sum):
        left = _wrap(t.left, lambda c: not isinstance(c, (Par, Restrict)))
        right = _wrap(t.right, lambda c: not isinstance(c, (Sum, Par, Restrict)))
        return f"{left} + {right}"
    if isinstance(t, Par):
        left = _wrap(t.left, lambda c: not isinstance(c, Restrict))
        right = _wrap(t.right, lambda c: not isinstance(c, (Par, Restrict)))
        return f"{left} | {right}"
    if isinstance(t, Restrict):
        return f"(nu {t.name}) " + show(t.body)
    raise TypeError(f"not a term: {t!r}")


# -- constants ---------------------------------------------------------------------------------
Renaming = tuple  # sorted tuple of (plain name, target name, target restricted)


def renaming_suffix(ren: Renaming) -> str:
    return "{" + ",".join(f"{tgt}{chr(39) if r else ''}/{src}" for src, tgt, r in ren) + "}"


class ConstEnv:
    """Constant definitions ``C := body``.

    User constants are registered with :meth:`define`.  Derived constants are
    created by :meth:`renamed` and are named after their base constant and a
    canonical renaming, e.g. ``A{c'/c}`` or ``A{b/a,c'/c}``.
    """

    def __init__(self, defs: dict | None = None):
        self._bodies: dict = {}
        self._origin: dict = {}  # derived name -> (base name, renaming)
        self._fn_cache: dict = {}
        for k, v in (defs or {}).items():
            self.define(k, v)

    def define(self, name: str, body: Term, *, replace: bool = False) -> Const:
        if name in self._bodies and not replace:
            raise DefinitionError(f"constant {name} defined twice")
        if not is_guarded(body):
            raise DefinitionError(f"body of constant {name} must be a guarded term, got {category(body)}")
        self._bodies[name] = body
        self._origin[name] = (name, ())
        self._fn_cache.clear()
        return Const(name)

    def __contains__(self, name: str) -> bool:
        return name in self._bodies

    def body(self, name: str) -> Term:
        try:
            b = self._bodies[name]
        except KeyError:
            raise DefinitionError(f"undefined constant {name}") from None
        if b is None:
            raise DefinitionError(f"constant {name} is still being constructed")
        return b

    def names(self) -> list:
        return list(self._bodies)

    def user_names(self) -> list:
        return [n for n in self._bodies if self._origin[n][1] == ()]

    def copy(self) -> "ConstEnv":
        e = ConstEnv()
        e._bodies = dict(self._bodies)
        e._origin = dict(self._origin)
        return e

    def origin(self, name: str) -> tuple:
        return self._origin[name]

    def const_names(self, name: str) -> frozenset:
        """``(name, restricted)`` pairs free in the body of ``name`` or of any constant it reaches."""
        if name in self._fn_cache:
            return self._fn_cache[name]
        seen: set = set()
        names: set = set()
        stack = [name]
        while stack:
            c = stack.pop()
            if c in seen:
                continue
            seen.add(c)
            _collect(self.body(c), names, stack)
        res = frozenset(names)
        self._fn_cache[name] = res
        return res

    def plain_free_names(self, name: str) -> frozenset:
        return frozenset(n for n, r in self.const_names(name) if not r)

    def renamed(self, name: str, mapping: dict, rename_term: Callable) -> str:
        """Name of the constant ``name`` after applying ``mapping`` to its free names.

        ``mapping`` sends plain names to ``(target, restricted)``.  The result
        is canonical: identity entries and names not free in the base constant
        are dropped, and renamings compose, so ``A{b/a}`` renamed by
        ``{b -> b'}`` is ``A{b'/a}``.
        """
        base, old = self._origin[name]
        fn = self.plain_free_names(base)
        composed = {}
        old_d = {src: (tgt, r) for src, tgt, r in old}
        for x in fn:
            tgt, r = old_d.get(x, (x, False))
            if not r and tgt in mapping:
                tgt, r = mapping[tgt]
            if (tgt, r) != (x, False):
                composed[x] = (tgt, r)
        ren = tuple(sorted((src, tgt, r) for src, (tgt, r) in composed.items()))
        if not ren:
            return base
        new = base + renaming_suffix(ren)
        if new not in self._bodies:
            self._bodies[new] = None  # placeholder for recursive references
            self._origin[new] = (base, ren)
            full = {src: (tgt, r) for src, tgt, r in ren}
            self._bodies[new] = rename_term(self.body(base), full)
        return new


def _collect(t: Term, names: set, consts: list) -> None:
    """Accumulate ``(name, restricted)`` pairs occurring free in ``t`` (constants are queued, not entered)."""
    stack = [(t, frozenset())]
    while stack:
        u, bound = stack.pop()
        if isinstance(u, (Prefix, Strong)):
            if not u.act.is_tau and not (not u.act.restricted and u.act.name in bound):
                names.add((u.act.name, u.act.restricted))
            stack.append((u.cont, bound))
        elif isinstance(u, (Sum, Par)):
            stack.append((u.left, bound))
            stack.append((u.right, bound))
        elif isinstance(u, Restrict):
            stack.append((u.body, bound | {u.name}))
        elif isinstance(u, Const):
            consts.append(u.name)
