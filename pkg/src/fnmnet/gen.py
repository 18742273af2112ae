"""Seeded random generator of small closed FNM terms.

Generated constants keep nets bounded: the body of the ``i``-th pool
constant may mention itself and earlier constants as the whole continuation
of a prefix (tail position), but inside a parallel composition only
constants defined strictly before it.  Each token can then spawn only
finitely many tokens.  Strong prefixes are always followed by inputs, tau
or further strong prefixes, so every term is well formed.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator

from .fnm.syntax import (
    NIL,
    TAU,
    Action,
    Const,
    ConstEnv,
    Par,
    Prefix,
    Restrict,
    Strong,
    Sum,
    Term,
    Var,
)

CATEGORIES = ("guarded", "strong", "sequential", "restriction-free", "general")


@dataclass
class GenConfig:
    actions: tuple = ("a", "b", "c")
    n_consts: int = 2
    const_size: int = 2
    p_output: float = 0.35
    p_tau: float = 0.15
    p_const: float = 0.25
    max_par: int = 3


class TermGen:
    """Random terms over a shared constant pool; see :func:`gen_terms` for a stream interface."""

    def __init__(self, seed: int | random.Random = 0, config: GenConfig | None = None, env: ConstEnv | None = None):
        self.rng = seed if isinstance(seed, random.Random) else random.Random(seed)
        self.cfg = config or GenConfig()
        self.env = env if env is not None else ConstEnv()
        self.pool: list = []
        for _ in range(self.cfg.n_consts):
            self.new_constant()

    # -- helpers ---------------------------------------------------------------------
    def fresh_const_name(self, stem: str = "K") -> str:
        i = 0
        while f"{stem}{i}" in self.env:
            i += 1
        return f"{stem}{i}"

    def new_constant(self, size: int | None = None) -> str:
        """Add a pool constant whose body follows the boundedness discipline."""
        name = self.fresh_const_name()
        tail = tuple(self.pool) + (name,)
        body = self.guarded(self.cfg.const_size if size is None else size, tail=tail, inner=tuple(self.pool))
        self.env.define(name, body)
        self.pool.append(name)
        return name

    def name(self, names: tuple | None = None) -> str:
        return self.rng.choice(names or self.cfg.actions)

    def action(self, names: tuple | None = None, *, outputs: bool = True, tau: bool = True) -> Action:
        r = self.rng.random()
        if tau and r < self.cfg.p_tau:
            return TAU
        kind = "out" if outputs and self.rng.random() < self.cfg.p_output else "in"
        return Action(kind, self.name(names))

    # -- categories ---------------------------------------------------------------------
    def guarded(self, size: int, tail: tuple = (), inner: tuple = (), names: tuple | None = None, var: str | None = None) -> Term:
        if size <= 0:
            return NIL
        r = self.rng.random()
        if size >= 2 and r < 0.3:
            k = self.rng.randint(1, size - 1)
            return Sum(self.guarded(k, tail, inner, names, var), self.guarded(size - k, tail, inner, names, var))
        if r < 0.42:
            return Strong(Action("in", self.name(names)), self.strong_cont(size - 1, tail, inner, names, var))
        return Prefix(self.action(names), self.cont(size - 1, tail, inner, names, var))

    def strong_cont(self, size: int, tail: tuple = (), inner: tuple = (), names: tuple | None = None, var: str | None = None) -> Term:
        """A guarded term that may follow a strong prefix: only inputs, tau or strong prefixes in front."""
        if size <= 0:
            return NIL if self.rng.random() < 0.3 else Prefix(self.action(names, outputs=False), NIL)
        r = self.rng.random()
        if size >= 2 and r < 0.25:
            k = self.rng.randint(1, size - 1)
            return Sum(self.strong_cont(k, tail, inner, names, var), self.strong_cont(size - k, tail, inner, names, var))
        if r < 0.4:
            return Strong(Action("in", self.name(names)), self.strong_cont(size - 1, tail, inner, names, var))
        return Prefix(self.action(names, outputs=False), self.cont(size - 1, tail, inner, names, var))

    def cont(self, size: int, tail: tuple = (), inner: tuple = (), names: tuple | None = None, var: str | None = None) -> Term:
        """Restriction-free continuation of a prefix; constants and the variable only in tail position."""
        r = self.rng.random()
        if var is not None and r < 0.3:
            return Var(var)
        if tail and r < 0.3 + self.cfg.p_const:
            return Const(self.rng.choice(tail))
        if size <= 0:
            return NIL
        if size >= 2 and self.rng.random() < 0.3:
            k = self.rng.randint(1, size - 1)
            return Par(self.sequential(k, inner, names), self.sequential(size - k, inner, names))
        return self.guarded(size, tail, inner, names, var)

    def sequential(self, size: int, consts: tuple | None = None, names: tuple | None = None) -> Term:
        consts = tuple(self.pool) if consts is None else consts
        if consts and self.rng.random() < self.cfg.p_const:
            return Const(self.rng.choice(consts))
        return self.guarded(size, consts, consts, names)

    def restriction_free(self, size: int, names: tuple | None = None) -> Term:
        k = self.rng.randint(1, self.cfg.max_par)
        parts = [self.sequential(max(0, size // k + self.rng.randint(-1, 1)), None, names) for _ in range(k)]
        acc = parts[0]
        for p in parts[1:]:
            acc = Par(acc, p)
        return acc

    def general(self, size: int, names: tuple | None = None) -> Term:
        t = self.restriction_free(size, names)
        for _ in range(self.rng.randint(0, 2)):
            t = Restrict(self.name(names), t)
        return t

    def strong_ready(self, size: int, names: tuple | None = None) -> Term:
        consts = tuple(self.pool)
        return self.strong_cont(size, consts, consts, names)

    def open_guarded(self, size: int, var: str = "x", names: tuple | None = None) -> Term:
        """Guarded open term whose variable occurs only as the whole continuation of prefixes."""
        consts = tuple(self.pool)
        return self.guarded(max(size, 1), consts, consts, names, var)

    def term(self, category: str, size: int, names: tuple | None = None) -> Term:
        if category == "guarded":
            consts = tuple(self.pool)
            return self.guarded(size, consts, consts, names)
        if category == "strong":
            return self.strong_ready(size, names)
        if category == "sequential":
            return self.sequential(size, None, names)
        if category == "restriction-free":
            return self.restriction_free(size, names)
        if category == "general":
            return self.general(size, names)
        raise ValueError(f"unknown category {category!r}")


def gen_terms(seed: int, size: int, category: str, config: GenConfig | None = None, env: ConstEnv | None = None) -> Iterator[Term]:
    """Endless reproducible stream of closed terms of ``category``; constants live in ``env`` (or the generator's own)."""
    g = TermGen(seed, config, env)
    while True:
        yield g.term(category, size)
