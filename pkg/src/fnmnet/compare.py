"""Comparison of FNM terms through their nets."""
from __future__ import annotations

from dataclasses import dataclass

from .equiv import EquivConfig, interleaving_bisim, sp_bisim, step_bisim
from .fnm.syntax import ConstEnv, Term
from .multiset import Multiset
from .netsem import Semantics, net_of
from .petri import Net, disjoint_union


@dataclass
class TermPair:
    """Union of the nets of two terms with the decompositions of both as markings."""

    net: Net
    m1: Multiset
    m2: Multiset


def term_pair(p: Term, q: Term, env: ConstEnv, env_q: ConstEnv | None = None, sem: Semantics | None = None) -> TermPair:
    """Build ``Net(p)`` and ``Net(q)`` and return their disjoint union with ``dec(p)`` and ``dec(q)``."""
    sem_p = sem or Semantics(env)
    sem_q = sem_p if env_q is None else Semantics(env_q)
    n1 = net_of(p, env, sem=sem_p).net
    n2 = net_of(q, env_q or env, sem=sem_q).net
    u, r1, r2 = disjoint_union(n1, n2)
    return TermPair(u, n1.initial.map(r1.__getitem__), n2.initial.map(r2.__getitem__))


def compare_terms(
    p: Term,
    q: Term,
    env: ConstEnv,
    kind: str = "sp",
    *,
    env_q: ConstEnv | None = None,
    config: EquivConfig | None = None,
    sem: Semantics | None = None,
):
    """Decide ``p ~ q`` for ``kind`` in ``sp``, ``step`` or ``int``; returns the checker's result object."""
    tp = term_pair(p, q, env, env_q, sem)
    if kind == "sp":
        return sp_bisim(tp.net, tp.m1, tp.m2, config=config)
    if kind == "step":
        return step_bisim(tp.net, tp.m1, tp.m2, config=config)
    if kind == "int":
        return interleaving_bisim(tp.net, tp.m1, tp.m2, config=config)
    raise ValueError(f"unknown equivalence {kind!r}")
