"""Translation of P/T nets with input and silent labels into FNM terms.

Each place ``s_i`` becomes a constant ``C_i`` whose body has one summand per
transition.  A transition with several input places is led by the first of
them in place order: its constant runs a strong-prefix sequence on private
names ``x_j_h``, one input per token of every later place (and per extra
token of its own place), before performing the transition's action.  The
other places offer the complementary outputs.  All private names are
restricted at top level.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .equiv import rooted_iso
from .errors import PreconditionError
from .fnm.syntax import (
    NIL,
    TAU,
    Action,
    Const,
    ConstEnv,
    Nil,
    Prefix,
    Strong,
    Sum,
    Term,
    par_of,
    restrict_all,
    show,
    sum_of,
)
from .multiset import Multiset
from .netsem import net_of
from .petri import Net, is_statically_reduced, static_subnet

_NAME = re.compile(r"^[a-z_][A-Za-z0-9_]*$")


@dataclass
class Translation:
    term: Term
    env: ConstEnv
    constants: dict  # place name -> constant name
    restricted: list  # bound names, sorted

    def source(self) -> str:
        """Concrete syntax: one definition per constant, then ``main``."""
        lines = [f"{c} := {show(self.env.body(c))};" for c in self.constants.values()]
        lines.append(f"main = {show(self.term)};")
        return "\n".join(lines) + "\n"


def _check_labels(net: Net) -> None:
    for t in net.transitions:
        if t.label == "tau":
            continue
        if t.label.startswith("~"):
            raise PreconditionError(f"output label {t.label!r} cannot be translated; only inputs and tau are allowed")
        if not _NAME.match(t.label) or t.label in ("nu", "main"):
            raise PreconditionError(f"label {t.label!r} is not a single action name")


def _fresh_prefix(net: Net) -> str:
    labels = {t.label for t in net.transitions}
    prefix = "x"
    while any(l.startswith(prefix + "_") for l in labels):
        prefix = "x" + prefix
    return prefix


def to_fnm(net: Net, m0: Multiset | None = None, *, clean: bool = False, require_reduced: bool = True) -> Translation:
    """Translate ``(net, m0)`` into a term whose net is isomorphic to it.

    Requires labels in ``L`` or ``tau`` and, unless ``require_reduced`` is
    false, a statically reduced net.  ``clean`` drops ``0`` summands and
    restrictions on names that do not occur.
    """
    m0 = net.initial if m0 is None else m0
    _check_labels(net)
    if require_reduced and not is_statically_reduced(net, m0):
        sub = static_subnet(net, m0)
        bad_p = [s for s in net.places if s not in sub.places]
        kept = set(sub.transitions)
        bad_t = [i for i, t in enumerate(net.transitions) if t not in kept]
        raise PreconditionError(
            f"net is not statically reduced: unreachable places {bad_p}, unreachable transitions {bad_t}"
        )
    prefix = _fresh_prefix(net)
    places = list(net.places)
    n = len(places)
    consts = {s: f"C{i + 1}" for i, s in enumerate(places)}
    env = ConstEnv()

    def xname(j: int, i: int) -> str:
        return f"{prefix}_{j + 1}_{i + 1}"

    def act(label: str) -> Action:
        return TAU if label == "tau" else Action("in", label)

    def pi(post: Multiset) -> Term:
        return par_of([Const(consts[s]) for s in places for _ in range(post[s])])

    used: set = set()
    bodies = {}
    for i, s in enumerate(places):
        summands = []
        for j, t in enumerate(net.transitions):
            pre = t.pre
            if pre[s] == 0:
                summands.append(NIL)
                continue
            cont = Prefix(act(t.label), pi(t.post))
            if pre.size == 1:
                summands.append(cont)
                continue
            idx = [places.index(p) for p in pre.support()]
            if min(idx) < i:
                used.add(xname(j, i))
                summands.append(Prefix(Action("out", xname(j, i)), NIL))
                continue
            # leader: the first input place of t_j
            seq = []
            if pre[s] >= 2:
                seq += [xname(j, i)] * (pre[s] - 1)
            for h in range(i + 1, n):
                seq += [xname(j, h)] * pre[places[h]]
            body = cont
            for x in reversed(seq):
                body = Strong(Action("in", x), body)
            used.update(seq)
            if pre[s] >= 2:
                summands.append(Sum(Prefix(Action("out", xname(j, i)), NIL), body))
            else:
                summands.append(body)
        if clean:
            summands = [c for c in summands if not isinstance(c, Nil)]
        bodies[s] = sum_of(summands)
    for s in places:
        env.define(consts[s], bodies[s])
    if clean:
        names = sorted(used)
    else:
        names = sorted(xname(j, i) for j in range(len(net.transitions)) for i in range(n))
    term = restrict_all(names, pi(m0))
    return Translation(term, env, consts, names)


@dataclass
class RoundTrip:
    iso: bool
    bijection: dict | None
    mismatch: str | None
    source: str

    def to_dict(self) -> dict:
        return {"iso": self.iso, "bijection": self.bijection, "mismatch": self.mismatch}


def roundtrip(net: Net, m0: Multiset | None = None, *, clean: bool = False) -> RoundTrip:
    """Translate the net, rebuild the net of the resulting term and compare them up to rooted isomorphism."""
    m0 = net.initial if m0 is None else m0
    tr = to_fnm(net, m0, clean=clean)
    back = net_of(tr.term, tr.env).net
    target = net.with_initial(m0)
    bij = rooted_iso(target, back)
    mismatch = None
    if bij is None:
        mismatch = (
            f"original has {len(target.places)} places and {len(target.transitions)} transitions, "
            f"rebuilt net has {len(back.places)} places and {len(back.transitions)} transitions"
        )
    return RoundTrip(bij is not None, bij, mismatch, tr.source())
