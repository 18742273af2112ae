"""Place/transition nets: structure, token game, reachability and subnets.

Places are strings.  Transitions are positional: the ``i``-th transition of a
net is ``net.transitions[i]`` and steps are multisets of such indices.  Labels
are plain strings, with ``"tau"`` reserved for the silent action.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import NetError, ResourceError
from .multiset import EMPTY, Multiset

TAU = "tau"
DEFAULT_REACH_CAP = 10_000


@dataclass(frozen=True)
class Transition:
    pre: Multiset
    label: str
    post: Multiset

    def key(self) -> tuple:
        return (self.pre, self.label, self.post)

    def __str__(self) -> str:
        return f"{self.pre} -{self.label}-> {self.post}"


@dataclass(frozen=True)
class Net:
    """A P/T net ``(S, A, T)`` with an optional initial marking.

    Construction validates that every preset is non-empty, that arcs only
    mention declared places and that no ``(pre, label, post)`` triple occurs
    twice.
    """

    places: tuple
    transitions: tuple
    initial: Multiset = EMPTY
    labels: frozenset = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "places", tuple(self.places))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        if not isinstance(self.initial, Multiset):
            object.__setattr__(self, "initial", Multiset(self.initial))
        if len(set(self.places)) != len(self.places):
            raise NetError("duplicate place names")
        pset = set(self.places)
        seen = set()
        for i, t in enumerate(self.transitions):
            if not t.pre:
                raise NetError(f"transition {i} ({t.label}) has an empty preset")
            for s in list(t.pre.support()) + list(t.post.support()):
                if s not in pset:
                    raise NetError(f"transition {i} mentions unknown place {s!r}")
            if t.key() in seen:
                raise NetError(f"duplicate transition {t}")
            seen.add(t.key())
        for s in self.initial.support():
            if s not in pset:
                raise NetError(f"initial marking mentions unknown place {s!r}")
        labels = frozenset(t.label for t in self.transitions)
        if self.labels is None:
            object.__setattr__(self, "labels", labels)
        else:
            object.__setattr__(self, "labels", frozenset(self.labels) | labels)

    # -- convenience ---------------------------------------------------------
    def with_initial(self, m: Multiset) -> "Net":
        return Net(self.places, self.transitions, m, self.labels)

    def index_by_preset(self) -> dict:
        out: dict = {}
        for i, t in enumerate(self.transitions):
            out.setdefault(t.pre, []).append(i)
        return out

    def __str__(self) -> str:
        lines = [f"places: {', '.join(self.places)}", f"initial: {self.initial}"]
        lines += [f"  t{i}: {t}" for i, t in enumerate(self.transitions)]
        return "\n".join(lines)


def make_net(places: Iterable[str], transitions: Iterable[tuple], initial=None) -> Net:
    """Build a net from ``(pre, label, post)`` tuples whose multisets may be dicts or lists."""
    ts = [Transition(Multiset(pre), label, Multiset(post)) for pre, label, post in transitions]
    return Net(tuple(places), tuple(ts), Multiset(initial) if initial is not None else EMPTY)


# -- token game -----------------------------------------------------------------
def enabled(net: Net, m: Multiset, t: int) -> bool:
    return net.transitions[t].pre <= m


def fire(net: Net, m: Multiset, t: int) -> Multiset:
    """``m[t> m'`` with ``m' = (m - pre) + post``; raises if ``t`` is not enabled."""
    tr = net.transitions[t]
    if not tr.pre <= m:
        raise NetError(f"transition {t} not enabled at {m}")
    return (m - tr.pre) + tr.post


def step_preset(net: Net, step: Multiset) -> Multiset:
    out = EMPTY
    for t, n in step.items():
        out = out + n * net.transitions[t].pre
    return out


def step_postset(net: Net, step: Multiset) -> Multiset:
    out = EMPTY
    for t, n in step.items():
        out = out + n * net.transitions[t].post
    return out


def step_label(net: Net, step: Multiset) -> Multiset:
    """The multiset of labels of a step."""
    d: dict = {}
    for t, n in step.items():
        lab = net.transitions[t].label
        d[lab] = d.get(lab, 0) + n
    return Multiset(d)


def step_fire(net: Net, m: Multiset, step: Multiset) -> Multiset:
    pre = step_preset(net, step)
    if not step or not pre <= m:
        raise NetError(f"step {step} not enabled at {m}")
    return (m - pre) + step_postset(net, step)


def enumerate_steps(net: Net, m: Multiset) -> Iterator[Multiset]:
    """All non-empty steps ``G`` with ``pre(G) <= m``, in lexicographic order of counts."""
    ts = [i for i, t in enumerate(net.transitions) if t.pre <= m]

    def rec(k: int, rest: Multiset, acc: dict):
        if k == len(ts):
            if acc:
                yield Multiset(acc)
            return
        i = ts[k]
        pre = net.transitions[i].pre
        n = 0
        cur = rest
        while True:
            if n:
                acc[i] = n
            yield from rec(k + 1, cur, acc)
            if not pre <= cur:
                break
            cur = cur - pre
            n += 1
        acc.pop(i, None)

    # enumerate with ascending counts; the recursion above yields count 0 first
    yield from rec(0, m, {})


# -- reachability ------------------------------------------------------------
@dataclass
class ReachGraph:
    """Reachability graph in BFS discovery order."""

    markings: list
    index: dict
    edges: list  # (src, transition, dst)

    def successors(self, i: int) -> list:
        return self._succ[i]

    def __post_init__(self):
        self._succ = [[] for _ in self.markings]
        for a, t, b in self.edges:
            self._succ[a].append((t, b))


def reach_graph(net: Net, roots: Sequence[Multiset], cap: int = DEFAULT_REACH_CAP) -> ReachGraph:
    """Breadth-first exploration from ``roots``; raises :class:`ResourceError` beyond ``cap`` markings."""
    markings: list = []
    index: dict = {}
    edges: list = []
    q: deque = deque()
    for r in roots:
        if r not in index:
            index[r] = len(markings)
            markings.append(r)
            q.append(r)
    if len(markings) > cap:
        raise ResourceError(f"more than {cap} reachable markings")
    trs = net.transitions
    while q:
        m = q.popleft()
        a = index[m]
        for i, t in enumerate(trs):
            if t.pre <= m:
                m2 = (m - t.pre) + t.post
                b = index.get(m2)
                if b is None:
                    b = len(markings)
                    if b >= cap:
                        raise ResourceError(f"more than {cap} reachable markings")
                    index[m2] = b
                    markings.append(m2)
                    q.append(m2)
                edges.append((a, i, b))
    return ReachGraph(markings, index, edges)


def reachable(net: Net, m0: Multiset | None = None, cap: int = DEFAULT_REACH_CAP) -> list:
    """``[m0>`` as a list sorted by canonical serialization."""
    m0 = net.initial if m0 is None else m0
    g = reach_graph(net, [m0], cap)
    return sorted(g.markings, key=lambda m: m.to_json())


# -- boundedness ---------------------------------------------------------------
def is_bounded(net: Net, m0: Multiset | None = None, node_cap: int = 1_000_000) -> bool:
    """Decide boundedness of ``(net, m0)``.

    Explores distinct markings breadth first and keeps the spanning-tree
    parent of each.  The net is unbounded exactly when some marking strictly
    covers one of its tree ancestors: if the reachability set is infinite the
    finitely branching spanning tree has an infinite branch, and Dickson's
    lemma yields such a pair on it.  This is the coverability-tree argument
    with the omega acceleration replaced by the dominance test.
    """
    m0 = net.initial if m0 is None else m0
    parent: dict = {m0: None}
    q: deque = deque([m0])
    trs = net.transitions
    while q:
        m = q.popleft()
        for t in trs:
            if not t.pre <= m:
                continue
            m2 = (m - t.pre) + t.post
            if m2 in parent:
                continue
            a = m
            while a is not None:
                if a <= m2:  # distinct markings, so strictly covered
                    return False
                a = parent[a]
            parent[m2] = m
            if len(parent) > node_cap:
                raise ResourceError(f"boundedness check exceeds {node_cap} markings")
            q.append(m2)
    return True


# -- subnets -----------------------------------------------------------------------
def _restrict(net: Net, places: set, tidx: list, m0: Multiset) -> Net:
    return Net(
        tuple(s for s in net.places if s in places),
        tuple(net.transitions[i] for i in tidx),
        m0,
        frozenset(net.transitions[i].label for i in tidx),
    )


def dynamic_subnet(net: Net, m0: Multiset | None = None, cap: int = DEFAULT_REACH_CAP) -> Net:
    """Places marked in, and transitions enabled at, some reachable marking.

    Raises :class:`ResourceError` when more than ``cap`` markings are reachable.
    """
    m0 = net.initial if m0 is None else m0
    g = reach_graph(net, [m0], cap)
    places: set = set()
    for m in g.markings:
        places |= m.support()
    tidx = sorted({t for _, t, _ in g.edges})
    return _restrict(net, places, tidx, m0)


def static_subnet(net: Net, m0: Multiset | None = None, stats: dict | None = None) -> Net:
    """Least fixpoint of static reachability from ``dom(m0)``.

    A transition is statically enabled once the support of its preset lies
    inside the current place set; its postset support then joins the set.
    Every transition is examined at most once per place addition, so the
    work is polynomial.  ``stats['checks']`` records the number of preset
    inspections.
    """
    m0 = net.initial if m0 is None else m0
    places = set(m0.support())
    missing = {i: set(t.pre.support()) - places for i, t in enumerate(net.transitions)}
    waiting: dict = {}
    for i, miss in missing.items():
        for s in miss:
            waiting.setdefault(s, []).append(i)
    ready = deque(i for i, miss in missing.items() if not miss)
    fired: set = set()
    checks = 0
    while ready:
        i = ready.popleft()
        if i in fired:
            continue
        fired.add(i)
        for s in net.transitions[i].post.support():
            if s in places:
                continue
            places.add(s)
            for j in waiting.pop(s, []):
                checks += 1
                missing[j].discard(s)
                if not missing[j]:
                    ready.append(j)
    if stats is not None:
        stats["checks"] = checks + len(net.transitions)
    return _restrict(net, places, sorted(fired), m0)


def is_statically_reduced(net: Net, m0: Multiset | None = None) -> bool:
    sub = static_subnet(net, m0)
    return len(sub.places) == len(net.places) and len(sub.transitions) == len(net.transitions)


def disjoint_union(n1: Net, n2: Net, tags: tuple = ("1", "2")) -> tuple:
    """Tagged disjoint union; returns ``(net, rename1, rename2)``.

    Place ``s`` of the ``k``-th net becomes ``f"{tag_k}/{s}"``.  Transitions of
    the first net keep their indices, those of the second are shifted by
    ``len(n1.transitions)``.  The initial marking is the sum of both.
    """
    r1 = {s: f"{tags[0]}/{s}" for s in n1.places}
    r2 = {s: f"{tags[1]}/{s}" for s in n2.places}
    ts = [Transition(t.pre.map(r1.__getitem__), t.label, t.post.map(r1.__getitem__)) for t in n1.transitions]
    ts += [Transition(t.pre.map(r2.__getitem__), t.label, t.post.map(r2.__getitem__)) for t in n2.transitions]
    init = n1.initial.map(r1.__getitem__) + n2.initial.map(r2.__getitem__)
    net = Net(tuple(r1.values()) + tuple(r2.values()), tuple(ts), init, n1.labels | n2.labels)
    return net, r1, r2


# -- serialization ---------------------------------------------------------------------
def net_to_dict(net: Net) -> dict:
    return {
        "places": list(net.places),
        "transitions": [
            {"pre": dict(t.pre.items()), "label": t.label, "post": dict(t.post.items())} for t in net.transitions
        ],
        "initial": dict(net.initial.items()),
    }


def net_to_json(net: Net, indent: int | None = 2) -> str:
    return json.dumps(net_to_dict(net), indent=indent)


def net_from_dict(obj: dict) -> Net:
    try:
        places = obj["places"]
        trs = obj["transitions"]
    except (KeyError, TypeError) as exc:
        raise NetError(f"net JSON lacks field {exc}") from None
    if not isinstance(places, list) or not all(isinstance(p, str) for p in places):
        raise NetError("'places' must be a list of strings")
    ts = []
    for k, t in enumerate(trs):
        try:
            ts.append(Transition(Multiset(t.get("pre", {})), str(t["label"]), Multiset(t.get("post", {}))))
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise NetError(f"malformed transition {k}: {exc}") from None
    return Net(tuple(places), tuple(ts), Multiset(obj.get("initial", {})))


def net_from_json(text: str) -> Net:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetError(f"invalid JSON: {exc}") from None
    return net_from_dict(obj)


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def net_to_dot(net: Net, m: Multiset | None = None) -> str:
    """Graphviz rendering: circles for places (with token counts), boxes for transitions."""
    m = net.initial if m is None else m
    out = ["digraph net {", "  rankdir=LR;"]
    for s in net.places:
        tok = f"\\n{m[s]}" if m[s] else ""
        out.append(f"  {_dot_id('p:' + s)} [shape=circle,label={_dot_id(s)[:-1]}{tok}\"];")
    for i, t in enumerate(net.transitions):
        out.append(f"  {_dot_id(f't:{i}')} [shape=box,label={_dot_id(t.label)}];")
        for s, w in t.pre.items():
            lab = f" [label=\"{w}\"]" if w > 1 else ""
            out.append(f"  {_dot_id('p:' + s)} -> {_dot_id(f't:{i}')}{lab};")
        for s, w in t.post.items():
            lab = f" [label=\"{w}\"]" if w > 1 else ""
            out.append(f"  {_dot_id(f't:{i}')} -> {_dot_id('p:' + s)}{lab};")
    out.append("}")
    return "\n".join(out)


def parse_marking(text: str) -> Multiset:
    """Parse ``place:count,place:count`` (``:count`` defaults to 1; empty string is the empty marking)."""
    d: dict = {}
    text = text.strip()
    if not text:
        return EMPTY
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            name, cnt = part.rsplit(":", 1)
            try:
                n = int(cnt)
            except ValueError:
                name, n = part, 1
        else:
            name, n = part, 1
        if n < 0:
            raise NetError(f"negative count in marking: {part}")
        d[name] = d.get(name, 0) + n
    return Multiset(d)


def format_marking(m: Multiset) -> str:
    return ",".join(f"{s}:{n}" for s, n in m.items())
