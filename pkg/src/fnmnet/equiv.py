"""Behavioural equivalences on markings of a P/T net.

* interleaving and step bisimilarity, by signature refinement on the
  reachability graph;
* structure-preserving bisimilarity, where markings are related through
  *linkings*: multisets of place pairs that record which token of one side
  corresponds to which token of the other;
* rooted net isomorphism.

To compare markings of two nets, build their :func:`~fnmnet.petri.disjoint_union`.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Iterable, Iterator

from .errors import ResourceError
from .multiset import EMPTY, Multiset, sub_multisets
from .petri import DEFAULT_REACH_CAP, Net, enumerate_steps, reach_graph, step_fire, step_label


@dataclass
class EquivConfig:
    """Resource caps for the equivalence checkers."""

    reach_cap: int = DEFAULT_REACH_CAP  # markings per side
    linking_cap: int = 200_000
    max_marking_size: int = 12


# -- linkings -----------------------------------------------------------------------
def pi1(l: Multiset) -> Multiset:
    return l.map(lambda p: p[0])


def pi2(l: Multiset) -> Multiset:
    return l.map(lambda p: p[1])


def inverse(l: Multiset) -> Multiset:
    return l.map(lambda p: (p[1], p[0]))


def identity_linking(m: Multiset) -> Multiset:
    return m.map(lambda s: (s, s))


def pairings(m1: Multiset, m2: Multiset) -> list:
    """Every linking ``l`` with ``pi1(l) = m1`` and ``pi2(l) = m2`` (empty list when sizes differ).

    Equivalently, all non-negative integer matrices with the given row and
    column sums.
    """
    if m1.size != m2.size:
        return []
    rows = m1.items()
    cols = [s for s, _ in m2.items()]
    cap0 = [n for _, n in m2.items()]
    out: list = []

    def distribute(r: int, k: int, amount: int, cap: list, acc: dict):
        if k == len(cols):
            if amount == 0:
                yield_row(r, cap, acc)
            return
        hi = min(amount, cap[k])
        rest = sum(cap[k + 1 :])
        for x in range(max(0, amount - rest), hi + 1):
            if x:
                acc[(rows[r][0], cols[k])] = x
            cap[k] -= x
            distribute(r, k + 1, amount - x, cap, acc)
            cap[k] += x
            acc.pop((rows[r][0], cols[k]), None)

    def yield_row(r: int, cap: list, acc: dict):
        if r + 1 == len(rows):
            out.append(Multiset(acc))
        else:
            distribute(r + 1, 0, rows[r + 1][1], cap, acc)

    if not rows:
        return [EMPTY]
    distribute(0, 0, rows[0][1], list(cap0), {})
    return out


def compose(l1: Multiset, l2: Multiset) -> list:
    """All compositions ``l1 ; l2``; empty when ``pi2(l1) != pi1(l2)``.

    For every middle place the tokens linked to it by ``l1`` are paired in all
    possible ways with the tokens it is linked to by ``l2``.
    """
    if pi2(l1) != pi1(l2):
        return []
    middles = sorted(pi2(l1).support(), key=str)
    per_mid = []
    for s in middles:
        left = Multiset({a: n for (a, b), n in l1.items() if b == s})
        right = Multiset({c: n for (b, c), n in l2.items() if b == s})
        per_mid.append(pairings(left, right))
    results = {EMPTY}
    for opts in per_mid:
        results = {r + o for r in results for o in opts}
    return sorted(results, key=lambda m: repr(m.items()))


def sub_linkings_with_proj(l: Multiset, m: Multiset, side: int) -> list:
    """All ``c <= l`` whose projection on ``side`` (1 or 2) equals ``m``."""
    per = []
    for s, need in m.items():
        links = [(p, n) for p, n in l.items() if p[side - 1] == s]
        per.append(_choose(links, need))
    results = [EMPTY]
    for opts in per:
        results = [r + o for r in results for o in opts]
    return results


def _choose(links: list, need: int) -> list:
    out: list = []

    def rec(i: int, left: int, acc: dict):
        if left == 0:
            out.append(Multiset(acc))
            return
        if i == len(links):
            return
        p, n = links[i]
        for x in range(min(n, left), -1, -1):
            if x:
                acc[p] = x
            rec(i + 1, left - x, acc)
            acc.pop(p, None)

    rec(0, need, {})
    return out


def linking_to_json(l: Multiset) -> list:
    return [[a, b, n] for (a, b), n in l.items()]


def linking_from_json(obj) -> Multiset:
    return Multiset({(a, b): n for a, b, n in obj})


# -- interleaving and step bisimilarity -------------------------------------------------
@dataclass
class BisimResult:
    equivalent: bool
    classes: list = field(default_factory=list)  # blocks of markings

    def __bool__(self) -> bool:
        return self.equivalent


def _refine(n_states: int, moves: Callable[[int], Iterable[tuple]]) -> list:
    """Coarsest partition stable under ``moves``; returns the block index of each state."""
    succ = [list(moves(i)) for i in range(n_states)]
    block = [0] * n_states
    n_blocks = 1
    while True:
        sigs: dict = {}
        new = [0] * n_states
        for i in range(n_states):
            sig = (block[i], frozenset((lab, block[j]) for lab, j in succ[i]))
            new[i] = sigs.setdefault(sig, len(sigs))
        if len(sigs) == n_blocks:
            return new
        block, n_blocks = new, len(sigs)


def _classes(markings: list, block: list) -> list:
    by: dict = {}
    for m, b in zip(markings, block):
        by.setdefault(b, []).append(m)
    return list(by.values())


def interleaving_bisim(net: Net, m1: Multiset, m2: Multiset, config: EquivConfig | None = None) -> BisimResult:
    """Interleaving bisimilarity of ``m1`` and ``m2`` in ``net``."""
    cfg = config or EquivConfig()
    g = reach_graph(net, [m1, m2], 2 * cfg.reach_cap)
    labels = [t.label for t in net.transitions]
    block = _refine(len(g.markings), lambda i: ((labels[t], j) for t, j in g.successors(i)))
    return BisimResult(block[g.index[m1]] == block[g.index[m2]], _classes(g.markings, block))


def step_bisim(net: Net, m1: Multiset, m2: Multiset, config: EquivConfig | None = None) -> BisimResult:
    """Step bisimilarity: moves are non-empty steps labelled by multisets of labels."""
    cfg = config or EquivConfig()
    g = reach_graph(net, [m1, m2], 2 * cfg.reach_cap)
    index = g.index

    def moves(i: int):
        m = g.markings[i]
        for st in enumerate_steps(net, m):
            yield step_label(net, st), index[step_fire(net, m, st)]

    block = _refine(len(g.markings), moves)
    return BisimResult(block[index[m1]] == block[index[m2]], _classes(g.markings, block))


# -- structure-preserving bisimilarity ----------------------------------------------------------
class SpRelation:
    """A set of linkings given by a finite list of members to check and a membership test.

    For a finite relation the two coincide.  For an infinite relation such as
    ``L+`` (all linkings built from a link set ``L``) the members are a finite
    fragment and ``contains`` decides membership in the whole relation.
    """

    def __init__(self, members: Iterable[Multiset], contains: Callable[[Multiset], bool] | None = None):
        self.members = list(members)
        if contains is None:
            s = set(self.members)
            contains = s.__contains__
        self.contains = contains

    def __contains__(self, l: Multiset) -> bool:
        return self.contains(l)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @classmethod
    def closure(cls, links: Iterable[tuple], max_size: int) -> "SpRelation":
        """``L+``, all multisets over ``links``; members are those of size ``0..max_size``."""
        L = sorted(set(links))
        Ls = set(L)
        members = [EMPTY]
        for k in range(1, max_size + 1):
            members.extend(_multisets_of_size(L, k))
        return cls(members, lambda l: l.support() <= Ls)


def _multisets_of_size(elems: list, k: int) -> Iterator[Multiset]:
    def rec(i: int, left: int, acc: dict):
        if left == 0:
            yield Multiset(acc)
            return
        if i == len(elems):
            return
        for x in range(left, -1, -1):
            if x:
                acc[elems[i]] = x
            yield from rec(i + 1, left - x, acc)
            acc.pop(elems[i], None)

    yield from rec(0, k, {})


def _by_preset(net: Net) -> dict:
    out: dict = {}
    for i, t in enumerate(net.transitions):
        out.setdefault(t.pre, []).append(i)
    return out


def _match_exists(net: Net, rel: SpRelation, l: Multiset, c: Multiset, t1: int, presets: dict, side: int, post_cache: dict) -> bool:
    """Some transition on the other side answers ``t1`` fired from the sub-linking ``c``."""
    tr1 = net.transitions[t1]
    other_pre = pi2(c) if side == 1 else pi1(c)
    rest = l - c
    for t2 in presets.get(other_pre, ()):
        tr2 = net.transitions[t2]
        if tr2.label != tr1.label:
            continue
        key = (t1, t2) if side == 1 else (t2, t1)
        cbars = post_cache.get(key)
        if cbars is None:
            a, b = net.transitions[key[0]].post, net.transitions[key[1]].post
            cbars = post_cache[key] = pairings(a, b)
        for cbar in cbars:
            if rel.contains(rest + cbar):
                return True
    return False


def check_sp_relation(net: Net, rel: SpRelation, *, subset_cap: int = 16) -> tuple:
    """Check the transfer property on every member of ``rel``.

    For each member ``l``, each sub-linking ``c <= l`` and each transition
    whose preset is the left (resp. right) projection of ``c``, there must be
    an equally labelled transition on the other side with preset the other
    projection and a linking ``cbar`` of the two postsets such that
    ``(l - c) + cbar`` belongs to ``rel``.  Sub-linkings are enumerated
    exhaustively.  Returns ``(ok, counterexample)`` where the counterexample
    is ``(l, c, transition index, side)``.
    """
    presets = _by_preset(net)
    post_cache: dict = {}
    for l in rel.members:
        for c in sub_multisets(l, subset_cap):
            if not c:
                continue
            for side, proj in ((1, pi1(c)), (2, pi2(c))):
                for t1 in presets.get(proj, ()):
                    if not _match_exists(net, rel, l, c, t1, presets, side, post_cache):
                        return False, (l, c, t1, side)
    return True, None


def _closure_size(n_links: int, k: int) -> int:
    return sum(comb(n_links + j - 1, j) for j in range(1, k + 1))


def place_classes(net: Net) -> dict:
    """Coarsest partition of places where related places consume in the same way.

    The signature of a place is the set of ``(label, own weight, classes of
    the rest of the preset, classes of the postset)`` over the transitions
    consuming from it, together with the mirror image for the transitions
    producing into it.  Used only to seed :func:`refine_links`.
    """
    cls = {s: 0 for s in net.places}
    n = 1
    while True:
        sigs: dict = {}
        new = {}
        for s in net.places:
            c = cls.__getitem__
            sig = frozenset(
                ("pre", t.label, t.pre[s], (t.pre - Multiset({s: t.pre[s]})).map(c), t.post.map(c))
                for t in net.transitions
                if t.pre[s]
            ) | frozenset(
                ("post", t.label, t.post[s], (t.post - Multiset({s: t.post[s]})).map(c), t.pre.map(c))
                for t in net.transitions
                if t.post[s]
            )
            new[s] = sigs.setdefault((cls[s], sig), len(sigs))
        if len(sigs) == n:
            return new
        cls, n = new, len(sigs)


def refine_links(net: Net, m1: Multiset, m2: Multiset, max_members: int = 50_000) -> set | None:
    """Search for a link set ``L`` such that ``L+`` is a bisimulation relating ``m1`` and ``m2``.

    Starts from the pairs of places statically reachable from ``m1`` and
    ``m2`` that :func:`place_classes` puts in the same class and repeatedly drops the links of a failing sub-linking until
    :func:`link_set_is_bisimulation` succeeds.  Every answer is checked, so
    a returned set is a proof; ``None`` means the search gave up, which
    proves nothing.  Works on unbounded nets.
    """
    from .petri import static_subnet

    left = static_subnet(net, m1).places
    right = static_subnet(net, m2).places
    cls = place_classes(net)
    L = {(a, b) for a in left for b in right if cls[a] == cls[b]}
    k = max(max((t.pre.size for t in net.transitions), default=1), 1)
    while L:
        if not any(l.support() <= L for l in pairings(m1, m2)):
            return None
        if _closure_size(len(L), k) > max_members:
            return None
        ok, cex = link_set_is_bisimulation(net, L)
        if ok:
            return L
        L -= set(cex[1].support())
    return None


def link_set_is_bisimulation(net: Net, links: Iterable[tuple]) -> tuple:
    """Decide whether the infinite relation ``L+`` is a structure-preserving bisimulation.

    For ``L+`` the obligation of a member ``l`` and a sub-linking ``c`` does
    not depend on ``l - c`` (which is in ``L+`` whenever non-empty), so it is
    enough to check members no larger than the largest preset.
    """
    k = max((t.pre.size for t in net.transitions), default=0)
    return check_sp_relation(net, SpRelation.closure(links, max(k, 1)))


@dataclass
class SpResult:
    equivalent: bool
    witness: list | None = None  # linkings forming a structure-preserving bisimulation
    explored: int = 0

    def __bool__(self) -> bool:
        return self.equivalent


def sp_bisim(
    net: Net,
    m1: Multiset,
    m2: Multiset,
    *,
    links: Iterable[tuple] | None = None,
    config: EquivConfig | None = None,
    prune: bool = True,
) -> SpResult:
    """State-preserving bisimilarity of ``m1`` and ``m2``.

    The candidate linkings are those reachable from the linkings of ``m1``
    with ``m2`` by matched moves (same label, one transition per side).  The
    largest bisimulation inside this finite set is then computed by counting
    the surviving answers to every obligation and deleting linkings with an
    unanswerable obligation.  Any bisimulation containing an initial linking
    lies inside the candidates, so the answer is exact.  The projections of
    a structure-preserving bisimulation form an interleaving bisimulation, so
    candidates whose projections are not interleaving bisimilar are pruned
    before they are explored.  The largest such bisimulation is also closed
    under sub-linkings, so every pair of places in a surviving linking must
    relate interleaving bisimilar single tokens.  ``prune=False`` disables
    both filters; the answer is the same, only slower.

    When ``links`` is given and ``L+`` is a bisimulation containing a linking
    of ``m1`` with ``m2``, that is returned at once; this also settles some
    queries on unbounded nets.  When a cap of ``config`` is exceeded the
    search of :func:`refine_links` is tried before :class:`ResourceError`
    is raised.
    """
    cfg = config or EquivConfig()
    if m1.size != m2.size:
        return SpResult(False)
    if links is not None:
        L = set(links)
        starts = [l for l in pairings(m1, m2) if l.support() <= L]
        if starts:
            ok, _ = link_set_is_bisimulation(net, L)
            if ok:
                return SpResult(True, [starts[0]])
    try:
        return _sp_explore(net, m1, m2, cfg, prune)
    except ResourceError:
        L = refine_links(net, m1, m2)
        if L is None:
            raise
        return SpResult(True, [l for l in pairings(m1, m2) if l.support() <= L][:1])


def _sp_explore(net: Net, m1: Multiset, m2: Multiset, cfg: EquivConfig, prune: bool) -> SpResult:
    if m1.size > cfg.max_marking_size:
        raise ResourceError(f"marking size {m1.size} exceeds cap {cfg.max_marking_size}")
    g = reach_graph(net, [m1, m2], 2 * cfg.reach_cap)
    places = sorted({s for m in g.markings for s in m.support()}, key=repr)
    # single tokens of places reachable from m1 or m2 are bounded by monotonicity
    g = reach_graph(net, [m1, m2] + [Multiset({s: 1}) for s in places], 3 * cfg.reach_cap)
    labels = [t.label for t in net.transitions]
    block = _refine(len(g.markings), lambda i: ((labels[t], j) for t, j in g.successors(i)))
    if prune and block[g.index[m1]] != block[g.index[m2]]:
        return SpResult(False)
    single = {s: block[g.index[Multiset({s: 1})]] for s in places}

    def plausible(l: Multiset) -> bool:
        if not prune:
            return True
        if any(single[a] != single[b] for a, b in l.support()):
            return False
        return block[g.index[pi1(l)]] == block[g.index[pi2(l)]]

    presets = _by_preset(net)
    trs = net.transitions
    post_cache: dict = {}

    def cbars(t1: int, t2: int) -> list:
        r = post_cache.get((t1, t2))
        if r is None:
            r = post_cache[(t1, t2)] = pairings(trs[t1].post, trs[t2].post)
        return r

    # forward exploration of candidates and their obligations
    initial = [l for l in pairings(m1, m2) if plausible(l)]
    index: dict = {}
    order: list = []
    obligations: list = []  # per linking: list of lists of successor indices (filled lazily)
    raw: list = []  # per linking: list of lists of successor linkings
    left_ms: set = set()
    right_ms: set = set()
    q: deque = deque()
    for l in initial:
        index[l] = len(order)
        order.append(l)
        q.append(l)
    while q:
        l = q.popleft()
        p1, p2 = pi1(l), pi2(l)
        left_ms.add(p1)
        right_ms.add(p2)
        if len(left_ms) > cfg.reach_cap or len(right_ms) > cfg.reach_cap:
            raise ResourceError(f"more than {cfg.reach_cap} reachable markings on one side")
        if p1.size > cfg.max_marking_size or p2.size > cfg.max_marking_size:
            raise ResourceError(f"marking size exceeds cap {cfg.max_marking_size}")
        obs = []
        for side, proj_m in ((1, p1), (2, p2)):
            for t1, tr1 in enumerate(trs):
                if not tr1.pre <= proj_m:
                    continue
                for c in sub_linkings_with_proj(l, tr1.pre, side):
                    rest = l - c
                    other = pi2(c) if side == 1 else pi1(c)
                    succ = []
                    for t2 in presets.get(other, ()):
                        if trs[t2].label != tr1.label:
                            continue
                        for cb in cbars(t1, t2) if side == 1 else cbars(t2, t1):
                            l2 = rest + cb
                            if plausible(l2):
                                succ.append(l2)
                    obs.append(succ)
        raw.append(obs)
        for succ in obs:
            for l2 in succ:
                if l2 not in index:
                    index[l2] = len(order)
                    order.append(l2)
                    if len(order) > cfg.linking_cap:
                        raise ResourceError(f"more than {cfg.linking_cap} candidate linkings")
                    q.append(l2)
    # greatest fixpoint by counting
    n = len(order)
    alive = [True] * n
    counts: list = []  # per (linking, obligation): number of live distinct answers
    watchers: dict = {}  # successor index -> list of (linking, obligation)
    dead_q: deque = deque()
    for i, obs in enumerate(raw):
        cs = []
        for k, succ in enumerate(obs):
            targets = {index[s] for s in succ}
            cs.append(len(targets))
            for j in targets:
                watchers.setdefault(j, []).append((i, k))
            if not targets and alive[i]:
                alive[i] = False
                dead_q.append(i)
        counts.append(cs)
    while dead_q:
        j = dead_q.popleft()
        for i, k in watchers.get(j, ()):
            if not alive[i]:
                continue
            counts[i][k] -= 1
            if counts[i][k] == 0:
                alive[i] = False
                dead_q.append(i)
    ok = any(alive[index[l]] for l in initial)
    witness = [order[i] for i in range(n) if alive[i]] if ok else None
    return SpResult(ok, witness, n)


def sp_witness_relation(res: SpResult) -> SpRelation:
    return SpRelation(res.witness or [])


# -- rooted isomorphism ------------------------------------------------------------------------
def rooted_iso(n1: Net, n2: Net) -> dict | None:
    """A place bijection mapping the initial marking of ``n1`` onto that of ``n2`` and
    inducing a label-preserving bijection of transitions, or ``None``.
    """
    import networkx as nx
    from networkx.algorithms.isomorphism import DiGraphMatcher

    if len(n1.places) != len(n2.places) or len(n1.transitions) != len(n2.transitions):
        return None

    def graph(n: Net):
        g = nx.DiGraph()
        for s in n.places:
            g.add_node(("p", s), kind="p", tokens=n.initial[s])
        for i, t in enumerate(n.transitions):
            g.add_node(("t", i), kind="t", label=t.label)
            for s, w in t.pre.items():
                g.add_edge(("p", s), ("t", i), w=w)
            for s, w in t.post.items():
                g.add_edge(("t", i), ("p", s), w=w)
        return g

    gm = DiGraphMatcher(graph(n1), graph(n2), node_match=lambda a, b: a == b, edge_match=lambda a, b: a == b)
    for mapping in gm.isomorphisms_iter():
        return {a[1]: b[1] for a, b in mapping.items() if a[0] == "p"}
    return None
