"""Net semantics of FNM terms.

A term is decomposed into a marking over *places*, which are sequential
terms possibly containing restricted names.  Transitions with a single
place in the preset are derived structurally.  Multi-party transitions are
built layer by layer: a transition with ``i`` places in its preset pairs one
with ``i - 1`` places with a singleton output transition, which consumes the
first input of the atomic sequence.  The net of a term is obtained by
alternating the transition construction with the addition of newly reached
places until nothing changes.

Labels are tuples of :class:`~fnmnet.fnm.syntax.Action`.  The silent label is
``(TAU,)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import DefinitionError, PreconditionError, ResourceError
from .fnm.checks import admissible_pairs, free_name_pairs, substitute_restricted, well_formed
from .fnm.syntax import (
    TAU,
    Action,
    Const,
    ConstEnv,
    Nil,
    Par,
    Prefix,
    Restrict,
    Strong,
    Sum,
    Term,
    Var,
    show,
)
from .multiset import EMPTY, Multiset
from .petri import Net, Transition

TAU_LABEL = (TAU,)


def label_str(label: tuple) -> str:
    """Net label of a sequence: ``tau`` or the actions joined by ``.`` (e.g. ``a.b``)."""
    return ".".join(str(a) for a in label)


def is_visible_label(label: tuple) -> bool:
    """True when no action of the label carries a restricted name."""
    return not any(a.restricted for a in label)


# -- synchronization ------------------------------------------------------------
def sync(s1: tuple, s2: tuple):
    """Result of synchronizing two labels, or ``None`` when they cannot synchronize.

    Complementary single actions give ``tau``.  A sequence ``a sigma`` meets a
    single ``~a`` and leaves ``sigma``.  Two sequences never synchronize.
    """
    if len(s1) == 1 and len(s2) == 1:
        a, b = s1[0], s2[0]
        if not a.is_tau and not b.is_tau and a.complement() == b:
            return TAU_LABEL
        return None
    if len(s1) > 1 and len(s2) == 1:
        long, short = s1, s2
    elif len(s2) > 1 and len(s1) == 1:
        long, short = s2, s1
    else:
        return None
    head, b = long[0], short[0]
    if head.is_input and b.is_output and head.complement() == b:
        return long[1:]
    return None


def msync(labels: Multiset) -> frozenset:
    """All ``sigma`` with ``MSync(labels, {sigma})``: fold the multiset by repeated pairwise syncs."""
    return _msync(labels)


@lru_cache(maxsize=100_000)
def _msync(labels: Multiset) -> frozenset:
    if labels.size == 1:
        return frozenset(labels.support())
    out: set = set()
    elems = labels.items()
    for i, (l1, n1) in enumerate(elems):
        for j in range(i, len(elems)):
            l2, n2 = elems[j]
            if i == j and n1 < 2:
                continue
            s = sync(l1, l2)
            if s is None:
                continue
            rest = labels - Multiset([l1, l2]) + Multiset([s])
            out |= _msync(rest)
    return frozenset(out)


# -- semantics engine -------------------------------------------------------------------
@dataclass
class SemConfig:
    """Caps that only matter for terms outside the well-formed fragment."""

    max_places: int = 5_000
    max_transitions: int = 200_000


class Semantics:
    """Caches decomposition and transition derivation for one constant environment."""

    def __init__(self, env: ConstEnv, config: SemConfig | None = None):
        self.env = env
        self.config = config or SemConfig()
        self._dec: dict = {}
        self._seq: dict = {}
        self._names: dict = {}

    # decomposition into places
    def dec(self, t: Term) -> Multiset:
        r = self._dec.get(t)
        if r is not None:
            return r
        if isinstance(t, Nil):
            r = EMPTY
        elif isinstance(t, (Prefix, Strong, Sum, Const, Var)):
            r = Multiset([t])
        elif isinstance(t, Par):
            r = self.dec(t.left) + self.dec(t.right)
        elif isinstance(t, Restrict):
            r = self.dec(t.body).map(lambda s: substitute_restricted(s, t.name, self.env))
        else:
            raise TypeError(f"not a term: {t!r}")
        self._dec[t] = r
        return r

    def names(self, place: Term) -> frozenset:
        r = self._names.get(place)
        if r is None:
            r = self._names[place] = free_name_pairs(place, self.env)
        return r

    def admissible_marking(self, m: Multiset) -> bool:
        pairs: set = set()
        for s in m.support():
            pairs |= self.names(s)
        return admissible_pairs(pairs)

    # transitions with a singleton preset
    def seq_transitions(self, s: Term, _active: frozenset = frozenset()) -> list:
        """``(label, post)`` pairs of the transitions whose preset is exactly ``{s}``."""
        r = self._seq.get(s)
        if r is not None:
            return r
        if isinstance(s, (Nil, Var)):
            r = []
        elif isinstance(s, Prefix):
            r = [((s.act,), self.dec(s.cont))]
        elif isinstance(s, Sum):
            r = _dedup(self.seq_transitions(s.left, _active) + self.seq_transitions(s.right, _active))
        elif isinstance(s, Strong):
            r = []
            for lab, post in self.seq_transitions(s.cont, _active):
                r.append(((s.act,) if lab == TAU_LABEL else (s.act,) + lab, post))
            r = _dedup(r)
        elif isinstance(s, Const):
            if s.name in _active:
                raise DefinitionError(f"unguarded recursion through constant {s.name}")
            r = self.seq_transitions(self.env.body(s.name), _active | {s.name})
        else:
            raise PreconditionError(f"{show(s)} is not a sequential term")
        self._seq[s] = r
        return r

    def singleton_transitions(self, places) -> list:
        out = []
        for s in places:
            pre = Multiset([s])
            for lab, post in self.seq_transitions(s):
                out.append((pre, lab, post))
        return out

    def stratify(self, places) -> list:
        """Layers ``[T_1, T_2, ...]``; layer ``i`` holds transitions with ``i`` places in the preset.

        All labels are kept here, including those mentioning restricted names.
        """
        t1 = self.singleton_transitions(places)
        if not t1:
            return [[]]
        k = max(len(lab) for _, lab, _ in t1)
        outs = [t for t in t1 if len(t[1]) == 1 and t[1][0].is_output]
        layers = [t1]
        total = len(t1)
        for _ in range(2, k + 2):
            seen: set = set()
            new = []
            for pre, lab, post in layers[-1]:
                for opre, olab, opost in outs:
                    s = sync(lab, olab)
                    if s is None:
                        continue
                    npre = pre + opre
                    if not self.admissible_marking(npre):
                        continue
                    tr = (npre, s, post + opost)
                    if tr not in seen:
                        seen.add(tr)
                        new.append(tr)
            total += len(new)
            if total > self.config.max_transitions:
                raise ResourceError(f"more than {self.config.max_transitions} derived transitions")
            if not new:
                break
            layers.append(new)
        return layers

    def statically_enabled(self, places) -> list:
        """Transitions over ``places`` whose labels carry no restricted name."""
        return [t for layer in self.stratify(places) for t in layer if is_visible_label(t[1])]


def _dedup(xs: list) -> list:
    seen: set = set()
    out = []
    for x in xs:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


# -- nets of terms ------------------------------------------------------------------------
@dataclass
class TermNet:
    """The net of a term together with the place terms behind each place name."""

    net: Net
    place_terms: dict  # place name -> Term
    transitions: list  # (pre, label, post) over terms, aligned with net.transitions
    sem: Semantics = field(repr=False)

    @property
    def initial(self) -> Multiset:
        return self.net.initial


def net_of(
    p: Term,
    env: ConstEnv,
    *,
    rename: bool = False,
    force: bool = False,
    config: SemConfig | None = None,
    sem: Semantics | None = None,
) -> TermNet:
    """Build the net of ``p``: places statically reachable from ``dec(p)`` and their enabled transitions.

    Raises :class:`PreconditionError` for terms that are not well formed or
    not admissible unless ``force`` is set, in which case the caps of
    ``config`` bound the construction.  With ``rename`` places are called
    ``s1, s2, ...`` in discovery order.
    """
    sem = sem or Semantics(env, config)
    if not force:
        if not well_formed(p, env):
            raise PreconditionError("term is not well formed: a strong prefix may end its sequence with an output")
        if not sem.admissible_marking(sem.dec(p)):
            raise PreconditionError("term is not admissible: a name occurs both plain and restricted")
    m0 = sem.dec(p)
    order = sorted(m0.support(), key=show)
    known = set(order)
    while True:
        trs = sem.statically_enabled(order)
        fresh = set()
        for _, _, post in trs:
            fresh |= post.support() - known
        if not fresh:
            break
        order += sorted(fresh, key=show)
        known |= fresh
        if len(order) > sem.config.max_places:
            raise ResourceError(f"more than {sem.config.max_places} places")
    names = {s: (f"s{i + 1}" if rename else show(s)) for i, s in enumerate(order)}
    if len(set(names.values())) != len(names):
        raise PreconditionError("two distinct places share a printed name")

    def nm(m: Multiset) -> Multiset:
        return m.map(names.__getitem__)

    trs = sorted(trs, key=lambda t: (nm(t[0]).to_json(), label_str(t[1]), nm(t[2]).to_json()))
    net = Net(
        tuple(names[s] for s in order),
        tuple(Transition(nm(pre), label_str(lab), nm(post)) for pre, lab, post in trs),
        nm(m0),
    )
    return TermNet(net, {v: k for k, v in names.items()}, trs, sem)


def compile_term(p: Term, env: ConstEnv, **kw) -> Net:
    return net_of(p, env, **kw).net


# -- decomposition oracle -----------------------------------------------------------------
def decompose(tr: tuple, sem: Semantics) -> list | None:
    """Find singleton-preset transitions whose joint step matches ``tr`` and whose labels fold to its label.

    Returns one witness as a list of ``(place, label, post)`` or ``None``.
    Independent of the layered construction: it searches all assignments of
    one singleton transition to each token of the preset.
    """
    pre, lab, post = tr
    tokens = pre.elements()
    options = [[(s, l, p) for l, p in sem.seq_transitions(s)] for s in tokens]

    def rec(i: int, acc: list, acc_post: Multiset):
        if not acc_post <= post:
            return None
        if i == len(tokens):
            if acc_post == post and lab in msync(Multiset([a[1] for a in acc])):
                return list(acc)
            return None
        for o in options[i]:
            # identical tokens take non-decreasing option indices to avoid permutations
            if i and tokens[i] == tokens[i - 1] and options[i].index(o) < options[i].index(acc[-1]):
                continue
            acc.append(o)
            r = rec(i + 1, acc, acc_post + o[2])
            if r is not None:
                return r
            acc.pop()
        return None

    return rec(0, [], EMPTY)


__all__ = [
    "TAU_LABEL",
    "Action",
    "SemConfig",
    "Semantics",
    "TermNet",
    "compile_term",
    "decompose",
    "is_visible_label",
    "label_str",
    "msync",
    "net_of",
    "sync",
]
