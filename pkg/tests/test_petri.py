import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fnmnet.corpus import SEMICOUNTER_NET, STATIC_ONLY_NET, SUBNET_NET
from fnmnet.errors import NetError, ResourceError
from fnmnet.multiset import EMPTY, Multiset
from fnmnet.petri import (
    disjoint_union,
    dynamic_subnet,
    enumerate_steps,
    fire,
    format_marking,
    is_bounded,
    is_statically_reduced,
    make_net,
    net_from_json,
    net_to_dot,
    net_to_json,
    parse_marking,
    reach_graph,
    reachable,
    static_subnet,
    step_fire,
    step_label,
)

from strategies import nets

OMEGA = float("inf")


def karp_miller_bounded(net, m0, limit=20000):
    """Textbook coverability tree with omega acceleration along the ancestor chain."""
    places = list(net.places)
    start = tuple(m0[s] for s in places)
    stack = [(start, ())]
    seen = 0
    while stack:
        v, anc = stack.pop()
        seen += 1
        assert seen < limit
        if OMEGA in v:
            return False
        if v in anc:
            continue
        for t in net.transitions:
            pre = [t.pre[s] for s in places]
            if any(x < p for x, p in zip(v, pre)):
                continue
            w = [x - p + t.post[s] for x, p, s in zip(v, pre, places)]
            for a in anc + (v,):
                if all(x <= y for x, y in zip(a, w)) and tuple(w) != a:
                    w = [OMEGA if y > x else y for x, y in zip(a, w)]
            stack.append((tuple(w), anc + (v,)))
    return True


def test_fire_and_disabled():
    m1 = fire(SEMICOUNTER_NET, SEMICOUNTER_NET.initial, 0)
    assert m1 == Multiset({"s1": 1, "s2": 1})
    with pytest.raises(NetError):
        fire(SEMICOUNTER_NET, m1, 1)


def test_validation():
    with pytest.raises(NetError):
        make_net(["s"], [({}, "a", {"s": 1})])
    with pytest.raises(NetError):
        make_net(["s"], [({"s": 1}, "a", {"t": 1})])
    with pytest.raises(NetError):
        make_net(["s"], [({"s": 1}, "a", {}), ({"s": 1}, "a", {})])


def test_steps_of_semicounter():
    m = Multiset({"s1": 1, "s2": 3})
    steps = list(enumerate_steps(SEMICOUNTER_NET, m))
    assert len(steps) == 3  # {inc}, {dec}, {inc, dec}
    both = Multiset({0: 1, 1: 1})
    assert both in steps
    assert step_label(SEMICOUNTER_NET, both) == Multiset(["inc", "dec"])
    assert step_fire(SEMICOUNTER_NET, m, both) == Multiset({"s1": 1, "s2": 1})


def test_semicounter_unbounded():
    # the inc loop keeps adding to s2
    assert not is_bounded(SEMICOUNTER_NET)
    with pytest.raises(ResourceError):
        reach_graph(SEMICOUNTER_NET, [SEMICOUNTER_NET.initial], cap=100)


@given(nets())
def test_boundedness_matches_karp_miller(net):
    assert is_bounded(net) == karp_miller_bounded(net, net.initial)


@given(nets())
def test_reachable_markings_are_closed_under_firing(net):
    if not is_bounded(net):
        return
    rs = set(reachable(net))
    for m in rs:
        for i, t in enumerate(net.transitions):
            if t.pre <= m:
                assert fire(net, m, i) in rs


def test_dynamic_and_static_subnets_differ():
    dyn = dynamic_subnet(SUBNET_NET)
    st_ = static_subnet(SUBNET_NET)
    assert set(dyn.places) == {"s1", "s2", "s4"} and len(dyn.transitions) == 2
    assert set(st_.places) == {"s1", "s2", "s4", "s5"} and len(st_.transitions) == 3


@given(nets())
def test_dynamic_inside_static(net):
    if not is_bounded(net):
        return
    dyn, sta = dynamic_subnet(net), static_subnet(net)
    assert set(dyn.places) <= set(sta.places)
    assert set(dyn.transitions) <= set(sta.transitions)
    # static reduction is idempotent
    assert is_statically_reduced(sta)


def test_static_only_example():
    assert is_statically_reduced(STATIC_ONLY_NET)
    assert set(dynamic_subnet(STATIC_ONLY_NET).places) == {"s1", "s2"}


@given(nets())
def test_json_round_trip(net):
    back = net_from_json(net_to_json(net))
    assert back == net


def test_json_errors():
    with pytest.raises(NetError):
        net_from_json("{")
    with pytest.raises(NetError):
        net_from_json(json.dumps({"transitions": []}))


def test_markings_text():
    m = parse_marking("p:2, q")
    assert m == Multiset({"p": 2, "q": 1})
    assert parse_marking(format_marking(m)) == m
    assert parse_marking("") == EMPTY


def test_dot_mentions_every_node():
    dot = net_to_dot(SUBNET_NET)
    assert dot.startswith("digraph")
    assert dot.count("shape=box") == len(SUBNET_NET.transitions)
    assert dot.count("shape=circle") == len(SUBNET_NET.places)


def test_disjoint_union_tags():
    u, r1, r2 = disjoint_union(SEMICOUNTER_NET, SEMICOUNTER_NET)
    assert len(u.places) == 4 and len(u.transitions) == 4
    assert u.initial == Multiset({"1/s1": 1, "2/s1": 1})
    assert r1["s2"] == "1/s2" and r2["s2"] == "2/s2"
