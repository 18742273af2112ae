from collections import Counter
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fnmnet.errors import ResourceError
from fnmnet.multiset import EMPTY, Multiset, dom, from_json, size, sub_multisets

elems = st.sampled_from(["a", "b", "c", "d"])
msets = st.dictionaries(elems, st.integers(0, 4)).map(Multiset)


def counter(m):
    return Counter(dict(m.items()))


def test_basic_ops():
    m = Multiset({"a": 2, "b": 1})
    n = Multiset(["b", "c"])
    assert m + n == Multiset({"a": 2, "b": 2, "c": 1})
    assert m - n == Multiset({"a": 2})
    assert 3 * n == Multiset({"b": 3, "c": 3})
    assert size(m) == m.size == 3
    assert dom(m) == {"a", "b"}
    assert Multiset({"a": 0}) == EMPTY
    assert str(EMPTY) == "0"


def test_rejects_negative():
    with pytest.raises(ValueError):
        Multiset({"a": -1})


@given(msets, msets)
def test_union_and_difference_match_counter(m, n):
    assert counter(m + n) == counter(m) + counter(n)
    assert counter(m - n) == counter(m) - counter(n)


@given(msets, msets, msets)
def test_union_is_commutative_monoid(m, n, k):
    assert m + n == n + m
    assert (m + n) + k == m + (n + k)
    assert m + EMPTY == m


@given(msets, msets)
def test_subset_laws(m, n):
    assert m <= m + n
    assert (m + n) - n == m
    assert (m <= n) == all(m[e] <= n[e] for e in m.support())
    if m <= n:
        assert (n - m) + m == n


@given(msets, st.integers(0, 3))
def test_scalar(m, j):
    assert (j * m).size == j * m.size
    assert (j * m == EMPTY) == (j == 0 or m == EMPTY)


@given(msets)
def test_json_round_trip_and_hash(m):
    assert from_json(m.to_json()) == m
    assert hash(Multiset(dict(m.items()))) == hash(m)


@given(msets)
def test_sub_multisets_is_complete(m):
    subs = list(sub_multisets(m))
    # oracle: product of per-element ranges
    keys = sorted(m.support())
    expected = {Multiset(dict(zip(keys, ns))) for ns in product(*(range(m[k] + 1) for k in keys))}
    assert len(subs) == len(set(subs)) == len(expected)
    assert set(subs) == expected


def test_sub_multisets_cap():
    with pytest.raises(ResourceError):
        list(sub_multisets(Multiset({"a": 20}), cap=16))


def test_mixed_element_order_is_deterministic():
    m = Multiset({("x", "y"): 1, "a": 2, 3: 1})
    assert m.to_json() == Multiset({3: 1, "a": 2, ("x", "y"): 1}).to_json()
