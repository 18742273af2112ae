"""Finite multisets with the operations used throughout the net semantics.

A :class:`Multiset` is immutable and hashable, so it can serve as a marking,
a preset, a step or a linking.  Elements only need to be hashable; when
elements of several types are mixed a stable ordering key is derived so that
serialization and enumeration order are deterministic.
"""
from __future__ import annotations

import json
from typing import Any, Hashable, Iterable, Iterator, Mapping

from .errors import ResourceError

DEFAULT_SUBSET_CAP = 16


def order_key(e: Any):
    """Total order used for canonical output: ints, then strings, then tuples, then the rest by ``str``."""
    if isinstance(e, bool) or not isinstance(e, (int, str, tuple)):
        return (3, str(e))
    if isinstance(e, int):
        return (0, e)
    if isinstance(e, str):
        return (1, e)
    return (2, tuple(order_key(x) for x in e))


class Multiset:
    """An immutable multiset ``m : S -> N`` with finite support.

    >>> m = Multiset({"s1": 2, "s2": 1})
    >>> (m + Multiset(["s2"]))["s2"]
    2
    >>> (m - Multiset({"s1": 5})).size
    1
    """

    __slots__ = ("_d", "_items", "_hash", "_size")

    def __init__(self, data: Mapping[Hashable, int] | Iterable[Hashable] | None = None):
        d: dict = {}
        if data is None:
            pass
        elif isinstance(data, Multiset):
            d = dict(data._d)
        elif isinstance(data, Mapping):
            for k, v in data.items():
                if not isinstance(v, int) or isinstance(v, bool):
                    raise TypeError(f"multiplicity of {k!r} must be an int, got {v!r}")
                if v < 0:
                    raise ValueError(f"negative multiplicity {v} for {k!r}")
                if v:
                    d[k] = d.get(k, 0) + v
        else:
            for k in data:
                d[k] = d.get(k, 0) + 1
        self._d = d
        self._items = None
        self._hash = None
        self._size = sum(d.values())

    @classmethod
    def _raw(cls, d: dict) -> "Multiset":
        # trusted constructor: d has positive int values only
        m = cls.__new__(cls)
        m._d = d
        m._items = None
        m._hash = None
        m._size = sum(d.values())
        return m

    # -- inspection -------------------------------------------------------
    def __getitem__(self, e) -> int:
        return self._d.get(e, 0)

    def __contains__(self, e) -> bool:
        return e in self._d

    def __iter__(self) -> Iterator:
        """Iterate over the support in canonical order."""
        return (k for k, _ in self.items())

    def __bool__(self) -> bool:
        return bool(self._d)

    @property
    def size(self) -> int:
        """``|m|``, the number of elements counted with multiplicity."""
        return self._size

    def support(self) -> frozenset:
        """``dom(m)``."""
        return frozenset(self._d)

    def items(self) -> tuple:
        """``(element, multiplicity)`` pairs sorted by :func:`order_key`."""
        if self._items is None:
            self._items = tuple(sorted(self._d.items(), key=lambda kv: order_key(kv[0])))
        return self._items

    def elements(self) -> list:
        """All elements with repetition, in canonical order."""
        return [k for k, n in self.items() for _ in range(n)]

    def as_dict(self) -> dict:
        return dict(self._d)

    # -- algebra ------------------------------------------------------------
    def __add__(self, other: "Multiset") -> "Multiset":
        if not isinstance(other, Multiset):
            return NotImplemented
        if not other._d:
            return self
        if not self._d:
            return other
        d = dict(self._d)
        for k, v in other._d.items():
            d[k] = d.get(k, 0) + v
        return Multiset._raw(d)

    def __sub__(self, other: "Multiset") -> "Multiset":
        if not isinstance(other, Multiset):
            return NotImplemented
        d = {}
        od = other._d
        for k, v in self._d.items():
            r = v - od.get(k, 0)
            if r > 0:
                d[k] = r
        return Multiset._raw(d)

    def __rmul__(self, j: int) -> "Multiset":
        if not isinstance(j, int) or j < 0:
            raise ValueError(f"scalar must be a natural number, got {j!r}")
        if j == 0:
            return EMPTY
        return Multiset._raw({k: v * j for k, v in self._d.items()})

    __mul__ = __rmul__

    def __le__(self, other: "Multiset") -> bool:
        od = other._d
        return all(od.get(k, 0) >= v for k, v in self._d.items())

    def __lt__(self, other: "Multiset") -> bool:
        return self <= other and self != other

    def __ge__(self, other: "Multiset") -> bool:
        return other <= self

    def __gt__(self, other: "Multiset") -> bool:
        return other < self

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multiset):
            return NotImplemented
        return self._d == other._d

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._d.items()))
        return self._hash

    def map(self, f) -> "Multiset":
        """Image multiset under ``f`` (multiplicities of colliding images add up)."""
        d: dict = {}
        for k, v in self._d.items():
            fk = f(k)
            d[fk] = d.get(fk, 0) + v
        return Multiset._raw(d)

    # -- serialization ------------------------------------------------------
    def to_json(self) -> str:
        """Canonical JSON object with sorted keys; the empty multiset is ``{}``."""
        return json.dumps({str(k): v for k, v in self.items()}, sort_keys=True, separators=(",", ":"))

    def __repr__(self) -> str:
        if not self._d:
            return "Multiset()"
        return "Multiset({" + ", ".join(f"{k!r}: {v}" for k, v in self.items()) + "})"

    def __str__(self) -> str:
        if not self._d:
            return "0"
        return " + ".join(f"{k}" if v == 1 else f"{v}*{k}" for k, v in self.items())


EMPTY = Multiset()


# Functional aliases ---------------------------------------------------------
def union(m1: Multiset, m2: Multiset) -> Multiset:
    return m1 + m2


def difference(m1: Multiset, m2: Multiset) -> Multiset:
    """Truncated difference ``max(m1(s) - m2(s), 0)``."""
    return m1 - m2


def scalar(j: int, m: Multiset) -> Multiset:
    return j * m


def subset(m1: Multiset, m2: Multiset) -> bool:
    return m1 <= m2


def size(m: Multiset) -> int:
    return m.size


def dom(m: Multiset) -> frozenset:
    return m.support()


def from_json(text: str) -> Multiset:
    obj = json.loads(text)
    if not isinstance(obj, dict):
        raise ValueError("multiset JSON must be an object")
    return Multiset(obj)


def sub_multisets(m: Multiset, cap: int = DEFAULT_SUBSET_CAP) -> Iterator[Multiset]:
    """Enumerate every ``m' <= m`` exactly once.

    The order is mixed-radix counting over the sorted support, with the first
    element as the least significant digit, so the empty multiset comes first
    and ``m`` itself last.  There are ``prod(m(s) + 1)`` results.  Raises
    :class:`ResourceError` when ``|m|`` exceeds ``cap``.
    """
    if m.size > cap:
        raise ResourceError(f"sub-multiset enumeration of a multiset of size {m.size} exceeds cap {cap}")
    items = m.items()
    keys = [k for k, _ in items]
    limits = [v for _, v in items]
    digits = [0] * len(keys)
    while True:
        yield Multiset._raw({k: c for k, c in zip(keys, digits) if c})
        i = 0
        while i < len(digits) and digits[i] == limits[i]:
            digits[i] = 0
            i += 1
        if i == len(digits):
            return
        digits[i] += 1
