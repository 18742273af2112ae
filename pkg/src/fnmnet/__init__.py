"""Finite-net multi-CCS: a process calculus with atomic sequences, its P/T net
semantics, net equivalences and the translation from nets back to terms."""

from .multiset import EMPTY, Multiset
from .petri import Net, Transition, make_net

__all__ = ["EMPTY", "Multiset", "Net", "Transition", "make_net"]
