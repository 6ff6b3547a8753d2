"""Iterated prime-indexed primes ("i-primes").

The order-0 set is the primes themselves; the order-(i+1) set collects
p(q) for every q in the order-i set, so order 1 is 3, 5, 11, 17, 31, ...
(the super-primes) and order 2 starts 5, 11, 31, 59, 127.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InconsistentTables, InvalidArgument, OutOfRange
from .sieve import DEFAULT_SEGMENT_ODDS, PrimeTable, iter_prime_blocks, sieve


@dataclass(frozen=True, eq=False)
class IPrimeSet:
    order: int
    limit: int
    elements: np.ndarray

    def __post_init__(self):
        elements = np.ascontiguousarray(self.elements, dtype=np.int64)
        elements.flags.writeable = False
        object.__setattr__(self, "elements", elements)

    def __len__(self) -> int:
        return int(self.elements.size)

    def __eq__(self, other):
        if not isinstance(other, IPrimeSet):
            return NotImplemented
        return (
            self.order == other.order
            and self.limit == other.limit
            and np.array_equal(self.elements, other.elements)
        )

    def __repr__(self):
        return f"IPrimeSet(order={self.order}, limit={self.limit}, size={len(self)})"

    def contains(self, m: int) -> bool:
        """Binary-search membership test."""
        if m > self.limit:
            raise OutOfRange(f"{m} exceeds set limit {self.limit}")
        i = int(np.searchsorted(self.elements, m))
        return i < self.elements.size and int(self.elements[i]) == m

    def contains_many(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=np.int64)
        idx = np.searchsorted(self.elements, values)
        idx[idx == self.elements.size] = 0
        if self.elements.size == 0:
            return np.zeros(values.shape, dtype=bool)
        return self.elements[idx] == values


def base_set(t: PrimeTable, limit: Optional[int] = None) -> IPrimeSet:
    """The order-0 set: primes of ``t`` up to ``limit``."""
    limit = t.limit if limit is None else int(limit)
    if limit > t.limit:
        raise InconsistentTables(f"limit {limit} exceeds table limit {t.limit}")
    end = int(np.searchsorted(t.primes, limit, side="right"))
    return IPrimeSet(order=0, limit=limit, elements=t.primes[:end])


def lift(t: PrimeTable, s: IPrimeSet) -> IPrimeSet:
    """Map every element q of ``s`` to p(q), keeping values <= s.limit."""
    if s.limit > t.limit:
        raise InconsistentTables(
            f"set limit {s.limit} exceeds table limit {t.limit}"
        )
    q = s.elements[s.elements <= t.count]
    mapped = t.primes[q - 1] if q.size else q
    mapped = mapped[mapped <= s.limit]
    return IPrimeSet(order=s.order + 1, limit=s.limit, elements=mapped)


def build_chain(t: PrimeTable, max_order: int, limit: int) -> list[IPrimeSet]:
    """Sets of orders 0..max_order below ``limit``; stops at the first empty one."""
    if max_order < 0:
        raise InvalidArgument("max_order must be >= 0")
    chain = [base_set(t, limit)]
    while chain[-1].order < max_order and len(chain[-1]):
        nxt = lift(t, chain[-1])
        if not len(nxt):
            break
        chain.append(nxt)
    return chain


def prime_count_upper_bound(x: int) -> int:
    """An integer >= pi(x) for every x >= 2 (Dusart 2010 for x >= 599)."""
    if x < 599:
        return x
    lx = math.log(x)
    return min(x, int(x / lx * (1 + 1.2762 / lx)) + 1)


def stream_chain_counts(
    max_order: int,
    limit: int,
    sink: Optional[Callable[[int, np.ndarray], None]] = None,
    segment_odds: int = DEFAULT_SEGMENT_ODDS,
) -> list[int]:
    """Count i-primes of orders 0..max_order below ``limit`` without holding all primes.

    A prime p = p(x) has order-(i+1) membership exactly when its index x
    has order-i membership, so only the chain over indices <= pi(limit)
    is held in memory while the primes themselves are streamed.  ``sink``
    receives ``(order, block)`` for every ascending block of members.
    """
    if max_order < 0:
        raise InvalidArgument("max_order must be >= 0")
    counts = [0] * (max_order + 1)
    small: list[IPrimeSet] = []
    if max_order > 0:
        m = max(2, prime_count_upper_bound(limit))
        small = build_chain(sieve(m), max_order - 1, m)
    offset = 0
    for block in iter_prime_blocks(limit, segment_odds):
        x = np.arange(offset + 1, offset + block.size + 1, dtype=np.int64)
        offset += block.size
        keep = np.ones(block.size, dtype=bool)
        for order in range(max_order + 1):
            if order > 0:
                if order - 1 >= len(small):
                    keep[:] = False
                else:
                    keep &= small[order - 1].contains_many(x)
            n = int(np.count_nonzero(keep))
            if n == 0:
                break
            counts[order] += n
            if sink is not None:
                sink(order, block[keep])
    return counts
