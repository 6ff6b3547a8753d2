"""Vertical Goldbach partitions of a single even number.

A vertical partition of 2n for the order pair (a, b) is u + v = 2n with
u in the order-a set, v in the order-b set and u != v.  Rows are kept once
per unordered pair {u, v}; when both orientations qualify the one with the
larger first element is kept, which for a = b is the familiar u > n rule.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import OutOfRange
from .iprime import IPrimeSet

_BLOCK = 256


@dataclass(frozen=True)
class PartitionMatrix:
    n: int
    order_pair: tuple[int, int]
    rows: tuple[tuple[int, int], ...]

    @property
    def count(self) -> int:
        return len(self.rows)

    @property
    def is_empty(self) -> bool:
        return not self.rows


def _prepare(n: int, A: IPrimeSet, B: IPrimeSet) -> tuple[int, IPrimeSet, IPrimeSet]:
    if A.order < B.order:
        A, B = B, A
    two_n = 2 * int(n)
    if two_n > min(A.limit, B.limit) + 3:
        raise OutOfRange(
            f"2n = {two_n} not covered by sets up to {min(A.limit, B.limit)}"
        )
    return two_n, A, B


def enumerate_partitions(n: int, A: IPrimeSet, B: IPrimeSet) -> PartitionMatrix:
    """All non-redundant vertical partitions of 2n, largest first element first."""
    two_n, A, B = _prepare(n, A, B)
    u = A.elements[: np.searchsorted(A.elements, two_n)][::-1]
    v = two_n - u
    ok = B.contains_many(v) & (v != u)
    u, v = u[ok], v[ok]
    mirrored = A.contains_many(v) & B.contains_many(u) & (v > u)
    u, v = u[~mirrored], v[~mirrored]
    rows = tuple(zip(u.tolist(), v.tolist()))
    return PartitionMatrix(n=int(n), order_pair=(A.order, B.order), rows=rows)


def count_partitions(n: int, A: IPrimeSet, B: IPrimeSet) -> int:
    return enumerate_partitions(n, A, B).count


def find_witness(n: int, A: IPrimeSet, B: IPrimeSet) -> Optional[tuple[int, int]]:
    """The partition with the largest u, found by a descending scan of A.

    Each difference 2n - u is looked up in B by binary search; the scan
    stops at the first hit, so only exceptional 2n walk the whole of A.
    """
    two_n, A, B = _prepare(n, A, B)
    top = int(np.searchsorted(A.elements, two_n))
    while top > 0:
        lo = max(0, top - _BLOCK)
        u = A.elements[lo:top][::-1]
        v = two_n - u
        hit = np.flatnonzero(B.contains_many(v) & (v != u))
        if hit.size:
            i = int(hit[0])
            return int(u[i]), int(v[i])
        top = lo
    return None
