"""Odd-only segmented sieve of Eratosthenes with 1-based prime indexing.

``PrimeTable.nth_prime(1) == 2``: indices follow the usual p_1 = 2, p_2 = 3
convention, so an index x is itself a candidate prime when building the
prime-indexed chains in :mod:`vgclab.iprime`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import InvalidArgument, NotFound, OutOfRange, ResourceError

#: above this limit the full prime array is not materialized
DEFAULT_MATERIALIZE_THRESHOLD = 2**32
#: odd numbers per sieve segment (one byte each while sieving)
DEFAULT_SEGMENT_ODDS = 1 << 22
MAX_LIMIT = 2**63 - 1


def small_primes(n: int) -> np.ndarray:
    """All primes <= n from a plain (non-segmented) sieve."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def iter_odd_segments(
    limit: int, segment_odds: int = DEFAULT_SEGMENT_ODDS
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(start, mask)`` pairs covering every odd number <= limit.

    ``mask[j]`` tells whether the odd number ``2 * (start + j) + 1`` is prime.
    """
    if limit < 1:
        return
    n_odds = (limit - 1) // 2 + 1
    base = small_primes(math.isqrt(limit))[1:]  # odd base primes only
    for s in range(0, n_odds, segment_odds):
        e = min(s + segment_odds, n_odds)
        mask = np.ones(e - s, dtype=bool)
        lo_num = 2 * s + 1
        hi_num = 2 * e - 1
        for p in base:
            p = int(p)
            start = p * p
            if start > hi_num:
                break
            if start < lo_num:
                start = -(-lo_num // p) * p
                if start % 2 == 0:
                    start += p
            mask[(start - 1) // 2 - s :: p] = False
        if s == 0:
            mask[0] = False  # 1 is not prime
        yield s, mask


def iter_prime_blocks(
    limit: int, segment_odds: int = DEFAULT_SEGMENT_ODDS
) -> Iterator[np.ndarray]:
    """Yield ascending int64 blocks whose concatenation is every prime <= limit."""
    if limit >= 2:
        yield np.array([2], dtype=np.int64)
    for s, mask in iter_odd_segments(limit, segment_odds):
        yield 2 * (np.flatnonzero(mask).astype(np.int64) + s) + 1


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """All primes up to ``limit`` (inclusive).

    ``odd_bits`` is a little-endian packed bitset in which bit i stands for
    the odd number 2i + 1; 2 is handled outside the bitset.
    """

    limit: int
    odd_bits: np.ndarray
    primes: np.ndarray

    @property
    def count(self) -> int:
        return int(self.primes.size)

    def _check(self, m: int) -> None:
        if m > self.limit:
            raise OutOfRange(f"{m} exceeds sieve limit {self.limit}")

    def is_prime(self, m: int) -> bool:
        self._check(m)
        if m < 2:
            return False
        if m % 2 == 0:
            return m == 2
        i = (m - 1) >> 1
        return bool((int(self.odd_bits[i >> 3]) >> (i & 7)) & 1)

    def nth_prime(self, x: int) -> int:
        """Return p(x), the x-th prime, counting from p(1) = 2."""
        if not 1 <= x <= self.count:
            raise OutOfRange(f"prime index {x} outside 1..{self.count}")
        return int(self.primes[x - 1])

    def prime_index(self, p: int) -> int:
        """Inverse of :meth:`nth_prime`."""
        self._check(p)
        if not self.is_prime(p):
            raise NotFound(f"{p} is not prime")
        return int(np.searchsorted(self.primes, p)) + 1

    def odd_mask(self) -> np.ndarray:
        """Unpacked primality flags for the odd numbers 1, 3, 5, ... <= limit."""
        n_odds = (self.limit - 1) // 2 + 1
        return np.unpackbits(self.odd_bits, count=n_odds, bitorder="little").view(bool)


def sieve(
    limit: int,
    *,
    materialize_threshold: int = DEFAULT_MATERIALIZE_THRESHOLD,
    segment_odds: int = DEFAULT_SEGMENT_ODDS,
) -> PrimeTable:
    """Sieve every prime <= limit into a :class:`PrimeTable`.

    Limits above ``materialize_threshold`` are refused; stream them with
    :func:`iter_prime_blocks` instead.
    """
    limit = int(limit)
    if limit < 2:
        raise InvalidArgument(f"sieve limit must be >= 2, got {limit}")
    if limit > MAX_LIMIT:
        raise InvalidArgument(f"sieve limit {limit} exceeds 2^63 - 1")
    if limit > materialize_threshold:
        raise ResourceError(
            f"limit {limit} is above the materialization threshold "
            f"{materialize_threshold}; use the streaming sieve"
        )
    bit_chunks = []
    prime_chunks = [np.array([2], dtype=np.int64)]
    for s, mask in iter_odd_segments(limit, segment_odds):
        # segment_odds is a multiple of 8 in practice; pad otherwise
        if mask.size % 8 and s + mask.size < (limit - 1) // 2 + 1:
            raise InvalidArgument("segment_odds must be a multiple of 8")
        bit_chunks.append(np.packbits(mask, bitorder="little"))
        prime_chunks.append(2 * (np.flatnonzero(mask).astype(np.int64) + s) + 1)
    try:
        odd_bits = np.concatenate(bit_chunks)
        primes = np.concatenate(prime_chunks)
    except MemoryError as exc:
        raise ResourceError(f"cannot hold primes up to {limit}") from exc
    odd_bits.flags.writeable = False
    primes.flags.writeable = False
    return PrimeTable(limit=limit, odd_bits=odd_bits, primes=primes)
