"""Goldbach-Knjzek style variants: one partition element must lie in a window.

All window bounds are decided in integer arithmetic.  p > sqrt(2n) is
p*p > 2n and p < 4*sqrt(2n) is p*p < 32n, so no floating point square
root ever sits on a boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidArgument
from .scanner import DEFAULT_CHUNK, ExceptionReport, read_checkpoint, run_report
from .sieve import PrimeTable


@dataclass(frozen=True)
class GkcVariant:
    name: str
    upper: str  # "n]" closed at n, "n)" open at n, "4sqrt)" open at 4*sqrt(2n)
    distinct_required: bool
    stated_threshold: int

    def bounds(self, two_n: int) -> tuple[int, int]:
        """Smallest and largest integer p inside the window for ``two_n``."""
        lo = math.isqrt(two_n) + 1
        if self.upper == "n]":
            hi = two_n // 2
        elif self.upper == "n)":
            hi = two_n // 2 - 1
        else:
            hi = math.isqrt(16 * two_n - 1)
        return lo, hi


VARIANTS = {
    "GKC": GkcVariant("GKC", "n]", False, 4),
    "ntGKC": GkcVariant("ntGKC", "n)", True, 14),
    "GKRC": GkcVariant("GKRC", "4sqrt)", False, 4),
    "ntGKRC": GkcVariant("ntGKRC", "4sqrt)", True, 6),
}


def get_variant(variant) -> GkcVariant:
    if isinstance(variant, GkcVariant):
        return variant
    for name, v in VARIANTS.items():
        if name.lower() == str(variant).lower():
            return v
    raise InvalidArgument(f"unknown variant {variant!r}; choose from {', '.join(VARIANTS)}")


def _validate(two_n: int, limit: int) -> None:
    if two_n % 2 or two_n < 4:
        raise InvalidArgument(f"expected an even number >= 4, got {two_n}")
    if two_n > limit:
        raise InvalidArgument(f"{two_n} exceeds the prime table limit {limit}")


def check(variant, two_n: int, t: PrimeTable) -> Optional[tuple[int, int]]:
    """Smallest window prime p with 2n - p prime, as ``(p, 2n - p)``."""
    v = get_variant(variant)
    _validate(two_n, t.limit)
    lo, hi = v.bounds(two_n)
    hi = min(hi, two_n - 2)
    if hi < lo:
        return None
    i = int(np.searchsorted(t.primes, lo))
    j = int(np.searchsorted(t.primes, hi, side="right"))
    for p in t.primes[i:j].tolist():
        q = two_n - p
        if v.distinct_required and p == q:
            continue
        if t.is_prime(q):
            return p, q
    return None


def _isqrt_vec(m: np.ndarray) -> np.ndarray:
    r = np.sqrt(m.astype(np.float64)).astype(np.int64)
    r -= r * r > m
    r += (r + 1) * (r + 1) <= m
    return r


class WindowChecker:
    """Vectorized exception finder for one variant over a chunk of evens.

    Every pending 2n walks its own window from the bottom, one prime per
    round, until it finds a partner prime or runs off the window.
    """

    def __init__(self, variant: GkcVariant, t: PrimeTable):
        self.variant = variant
        self.primes = t.primes
        self.odd_prime = t.odd_mask()

    def __call__(self, lo: int, hi: int) -> np.ndarray:
        v = self.variant
        m = np.arange(lo, hi + 1, 2, dtype=np.int64)
        lower = _isqrt_vec(m) + 1
        if v.upper == "n]":
            upper = m // 2
        elif v.upper == "n)":
            upper = m // 2 - 1
        else:
            upper = _isqrt_vec(16 * m - 1)
        upper = np.minimum(upper, m - 1)
        k = np.searchsorted(self.primes, lower)
        out = []
        last = self.primes.size - 1
        while m.size:
            p = self.primes[np.minimum(k, last)]
            inside = (k <= last) & (p <= upper)
            q = m - p
            ok = inside & self.odd_prime[np.maximum(q - 1, 0) >> 1] & (q > 1)
            if v.distinct_required:
                ok &= p != q
            out.append(m[~inside])
            keep = inside & ~ok
            m, upper, k = m[keep], upper[keep], k[keep] + 1
        found = np.concatenate(out) if out else np.zeros(0, dtype=np.int64)
        return np.sort(found)


def scan_variant(
    variant,
    limit_2n: int,
    t: PrimeTable,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
    checkpoint=None,
    progress=None,
    stop_after: Optional[int] = None,
    resume: bool = False,
) -> ExceptionReport:
    """Exceptions of ``variant`` among the even numbers 4..limit_2n.

    With ``resume`` the scan continues from ``checkpoint`` instead of 4.
    """
    v = get_variant(variant)
    _validate(limit_2n, t.limit)
    prior = None
    if resume:
        if checkpoint is None:
            raise InvalidArgument("resume needs a checkpoint path")
        prior = read_checkpoint(checkpoint)
        if prior.variant != v.name:
            raise InvalidArgument(
                f"checkpoint is for {prior.variant or prior.order_pair}, not {v.name}"
            )
    return run_report(
        WindowChecker(v, t),
        (0, 0),
        v.name,
        limit_2n,
        first=4,
        prior=prior,
        workers=workers,
        chunk_size=chunk_size,
        checkpoint=checkpoint,
        progress=progress,
        stop_after=stop_after,
    )
