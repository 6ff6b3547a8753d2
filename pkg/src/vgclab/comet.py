"""Goldbach comet series: partition counts per n and their averages."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import InvalidArgument, OutOfRange
from .scanner import _select
from .sieve import PrimeTable


@dataclass(frozen=True)
class CometSeries:
    order_pair: tuple[int, int]
    filter: str  # "none" or "gkrc_window"
    points: tuple[tuple[int, float], ...]

    @property
    def n(self) -> list[int]:
        return [p[0] for p in self.points]

    @property
    def values(self) -> list[float]:
        return [p[1] for p in self.points]


def _indicator(elements: np.ndarray, size: int) -> np.ndarray:
    ind = np.zeros(size, dtype=np.float64)
    ind[elements[elements < size]] = 1.0
    return ind


def _convolve(x: np.ndarray, y: np.ndarray, size: int) -> np.ndarray:
    nfft = 1 << (2 * size - 1).bit_length()
    full = np.fft.irfft(np.fft.rfft(x, nfft) * np.fft.rfft(y, nfft), nfft)[:size]
    return np.rint(full).astype(np.int64)


def partition_counts(A, B, n_from: int, n_to: int) -> np.ndarray:
    """g(n) for n_from..n_to in one pass, by convolving set indicators.

    With A inside B, the distinct ordered pairs number conv(A, B)(2n) - [n in A],
    and each unordered pair with both orientations valid is one of the
    conv(A, A)(2n) - [n in A] ordered pairs drawn from A alone, counted twice.
    """
    if A.order < B.order:
        A, B = B, A
    size = 2 * n_to + 1
    ia, ib = _indicator(A.elements, size), _indicator(B.elements, size)
    n = np.arange(n_from, n_to + 1)
    ab = _convolve(ia, ib, size)[2 * n] - (ia[n] * ib[n]).astype(np.int64)
    aa = _convolve(ia, ia, size)[2 * n] - ia[n].astype(np.int64)
    return ab - aa // 2


def _coverage(n_to: int, *sets) -> None:
    limit = min(s.limit for s in sets)
    if 2 * n_to > limit + 3:
        raise OutOfRange(f"2n = {2 * n_to} not covered by sets up to {limit}")


def g_series(a: int, b: int, n_from: int, n_to: int, chain) -> CometSeries:
    """Points (n, g(n)) for every n in [n_from, n_to]."""
    a, b = max(a, b), min(a, b)
    if n_to < n_from:
        return CometSeries((a, b), "none", ())
    if n_from < 1:
        raise InvalidArgument("n must be positive")
    A, B = _select(chain, a), _select(chain, b)
    _coverage(n_to, A, B)
    counts = partition_counts(A, B, n_from, n_to)
    points = tuple(zip(range(n_from, n_to + 1), (float(c) for c in counts)))
    return CometSeries((a, b), "none", points)


def running_mean(values: Iterable[float]) -> list[float]:
    out, total = [], 0.0
    for i, v in enumerate(values, start=1):
        total += v
        out.append(total / i)
    return out


def literal_average(values: Iterable[float]) -> list[float]:
    """Partial sums of g(j) / (j - n0 + 1): each term weighted by its own offset."""
    out, total = [], 0.0
    for i, v in enumerate(values, start=1):
        total += v / i
        out.append(total)
    return out


def average_series(series: CometSeries, mode: str = "running") -> CometSeries:
    if mode == "running":
        vals = running_mean(series.values)
    elif mode == "literal":
        vals = literal_average(series.values)
    else:
        raise InvalidArgument(f"unknown averaging mode {mode!r}")
    return CometSeries(series.order_pair, series.filter, tuple(zip(series.n, vals)))


def g_average(a: int, b: int, n0: int, m: int, chain, mode: str = "running") -> CometSeries:
    """Cumulative average of g over [n0, k] for every k in [n0, m]."""
    if n0 > m:
        raise InvalidArgument(f"empty averaging interval [{n0}, {m}]")
    return average_series(g_series(a, b, n0, m, chain), mode)


def gkrc_window_count(n: int, t: PrimeTable, distinct: bool = True) -> int:
    """Partitions of 2n with an element p in the open window (sqrt(2n), 4 sqrt(2n)).

    With ``distinct`` (the default) rows are unordered pairs of distinct
    primes, so the count never exceeds the unfiltered g(n).  Without it,
    every window prime p with 2n - p prime is counted, 2n = p + p included.
    """
    two_n = 2 * n
    lo, hi = math.isqrt(two_n) + 1, math.isqrt(16 * two_n - 1)
    hi = min(hi, two_n - 2)
    if hi < lo:
        return 0
    i = int(np.searchsorted(t.primes, lo))
    j = int(np.searchsorted(t.primes, hi, side="right"))
    count = 0
    for p in t.primes[i:j].tolist():
        q = two_n - p
        if not t.is_prime(q):
            continue
        if distinct:
            if p == q or (lo <= q <= hi and q < p):
                continue
        count += 1
    return count


def gkrc_filtered_series(
    n_from: int, n_to: int, t: PrimeTable, distinct: bool = True
) -> CometSeries:
    if n_to < n_from:
        return CometSeries((0, 0), "gkrc_window", ())
    if n_from < 1:
        raise InvalidArgument("n must be positive")
    if 2 * n_to > t.limit:
        raise OutOfRange(f"2n = {2 * n_to} exceeds table limit {t.limit}")
    points = tuple(
        (n, float(gkrc_window_count(n, t, distinct))) for n in range(n_from, n_to + 1)
    )
    return CometSeries((0, 0), "gkrc_window", points)


def to_csv(series: CometSeries, out: Optional[io.TextIOBase] = None) -> str:
    """CSV with columns n, value, order_a, order_b, filter and LF line endings."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "value", "order_a", "order_b", "filter"])
    a, b = series.order_pair
    for n, v in series.points:
        w.writerow([n, repr(float(v)), a, b, series.filter])
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text
