"""Closed-form predictors for the limits L(a, b) and the step-4 extrapolation.

Exponents are exact fractions; a single float power is taken at the end.
For cells whose value would overflow a float, use the ``*_exponent``
functions directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgument, NotEstimable
from .scanner import KNOWN_LIMITS, KnownLimits

STEP = 4


def _check(a: int, b: int) -> None:
    if a < 0 or b < 0:
        raise InvalidArgument("orders must be non-negative")


def f_x1_exponent(a: int, b: int) -> Fraction:
    _check(a, b)
    if a == b == 0:
        return Fraction(2)
    if a == b:
        return Fraction((a + 1) * (b + 1) * (a + b + 3), a) - a
    return Fraction((a + 1) * (b + 1) * (a + b + 2) - (a + b - 2))


def f_x2_exponent(a: int, b: int) -> Fraction:
    _check(a, b)
    if a == b and a > 0:
        return Fraction((a + 1) * (b + 1) * (a + b + 3), a) - 2 * a
    return f_x1_exponent(a, b)


def f_x1(a: int, b: int) -> float:
    return 2.0 ** float(f_x1_exponent(a, b))


def f_x2(a: int, b: int) -> float:
    return 2.0 ** float(f_x2_exponent(a, b))


def h(a: int, b: int) -> int:
    _check(a, b)
    if a == b == 0:
        return 2 * (a + b + 1)
    if a == 0 or b == 0:
        return 4 * (a + b)
    return 4 * (a + b + 1)


def f_y(a: int, b: int) -> float:
    return math.exp(h(a, b))


def g_of(a: int, b: int, known: KnownLimits = KNOWN_LIMITS) -> float:
    """Natural log of a verified limit."""
    return math.log(known[a, b])


def estimate_log_L(a: int, b: int, known: KnownLimits = KNOWN_LIMITS) -> float:
    """ln L(a, b) by the step-4 rule.

    A verified cell keeps its own value.  Any other cell takes the larger of
    its two predecessors (a-1, b) and (a, b-1), themselves estimated the same
    way, plus 4.  Paths never pass through a verified cell's ancestors.
    """
    _check(a, b)

    @lru_cache(maxsize=None)
    def est(x: int, y: int) -> Optional[float]:
        if (x, y) in known:
            return math.log(known[x, y])
        preds = [est(*p) for p in ((x - 1, y), (x, y - 1)) if min(p) >= 0]
        preds = [v for v in preds if v is not None]
        return max(preds) + STEP if preds else None

    value = est(max(a, b), min(a, b))
    if value is None:
        raise NotEstimable(f"no verified limit below ({a}, {b})")
    return value


def estimate_L(a: int, b: int, known: KnownLimits = KNOWN_LIMITS) -> float:
    if (a, b) in known:
        return float(known[a, b])
    return math.exp(estimate_log_L(a, b, known))


def ordering_inversions(
    fn: Callable[[int, int], float], known: KnownLimits = KNOWN_LIMITS
) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Pairs of verified cells (p, q) with L(p) < L(q) but fn(p) > fn(q)."""
    found = []
    for p, q in combinations(known.pairs(), 2):
        if known[p] > known[q]:
            p, q = q, p
        if known[p] < known[q] and fn(*p) > fn(*q):
            found.append((p, q))
    return found


@dataclass(frozen=True)
class PredictorTables:
    """Square matrices indexed [a, b]; cells without a value hold NaN."""

    x1: np.ndarray
    x2: np.ndarray
    h_mat: np.ndarray
    fy: np.ndarray
    g_mat: np.ndarray
    l_est: np.ndarray


def build_tables(size: int = 6, known: KnownLimits = KNOWN_LIMITS) -> PredictorTables:
    def fill(fn, dtype=float):
        return np.array([[fn(a, b) for b in range(size)] for a in range(size)], dtype=dtype)

    def g_cell(a, b):
        return g_of(a, b, known) if (a, b) in known else math.nan

    def l_cell(a, b):
        try:
            return estimate_L(a, b, known)
        except NotEstimable:
            return math.nan

    return PredictorTables(
        x1=fill(f_x1),
        x2=fill(f_x2),
        h_mat=fill(h, dtype=np.int64),
        fy=fill(f_y),
        g_mat=fill(g_cell),
        l_est=fill(l_cell),
    )
