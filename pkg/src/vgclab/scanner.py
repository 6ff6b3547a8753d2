"""Range scans for even numbers without a vertical Goldbach partition.

Work is split into fixed-size chunks of consecutive even numbers.  Chunks
are independent, so they can run in a process pool; results are merged
strictly in chunk order, which keeps reports identical for any worker
count or chunk size.  After every merged chunk an optional checkpoint is
rewritten so an interrupted scan can be resumed.
"""
from __future__ import annotations

import os
import struct
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from multiprocessing import get_context
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import (
    BadMagic,
    BadVersion,
    ChecksumMismatch,
    IntegrityError,
    InvalidArgument,
    InvalidState,
    NotFound,
    NotSorted,
    OutOfRange,
    TruncatedFile,
)
from .iprime import IPrimeSet

DEFAULT_CHUNK = 1 << 21  # even numbers per chunk
_SMALL = 48  # below this many pending numbers switch to per-number checks

CHECKPOINT_MAGIC = b"VGCK"
CHECKPOINT_VERSION = 1
_HEADER = struct.Struct("<4sHQQQQ")
_TRAILER = struct.Struct("<Q")
_VARIANT_FLAG = 1 << 63

Progress = Callable[[int, int], None]
PathLike = Union[str, os.PathLike]


@dataclass(frozen=True)
class ExceptionReport:
    """Outcome of a scan over the even numbers 2..scanned_to.

    ``candidate_L`` is in units of n: the last exception is 2 * candidate_L.
    It is only "verified up to scanned_to / 2", never a proven last exception.
    """

    order_pair: tuple[int, int]
    scanned_to: int
    exceptions: tuple[int, ...]
    complete: bool = True
    variant: Optional[str] = None

    @property
    def candidate_L(self) -> int:
        return self.exceptions[-1] // 2 if self.exceptions else 0

    def to_dict(self) -> dict:
        return {
            "order_pair": list(self.order_pair),
            "variant": self.variant,
            "scanned_to": self.scanned_to,
            "verified_to_n": self.scanned_to // 2,
            "complete": self.complete,
            "candidate_L": self.candidate_L,
            "exception_count": len(self.exceptions),
            "exceptions": list(self.exceptions),
        }


_KNOWN = {
    (0, 0): 3,
    (1, 0): 3,
    (2, 0): 2564,
    (1, 1): 40306,
    (3, 0): 125771,
    (2, 1): 1765126,
    (4, 0): 6204163,
    (3, 1): 32050472,
    (2, 2): 161352166,
    (5, 0): 260535479,
}


@dataclass(frozen=True)
class KnownLimits:
    """Verified L(a, b) values, looked up symmetrically."""

    table: Mapping[tuple[int, int], int] = field(default_factory=lambda: dict(_KNOWN))

    @staticmethod
    def _key(a: int, b: int) -> tuple[int, int]:
        return (a, b) if a >= b else (b, a)

    def __contains__(self, pair) -> bool:
        return self._key(*pair) in self.table

    def __getitem__(self, pair) -> int:
        try:
            return self.table[self._key(*pair)]
        except KeyError:
            raise NotFound(f"no verified limit for {pair}") from None

    def get(self, a: int, b: int) -> Optional[int]:
        return self.table.get(self._key(a, b))

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.table)


KNOWN_LIMITS = KnownLimits()


# --------------------------------------------------------------------------
# chunk checkers


def odd_lookup(s: IPrimeSet) -> np.ndarray:
    """Membership flags for the odd numbers 1, 3, 5, ... <= s.limit."""
    flags = np.zeros((s.limit - 1) // 2 + 1, dtype=bool)
    odd = s.elements[s.elements > 2]
    flags[(odd - 1) >> 1] = True
    return flags


class PairChecker:
    """Finds the even numbers in a chunk with no partition u + v, u != v.

    The prime 2 is dropped from both sets: u = 2 forces v = 2n - 2, which is
    prime only for 2n = 4 and then equals u.  Every difference looked up is
    therefore odd and indexes the odd-only table directly.
    """

    def __init__(self, A: IPrimeSet, B: IPrimeSet):
        self.u = A.elements[A.elements > 2]
        self.in_b = odd_lookup(B)

    def _single(self, two_n: int) -> bool:
        u = self.u[: np.searchsorted(self.u, two_n)]
        d = two_n - u
        return bool(np.any(self.in_b[(d - 1) >> 1] & (d != u)))

    def __call__(self, lo: int, hi: int) -> np.ndarray:
        pending = np.arange(lo, hi + 1, 2, dtype=np.int64)
        for u in self.u:
            if pending.size <= _SMALL or u >= pending[-1]:
                break
            start = int(np.searchsorted(pending, u, side="right"))
            tail = pending[start:]
            d = tail - u
            hit = self.in_b[(d - 1) >> 1] & (d != u)
            if hit.any():
                pending = np.concatenate((pending[:start], tail[~hit]))
        left = [x for x in pending.tolist() if not self._single(x)]
        return np.asarray(left, dtype=np.int64)


# --------------------------------------------------------------------------
# chunk driver

_worker_checker = None


def _install(checker) -> None:
    global _worker_checker
    _worker_checker = checker


def _run_chunk(bounds: tuple[int, int]) -> np.ndarray:
    return _worker_checker(*bounds)


def _chunk_bounds(start: int, limit: int, chunk: int) -> list[tuple[int, int]]:
    span = 2 * chunk
    return [(lo, min(lo + span - 2, limit)) for lo in range(start, limit + 1, span)]


def default_workers() -> int:
    env = os.environ.get("VGC_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def drive(
    checker: Callable[[int, int], np.ndarray],
    start: int,
    limit: int,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
    on_chunk: Optional[Callable[[int, np.ndarray], None]] = None,
    stop_after: Optional[int] = None,
) -> tuple[int, list[np.ndarray]]:
    """Run ``checker`` over even numbers start..limit chunk by chunk.

    Returns the last even number covered and the per-chunk exception arrays
    in ascending order.  ``on_chunk(hi, found)`` fires after each chunk is
    merged; ``stop_after`` caps the number of chunks processed.
    """
    if chunk_size < 1:
        raise InvalidArgument("chunk_size must be positive")
    bounds = _chunk_bounds(start, limit, chunk_size)
    if stop_after is not None:
        bounds = bounds[:stop_after]
    found: list[np.ndarray] = []
    reached = start - 2

    def merge(hi: int, exc: np.ndarray) -> None:
        nonlocal reached
        found.append(exc)
        reached = hi
        if on_chunk is not None:
            on_chunk(hi, exc)

    if workers <= 1 or len(bounds) <= 1:
        for lo, hi in bounds:
            merge(hi, checker(lo, hi))
    else:
        ctx = get_context("fork")
        with ProcessPoolExecutor(
            max_workers=workers, mp_context=ctx, initializer=_install, initargs=(checker,)
        ) as pool:
            for (lo, hi), exc in zip(bounds, pool.map(_run_chunk, bounds)):
                merge(hi, exc)
    return reached, found


# --------------------------------------------------------------------------
# checkpoints


def _encode_tag(a: int, b: int, variant: Optional[str]) -> tuple[int, int]:
    if variant is None:
        return a, b
    from .gkc import VARIANTS

    return _VARIANT_FLAG | list(VARIANTS).index(variant), 0


def _decode_tag(a: int, b: int) -> tuple[tuple[int, int], Optional[str]]:
    if a & _VARIANT_FLAG:
        from .gkc import VARIANTS

        names = list(VARIANTS)
        i = a & ~_VARIANT_FLAG
        if i >= len(names):
            raise IntegrityError(f"unknown variant tag {i}")
        return (0, 0), names[i]
    return (a, b), None


def write_checkpoint(path: PathLike, report: ExceptionReport) -> None:
    """Atomically write ``report`` as a little-endian checkpoint file."""
    a, b = _encode_tag(*report.order_pair, report.variant)
    body = _HEADER.pack(
        CHECKPOINT_MAGIC, CHECKPOINT_VERSION, a, b, report.scanned_to, len(report.exceptions)
    ) + np.asarray(report.exceptions, dtype="<u8").tobytes()
    data = body + _TRAILER.pack(zlib.crc32(body))
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def read_checkpoint(path: PathLike) -> ExceptionReport:
    """Load a checkpoint; the report is marked incomplete until a scan finishes it."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise TruncatedFile(f"{path}: {len(data)} bytes is shorter than the header")
    magic, version, a, b, scanned_to, count = _HEADER.unpack_from(data)
    if magic != CHECKPOINT_MAGIC:
        raise BadMagic(f"{path}: magic {magic!r}")
    if version != CHECKPOINT_VERSION:
        raise BadVersion(f"{path}: version {version}")
    end = _HEADER.size + 8 * count
    if len(data) != end + _TRAILER.size:
        raise TruncatedFile(f"{path}: expected {end + _TRAILER.size} bytes, got {len(data)}")
    (crc,) = _TRAILER.unpack_from(data, end)
    if crc != zlib.crc32(data[:end]):
        raise ChecksumMismatch(f"{path}: checksum mismatch")
    values = np.frombuffer(data, dtype="<u8", count=count, offset=_HEADER.size)
    if count and (
        np.any(np.diff(values.astype(np.int64)) <= 0)
        or np.any(values % 2)
        or int(values[-1]) > scanned_to
    ):
        raise NotSorted(f"{path}: exception list is not an ascending list of evens")
    pair, variant = _decode_tag(a, b)
    return ExceptionReport(
        order_pair=pair,
        scanned_to=int(scanned_to),
        exceptions=tuple(int(v) for v in values),
        complete=False,
        variant=variant,
    )


# --------------------------------------------------------------------------
# scanning


def run_report(
    checker,
    order_pair: tuple[int, int],
    variant: Optional[str],
    limit_2n: int,
    *,
    first: int = 2,
    prior: Optional[ExceptionReport] = None,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
    checkpoint: Optional[PathLike] = None,
    progress: Optional[Progress] = None,
    stop_after: Optional[int] = None,
) -> ExceptionReport:
    """Shared scan loop used by pair scans and the window-variant scans."""
    exceptions = list(prior.exceptions) if prior else []
    start = prior.scanned_to + 2 if prior else first
    if prior is not None and prior.scanned_to >= limit_2n:
        return ExceptionReport(
            prior.order_pair, prior.scanned_to, prior.exceptions, True, prior.variant
        )

    def on_chunk(hi: int, exc: np.ndarray) -> None:
        exceptions.extend(exc.tolist())
        if checkpoint is not None:
            write_checkpoint(
                checkpoint,
                ExceptionReport(order_pair, hi, tuple(exceptions), False, variant),
            )
        if progress is not None:
            progress(hi, limit_2n)

    reached, _ = drive(
        checker,
        start,
        limit_2n,
        workers=workers,
        chunk_size=chunk_size,
        on_chunk=on_chunk,
        stop_after=stop_after,
    )
    reached = max(reached, start - 2)
    return ExceptionReport(
        order_pair=order_pair,
        scanned_to=reached,
        exceptions=tuple(exceptions),
        complete=reached >= limit_2n,
        variant=variant,
    )


def _select(chain: Union[Sequence[IPrimeSet], Mapping[int, IPrimeSet]], order: int) -> IPrimeSet:
    items: Iterable[IPrimeSet] = chain.values() if isinstance(chain, Mapping) else chain
    for s in items:
        if s.order == order:
            return s
    raise InvalidArgument(f"chain has no set of order {order}")


def _pair_checker(a: int, b: int, limit_2n: int, chain) -> tuple[tuple[int, int], PairChecker]:
    if a < 0 or b < 0:
        raise InvalidArgument("orders must be non-negative")
    if a < b:
        a, b = b, a
    if limit_2n < 4 or limit_2n % 2:
        raise InvalidArgument(f"scan limit must be an even number >= 4, got {limit_2n}")
    A, B = _select(chain, a), _select(chain, b)
    if limit_2n > min(A.limit, B.limit) + 3:
        raise OutOfRange(
            f"scan limit {limit_2n} not covered by sets up to {min(A.limit, B.limit)}"
        )
    return (a, b), PairChecker(A, B)


def scan(
    a: int,
    b: int,
    limit_2n: int,
    chain,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
    checkpoint: Optional[PathLike] = None,
    progress: Optional[Progress] = None,
    stop_after: Optional[int] = None,
) -> ExceptionReport:
    """Every even 2 <= 2n <= limit_2n with no (a, b) vertical partition.

    The order pair is normalized to a >= b; the relation is symmetric.
    """
    pair, checker = _pair_checker(a, b, limit_2n, chain)
    return run_report(
        checker,
        pair,
        None,
        limit_2n,
        workers=workers,
        chunk_size=chunk_size,
        checkpoint=checkpoint,
        progress=progress,
        stop_after=stop_after,
    )


def resume_scan(
    checkpoint_path: PathLike,
    a: int,
    b: int,
    limit_2n: int,
    chain,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
    progress: Optional[Progress] = None,
    stop_after: Optional[int] = None,
) -> ExceptionReport:
    """Continue a checkpointed pair scan up to ``limit_2n``."""
    prior = read_checkpoint(checkpoint_path)
    pair, checker = _pair_checker(a, b, limit_2n, chain)
    if prior.variant is not None or prior.order_pair != pair:
        raise InvalidArgument(
            f"checkpoint is for {prior.variant or prior.order_pair}, not {pair}"
        )
    return run_report(
        checker,
        pair,
        None,
        limit_2n,
        prior=prior,
        workers=workers,
        chunk_size=chunk_size,
        checkpoint=checkpoint_path,
        progress=progress,
        stop_after=stop_after,
    )


def emit_sequence(report: ExceptionReport) -> list[int]:
    """The full list of non-representable even numbers from a finished scan."""
    if not report.complete:
        raise InvalidState("report does not cover its requested range")
    return list(report.exceptions)


def format_sequence(seq: Sequence[int], bfile: bool = False, offset: int = 1) -> str:
    """One term per line; ``bfile`` prefixes each line with its index."""
    if bfile:
        lines = [f"{i} {v}" for i, v in enumerate(seq, start=offset)]
    else:
        lines = [str(v) for v in seq]
    return "".join(line + "\n" for line in lines)


def parse_limit(text: str) -> int:
    """Parse "2e7", "10^10", "1_000_000" or plain integers into an exact int."""
    s = text.strip().replace("_", "").replace(",", "")
    try:
        if "^" in s:
            base, exp = s.split("^")
            return int(base) ** int(exp)
        if "e" in s.lower():
            mant, exp = s.lower().split("e")
            from fractions import Fraction

            value = Fraction(mant) * Fraction(10) ** int(exp)
            if value.denominator != 1:
                raise ValueError
            return int(value)
        return int(s)
    except ValueError:
        raise InvalidArgument(f"not an integer limit: {text!r}") from None
