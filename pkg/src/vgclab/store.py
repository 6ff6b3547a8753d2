"""Binary i-prime files.

Layout (little-endian)::

    offset  size  field
    0       4     magic  b"VGCP"
    4       2     version
    6       2     order
    8       8     limit
    16      8     count
    24      8     CRC-32 of the payload, zero-extended
    32      8*n   payload: strictly ascending uint64 values
"""
from __future__ import annotations

import os
import struct
import zlib
from pathlib import Path
from typing import Union

import numpy as np

from .errors import (
    BadMagic,
    BadVersion,
    ChecksumMismatch,
    IntegrityError,
    NotSorted,
    TruncatedFile,
)
from .iprime import IPrimeSet

MAGIC = b"VGCP"
VERSION = 1
HEADER = struct.Struct("<4sHHQQQ")
assert HEADER.size == 32

PathLike = Union[str, os.PathLike]


def file_name(order: int, limit: int) -> str:
    """``1_Px_up_to_10^10.bin`` style names; non powers of ten stay decimal."""
    text = str(limit)
    if limit >= 10 and text == "1" + "0" * (len(text) - 1):
        text = f"10^{len(text) - 1}"
    return f"{order}_Px_up_to_{text}.bin"


class IPrimeFileWriter:
    """Write a file block by block; the header is patched in on close.

    Blocks must arrive in ascending order.  Used directly for sets too large
    to hold in memory, e.g. from :func:`vgclab.iprime.stream_chain_counts`.
    """

    def __init__(self, path: PathLike, order: int, limit: int):
        self.path = Path(path)
        self.order, self.limit = order, limit
        self.count, self.crc, self.last = 0, 0, -1
        self._tmp = self.path.with_name(self.path.name + ".tmp")
        self._fh = open(self._tmp, "wb")
        self._fh.write(b"\0" * HEADER.size)

    def write(self, block: np.ndarray) -> None:
        block = np.asarray(block, dtype=np.int64)
        if block.size == 0:
            return
        if int(block[0]) <= self.last or np.any(np.diff(block) <= 0):
            raise ValueError("blocks must be strictly ascending")
        data = block.astype("<u8").tobytes()
        self._fh.write(data)
        self.crc = zlib.crc32(data, self.crc)
        self.count += int(block.size)
        self.last = int(block[-1])

    def close(self) -> None:
        self._fh.seek(0)
        self._fh.write(HEADER.pack(MAGIC, VERSION, self.order, self.limit, self.count, self.crc))
        self._fh.close()
        os.replace(self._tmp, self.path)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, *rest):
        if exc_type is None:
            self.close()
        else:
            self._fh.close()
            self._tmp.unlink(missing_ok=True)


def save(s: IPrimeSet, path: PathLike) -> Path:
    with IPrimeFileWriter(path, s.order, s.limit) as w:
        w.write(s.elements)
    return Path(path)


def load(path: PathLike) -> IPrimeSet:
    data = Path(path).read_bytes()
    if len(data) < HEADER.size:
        raise TruncatedFile(f"{path}: {len(data)} bytes is shorter than the header")
    magic, version, order, limit, count, crc = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"{path}: magic {magic!r}")
    if version != VERSION:
        raise BadVersion(f"{path}: unsupported version {version}")
    if len(data) != HEADER.size + 8 * count:
        raise TruncatedFile(f"{path}: header says {count} values, file holds {(len(data) - HEADER.size) / 8}")
    payload = data[HEADER.size :]
    if zlib.crc32(payload) != crc:
        raise ChecksumMismatch(f"{path}: payload checksum mismatch")
    values = np.frombuffer(payload, dtype="<u8").astype(np.int64)
    if values.size and np.any(np.diff(values) <= 0):
        raise NotSorted(f"{path}: payload is not strictly ascending")
    if values.size and int(values[-1]) > limit:
        raise IntegrityError(f"{path}: value {int(values[-1])} above limit {limit}")
    return IPrimeSet(order=order, limit=limit, elements=values)
