"""On-disk fragment format.

Header (little-endian, 31 bytes)::

    magic "HSRC" | version u8 | m u8 | modulus u32 | k u8 | n u16 |
    index u16 | point u32 | object length u64 | stripe count u32

followed by the stripe values packed m bits each, least significant bit
first, zero-padded to a whole byte.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContainerError

MAGIC = b"HSRC"
VERSION = 1
HEADER = struct.Struct("<4sBBIBHHIQI")


def pack_values(values: np.ndarray, m: int) -> bytes:
    v = np.asarray(values, dtype=np.int64)
    bits = ((v[:, None] >> np.arange(m)) & 1).astype(np.uint8).reshape(-1)
    return np.packbits(bits, bitorder="little").tobytes()


def unpack_values(payload: bytes, m: int, count: int) -> np.ndarray:
    need = (count * m + 7) // 8
    if len(payload) != need:
        raise ContainerError(f"payload holds {len(payload)} bytes, expected {need}")
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), bitorder="little")
    bits = bits[: count * m].reshape(count, m).astype(np.int64)
    return (bits << np.arange(m, dtype=np.int64)).sum(axis=1) if count else np.zeros(0, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class FragmentFile:
    m: int
    modulus: int
    k: int
    n: int
    index: int
    point: int
    length: int
    values: np.ndarray
    version: int = VERSION

    def __post_init__(self):
        if not 1 <= self.index <= self.n:
            raise ContainerError(f"fragment index {self.index} outside 1..{self.n}")
        if self.point == 0 or self.point >> self.m:
            raise ContainerError(f"evaluation point {self.point:#x} invalid for m={self.m}")

    @property
    def stripes(self) -> int:
        return len(self.values)

    def to_bytes(self) -> bytes:
        head = HEADER.pack(MAGIC, self.version, self.m, self.modulus, self.k, self.n,
                           self.index, self.point, self.length, self.stripes)
        return head + pack_values(self.values, self.m)

    @classmethod
    def from_bytes(cls, data: bytes) -> FragmentFile:
        if len(data) < HEADER.size:
            raise ContainerError("file shorter than the fragment header")
        magic, version, m, modulus, k, n, index, point, length, stripes = HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ContainerError("bad magic, not an HSRC fragment")
        if version != VERSION:
            raise ContainerError(f"unsupported version {version}")
        if not 2 <= m <= 20:
            raise ContainerError(f"field degree {m} out of range")
        values = unpack_values(data[HEADER.size:], m, stripes)
        return cls(m, modulus, k, n, index, point, length, values, version)

    def write(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def read(cls, path) -> FragmentFile:
        try:
            return cls.from_bytes(Path(path).read_bytes())
        except ContainerError as e:
            raise ContainerError(f"{path}: {e}") from None
