"""Linear algebra over GF(2) with rows stored as Python ints (bit j = column j)."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


def as_bitmask(v) -> int:
    """Coerce an int, a '0101' string or a 0/1 sequence to an int bitmask.

    Strings and sequences are read left to right as columns 0, 1, ...
    """
    if isinstance(v, (int, np.integer)):
        if v < 0:
            raise ValueError("bit-vector must be non-negative")
        return int(v)
    if isinstance(v, str):
        bits = v.strip()
        if bits and set(bits) - {"0", "1"}:
            raise ValueError(f"not a bit string: {v!r}")
        return sum(1 << j for j, ch in enumerate(bits) if ch == "1")
    out = 0
    for j, b in enumerate(v):
        if int(b) & 1:
            out |= 1 << j
    return out


class GF2Basis:
    """Incrementally maintained echelon basis keyed by leading bit."""

    __slots__ = ("_rows",)

    def __init__(self, vectors: Iterable[int] = ()):
        self._rows: dict[int, int] = {}
        for v in vectors:
            self.add(v)

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            row = self._rows.get(top)
            if row is None:
                return v
            v ^= row
        return 0

    def add(self, v: int) -> bool:
        """Insert ``v``; return True if it increased the rank."""
        r = self.reduce(v)
        if r == 0:
            return False
        self._rows[r.bit_length() - 1] = r
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    @property
    def rank(self) -> int:
        return len(self._rows)

    def copy(self) -> GF2Basis:
        out = GF2Basis()
        out._rows = dict(self._rows)
        return out


def rank(vectors: Iterable) -> int:
    return GF2Basis(as_bitmask(v) for v in vectors).rank


def independent_subset(vectors: Sequence[int]) -> list[int]:
    """Positions of a maximal independent subset, chosen greedily in order."""
    basis = GF2Basis()
    return [i for i, v in enumerate(vectors) if basis.add(v)]


def in_span(target: int, vectors: Iterable[int]) -> bool:
    return GF2Basis(vectors).contains(target)


def batch_rank(rows: np.ndarray, width: int) -> np.ndarray:
    """Rank of many small matrices at once.

    ``rows`` has shape (batch, nrows) holding int bitmasks of ``width`` bits;
    a zero row contributes nothing, so masked-out rows may simply be zeroed.
    """
    a = np.array(rows, dtype=np.int64, copy=True)
    batch = a.shape[0]
    out = np.zeros(batch, dtype=np.int64)
    idx = np.arange(batch)
    for bit in range(width - 1, -1, -1):
        has = (a >> bit) & 1
        any_pivot = has.any(axis=1)
        if not any_pivot.any():
            continue
        piv = has.argmax(axis=1)
        pivot_rows = a[idx, piv]
        pivot_rows = np.where(any_pivot, pivot_rows, 0)
        # clear this bit from every row holding it, including the pivot
        a ^= has * pivot_rows[:, None]
        out += any_pivot
    return out


def solve_system(rows: Sequence[int], ncols: int) -> tuple[list[int] | None, list[int], int]:
    """Row-reduce ``rows`` (each an ncols-bit int) while tracking combinations.

    Returns ``(recover, checks, rank)``.  When the system has full column
    rank, ``recover[c]`` is a bitmask over the input rows whose XOR equals
    unknown ``c``; otherwise ``recover`` is None.  ``checks`` holds bitmasks
    over input rows whose XOR must vanish for a consistent system.
    """
    pivots: dict[int, tuple[int, int]] = {}
    checks: list[int] = []
    for i, value in enumerate(rows):
        combo = 1 << i
        # pivot rows are kept fully reduced, so one pass clears every pivot column
        for col, (pv, pc) in pivots.items():
            if (value >> col) & 1:
                value ^= pv
                combo ^= pc
        if value == 0:
            checks.append(combo)
            continue
        col = (value & -value).bit_length() - 1
        for c, (pv, pc) in list(pivots.items()):
            if (pv >> col) & 1:
                pivots[c] = (pv ^ value, pc ^ combo)
        pivots[col] = (value, combo)
    r = len(pivots)
    if r < ncols:
        return None, checks, r
    recover = [0] * ncols
    for col, (pv, pc) in pivots.items():
        recover[col] = pc
    return recover, checks, r
