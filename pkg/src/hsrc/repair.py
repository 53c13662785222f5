"""Self-repair: rebuild a lost fragment by XORing other fragments.

Because p(a + b) = p(a) + p(b), any set of fragments whose points XOR to
the lost point carries enough information to rebuild it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import gf2
from .code import CodeParams, Fragment
from .errors import CodeError, Irreparable


@dataclass(frozen=True)
class PairTable:
    target: int
    pairs: tuple[tuple[int, int], ...]

    @property
    def diversity(self) -> int:
        return len(self.pairs)

    def as_sets(self) -> set[frozenset[int]]:
        return {frozenset(p) for p in self.pairs}


def pair_table(alpha: int, code: CodeParams) -> PairTable:
    """The (n-1)/2 disjoint pairs {beta, alpha+beta} that rebuild ``alpha``."""
    if not code.is_subspace:
        raise CodeError("pair tables need a code whose points form a punctured subspace")
    alpha = int(alpha)
    code.index_of(alpha)
    pairs = []
    for beta in code.points:
        partner = alpha ^ beta
        if beta == alpha or code.index_of(partner) < code.index_of(beta):
            continue
        pairs.append((beta, partner))
    return PairTable(alpha, tuple(pairs))


def available_pairs(alpha: int, available: Iterable[int], code: CodeParams) -> list[tuple[int, int]]:
    """Every index pair (i, j), i < j, from ``available`` with points XORing to ``alpha``."""
    avail = set(available)
    out = []
    for i in sorted(avail):
        partner = int(alpha) ^ code.point(i)
        if code.has_point(partner):
            j = code.index_of(partner)
            if j in avail and j > i:
                out.append((i, j))
    return out


def find_repair_set(alpha: int, available: Iterable[int], code: CodeParams) -> tuple[int, ...]:
    """Smallest set of available indices whose points XOR to ``alpha``.

    Ties go to the lexicographically smallest sorted index tuple.
    """
    alpha = int(alpha)
    avail = sorted(set(available))
    pts = [code.point(i) for i in avail]
    basis = gf2.GF2Basis(pts)
    if alpha == 0 or not basis.contains(alpha):
        raise Irreparable(f"irreparable: {alpha:#x} is not in the span of the available fragments")
    if alpha in pts:
        return (avail[pts.index(alpha)],)
    pairs = available_pairs(alpha, avail, code)
    if pairs:
        return pairs[0]
    for size in range(3, basis.rank + 1):
        for combo in itertools.combinations(range(len(avail)), size):
            x = 0
            for c in combo:
                x ^= pts[c]
            if x == alpha:
                return tuple(avail[c] for c in combo)
    raise AssertionError("span membership and exhaustive search disagree")  # pragma: no cover


def repair_fragment(alpha: int, donors: Sequence[Fragment], code: CodeParams) -> Fragment:
    """XOR the donors' payloads into the fragment stored at ``alpha``."""
    alpha = int(alpha)
    if not donors:
        raise Irreparable("irreparable: no donors supplied")
    acc_point = 0
    acc = np.zeros_like(np.asarray(donors[0].values))
    for f in donors:
        acc_point ^= f.point
        acc = acc ^ f.values
    if acc_point != alpha:
        raise Irreparable(
            f"irreparable: donor points sum to {acc_point:#x}, not the target {alpha:#x}"
        )
    return Fragment(code.index_of(alpha), alpha, acc)


def repair_missing(fragments: Sequence[Fragment], code: CodeParams) -> list[Fragment]:
    """Rebuild every index absent from ``fragments``.

    Repairs run in rounds: a fragment rebuilt in one round may serve as a
    donor in the next.  Raises :class:`Irreparable` if some point stays out
    of reach.
    """
    have = {f.index: f for f in fragments}
    missing = [i for i in range(1, code.n + 1) if i not in have]
    rebuilt = []
    while missing:
        progress = []
        for i in missing:
            try:
                donors = find_repair_set(code.point(i), have.keys(), code)
            except Irreparable:
                continue
            progress.append(repair_fragment(code.point(i), [have[j] for j in donors], code))
        if not progress:
            raise Irreparable(
                f"irreparable: fragments {missing} lie outside the span of the available ones"
            )
        for f in progress:
            have[f.index] = f
        rebuilt.extend(progress)
        missing = [i for i in missing if i not in have]
    return sorted(rebuilt, key=lambda f: f.index)
