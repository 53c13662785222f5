"""Repair-traffic model: downloads per repair and per repair strategy.

Quantities are counted in fragments.  ``x`` is the number of fragments of
an object still available, ``x_th`` the lazy-repair trigger.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .code import CodeParams
from .errors import CodeError, Irreparable
from .repair import find_repair_set


def _check_subspace_n(n: int) -> None:
    if n < 3 or (n + 1) & n:
        raise CodeError(f"n must be 2^d - 1 with d >= 2, got {n}")


def diversity(n: int) -> int:
    return (n - 1) // 2


def p2(x: int, n: int) -> float:
    """Chance that some pair rebuilding a given fragment is fully available."""
    _check_subspace_n(n)
    if not 0 <= x <= n:
        raise ValueError(f"x must be in 0..{n}")
    return 1.0 - (1.0 - (x / n) ** 2) ** diversity(n)


def d_x(x: int, n: int, k: int) -> float:
    """Downloads to rebuild one fragment: exactly 2 above half availability,
    otherwise the upper bound 2*p2 + k*(1 - p2)."""
    if 2 * x >= n + 1:
        return 2.0
    q = p2(x, n)
    return 2.0 * q + k * (1.0 - q)


def aggregate(x: int, n: int, k: int) -> tuple[float, float]:
    """(D_prl, D_seq): parallel repairs at availability x versus one at a time."""
    if not 0 <= x <= n:
        raise ValueError(f"x must be in 0..{n}")
    prl = (n - x) * d_x(x, n, k)
    seq = sum(d_x(i, n, k) for i in range(x, n))
    return prl, seq


def d_eager(x_th: int, n: int) -> int:
    return 2 * (n - x_th)


def d_ec_lazy(x_th: int, n: int, k: int) -> int:
    """Download k to rebuild the object, then ship the other n - x_th - 1 fragments."""
    return k + n - x_th - 1


def critical_threshold(n: int, k: int) -> int:
    return n + 1 - k


@dataclass(frozen=True)
class TrafficRow:
    x_th: int
    d_eager: float
    d_prl: float
    d_seq: float
    d_ec_lazy: float
    d_x_bound: float
    n: int
    k: int

    @property
    def lost(self) -> int:
        return self.n - self.x_th

    @property
    def per_lost_eager(self) -> float:
        return self.d_eager / self.lost

    @property
    def per_lost_prl(self) -> float:
        return self.d_prl / self.lost

    @property
    def per_lost_seq(self) -> float:
        return self.d_seq / self.lost

    @property
    def per_lost_ec(self) -> float:
        return self.d_ec_lazy / self.lost


CSV_COLUMNS = (
    "x_th", "d_eager", "d_prl", "d_seq", "d_ec_lazy",
    "per_lost_eager", "per_lost_prl", "per_lost_seq", "per_lost_ec", "n", "k",
    "d_x_bound",
)


def traffic_table(n: int, k: int) -> list[TrafficRow]:
    _check_subspace_n(n)
    if not 1 <= k < n:
        raise CodeError(f"need 1 <= k < n, got k={k}, n={n}")
    rows = []
    for x in range(k, n):
        prl, seq = aggregate(x, n, k)
        rows.append(TrafficRow(x, float(d_eager(x, n)), prl, seq, float(d_ec_lazy(x, n, k)),
                               d_x(x, n, k), n, k))
    return rows


def row_values(row: TrafficRow) -> list:
    return [getattr(row, c) for c in CSV_COLUMNS]


def simulate_repair_downloads(code: CodeParams, x: int, trials: int, seed: int) -> tuple[float, int]:
    """Mean minimal repair-set size over random availability patterns.

    Each trial keeps a uniform random set of ``x`` fragments and repairs one
    uniformly chosen missing fragment through :func:`find_repair_set`.
    Trials whose target lies outside the span are skipped; returns
    (mean downloads over repairable trials, number of repairable trials).
    """
    if not 0 < x < code.n:
        raise ValueError(f"x must be in 1..{code.n - 1}")
    rng = np.random.default_rng(seed)
    total = 0
    count = 0
    for _ in range(trials):
        perm = rng.permutation(code.n) + 1
        avail = perm[:x].tolist()
        target = int(perm[x + rng.integers(code.n - x)])
        try:
            s = find_repair_set(code.point(target), avail, code)
        except Irreparable:
            continue
        total += len(s)
        count += 1
    return (total / count if count else float("nan")), count
