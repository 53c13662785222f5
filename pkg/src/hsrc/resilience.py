"""Static resilience of HSRC: exact rank counts, p_obj, and Monte Carlo checks.

A code with n = 2^d - 1 points is the (2^d-1) x d binary matrix of all
nonzero coordinate rows.  Losing fragments deletes rows; the object
survives while the remaining rows have rank >= k.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import gf2
from .code import CodeParams
from .errors import CodeError

BLOCK_TRIALS = 4096


def rank_gf2(vectors) -> int:
    """Row rank over GF(2) of ints, '0101' strings or 0/1 sequences."""
    return gf2.rank(vectors)


@dataclass(frozen=True)
class RankProfile:
    d: int
    table: tuple[tuple[int, ...], ...]  # table[x][r]

    def __call__(self, x: int, r: int) -> int:
        if not 0 <= x < len(self.table) or r < 0:
            raise ValueError(f"x must be in 0..{len(self.table) - 1}")
        row = self.table[x]
        return row[r] if r < len(row) else 0


@functools.lru_cache(maxsize=None)
def rank_profile(d: int) -> RankProfile:
    """R(x, d, r) for every x in 0..2^d-1, built row by row.

    Row 0 holds the empty selection (one matrix of rank 0) so that every row
    sums to the number of ordered selections.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    size = (1 << d) - 1
    full = 1 << d
    table = [[1] + [0] * d]
    for x in range(1, size + 1):
        prev = table[-1]
        row = [0] * (d + 1)
        for r in range(1, min(x, d) + 1):
            if r == x:
                prod = 1
                for i in range(r):
                    prod *= full - (1 << i)
                row[r] = prod
            else:
                row[r] = prev[r - 1] * (full - (1 << (r - 1))) + prev[r] * ((1 << r) - x)
        table.append(row)
    return RankProfile(d, tuple(tuple(r) for r in table))


def count_R(x: int, d: int, r: int) -> int:
    """Ordered x-row selections of the (2^d-1) x d matrix having rank r."""
    if not 0 <= x <= (1 << d) - 1:
        raise ValueError(f"x must be in 0..{(1 << d) - 1}")
    if r < 0 or r > d or r > x:
        return 0
    return rank_profile(d)(x, r)


def rho(x: int, d: int, r: int) -> Fraction:
    total = math.comb((1 << d) - 1, x) * math.factorial(x)
    return Fraction(count_R(x, d, r), total)


def _dimension(n: int) -> int:
    d = (n + 1).bit_length() - 1
    if n < 1 or (1 << d) != n + 1:
        raise CodeError(f"n+1 must be a power of two, got n={n}")
    return d


@functools.lru_cache(maxsize=None)
def _decodable_fraction(n: int, k: int) -> tuple[float, ...]:
    """Per x, the exact fraction of x-subsets with rank >= k, as floats."""
    d = _dimension(n)
    out = []
    for x in range(n + 1):
        frac = sum((rho(x, d, r) for r in range(k, d + 1)), Fraction(0)) if x >= k else Fraction(0)
        out.append(float(frac))
    return tuple(out)


def p_obj_src(n: int, k: int, p_frag: float) -> float:
    """Probability an HSRC(n, k) object stays decodable with i.i.d. fragment survival."""
    fracs = _decodable_fraction(n, k)
    total = 0.0
    for x in range(k, n + 1):
        if fracs[x]:
            total += fracs[x] * math.comb(n, x) * p_frag ** x * (1 - p_frag) ** (n - x)
    return min(1.0, total)


def p_obj_ec(n: int, k: int, p_frag: float) -> float:
    """Binomial tail: an MDS (n, k) code survives with any k fragments."""
    if not 0 <= k <= n:
        raise CodeError(f"need 0 <= k <= n, got k={k}, n={n}")
    out = sum(math.comb(n, i) * p_frag ** i * (1 - p_frag) ** (n - i) for i in range(k, n + 1))
    return min(1.0, out)


def _block_successes(points: tuple[int, ...], k: int, p_frag: float, seed: int, block: int, trials: int) -> int:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))
    kept = rng.random((trials, len(points))) < p_frag
    rows = np.where(kept, np.asarray(points, dtype=np.int64), 0)
    width = max(points).bit_length()
    return int((gf2.batch_rank(rows, width) >= k).sum())


def simulate_p_obj(
    code: CodeParams, p_frag: float, trials: int, seed: int, workers: int = 1
) -> tuple[float, float]:
    """Estimate p_obj by sampling fragment losses.

    Trials are grouped in fixed blocks of :data:`BLOCK_TRIALS`; block b draws
    from Philox keyed by (seed, b), so results do not depend on ``workers``.
    Returns (estimate, binomial standard error).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0.0 <= p_frag <= 1.0:
        raise ValueError("p_frag must be a probability")
    jobs = []
    for b, start in enumerate(range(0, trials, BLOCK_TRIALS)):
        jobs.append((code.points, code.k, p_frag, seed, b, min(BLOCK_TRIALS, trials - start)))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(_block_successes, *zip(*jobs)))
    else:
        hits = sum(_block_successes(*j) for j in jobs)
    est = hits / trials
    return est, math.sqrt(est * (1 - est) / trials)


@dataclass(frozen=True)
class ResilienceRow:
    p_frag: float
    p_obj_src: float | None
    p_obj_ec: float | None
    mc_estimate: float | None
    mc_stderr: float | None


def resilience_table(
    code: CodeParams,
    p_values,
    trials: int = 0,
    seed: int = 0,
    mode: str = "both",
    workers: int = 1,
) -> list[ResilienceRow]:
    if mode not in ("analytic", "sim", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    rows = []
    for p in p_values:
        src = ec = est = se = None
        if mode in ("analytic", "both"):
            src = p_obj_src(code.n, code.k, p)
            ec = p_obj_ec(code.n, code.k, p)
        if mode in ("sim", "both"):
            est, se = simulate_p_obj(code, p, trials, seed, workers)
        rows.append(ResilienceRow(p, src, ec, est, se))
    return rows
