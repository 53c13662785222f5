"""HSRC construction: striping, weakly linearized evaluation, and decoding.

A stripe of k field elements (o_1..o_k) becomes the polynomial
p(X) = sum_i o_{i+1} X^(2^i), and fragment i stores p(alpha_i).  Arrays of
stripes have shape (stripes, k); fragment payloads have shape (stripes,).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from . import gf2
from .errors import CodeError, CorruptFragments, FieldError, Unrecoverable
from .field import FieldElement, FieldSpec


@dataclass(frozen=True)
class WeaklyLinearizedPoly:
    """p(X) = sum_i coeffs[i] * X^(step^i) over ``field``."""

    field: FieldSpec
    coeffs: tuple[int, ...]
    step: int = 2

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) < 2:
            raise CodeError("a weakly linearized polynomial needs k >= 2 coefficients")
        for c in coeffs:
            self.field.check(c)
        l = self.step.bit_length() - 1
        if l < 1 or self.step != 1 << l:
            raise CodeError(f"step must be a power of two >= 2, got {self.step}")
        if self.field.degree % l:
            raise CodeError(
                f"step 2^{l} needs {l} to divide the field degree {self.field.degree}"
            )

    @property
    def k(self) -> int:
        return len(self.coeffs)

    def exponents(self) -> list[int]:
        return [self.step ** i for i in range(self.k)]

    def evaluate(self, x: int) -> int:
        F = self.field
        acc = 0
        xp = x
        for c in self.coeffs:
            acc ^= F.mul(c, xp)
            xp = F.pow(xp, self.step) if xp else 0
        return acc

    def __call__(self, x):
        if isinstance(x, FieldElement):
            if x.field != self.field:
                raise FieldError("field mismatch")
            return FieldElement(self.field, self.evaluate(x.value))
        return self.evaluate(self.field.check(int(x)))


def eval_wlpoly(p: WeaklyLinearizedPoly, alpha):
    return p(alpha)


@dataclass(frozen=True)
class CodeParams:
    field: FieldSpec
    k: int
    points: tuple[int, ...]
    subspace_basis: tuple[int, ...] | None = None
    _index: dict = dc_field(default=None, repr=False, compare=False, hash=False)
    _coords: dict = dc_field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {p: i + 1 for i, p in enumerate(self.points)})
        if self.subspace_basis is not None:
            coords = {}
            for i in range(1, 1 << len(self.subspace_basis)):
                x = 0
                for j, b in enumerate(self.subspace_basis):
                    if (i >> j) & 1:
                        x ^= b
                coords[x] = i
            object.__setattr__(self, "_coords", coords)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def m(self) -> int:
        return self.field.degree

    @property
    def d(self) -> int:
        """Dimension of the GF(2)-span of the evaluation points."""
        if self.subspace_basis is not None:
            return len(self.subspace_basis)
        return gf2.rank(self.points)

    @property
    def is_subspace(self) -> bool:
        return self.subspace_basis is not None

    def point(self, index: int) -> int:
        if not 1 <= index <= self.n:
            raise CodeError(f"fragment index {index} outside 1..{self.n}")
        return self.points[index - 1]

    def index_of(self, point: int) -> int:
        try:
            return self._index[int(point)]
        except KeyError:
            raise CodeError(f"{int(point):#x} is not an evaluation point of this code") from None

    def has_point(self, point: int) -> bool:
        return int(point) in self._index

    def coords(self, point: int) -> int:
        """Coordinates of ``point`` in the subspace basis, as a d-bit mask."""
        if self._coords is None:
            raise CodeError("code has no subspace structure")
        return self._coords[int(point)]

    def frobenius_constants(self, point: int) -> list[int]:
        """point^(2^j) for j < k: the multipliers applied to o_1..o_k."""
        F = self.field
        out = [int(point)]
        for _ in range(self.k - 1):
            out.append(F.mul(out[-1], out[-1]))
        return out


def _detect_basis(points: Sequence[int]) -> tuple[int, ...] | None:
    idx = gf2.independent_subset(points)
    if len(points) == (1 << len(idx)) - 1:
        return tuple(points[i] for i in idx)
    return None


def make_code(
    field: FieldSpec,
    k: int,
    d: int | None = None,
    *,
    points: Sequence | None = None,
    n: int | None = None,
) -> CodeParams:
    """Validated HSRC parameters.

    Exactly one of ``d`` (full punctured subspace on the basis 1, w, ..,
    w^(d-1)), ``n`` (the first n elements in binary-counting order) or
    ``points`` must be given.
    """
    if sum(x is not None for x in (d, points, n)) != 1:
        raise CodeError("give exactly one of d, n or points")
    q1 = field.order - 1
    if k < 2:
        raise CodeError(f"k must be >= 2, got {k}")
    if (1 << (k - 1)) + 1 > q1:
        raise CodeError(
            f"k={k} needs 2^{k - 1}+1 = {(1 << (k - 1)) + 1} <= 2^{field.degree}-1 = {q1}"
        )
    basis: tuple[int, ...] | None
    if d is not None:
        if not 1 <= d <= field.degree:
            raise CodeError(f"subspace dimension must be in 1..{field.degree}, got {d}")
        basis = tuple(1 << j for j in range(d))
        pts = tuple(range(1, 1 << d))
    elif n is not None:
        pts = tuple(range(1, n + 1))
        basis = None
    else:
        pts = tuple(int(field(p)) for p in points)
        basis = None
    if len(pts) > q1:
        raise CodeError(f"n={len(pts)} exceeds 2^{field.degree}-1 = {q1}")
    if any(p == 0 for p in pts):
        raise CodeError("evaluation points must be nonzero")
    if len(set(pts)) != len(pts):
        raise CodeError("evaluation points must be distinct")
    if k >= len(pts):
        raise CodeError(f"need k < n, got k={k}, n={len(pts)}")
    if basis is None:
        basis = _detect_basis(pts)
    return CodeParams(field, k, pts, basis)


@dataclass(frozen=True, eq=False)
class Fragment:
    index: int
    point: int
    values: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, Fragment):
            return NotImplemented
        return (
            self.index == other.index
            and self.point == other.point
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self):
        return f"Fragment(index={self.index}, point={self.point:#x}, stripes={len(self.values)})"


# -- striping -----------------------------------------------------------------

def _bits_to_stripes(bits: np.ndarray, k: int, m: int) -> np.ndarray:
    width = k * m
    if bits.size == 0:
        return np.zeros((0, k), dtype=np.int64)
    pad = (-bits.size) % width
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    weights = np.int64(1) << np.arange(m, dtype=np.int64)
    return (bits.reshape(-1, k, m).astype(np.int64) * weights).sum(axis=2)


def split_object(bits, k: int, m: int) -> np.ndarray:
    """Cut a bit sequence into stripes of k elements of m bits, zero-padding the tail."""
    b = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8)
    if b.size and b.max() > 1:
        raise ValueError("bits must be 0 or 1")
    return _bits_to_stripes(b, k, m)


def split_bytes(data: bytes, k: int, m: int) -> np.ndarray:
    """Stripes from a byte string read least significant bit first."""
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    return _bits_to_stripes(bits, k, m)


def stripes_to_bits(stripes: np.ndarray, m: int) -> np.ndarray:
    s = np.asarray(stripes, dtype=np.int64)
    return ((s[..., None] >> np.arange(m)) & 1).astype(np.uint8).reshape(-1)


def join_bytes(stripes: np.ndarray, m: int, length: int) -> bytes:
    """Inverse of :func:`split_bytes`, truncated to ``length`` bytes."""
    bits = stripes_to_bits(stripes, m)
    return np.packbits(bits, bitorder="little").tobytes()[:length]


# -- encoding -----------------------------------------------------------------

def _as_stripes(stripes, code: CodeParams) -> np.ndarray:
    arr = np.asarray(stripes, dtype=np.int64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != code.k:
        raise CodeError(f"stripes must have shape (S, {code.k}), got {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() >= code.field.order):
        raise FieldError("stripe value outside the field")
    return arr


def encode_point(stripes: np.ndarray, point: int, code: CodeParams) -> np.ndarray:
    F = code.field
    out = np.zeros(stripes.shape[0], dtype=np.int64)
    for j, c in enumerate(code.frobenius_constants(point)):
        out ^= F.scale(c, stripes[:, j])
    return out


def encode(stripes, code: CodeParams) -> list[Fragment]:
    """Evaluate every stripe's polynomial at each of the n points."""
    arr = _as_stripes(stripes, code)
    return [
        Fragment(i + 1, p, encode_point(arr, p, code)) for i, p in enumerate(code.points)
    ]


# -- decoding -----------------------------------------------------------------

def expand_span(available: Sequence[Fragment]) -> list[tuple[int, np.ndarray]]:
    """All 2^r - 1 (point, value) combinations over an independent subset."""
    pts = [f.point for f in available]
    base = [available[i] for i in gf2.independent_subset(pts)]
    out = []
    for mask in range(1, 1 << len(base)):
        point = 0
        value = np.zeros_like(base[0].values)
        for j, f in enumerate(base):
            if (mask >> j) & 1:
                point ^= f.point
                value = value ^ f.values
        out.append((point, value))
    return out


def point_rank(available: Sequence[Fragment]) -> int:
    return gf2.rank(f.point for f in available)


def _check_consistent(stripes: np.ndarray, available: Sequence[Fragment], code: CodeParams):
    for f in available:
        if not np.array_equal(encode_point(stripes, f.point, code), f.values):
            raise CorruptFragments(f"fragment {f.index} disagrees with the decoded object")


def decode_linear(available: Sequence[Fragment], code: CodeParams) -> np.ndarray:
    """Recover the stripes by solving the binary system in the k*m object bits.

    Each bit of p(alpha) is a GF(2)-linear form in the object bits; the system
    has full column rank exactly when the points have GF(2)-rank >= k.
    """
    available = list(available)
    k, m = code.k, code.m
    F = code.field
    idx = gf2.independent_subset([f.point for f in available])
    if len(idx) < k:
        raise Unrecoverable(len(idx), k)
    basis_frags = [available[i] for i in idx]

    rows = []
    for f in basis_frags:
        cols = [F.mul(c, 1 << t) for c in code.frobenius_constants(f.point) for t in range(m)]
        for b in range(m):
            rows.append(sum(1 << u for u, v in enumerate(cols) if (v >> b) & 1))
    recover, _, _ = gf2.solve_system(rows, k * m)
    if recover is None:  # pragma: no cover - excluded by the rank argument
        raise Unrecoverable(len(idx), k)

    nobs = len(rows)
    A = np.zeros((k * m, nobs), dtype=np.float32)
    for c, mask in enumerate(recover):
        for r in range(nobs):
            if (mask >> r) & 1:
                A[c, r] = 1.0
    S = len(basis_frags[0].values)
    Y = np.empty((S, nobs), dtype=np.float32)
    for i, f in enumerate(basis_frags):
        vals = np.asarray(f.values, dtype=np.int64)
        for b in range(m):
            Y[:, i * m + b] = (vals >> b) & 1
    X = (Y @ A.T).astype(np.int64) & 1
    weights = np.int64(1) << np.arange(m, dtype=np.int64)
    stripes = (X.reshape(S, k, m) * weights).sum(axis=2)
    _check_consistent(stripes, available, code)
    return stripes


# polynomial helpers: coefficient lists indexed by degree

def _poly_mul_linear(F: FieldSpec, poly: list[int], root: int) -> list[int]:
    """poly * (X + root)."""
    out = [0] * (len(poly) + 1)
    for i, c in enumerate(poly):
        out[i + 1] ^= c
        out[i] ^= F.mul(c, root)
    return out


def _poly_div_linear(F: FieldSpec, poly: list[int], root: int) -> list[int]:
    """poly / (X + root), assuming exact division."""
    deg = len(poly) - 1
    q = [0] * deg
    carry = 0
    for i in range(deg, 0, -1):
        carry = poly[i] ^ F.mul(carry, root) if i < deg else poly[i]
        q[i - 1] = carry
    return q


def _poly_eval(F: FieldSpec, poly: list[int], x: int) -> int:
    acc = 0
    for c in reversed(poly):
        acc = F.mul(acc, x) ^ c
    return acc


def lagrange_basis(F: FieldSpec, xs: Sequence[int]) -> list[list[int]]:
    """Coefficient lists of the Lagrange basis polynomials for nodes ``xs``."""
    master = [1]
    for x in xs:
        master = _poly_mul_linear(F, master, x)
    out = []
    for x in xs:
        q = _poly_div_linear(F, master, x)
        inv_d = F.inv(_poly_eval(F, q, x))
        out.append([F.mul(c, inv_d) for c in q])
    return out


def decode_interpolate(available: Sequence[Fragment], code: CodeParams) -> np.ndarray:
    """Recover stripes by Lagrange interpolation on 2^(k-1)+1 span points."""
    available = list(available)
    k = code.k
    F = code.field
    r = point_rank(available)
    if r < k:
        raise Unrecoverable(r, k)
    need = (1 << (k - 1)) + 1
    # the fragments themselves first, so a corrupt one shows up as a stray degree
    pairs = list({f.point: (f.point, f.values) for f in available}.values())[:need]
    used = {p for p, _ in pairs}
    for p, v in expand_span(available):
        if len(pairs) == need:
            break
        if p not in used:
            pairs.append((p, v))
            used.add(p)
    xs = [p for p, _ in pairs]
    basis = lagrange_basis(F, xs)
    S = len(available[0].values)
    deg_count = len(basis[0])
    coeffs = [np.zeros(S, dtype=np.int64) for _ in range(deg_count)]
    for (_, y), L in zip(pairs, basis):
        y = np.asarray(y, dtype=np.int64)
        for e, c in enumerate(L):
            if c:
                coeffs[e] ^= F.scale(c, y)
    powers = {1 << i for i in range(k)}
    for e, c in enumerate(coeffs):
        if e not in powers and c.any():
            raise CorruptFragments(f"nonzero coefficient at degree {e}")
    if not S:
        return np.zeros((0, k), dtype=np.int64)
    stripes = np.stack([coeffs[1 << i] for i in range(k)], axis=1)
    _check_consistent(stripes, available, code)
    return stripes

