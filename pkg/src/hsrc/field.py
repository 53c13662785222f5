"""Arithmetic in GF(2^m) over a polynomial basis.

Elements are held as ints: bit j is the coefficient of w^j, where w is the
class of X modulo the field polynomial.  :class:`FieldElement` wraps an int
with operator overloading for readable code and tests; the hot paths work on
plain ints and numpy arrays.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import FieldError
from .gf2 import GF2Basis

MAX_DEGREE = 20
TABLE_DEGREE = 16

DEFAULT_MODULI = {
    2: 0x7,        # x^2 + x + 1
    3: 0xB,        # x^3 + x + 1
    4: 0x13,       # x^4 + x + 1
    5: 0x25,       # x^5 + x^2 + 1
    6: 0x43,       # x^6 + x + 1
    7: 0x83,       # x^7 + x + 1
    8: 0x11D,      # x^8 + x^4 + x^3 + x^2 + 1
    9: 0x211,      # x^9 + x^4 + 1
    10: 0x409,     # x^10 + x^3 + 1
    11: 0x805,     # x^11 + x^2 + 1
    12: 0x1053,    # x^12 + x^6 + x^4 + x + 1
    13: 0x201B,    # x^13 + x^4 + x^3 + x + 1
    14: 0x4443,    # x^14 + x^10 + x^6 + x + 1
    15: 0x8003,    # x^15 + x + 1
    16: 0x1100B,   # x^16 + x^12 + x^3 + x + 1
    17: 0x20009,   # x^17 + x^3 + 1
    18: 0x40081,   # x^18 + x^7 + 1
    19: 0x80027,   # x^19 + x^5 + x^2 + x + 1
    20: 0x100009,  # x^20 + x^3 + 1
}


def poly_str(p: int) -> str:
    """Render a GF(2)[x] polynomial bitmask, e.g. 0x13 -> 'x^4 + x + 1'."""
    if p == 0:
        return "0"
    terms = []
    for e in range(p.bit_length() - 1, -1, -1):
        if (p >> e) & 1:
            terms.append("1" if e == 0 else "x" if e == 1 else f"x^{e}")
    return " + ".join(terms)


def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[x] polynomials."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mod(a: int, mod: int) -> int:
    dm = mod.bit_length() - 1
    while a and a.bit_length() - 1 >= dm:
        a ^= mod << (a.bit_length() - 1 - dm)
    return a


def find_factor(poly: int) -> int | None:
    """Smallest-degree nontrivial factor of ``poly`` by trial division, or None."""
    deg = poly.bit_length() - 1
    for d in range(1, deg // 2 + 1):
        for cand in range(1 << d, 1 << (d + 1)):
            if poly_mod(poly, cand) == 0:
                return cand
    return None


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


class FieldSpec:
    """GF(2^m) defined by an irreducible modulus and a primitive generator.

    Immutable after construction.  Fields compare equal when degree, modulus
    and generator agree.
    """

    def __init__(self, degree: int, modulus: int, generator: int = 0b10):
        if not 2 <= degree <= MAX_DEGREE:
            raise FieldError(f"degree must be in 2..{MAX_DEGREE}, got {degree}")
        if modulus.bit_length() - 1 != degree:
            raise FieldError(
                f"modulus {poly_str(modulus)} has degree {modulus.bit_length() - 1}, expected {degree}"
            )
        factor = find_factor(modulus)
        if factor is not None:
            raise FieldError(
                f"modulus {poly_str(modulus)} is reducible: divisible by {poly_str(factor)}"
            )
        self.degree = degree
        self.modulus = modulus
        self.order = 1 << degree
        self.mask = self.order - 1
        if not 0 < generator < self.order:
            raise FieldError(f"generator {generator:#x} is not a nonzero field element")
        self.generator = generator

        group = self.order - 1
        order = group
        for p in _prime_factors(group):
            while order % p == 0 and self._slow_pow(generator, order // p) == 1:
                order //= p
        if order != group:
            raise FieldError(
                f"generator {generator:#x} is not primitive: multiplicative order {order} != {group}"
            )

        self._exp: list[int] | None = None
        self._log: list[int] | None = None
        self._np_exp: np.ndarray | None = None
        self._np_log: np.ndarray | None = None
        if degree <= TABLE_DEGREE:
            exp = [0] * (2 * group)
            log = [0] * self.order
            x = 1
            for i in range(group):
                exp[i] = x
                log[x] = i
                x = self._slow_mul(x, generator)
            exp[group:] = exp[:group]
            self._exp, self._log = exp, log
            self._np_exp = np.array(exp, dtype=np.int64)
            self._np_log = np.array(log, dtype=np.int64)

    # -- identity -----------------------------------------------------------

    def _key(self):
        return (self.degree, self.modulus, self.generator)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"FieldSpec(degree={self.degree}, modulus={self.modulus:#x}, generator={self.generator:#x})"

    # -- int-level arithmetic -------------------------------------------------

    def _slow_mul(self, a: int, b: int) -> int:
        return poly_mod(clmul(a, b), self.modulus)

    def _slow_pow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._slow_mul(result, a)
            a = self._slow_mul(a, a)
            e >>= 1
        return result

    def check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise FieldError(f"{a:#x} is not an element of GF(2^{self.degree})")
        return a

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return self._exp[self._log[a] + self._log[b]]
        return self._slow_mul(a, b)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            raise FieldError("negative exponent")
        if a == 0:
            if e == 0:
                raise FieldError("0^0 is undefined")
            return 0
        if self._exp is not None:
            return self._exp[(self._log[a] * e) % (self.order - 1)]
        return self._slow_pow(a, e % (self.order - 1))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self._exp is not None:
            return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]
        return self._slow_pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def exp(self, e: int) -> int:
        """generator ** e."""
        return self.pow(self.generator, e % (self.order - 1))

    def log(self, a: int) -> int:
        if a == 0:
            raise FieldError("log of zero")
        if self._log is not None:
            return self._log[a]
        x, i = 1, 0
        while x != a:
            x = self._slow_mul(x, self.generator)
            i += 1
        return i

    def scale(self, c: int, values: np.ndarray) -> np.ndarray:
        """Multiply every element of ``values`` by the constant ``c``."""
        values = np.asarray(values, dtype=np.int64)
        if c == 0:
            return np.zeros_like(values)
        if self._np_exp is not None:
            lc = self._log[c]
            out = self._np_exp[self._np_log[values] + lc]
            return np.where(values == 0, 0, out)
        # shift-and-add, reducing once per shift
        out = np.zeros_like(values)
        a = values.copy()
        top = self.order
        while c:
            if c & 1:
                out ^= a
            a <<= 1
            a = np.where(a & top, a ^ self.modulus, a)
            c >>= 1
        return out

    # -- element view -------------------------------------------------------

    def __call__(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldError("element belongs to a different field")
            return value
        return FieldElement(self, self.check(int(value)))

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    @property
    def w(self) -> FieldElement:
        return FieldElement(self, self.generator)

    def power_of_w(self, e: int) -> FieldElement:
        return FieldElement(self, self.exp(e))

    def elements(self) -> Iterable[FieldElement]:
        for v in range(self.order):
            yield FieldElement(self, v)

    def subfield(self, s: int) -> list[int]:
        """Elements x with x^s == x, i.e. GF(s) when log2(s) divides m."""
        l = s.bit_length() - 1
        if s != 1 << l or l < 1 or self.degree % l:
            raise FieldError(f"GF({s}) is not a subfield of GF(2^{self.degree})")
        step = (self.order - 1) // (s - 1)
        return [0] + [self.exp(step * i) for i in range(s - 1)]


@dataclass(frozen=True, eq=True)
class FieldElement:
    field: FieldSpec
    value: int

    @property
    def coords(self) -> tuple[int, ...]:
        """Coordinates (x_1, ..., x_m) in the basis 1, w, ..., w^(m-1)."""
        return tuple((self.value >> j) & 1 for j in range(self.field.degree))

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("field mismatch")
            return other.value
        if isinstance(other, (int, np.integer)):
            return self.field.check(int(other))
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.value ^ b)

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.div(self.value, b))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def __neg__(self):
        return self

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def inverse(self) -> FieldElement:
        return FieldElement(self.field, self.field.inv(self.value))

    def __repr__(self):
        if self.value == 0:
            return "0"
        terms = []
        for j in range(self.field.degree - 1, -1, -1):
            if (self.value >> j) & 1:
                terms.append("1" if j == 0 else "w" if j == 1 else f"w^{j}")
        return " + ".join(terms)


@functools.lru_cache(maxsize=None)
def _cached_field(m: int, modulus: int, generator: int) -> FieldSpec:
    return FieldSpec(m, modulus, generator)


def make_field(m: int, modulus: int | str | None = "default", generator: int | None = None) -> FieldSpec:
    """Build (or fetch from cache) a validated GF(2^m).

    ``modulus`` is the polynomial's bit-vector including the leading term,
    either as an int or a hex string such as ``"0x13"``.
    """
    if not isinstance(m, int) or not 2 <= m <= MAX_DEGREE:
        raise FieldError(f"degree must be in 2..{MAX_DEGREE}, got {m}")
    if modulus is None or modulus == "default":
        modulus = DEFAULT_MODULI[m]
    elif isinstance(modulus, str):
        try:
            modulus = int(modulus, 16)
        except ValueError:
            raise FieldError(f"modulus must be hexadecimal, got {modulus!r}") from None
    return _cached_field(m, int(modulus), 0b10 if generator is None else int(generator))


def _same_field(a: FieldElement, b: FieldElement) -> FieldSpec:
    if a.field != b.field:
        raise FieldError("field mismatch")
    return a.field


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    _same_field(a, b)
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    _same_field(a, b)
    return a * b


def power(a: FieldElement, e: int) -> FieldElement:
    return a ** e


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def subspace_points(basis: Sequence[FieldElement | int], field: FieldSpec | None = None) -> list:
    """Nonzero GF(2)-combinations of ``basis`` in binary-counting order.

    Index i (1-based) maps to the XOR of the basis elements selected by the
    set bits of i.  Returns FieldElements when given FieldElements, else ints.
    """
    wrap = None
    vals = []
    for b in basis:
        if isinstance(b, FieldElement):
            if field is not None and b.field != field:
                raise FieldError("field mismatch")
            field = b.field
            wrap = field
            vals.append(b.value)
        else:
            vals.append(int(b))
    gb = GF2Basis()
    for i, v in enumerate(vals):
        if not gb.add(v):
            raise FieldError(f"basis is GF(2)-dependent: element {i} lies in the span of the others")
    out = []
    for i in range(1, 1 << len(vals)):
        x = 0
        for j, v in enumerate(vals):
            if (i >> j) & 1:
                x ^= v
        out.append(x)
    if wrap is not None:
        return [FieldElement(wrap, x) for x in out]
    return out
