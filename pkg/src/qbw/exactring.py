"""Exact scalars: rational integers, cyclotomic integers Z[zeta_n] and their
quaternionic extension by a unit ``k`` with ``k**2 == -1`` and ``k z == conj(z) k``.

Cyclotomic integers are stored as the canonical residue modulo the n-th
cyclotomic polynomial, so equality is a comparison of coefficient tuples.
Mixed orders are embedded into Z[zeta_lcm].
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

#: Largest root-of-unity order accepted when two orders are combined.
MAX_ORDER = 360


class OrderCapError(ValueError):
    """Raised when combining orders would exceed :data:`MAX_ORDER`."""


def _check_order(n: int) -> None:
    if n < 1:
        raise ValueError(f"root-of-unity order must be positive, got {n}")
    if n > MAX_ORDER:
        raise OrderCapError(f"order {n} exceeds the cap {MAX_ORDER}")


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (low degree first), den monic."""
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + dn]
        out[k] = c
        if c:
            for i, d in enumerate(den):
                num[k + i] -= c * d
    if any(num[:dn]):
        raise ArithmeticError("polynomial division left a remainder")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _poly_divexact(num, list(cyclotomic_poly(d)))
    return tuple(num)


def euler_phi(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


def _moebius(n: int) -> int:
    res, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            res = -res
        p += 1
    return -res if m > 1 else res


class CycloRing:
    """Lookup tables for Z[zeta_n] in the power basis 1, x, ..., x^(phi-1)."""

    def __init__(self, n: int):
        self.n = n
        self.poly = cyclotomic_poly(n)
        self.phi = phi = len(self.poly) - 1
        length = max(n, 2 * phi - 1)
        powers = []
        cur = [1] + [0] * (phi - 1)
        for _ in range(length):
            powers.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [c - top * p for c, p in zip(cur, self.poly[:-1])]
        # x^j for j < max(n, 2 phi - 1); x^n == 1 so exponents wrap mod n
        self.powers = tuple(powers)
        self.red = np.array(powers, dtype=np.int64)
        self.conj_map = np.array(
            [powers[(-j) % n] for j in range(phi)], dtype=np.int64
        )
        # mul_tensor[a, b] = canonical form of x^(a+b)
        self.mul_tensor = np.array(
            [[powers[a + b] for b in range(phi)] for a in range(phi)], dtype=np.int64
        )
        self.growth = int(np.abs(self.red).sum(axis=1).max())
        self.one = tuple([1] + [0] * (phi - 1))
        self.zero = tuple([0] * phi)

    def root(self, j: int) -> tuple[int, ...]:
        return self.powers[j % self.n]

    def reduce(self, raw) -> tuple[int, ...]:
        out = [0] * self.phi
        for j, c in enumerate(raw):
            if c:
                pj = self.powers[j] if j < len(self.powers) else self.root(j)
                for i, p in enumerate(pj):
                    if p:
                        out[i] += c * p
        return tuple(out)

    def mul(self, a, b) -> tuple[int, ...]:
        raw = [0] * (2 * self.phi - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        raw[i + j] += x * y
        return self.reduce(raw)

    def conj(self, a) -> tuple[int, ...]:
        raw = [0] * self.n
        for j, c in enumerate(a):
            raw[(-j) % self.n] += c
        return self.reduce(raw)

    def trace(self, a) -> int:
        """Absolute trace Q(zeta_n)/Q, via Ramanujan sums."""
        total = 0
        for j, c in enumerate(a):
            if c:
                g = math.gcd(self.n, j)
                m = self.n // g
                total += c * _moebius(m) * self.phi // euler_phi(m)
        return total

    @lru_cache(maxsize=None)
    def embed_matrix(self, big: int) -> np.ndarray:
        """Linear map (phi_n x phi_big) sending Z[zeta_n] into Z[zeta_big]."""
        if big % self.n:
            raise ValueError(f"{self.n} does not divide {big}")
        target = ring(big)
        step = big // self.n
        return np.array(
            [target.root(j * step) for j in range(self.phi)], dtype=np.int64
        )

    def embed(self, a, big: int) -> tuple[int, ...]:
        if big == self.n:
            return tuple(a)
        target = ring(big)
        step = big // self.n
        raw = [0] * big
        for j, c in enumerate(a):
            raw[(j * step) % big] += c
        return target.reduce(raw)


@lru_cache(maxsize=None)
def ring(n: int) -> CycloRing:
    _check_order(n)
    return CycloRing(n)


def common_order(n: int, m: int) -> int:
    out = n * m // math.gcd(n, m)
    _check_order(out)
    return out


@dataclass(frozen=True, eq=False)
class CycEntry:
    """An element of Z[zeta_order] in canonical coordinates."""

    order: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != ring(self.order).phi:
            raise ValueError("coefficient vector has the wrong length")

    @classmethod
    def from_int(cls, value: int, order: int = 1) -> "CycEntry":
        r = ring(order)
        return cls(order, tuple([int(value)] + [0] * (r.phi - 1)))

    def embed(self, order: int) -> "CycEntry":
        if order == self.order:
            return self
        return CycEntry(order, ring(self.order).embed(self.coeffs, order))

    def _lift(self, other) -> tuple["CycEntry", "CycEntry"]:
        if isinstance(other, (int, np.integer)):
            other = CycEntry.from_int(int(other), self.order)
        n = common_order(self.order, other.order)
        return self.embed(n), other.embed(n)

    def __add__(self, other):
        if not isinstance(other, _CYC_OPERANDS):
            return NotImplemented
        a, b = self._lift(other)
        return CycEntry(a.order, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycEntry(self.order, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        if not isinstance(other, _CYC_OPERANDS):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, _CYC_OPERANDS):
            return NotImplemented
        a, b = self._lift(other)
        return CycEntry(a.order, ring(a.order).mul(a.coeffs, b.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        out = CycEntry.from_int(1, self.order)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def conj(self) -> "CycEntry":
        return CycEntry(self.order, ring(self.order).conj(self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_integer(self) -> bool:
        return not any(self.coeffs[1:])

    def norm(self) -> "CycEntry":
        return self * self.conj()

    def __complex__(self) -> complex:
        z = np.exp(2j * np.pi / self.order)
        return complex(sum(c * z**j for j, c in enumerate(self.coeffs)))

    def __eq__(self, other) -> bool:
        if isinstance(other, QuatEntry):
            return other == self
        if isinstance(other, (int, np.integer)):
            return self.is_integer() and self.coeffs[0] == other
        if not isinstance(other, CycEntry):
            return NotImplemented
        if other.order == self.order:
            return self.coeffs == other.coeffs
        a, b = self._lift(other)
        return a.coeffs == b.coeffs

    def __hash__(self) -> int:
        # trace / degree does not depend on the ambient order
        r = ring(self.order)
        return hash(Fraction(r.trace(self.coeffs), r.phi))

    def __repr__(self) -> str:
        try:
            return f"CycEntry({format_token(self)})"
        except ValueError:
            return f"CycEntry(order={self.order}, coeffs={self.coeffs})"


@dataclass(frozen=True, eq=False)
class QuatEntry:
    """The quaternionic value ``a + k*b`` with cyclotomic ``a`` and ``b``."""

    a: CycEntry
    b: CycEntry

    def __post_init__(self):
        if self.a.order != self.b.order:
            n = common_order(self.a.order, self.b.order)
            object.__setattr__(self, "a", self.a.embed(n))
            object.__setattr__(self, "b", self.b.embed(n))

    @property
    def order(self) -> int:
        return self.a.order

    @classmethod
    def lift(cls, x) -> "QuatEntry":
        if isinstance(x, QuatEntry):
            return x
        x = as_cyc(x)
        return cls(x, CycEntry.from_int(0, x.order))

    def __add__(self, other):
        if not isinstance(other, _QUAT_OPERANDS):
            return NotImplemented
        o = QuatEntry.lift(other)
        return QuatEntry(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuatEntry(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-QuatEntry.lift(other))

    def __rsub__(self, other):
        return QuatEntry.lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, _QUAT_OPERANDS):
            return NotImplemented
        o = QuatEntry.lift(other)
        a, b, c, d = self.a, self.b, o.a, o.b
        return QuatEntry(a * c - b.conj() * d, a.conj() * d + b * c)

    def __rmul__(self, other):
        if not isinstance(other, _QUAT_OPERANDS):
            return NotImplemented
        return QuatEntry.lift(other) * self

    def conj(self) -> "QuatEntry":
        return QuatEntry(self.a.conj(), -self.b)

    def norm(self) -> CycEntry:
        return self.a * self.a.conj() + self.b * self.b.conj()

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def as_matrix(self) -> np.ndarray:
        """The 2x2 complex model [[a, -conj(b)], [b, conj(a)]]."""
        a, b = complex(self.a), complex(self.b)
        return np.array([[a, -b.conjugate()], [b, a.conjugate()]])

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, np.integer, CycEntry)):
            other = QuatEntry.lift(other)
        if not isinstance(other, QuatEntry):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self) -> int:
        return hash((self.a, self.b))

    def __repr__(self) -> str:
        try:
            return f"QuatEntry({format_token(self)})"
        except ValueError:
            return f"QuatEntry(a={self.a!r}, b={self.b!r})"


Entry = Union[int, CycEntry, QuatEntry]
_CYC_OPERANDS = (int, np.integer, CycEntry)
_QUAT_OPERANDS = (int, np.integer, CycEntry, QuatEntry)

#: The quaternion unit.
K = QuatEntry(CycEntry.from_int(0), CycEntry.from_int(1))


@dataclass(frozen=True)
class EntryKind:
    """Scalar ring of a matrix: ``int``, ``cyc`` (order n) or ``quat`` (order n)."""

    tag: str
    order: int = 1

    def __post_init__(self):
        if self.tag not in ("int", "cyc", "quat"):
            raise ValueError(f"unknown entry kind {self.tag!r}")
        if self.tag == "int" and self.order != 1:
            raise ValueError("integer kind has order 1")
        _check_order(self.order)

    @property
    def phi(self) -> int:
        return ring(self.order).phi

    @property
    def is_quat(self) -> bool:
        return self.tag == "quat"

    def join(self, other: "EntryKind") -> "EntryKind":
        rank = {"int": 0, "cyc": 1, "quat": 2}
        tag = max(self.tag, other.tag, key=rank.__getitem__)
        n = common_order(self.order, other.order)
        if tag == "int":
            return INT
        return EntryKind(tag, n)

    def __str__(self) -> str:
        return "int" if self.tag == "int" else f"{self.tag}:{self.order}"

    @classmethod
    def parse(cls, text: str) -> "EntryKind":
        if text == "int":
            return INT
        tag, _, n = text.partition(":")
        return cls(tag, int(n))


INT = EntryKind("int")


def cyclotomic(n: int) -> EntryKind:
    return INT if n == 1 else EntryKind("cyc", n)


def quaternionic(n: int) -> EntryKind:
    return EntryKind("quat", n)


def kind_of(x: Entry) -> EntryKind:
    if isinstance(x, QuatEntry):
        return quaternionic(x.order)
    if isinstance(x, CycEntry):
        return cyclotomic(x.order)
    if isinstance(x, (int, np.integer)):
        return INT
    raise TypeError(f"not an exact entry: {x!r}")


def as_cyc(x, order: int = 1) -> CycEntry:
    if isinstance(x, CycEntry):
        return x.embed(common_order(x.order, order))
    if isinstance(x, (int, np.integer)):
        return CycEntry.from_int(int(x), order)
    raise TypeError(f"cannot view {x!r} as a cyclotomic integer")


def cyc_root(n: int, j: int) -> CycEntry:
    """zeta_n ** j in canonical form."""
    return CycEntry(n, ring(n).root(j))


def entry_mul(x: Entry, y: Entry) -> Entry:
    if isinstance(x, QuatEntry) or isinstance(y, QuatEntry):
        return QuatEntry.lift(x) * QuatEntry.lift(y)
    if isinstance(x, CycEntry) or isinstance(y, CycEntry):
        return as_cyc(x) * as_cyc(y)
    return int(x) * int(y)


def entry_conj(x: Entry) -> Entry:
    if isinstance(x, (int, np.integer)):
        return int(x)
    return x.conj()


def is_unit_or_zero(x: Entry) -> bool:
    if isinstance(x, (int, np.integer)):
        return x in (-1, 0, 1)
    if x.is_zero():
        return True
    return x.norm() == 1


def root_exponent(x: Entry, n: int) -> int | None:
    """Return j with x == zeta_n**j, or None if x is not an n-th root of unity."""
    if isinstance(x, QuatEntry):
        if not x.b.is_zero():
            return None
        x = x.a
    c = as_cyc(x)
    m = common_order(c.order, n)
    coeffs = c.embed(m).coeffs
    r = ring(m)
    step = m // n
    for j in range(n):
        if r.root(j * step) == coeffs:
            return j
    return None


# --- entry tokens -----------------------------------------------------------

_TOKEN = re.compile(r"^(-?)(?:(\d+)|i|k|w(\d+)\^(\d+)(\*k)?)$")


def parse_token(tok: str) -> Entry:
    """Parse one entry token: ``0``, ``[-]1``, ``[-]i``, ``[-]k``,
    ``[-]w<n>^<j>``, ``[-]w<n>^<j>*k`` or a bare ``-`` (meaning -1)."""
    if tok == "-":
        return -1
    m = _TOKEN.match(tok)
    if not m:
        raise ValueError(f"bad entry token {tok!r}")
    sign = -1 if m.group(1) else 1
    body = tok[len(m.group(1)):]
    if m.group(2) is not None:
        return sign * int(m.group(2))
    if body == "i":
        val: Entry = cyc_root(4, 1)
    elif body == "k":
        val = K
    else:
        n, j = int(m.group(3)), int(m.group(4))
        val = cyc_root(n, j)
        if m.group(5):
            val = QuatEntry.lift(val) * K
    return val if sign == 1 else -val


def _unit_token(c: CycEntry) -> str:
    if c.is_integer():
        return str(c.coeffs[0])
    for sign, val in (("", c), ("-", -c)):
        if val == cyc_root(4, 1):
            return sign + "i"
    for sign, val in (("", c), ("-", -c)):
        j = root_exponent(val, val.order)
        if j is not None:
            g = math.gcd(j, val.order)
            return f"{sign}w{val.order // g}^{j // g}"
    raise ValueError("entry has no token form")


def format_token(x: Entry) -> str:
    """Canonical token for an integer, a signed root of unity, or such a root times k."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, CycEntry):
        return _unit_token(x)
    if x.b.is_zero():
        return _unit_token(x.a)
    if not x.a.is_zero():
        raise ValueError("entry has no token form")
    # k*b == conj(b)*k
    c = x.b.conj()
    if c == 1:
        return "k"
    if c == -1:
        return "-k"
    tok = _unit_token(c)
    if tok in ("i", "-i"):
        tok = tok.replace("i", "w4^1")
    return tok + "*k"
