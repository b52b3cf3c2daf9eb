"""Small finite fields GF(p^e) with log/antilog tables.

Elements are encoded as integers ``0 <= x < p^e`` whose base-p digits are the
polynomial coefficients (least significant first).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

MAX_FIELD = 10**6
MAX_DEGREE = 6


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, e) with q = p^e, or None."""
    if q < 2:
        return None
    p = prime_factors(q)
    if len(p) != 1:
        return None
    e, r = 0, q
    while r > 1:
        r //= p[0]
        e += 1
    return p[0], e


# polynomials over Z_p as lists of coefficients, lowest degree first

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    inv = pow(m[-1], -1, p)
    while len(a) >= len(m):
        c = a[-1] * inv % p
        s = len(a) - len(m)
        for i, mi in enumerate(m):
            a[s + i] = (a[s + i] - c * mi) % p
        _trim(a)
    return a


def _pmulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _pmod(out, m, p)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _is_irreducible(m: list[int], p: int) -> bool:
    e = len(m) - 1
    x = [0, 1]
    xp = x
    for i in range(1, e // 2 + 1):
        # xp <- xp^p mod m
        r, base, k = [1], xp, p
        while k:
            if k & 1:
                r = _pmulmod(r, base, m, p)
            base = _pmulmod(base, base, m, p)
            k >>= 1
        xp = r
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(m, _trim(diff), p)) > 1:
            return False
    return True


@dataclass(frozen=True, eq=False)
class FiniteField:
    p: int
    e: int
    modulus: tuple[int, ...]
    generator: int
    exp: np.ndarray = field(repr=False)
    log: np.ndarray = field(repr=False)
    add_table: np.ndarray | None = field(repr=False, default=None)

    @property
    def q(self) -> int:
        return self.p**self.e

    @property
    def order(self) -> int:
        """Order of the multiplicative group."""
        return self.q - 1

    def add(self, x: int, y: int) -> int:
        if self.e == 1:
            return (x + y) % self.p
        return int(_digit_op(x, y, self.p, self.e, 1))

    def neg(self, x: int) -> int:
        return self.sub(0, x)

    def sub(self, x: int, y: int) -> int:
        if self.e == 1:
            return (x - y) % self.p
        return int(_digit_op(x, y, self.p, self.e, -1))

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        return int(self.exp[(int(self.log[x]) + int(self.log[y])) % self.order])

    def pow(self, x: int, k: int) -> int:
        if x == 0:
            return 0 if k else 1
        return int(self.exp[int(self.log[x]) * k % self.order])

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self.exp[-int(self.log[x]) % self.order])

    def elements(self) -> range:
        return range(self.q)

    def sub_table(self) -> np.ndarray:
        """Matrix T[x, y] = x - y over all elements."""
        xs = np.arange(self.q)
        digits = [(xs // self.p**i) % self.p for i in range(self.e)]
        out = np.zeros((self.q, self.q), dtype=np.int64)
        for i, d in enumerate(digits):
            out += ((d[:, None] - d[None, :]) % self.p) * self.p**i
        return out


def _digit_op(x: int, y: int, p: int, e: int, sign: int) -> int:
    out, scale = 0, 1
    for _ in range(e):
        out += ((x % p + sign * (y % p)) % p) * scale
        x //= p
        y //= p
        scale *= p
    return out


def dlog(F: FiniteField, x: int) -> int:
    if x == 0:
        raise ValueError("discrete log of zero is undefined")
    if not 0 < x < F.q:
        raise ValueError(f"{x} is not an element of GF({F.q})")
    return int(F.log[x])


@lru_cache(maxsize=None)
def gf(p: int, e: int = 1) -> FiniteField:
    """The field GF(p^e) with the first irreducible modulus and least primitive element."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not 1 <= e <= MAX_DEGREE or p**e > MAX_FIELD:
        raise ValueError(f"GF({p}^{e}) exceeds the supported size")
    if e == 1:
        modulus = (0, 1)
    else:
        modulus = None
        for tail in product(range(p), repeat=e):
            cand = list(tail) + [1]
            if cand[0] == 0:
                continue
            if _is_irreducible(cand, p):
                modulus = tuple(cand)
                break
        assert modulus is not None
    q = p**e
    order = q - 1
    primes = prime_factors(order) if order > 1 else []

    def mul_raw(x: int, y: int) -> int:
        if e == 1:
            return x * y % p
        xa = [(x // p**i) % p for i in range(e)]
        ya = [(y // p**i) % p for i in range(e)]
        r = _pmulmod(_trim(xa), _trim(ya), list(modulus), p)
        return sum(c * p**i for i, c in enumerate(r))

    for g in range(1, q):
        exp = np.zeros(order, dtype=np.int64)
        cur = 1
        for j in range(order):
            exp[j] = cur
            cur = mul_raw(cur, g)
        if cur != 1:
            continue
        # primitive iff g^(order/l) != 1 for each prime l | order
        if all(exp[order // l] != 1 for l in primes) or order == 1:
            log = np.full(q, -1, dtype=np.int64)
            log[exp] = np.arange(order)
            if (log[1:] < 0).any():
                continue
            return FiniteField(p, e, modulus, g, exp, log)
    raise AssertionError("no primitive element found")


def gf_q(q: int) -> FiniteField:
    pe = prime_power(q)
    if pe is None:
        raise ValueError(f"{q} is not a prime power")
    return gf(*pe)
