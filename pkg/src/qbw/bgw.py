"""Balanced generalized weighing matrices over cyclic groups, in exponent form.

A cell holds an exponent ``e`` in Z_g standing for the group element g^e, or
``None``/``-1`` for the zero of the group ring.  The BGW condition for rows
``i != h`` asks that the differences ``cells[i, j] - cells[h, j]`` over the
shared support hit every residue equally often.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .exactring import cyc_root, as_cyc
from .galois import dlog, gf_q
from .matrixcore import GridMatrix, block_compose, nega_shift, omega_shift, negacirculant, omega_circulant
from .report import DesignReport

EMPTY = -1


class BudgetExceeded(RuntimeError):
    def __init__(self, nodes: int):
        super().__init__(f"search budget exhausted after {nodes} nodes")
        self.nodes = nodes


class SearchExhausted(RuntimeError):
    def __init__(self, nodes: int):
        super().__init__(f"search space exhausted after {nodes} nodes without a solution")
        self.nodes = nodes


@dataclass(frozen=True, eq=False)
class BgwMatrix:
    group_order: int
    cells: np.ndarray  # v x v, EMPTY marks an empty cell

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.int64)
        if cells.ndim != 2 or cells.shape[0] != cells.shape[1]:
            raise ValueError("BGW cells must form a square array")
        mask = cells != EMPTY
        cells[mask] %= self.group_order
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int | None]], group_order: int) -> "BgwMatrix":
        return cls(group_order, np.array([[EMPTY if c is None else c for c in r] for r in rows]))

    @property
    def v(self) -> int:
        return self.cells.shape[0]

    @property
    def support(self) -> np.ndarray:
        return self.cells != EMPTY

    @property
    def k(self) -> int:
        return int(self.support[0].sum())

    def __getitem__(self, idx) -> int | None:
        c = int(self.cells[idx])
        return None if c == EMPTY else c

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BgwMatrix)
            and self.group_order == other.group_order
            and np.array_equal(self.cells, other.cells)
        )

    def transpose(self) -> "BgwMatrix":
        return BgwMatrix(self.group_order, self.cells.T.copy())

    def permute(self, perm: Sequence[int]) -> "BgwMatrix":
        p = np.asarray(perm)
        return BgwMatrix(self.group_order, self.cells[np.ix_(p, p)])

    def __repr__(self) -> str:
        return f"BgwMatrix(v={self.v}, g={self.group_order}, k={self.k})"


# -- checks --------------------------------------------------------------------


def bgw_check(H: BgwMatrix) -> DesignReport:
    g = H.group_order
    sup = H.support
    ks = sup.sum(axis=1)
    v = H.v
    k = int(ks[0]) if v else 0
    if k == 0:
        return DesignReport("BGW", False, (v, 0, 0), witness=(0,), detail={"reason": "empty row"})
    if not (ks == k).all():
        return DesignReport("BGW", False, (v, k, None), witness=(int(np.argmax(ks != k)),), detail={"reason": "row weights differ"})
    if not (sup.sum(axis=0) == k).all():
        return DesignReport("BGW", False, (v, k, None), witness=(int(np.argmax(sup.sum(axis=0) != k)),), detail={"reason": "column weights differ"})
    lam = None
    for i in range(v):
        for h in range(i + 1, v):
            both = sup[i] & sup[h]
            shared = int(both.sum())
            if lam is None:
                lam = shared
            if shared != lam or lam % g:
                return DesignReport("BGW", False, (v, k, lam), witness=(i, h), detail={"reason": "shared support"})
            diffs = (H.cells[i, both] - H.cells[h, both]) % g
            counts = np.bincount(diffs, minlength=g)
            if not (counts == lam // g).all():
                return DesignReport("BGW", False, (v, k, lam), witness=(i, h), detail={"reason": "difference multiset"})
    lam = k if lam is None else lam
    return DesignReport("BGW", True, (v, k, lam), detail={"group_order": g})


def skew_check(H: BgwMatrix) -> bool:
    g = H.group_order
    if g % 2:
        return False
    sup = H.support
    if sup.diagonal().any() or not np.array_equal(sup, sup.T):
        return False
    c = H.cells
    return bool(np.all(((c.T - c) % g == g // 2) | ~sup))


def symmetric_check(H: BgwMatrix) -> bool:
    return bool(np.array_equal(H.cells, H.cells.T))


# -- Paley-type family ----------------------------------------------------------


def paley_bgw(Q: int, n: int) -> BgwMatrix:
    """BGW(Q+1, Q, Q-1) over C_n on the projective line of GF(Q).

    Index 0 is the point at infinity, index 1 + x the field element x.  Core
    cell (x, y) is dlog(x - y) mod n; row infinity is 0; column infinity is
    n/2 when the matrix is skew and 0 otherwise.
    """
    if Q > 10**4:
        raise ValueError("field size above the supported bound")
    F = gf_q(Q)
    if n < 1 or (Q - 1) % n:
        raise ValueError(f"{n} does not divide {Q} - 1")
    skew = F.p % 2 == 1 and ((Q - 1) // n) % 2 == 1
    diff = F.sub_table()
    logs = np.where(diff > 0, F.log[diff], EMPTY)
    cells = np.full((Q + 1, Q + 1), EMPTY, dtype=np.int64)
    core = np.where(logs >= 0, logs % n, EMPTY)
    cells[1:, 1:] = core
    cells[0, 1:] = 0
    border_choices = [n // 2] if skew else [0]
    border_choices += [e for e in range(n) if e not in border_choices]
    for eps in border_choices:
        cells[1:, 0] = eps
        H = BgwMatrix(n, cells)
        if bgw_check(H).passed and (skew_check(H) if skew else symmetric_check(H) or n == 1):
            return H
    raise AssertionError(f"paley_bgw({Q}, {n}) failed verification")


# -- conference cores ------------------------------------------------------------


def _circulant_core_search(size: int, m: int, wrap: int, budget: int) -> tuple[list[int], int]:
    """First row exponents of a wrap-circulant W(size, size-1) with zero diagonal.

    Entries are m-th roots of unity; the wrapped entry is multiplied by
    zeta_m^wrap.  Requires that a zero sum of size-2 m-th roots forces a
    uniform profile, which holds for the prime m used here.
    """
    q = size - 1
    target = (q - 1) // m
    counts = [[0] * m for _ in range(size)]
    e = [0] * size
    nodes = 0

    def terms(t: int, val: int):
        for i in range(1, t):
            yield t - i, (val - e[i]) % m
            yield size - (t - i), (e[i] - val - wrap) % m

    def rec(t: int) -> bool:
        nonlocal nodes
        if t == size:
            return True
        vals = [0] if t == 1 else range(m)
        for val in vals:
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(nodes)
            touched = []
            ok = True
            for s, d in terms(t, val):
                counts[s][d] += 1
                touched.append((s, d))
                if counts[s][d] > target:
                    ok = False
                    break
            if ok:
                e[t] = val
                if rec(t + 1):
                    return True
            for s, d in touched:
                counts[s][d] -= 1
        return False

    if q == 1:
        return [EMPTY, 0], 1
    if (q - 1) % m:
        raise SearchExhausted(0)
    if not rec(1):
        raise SearchExhausted(nodes)
    return [EMPTY] + e[1:], nodes


def conference_core(q: int, flavor: str = "negacirculant", budget: int = 10**8) -> GridMatrix:
    """Zero-diagonal W(q+1, q) that is negacirculant (+-1) or omega-circulant over R_{q-1}."""
    if flavor == "negacirculant":
        if q != 1 and (q % 2 == 0 or q > 23):
            raise ValueError("the +-1 flavor needs q = 1 or an odd prime power up to 23")
        row, _ = _circulant_core_search(q + 1, 2, 1, budget)
        return negacirculant([0 if x == EMPTY else (-1) ** x for x in row])
    if flavor == "omega":
        if q not in (4, 8):
            raise ValueError("the omega flavor is provided for q in {4, 8}")
        m = q - 1
        row, _ = _circulant_core_search(q + 1, m, 1, budget)
        return omega_circulant([0 if x == EMPTY else cyc_root(m, x) for x in row], cyc_root(m, 1))
    raise ValueError(f"unknown core flavor {flavor!r}")


# -- generalized Hadamard matrices -----------------------------------------------


def _gh_cells_search(m: int, g: int, budget: int) -> tuple[np.ndarray | None, int]:
    lam = m // g
    M = [[0] * m for _ in range(m)]
    cnt = [[[0] * g for _ in range(m)] for _ in range(m)]
    for i in range(1, m):
        for h in range(i):
            cnt[i][h][0] += 1
    cells = [(i, j) for i in range(1, m) for j in range(1, m)]
    nodes = 0

    def rec(t: int) -> bool:
        nonlocal nodes
        if t == len(cells):
            return True
        i, j = cells[t]
        for val in range(g):
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(nodes)
            ok = True
            done = 0
            for h in range(i):
                d = (val - M[h][j]) % g
                cnt[i][h][d] += 1
                done += 1
                if cnt[i][h][d] > lam:
                    ok = False
                    break
            if ok:
                M[i][j] = val
                if rec(t + 1):
                    return True
            for h in range(done):
                cnt[i][h][(val - M[h][j]) % g] -= 1
            M[i][j] = 0
        return False

    found = rec(0)
    return (np.array(M) if found else None), nodes


def _abelian_groups(m: int) -> list[tuple[int, ...]]:
    """Cyclic decompositions of the abelian groups of order m."""
    from .galois import prime_factors

    per_prime = []
    for p in prime_factors(m):
        a, r = 0, m
        while r % p == 0:
            r //= p
            a += 1
        parts = [tuple(p**x for x in part) for part in _partitions(a)]
        per_prime.append(parts)
    out = []
    for combo in itertools.product(*per_prime):
        out.append(tuple(sorted(x for part in combo for x in part)))
    return sorted(set(out), key=lambda t: (-len(t), t))


def _partitions(a: int, largest: int | None = None):
    if a == 0:
        yield ()
        return
    largest = a if largest is None else largest
    for first in range(min(a, largest), 0, -1):
        for rest in _partitions(a - first, first):
            yield (first,) + rest


def _gh_developed_search(m: int, g: int, budget: int) -> tuple[np.ndarray | None, int]:
    """Group-developed search: M[x, y] = f(x - y) over an abelian group of order m."""
    lam = m // g
    nodes = 0
    for mods in _abelian_groups(m):
        els = list(itertools.product(*[range(md) for md in mods]))
        idx = {x: i for i, x in enumerate(els)}
        sub = [[idx[tuple((a - b) % md for a, b, md in zip(x, y, mods))] for y in els] for x in els]
        f = [0] * m
        cnt = [[0] * g for _ in range(m)]

        def rec(x: int) -> bool:
            nonlocal nodes
            if x == m:
                return True
            for val in range(g):
                nodes += 1
                if nodes > budget:
                    raise BudgetExceeded(nodes)
                touched = []
                ok = True
                for y in range(x):
                    for d, dd in ((sub[x][y], (val - f[y]) % g), (sub[y][x], (f[y] - val) % g)):
                        cnt[d][dd] += 1
                        touched.append((d, dd))
                        if cnt[d][dd] > lam:
                            ok = False
                    if not ok:
                        break
                if ok:
                    f[x] = val
                    if rec(x + 1):
                        return True
                for d, dd in touched:
                    cnt[d][dd] -= 1
            return False

        if rec(1):
            M = np.array([[f[sub[x][y]] for y in range(m)] for x in range(m)])
            M = (M - M[0:1, :] - M[:, 0:1] + M[0, 0]) % g
            return M, nodes
    return None, nodes


def gh_search(group_order: int, m: int, budget: int = 10**7, strategy: str = "cells") -> tuple[BgwMatrix | None, int]:
    """Search for a BGW(m, m, m) over C_g with normalized first row and column.

    Returns (matrix or None, nodes); None means the normalized space was
    exhausted.  Raises BudgetExceeded when the node budget runs out.
    """
    g = group_order
    if m % g:
        return None, 0
    if strategy == "cells":
        M, nodes = _gh_cells_search(m, g, budget)
    elif strategy == "developed":
        M, nodes = _gh_developed_search(m, g, budget)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if M is None:
        return None, nodes
    H = BgwMatrix(g, M)
    if not bgw_check(H).passed:
        raise AssertionError("search produced an invalid matrix")
    return H, nodes


def gh_source(group_order: int, m: int, mode: str = "search", *, budget: int = 10**7,
              path: str | Path | None = None, strategy: str = "cells") -> BgwMatrix | None:
    """A generalized Hadamard BGW(m, m, m) over C_{group_order}, searched or imported."""
    if mode == "import":
        if path is None:
            raise ValueError("import mode needs a path")
        H = read_bgw(path)
        rep = bgw_check(H)
        if H.group_order != group_order or H.v != m or not rep.passed or rep.params != (m, m, m):
            raise ValueError(f"{path} is not a verified BGW({m},{m},{m}) over C_{group_order}")
        return H
    if mode != "search":
        raise ValueError(f"unknown mode {mode!r}")
    H, _ = gh_search(group_order, m, budget, strategy)
    return H


# -- expansion ------------------------------------------------------------------------


@dataclass(frozen=True)
class Representation:
    """A faithful matrix image of the cyclic group C_g: e -> gen^e."""

    name: str
    block: int
    group_order: int
    generator: GridMatrix

    def power(self, e: int) -> GridMatrix:
        return self.generator ** (e % self.group_order)


def negashift(n: int) -> Representation:
    return Representation(f"negashift({n})", n, 2 * n, nega_shift(n))


def omegashift(n: int, omega) -> Representation:
    w = as_cyc(omega)
    order = _root_order(w)
    return Representation(f"omegashift({n})", n, order * n, omega_shift(n, w))


def complex_rep(g: int) -> Representation:
    return Representation("complex", 1, g, GridMatrix.from_entries([[cyc_root(g, 1)]]))


def _root_order(w) -> int:
    from .exactring import root_exponent

    n = w.order
    if root_exponent(w, n) is None:
        raise ValueError("omega must be a root of unity")
    for d in range(1, 2 * n + 1):
        if w**d == 1:
            return d
    raise ValueError("omega has no finite order")


def expand_bgw(H: BgwMatrix, rep: Representation) -> GridMatrix:
    if rep.group_order != H.group_order:
        raise ValueError(f"representation has order {rep.group_order}, BGW group has order {H.group_order}")
    powers = [rep.power(e) for e in range(H.group_order)]
    zero = GridMatrix.zeros(rep.block, rep.block, powers[0].kind)
    blocks = [[zero if c == EMPTY else powers[c] for c in row] for row in H.cells.tolist()]
    return block_compose(blocks)


# -- file format -----------------------------------------------------------------------


def format_bgw(H: BgwMatrix) -> str:
    lines = [f"bgw {H.v} {H.group_order}"]
    for row in H.cells.tolist():
        lines.append(" ".join("." if c == EMPTY else str(c) for c in row))
    return "\n".join(lines) + "\n"


def parse_bgw(text: str) -> BgwMatrix:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or len(lines[0]) != 3 or lines[0][0] != "bgw":
        raise ValueError("bad BGW header")
    v, g = int(lines[0][1]), int(lines[0][2])
    rows = lines[1:]
    if len(rows) != v or any(len(r) != v for r in rows):
        raise ValueError(f"expected a {v}x{v} cell array")
    cells = []
    for r in rows:
        out = []
        for tok in r:
            if tok == ".":
                out.append(EMPTY)
            else:
                x = int(tok)
                if not 0 <= x < g:
                    raise ValueError(f"exponent {x} outside Z_{g}")
                out.append(x)
        cells.append(out)
    return BgwMatrix(g, np.array(cells, dtype=np.int64))


def read_bgw(path: str | Path) -> BgwMatrix:
    return parse_bgw(Path(path).read_text())


def write_bgw(H: BgwMatrix, path: str | Path) -> None:
    Path(path).write_text(format_bgw(H))
