"""Backtracking search for signings of strongly regular graphs over R_n.

A signing assigns an n-th root of unity (stored as its exponent) to every edge
of a 0/1 adjacency matrix.  The search walks the nonzero cells in a fixed
order and keeps, for every row pair, a counter of the residues seen so far in
S_ij = {W_il conj(W_jl)}.
"""

from __future__ import annotations

import cmath
import itertools
import re
import sys
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .exactring import cyc_root, cyclotomic
from .galois import dlog, gf_q, is_prime, prime_power
from .matrixcore import GridMatrix, abs_matrix, read_qbw
from .paths import fixture_path
from .report import DesignReport
from .verify import is_weighing, quasi_balanced_profile, srg_balanced_check, srg_check

MODES = ("srg_balanced", "weighing_only")
SYMMETRIES = ("symmetric", "general")
NORMALIZATIONS = ("none", "vertex0", "tree")
DEFAULT_BUDGET = 10**9


# -- graph fixtures ---------------------------------------------------------------------------


def _graph(vertices, adjacent) -> np.ndarray:
    V = list(vertices)
    return np.array([[1 if a != b and adjacent(a, b) else 0 for b in V] for a in V], dtype=np.int64)


def paley_graph(q: int) -> np.ndarray:
    if prime_power(q) is None or q % 4 != 1:
        raise ValueError("paley(q) needs a prime power q = 1 mod 4")
    F = gf_q(q)
    return _graph(range(q), lambda x, y: dlog(F, F.sub(x, y)) % 2 == 0)


def triangular_graph(m: int) -> np.ndarray:
    return _graph(itertools.combinations(range(m), 2), lambda a, b: len(set(a) & set(b)) == 1)


def lattice_graph(m: int) -> np.ndarray:
    return _graph(itertools.product(range(m), repeat=2), lambda a, b: a[0] == b[0] or a[1] == b[1])


def clebsch_graph() -> np.ndarray:
    return _graph(itertools.product(range(2), repeat=4), lambda a, b: sum(x != y for x, y in zip(a, b)) in (1, 4))


def shrikhande_graph() -> np.ndarray:
    S = {(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)}
    return _graph(itertools.product(range(4), repeat=2),
                  lambda a, b: ((a[0] - b[0]) % 4, (a[1] - b[1]) % 4) in S)


def _fixture_array(name: str) -> np.ndarray:
    name = name.replace(" ", "")
    m = re.fullmatch(r"complement\((.+)\)", name)
    if m:
        A = _fixture_array(m.group(1))
        return 1 - A - np.eye(A.shape[0], dtype=np.int64)
    m = re.fullmatch(r"(paley|triangular|lattice)\((\d+)\)", name)
    if m:
        fn = {"paley": paley_graph, "triangular": triangular_graph, "lattice": lattice_graph}[m.group(1)]
        return fn(int(m.group(2)))
    if name == "clebsch":
        return clebsch_graph()
    if name == "shrikhande":
        return shrikhande_graph()
    raise ValueError(f"unknown graph fixture {name!r}")


def srg_fixture(name: str) -> GridMatrix:
    A = _fixture_array(name)
    if not srg_check(A).passed:
        raise AssertionError(f"fixture {name} is not strongly regular")
    return GridMatrix.from_ints(A)


# -- problem and outcome ------------------------------------------------------------------------------


@dataclass
class SearchProblem:
    A: np.ndarray
    n: int = 2
    mode: str = "srg_balanced"
    symmetry: str = "symmetric"
    budget: int = DEFAULT_BUDGET
    normalization: str = "tree"
    srg: tuple[int, int, int, int] = field(init=False)

    def __post_init__(self) -> None:
        if isinstance(self.A, GridMatrix):
            self.A = self.A.to_int_array()
        self.A = np.asarray(self.A, dtype=np.int64)
        rep = srg_check(self.A)
        if not rep.passed:
            raise ValueError("A is not a strongly regular graph")
        self.srg = rep.params
        if self.mode not in MODES or self.symmetry not in SYMMETRIES or self.normalization not in NORMALIZATIONS:
            raise ValueError("unknown mode, symmetry or normalization")
        if self.n < 2:
            raise ValueError("need n >= 2")

    @property
    def divisible(self) -> bool:
        _, _, lam, mu = self.srg
        return (lam or 0) % self.n == 0 and (mu or 0) % self.n == 0


@dataclass
class SearchOutcome:
    status: str  # "found" | "exhausted_no" | "budget_exceeded" | "not_divisible"
    nodes: int
    elapsed: float
    W: GridMatrix | None = None

    def to_dict(self, timings: bool = True) -> dict:
        d = {"format": "qbw-search/1", "status": self.status, "nodes": self.nodes}
        if timings:
            d["elapsed"] = round(self.elapsed, 3)
        return d


class _Budget(Exception):
    pass


def _tree_edges(A: np.ndarray, symmetric: bool) -> set[tuple[int, int]]:
    """Cells fixable to 1 by diagonal unit scalings (BFS spanning forest)."""
    v = A.shape[0]
    fixed: set[tuple[int, int]] = set()
    if symmetric:
        seen = [False] * v
        for root in range(v):
            if seen[root]:
                continue
            seen[root] = True
            queue = deque([root])
            while queue:
                x = queue.popleft()
                for y in np.nonzero(A[x])[0]:
                    y = int(y)
                    if not seen[y]:
                        seen[y] = True
                        queue.append(y)
                        fixed.add((min(x, y), max(x, y)))
        return fixed
    # bipartite rows/columns: node r for row r, v + c for column c
    seen = [False] * (2 * v)
    for root in range(2 * v):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            x = queue.popleft()
            nbrs = np.nonzero(A[x])[0] + v if x < v else np.nonzero(A[:, x - v])[0]
            for y in nbrs:
                y = int(y)
                if not seen[y]:
                    seen[y] = True
                    queue.append(y)
                    fixed.add((x, y - v) if x < v else (y, x - v))
    return fixed


def _fixed_cells(prob: SearchProblem, cells: list[tuple[int, int]]) -> set[tuple[int, int]]:
    A = prob.A
    sym = prob.symmetry == "symmetric"
    if prob.normalization == "none":
        return set()
    if prob.normalization == "tree":
        return _tree_edges(A, sym)
    nb = [int(j) for j in np.nonzero(A[0])[0]]
    if sym:
        return {(0, j) for j in nb}
    return {(0, j) for j in nb} | {(j, 0) for j in nb}


def _cell_order(A: np.ndarray, symmetric: bool) -> list[tuple[int, int]]:
    v = A.shape[0]
    # row-major; symmetric mode only walks the upper triangle
    return [(i, j) for i in range(v) for j in range(i + 1 if symmetric else 0, v) if A[i, j]]


def _vanishing_caps(shared: list[list[int]], n: int) -> list[list[int]] | None:
    """Per-pair residue caps forced by a vanishing sum; None when no cap applies."""
    if not is_prime(n):
        return None
    # a vanishing sum of p-th roots has every residue equally often
    return [[s // n if s % n == 0 else -1 for s in row] for row in shared]


def search_signing(prob: SearchProblem) -> SearchOutcome:
    t0 = time.perf_counter()
    if prob.mode == "srg_balanced" and not prob.divisible:
        return SearchOutcome("not_divisible", 0, time.perf_counter() - t0)
    A = prob.A
    v = A.shape[0]
    n = prob.n
    _, _, lam, mu = prob.srg
    sym = prob.symmetry == "symmetric"
    cells = _cell_order(A, sym)
    fixed = _fixed_cells(prob, cells)
    shared = (A @ A).tolist()
    Al = A.tolist()
    if prob.mode == "srg_balanced":
        rcap = [[(lam if Al[i][h] else mu) // n if i != h else 0 for h in range(v)] for i in range(v)]
    else:
        rcap = _vanishing_caps(shared, n)
    # W W* = kI forces W* W = kI, so column pairs must vanish as well
    ccap = _vanishing_caps(shared, n)
    roots = [cmath.exp(2j * cmath.pi * r / n) for r in range(n)]
    E = [[-1] * v for _ in range(v)]
    rcnt = [[[0] * n for _ in range(v)] for _ in range(v)]
    ccnt = [[[0] * n for _ in range(v)] for _ in range(v)]
    rtot = [[0] * v for _ in range(v)]
    ctot = [[0] * v for _ in range(v)]
    colsup: list[list[int]] = [[] for _ in range(v)]
    rowsup: list[list[int]] = [[] for _ in range(v)]
    nodes = 0
    budget = prob.budget

    def bound_ok(c: list[int], rem: int) -> bool:
        if n == 4:
            return abs(c[0] - c[2]) + abs(c[1] - c[3]) <= rem
        return abs(sum(c[r] * roots[r] for r in range(n))) <= rem + 1e-9

    def place(r: int, c: int, e: int, touched: list) -> bool:
        ok = True
        for h in colsup[c]:
            d = e - E[h][c]
            if r > h:
                a, b, dd = r, h, d % n
            else:
                a, b, dd = h, r, (-d) % n
            cnt = rcnt[a][b]
            cnt[dd] += 1
            rtot[a][b] += 1
            touched.append((0, a, b, dd))
            if ok:
                if rcap is not None:
                    ok = cnt[dd] <= rcap[a][b]
                else:
                    ok = bound_ok(cnt, shared[a][b] - rtot[a][b])
        if not sym:
            for g in rowsup[r]:
                d = e - E[r][g]
                if c > g:
                    a, b, dd = c, g, d % n
                else:
                    a, b, dd = g, c, (-d) % n
                cnt = ccnt[a][b]
                cnt[dd] += 1
                ctot[a][b] += 1
                touched.append((1, a, b, dd))
                if ok:
                    if ccap is not None:
                        ok = cnt[dd] <= ccap[a][b]
                    else:
                        ok = bound_ok(cnt, shared[a][b] - ctot[a][b])
        E[r][c] = e
        colsup[c].append(r)
        rowsup[r].append(c)
        return ok

    def unplace(r: int, c: int) -> None:
        colsup[c].pop()
        rowsup[r].pop()
        E[r][c] = -1

    def rec(t: int) -> bool:
        nonlocal nodes
        if t == len(cells):
            return True
        i, j = cells[t]
        vals = (0,) if (i, j) in fixed else range(n)
        for e in vals:
            nodes += 1
            if nodes > budget:
                raise _Budget
            touched: list = []
            ok = place(i, j, e, touched)
            if sym:
                ok = place(j, i, e, touched) and ok
            if ok and rec(t + 1):
                return True
            if sym:
                unplace(j, i)
            unplace(i, j)
            for kind, a, b, dd in touched:
                if kind:
                    ccnt[a][b][dd] -= 1
                    ctot[a][b] -= 1
                else:
                    rcnt[a][b][dd] -= 1
                    rtot[a][b] -= 1
        return False

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, len(cells) + 500))
    try:
        found = rec(0)
    except _Budget:
        return SearchOutcome("budget_exceeded", nodes - 1, time.perf_counter() - t0)
    finally:
        sys.setrecursionlimit(old)
    elapsed = time.perf_counter() - t0
    if not found:
        return SearchOutcome("exhausted_no", nodes, elapsed)
    W = _to_matrix(E, n)
    _certify(W, prob)
    return SearchOutcome("found", nodes, elapsed, W)


def _to_matrix(E: list[list[int]], n: int) -> GridMatrix:
    if n == 2:
        return GridMatrix.from_ints([[0 if e < 0 else (1 if e == 0 else -1) for e in row] for row in E])
    zero = cyc_root(n, 0) - cyc_root(n, 0)
    return GridMatrix.from_entries([[zero if e < 0 else cyc_root(n, e) for e in row] for row in E], cyclotomic(n))


def _certify(W: GridMatrix, prob: SearchProblem) -> None:
    """Search output is never trusted."""
    if not np.array_equal(abs_matrix(W).to_int_array(), prob.A):
        raise AssertionError("search produced a matrix with the wrong support")
    if prob.symmetry == "symmetric" and W != W.T:
        raise AssertionError("search produced a non-symmetric matrix")
    rep = srg_balanced_check(W, prob.A, prob.n) if prob.mode == "srg_balanced" else is_weighing(W, prob.n)
    if not rep.passed:
        raise AssertionError(f"search produced an uncertified matrix: {rep.summary()}")


# -- appendix signings ----------------------------------------------------------------------------


FIXTURE_SIGNINGS = (
    ("w40_12.qbw", 12, 2, (40, 12, 2, 4), True),
    ("srg16_5_0_2.qbw", 5, 2, (16, 5, 0, 2), True),
    ("srg16_9_4_6.qbw", 9, 2, (16, 9, 4, 6), True),
    ("srg28_12_6_4.qbw", 12, 2, (28, 12, 6, 4), True),
    ("srg16_6_2_2_r4.qbw", 6, 4, (16, 6, 2, 2), False),
)


def certify_signing(name: str, k: int, n: int, srg: tuple, balanced_expected: bool) -> DesignReport:
    W = read_qbw(fixture_path(name))
    weigh = is_weighing(W, n)
    srep = srg_check(abs_matrix(W))
    bal = srg_balanced_check(W, n=2 if n == 2 else n)
    qb = quasi_balanced_profile(W)
    ok = (weigh.passed and weigh.params[1] == k and srep.passed and tuple(srep.params) == srg
          and bal.passed == balanced_expected and qb.passed)
    return DesignReport("FixtureSigning", ok, (name, k, n), detail={
        "weighing": weigh.passed, "srg": srep.params, "srg_balanced": bal.passed,
        "quasi_balanced_values": qb.params[1] if qb.passed else None, "symmetric": W == W.T})


def verify_fixture_signings() -> list[DesignReport]:
    return [certify_signing(*row) for row in FIXTURE_SIGNINGS]


# -- table -----------------------------------------------------------------------------------------


TABLE_PARAMS = (
    "5-2-0-1", "9-4-1-2", "10-3-0-1", "10-6-3-4", "13-6-2-3", "15-6-1-3", "15-8-4-4", "16-5-0-2",
    "16-6-2-2", "16-9-4-6", "16-10-6-6", "17-8-3-4", "21-10-3-6", "21-10-5-4", "25-8-3-2",
    "25-12-5-6", "25-16-9-12", "26-10-3-4", "26-15-8-9", "27-10-1-5", "27-16-10-8", "28-12-6-4",
    "28-15-6-10", "29-14-6-7",
)

# graphs available from the fixture generators, per parameter set
TABLE_GRAPHS = {
    "5-2-0-1": ["paley(5)"],
    "9-4-1-2": ["paley(9)"],
    "10-3-0-1": ["complement(triangular(5))"],
    "10-6-3-4": ["triangular(5)"],
    "13-6-2-3": ["paley(13)"],
    "15-6-1-3": ["complement(triangular(6))"],
    "15-8-4-4": ["triangular(6)"],
    "16-5-0-2": ["clebsch"],
    "16-6-2-2": ["lattice(4)", "shrikhande"],
    "16-9-4-6": ["complement(lattice(4))", "complement(shrikhande)"],
    "16-10-6-6": ["complement(clebsch)"],
    "17-8-3-4": ["paley(17)"],
    "21-10-3-6": ["complement(triangular(7))"],
    "21-10-5-4": ["triangular(7)"],
    "25-8-3-2": ["lattice(5)"],
    "25-12-5-6": ["paley(25)"],
    "25-16-9-12": ["complement(lattice(5))"],
    "28-12-6-4": ["triangular(8)"],
    "28-15-6-10": ["complement(triangular(8))"],
    "29-14-6-7": ["paley(29)"],
}


@dataclass
class TableCell:
    params: str
    n: int
    verdict: str  # "YES" | "NO" | "---" | "?"
    graphs: dict[str, dict] = field(default_factory=dict)
    scope: str = "general"  # a NO under "symmetric" only rules out symmetric signings

    def to_dict(self) -> dict:
        return {"params": self.params, "roots": self.n, "verdict": self.verdict, "scope": self.scope,
                "graphs": self.graphs}


def table_cell(params: str, n: int, budget: int = 10**7, symmetry: str = "both",
               normalization: str = "tree") -> TableCell:
    """YES / NO / --- / ? for one table entry.

    With symmetry "both" the cheap symmetric pass runs first; a NO needs the
    general pass to be exhausted, since the definition does not ask for W = W^T.
    """
    v, k, lam, mu = (int(x) for x in params.split("-"))
    if lam % n or mu % n:
        return TableCell(params, n, "---")
    names = TABLE_GRAPHS.get(params, [])
    if not names:
        return TableCell(params, n, "?", {"reason": {"status": "no graph fixture"}})
    passes = ["symmetric", "general"] if symmetry == "both" else [symmetry]
    graphs = {}
    statuses = []
    for name in names:
        A = srg_fixture(name)
        runs = {}
        for sym in passes:
            prob = SearchProblem(A, n, "srg_balanced", sym, budget, normalization)
            if prob.srg != (v, k, lam, mu):
                raise AssertionError(f"{name} does not have parameters {params}")
            out = search_signing(prob)
            runs[sym] = out.to_dict(timings=False)
            if out.status == "found":
                break
        graphs[name] = runs
        statuses.append(out.status)
        if out.status == "found":
            return TableCell(params, n, "YES", graphs, passes[-1])
    verdict = "NO" if all(st == "exhausted_no" for st in statuses) else "?"
    return TableCell(params, n, verdict, graphs, passes[-1])
