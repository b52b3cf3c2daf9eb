"""From-scratch certification predicates.

Every check recomputes the relevant products exactly and recovers the design
parameters instead of trusting how a matrix was built.
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

import numpy as np

from .exactring import root_exponent
from .matrixcore import GridMatrix, abs_matrix, exact_matmul
from .report import DesignReport

__all__ = [
    "DesignReport",
    "is_weighing",
    "quasi_balanced_profile",
    "srg_check",
    "gdd_check",
    "ddg_check",
    "j_property_check",
    "deza_check",
    "srg_balanced_check",
    "siamese_check",
    "exponent_matrix",
    "discover_partition",
]


def _int01(A) -> np.ndarray:
    arr = A.to_int_array() if isinstance(A, GridMatrix) else np.asarray(A, dtype=np.int64)
    if arr.ndim != 2 or not np.isin(arr, (0, 1)).all():
        raise ValueError("expected a 0/1 matrix")
    return arr.astype(np.int64)


def _offdiag(M: np.ndarray) -> np.ndarray:
    return M[~np.eye(M.shape[0], dtype=bool)]


def _first_bad(mask: np.ndarray) -> tuple[int, int]:
    i, j = np.argwhere(mask)[0]
    return int(i), int(j)


def exponent_matrix(W: GridMatrix, n: int) -> np.ndarray | None:
    """Root exponents of W's entries in R_n, -1 for zero; None if some entry is not in R_n."""
    if W.kind.is_quat:
        return None
    out = np.full(W.shape, -1, dtype=np.int64)
    flat = W.data.reshape(W.rows * W.cols, -1)
    keys, inverse = np.unique(flat, axis=0, return_inverse=True)
    inverse = inverse.reshape(W.shape)
    for idx, key in enumerate(keys):
        if not key.any():
            continue
        from .exactring import CycEntry

        x = CycEntry(W.kind.order, tuple(int(c) for c in key))
        e = root_exponent(x, n)
        if e is None:
            return None
        out[inverse == idx] = e
    return out


# -- weighing -------------------------------------------------------------------------


def is_weighing(W: GridMatrix, roots: int | None = None) -> DesignReport:
    """W W* = k I (and W* W = k I); optionally entries restricted to R_roots and 0."""
    if W.rows != W.cols:
        raise ValueError("weighing matrices are square")
    v = W.rows
    try:
        abs_matrix(W)
    except ValueError as exc:
        return DesignReport("Weighing", False, (v, None), detail={"reason": str(exc)})
    if roots is not None and exponent_matrix(W, roots) is None:
        return DesignReport("Weighing", False, (v, None), detail={"reason": f"entries outside R_{roots}"})
    for label, G in (("WW*", W @ W.H), ("W*W", W.H @ W)):
        ok, c = G.is_scalar_identity()
        if not ok:
            off = G.nonzero_mask() & ~np.eye(v, dtype=bool)
            witness = _first_bad(off) if off.any() else (0, 0)
            return DesignReport("Weighing", False, (v, None), witness=witness, detail={"product": label})
    k = _as_int(c)
    return DesignReport("Weighing", True, (v, k), detail={"roots": roots})


def _as_int(x) -> int:
    if isinstance(x, int):
        return x
    from .exactring import QuatEntry

    if isinstance(x, QuatEntry):
        if not x.b.is_zero():
            raise ValueError("not an integer")
        x = x.a
    if not x.is_integer():
        raise ValueError("not an integer")
    return int(x.coeffs[0])


def quasi_balanced_profile(W: GridMatrix) -> DesignReport:
    A = abs_matrix(W).to_int_array()
    AAt, AtA = exact_matmul(A, A.T), exact_matmul(A.T, A)
    values = sorted({int(x) for x in _offdiag(AAt)})
    commute = bool(np.array_equal(AAt, AtA))
    witness = None if commute else _first_bad(AAt != AtA)
    passed = commute and len(values) <= 2
    return DesignReport("QuasiBalanced", passed, (A.shape[0], tuple(values)), witness=witness,
                        detail={"commutes": commute, "values": values})


# -- graphs ---------------------------------------------------------------------------------


def srg_check(A) -> DesignReport:
    """Recover (v, k, lambda, mu) from A^2 = kI + lambda A + mu (J - I - A)."""
    A = _int01(A)
    v = A.shape[0]
    if not np.array_equal(A, A.T) or A.diagonal().any():
        raise ValueError("adjacency matrix must be symmetric with zero diagonal")
    deg = A.sum(axis=1)
    k = int(deg[0]) if v else 0
    if not (deg == k).all():
        return DesignReport("SRG", False, (v, None, None, None), witness=(int(np.argmax(deg != k)),),
                            detail={"reason": "not regular"})
    A2 = exact_matmul(A, A)
    off = ~np.eye(v, dtype=bool)
    adj = (A == 1) & off
    non = (A == 0) & off
    lam_vals = np.unique(A2[adj])
    mu_vals = np.unique(A2[non])
    flags = []
    if len(lam_vals) > 1:
        return DesignReport("SRG", False, (v, k, None, None), witness=_first_bad(adj & (A2 != lam_vals[0])),
                            detail={"reason": "lambda not constant"})
    if len(mu_vals) > 1:
        return DesignReport("SRG", False, (v, k, None, None), witness=_first_bad(non & (A2 != mu_vals[0])),
                            detail={"reason": "mu not constant"})
    lam = int(lam_vals[0]) if len(lam_vals) else None
    mu = int(mu_vals[0]) if len(mu_vals) else None
    if lam is None:
        flags.append("lambda undefined")
    if mu is None:
        flags.append("mu undefined")
    detail = {"flags": flags}
    if lam is not None and mu is not None:
        disc = (lam - mu) ** 2 + 4 * (k - mu)
        r = int(round(disc**0.5))
        if r * r == disc and (lam - mu + r) % 2 == 0:
            detail["eigenvalues"] = (k, (lam - mu + r) // 2, (lam - mu - r) // 2)
    return DesignReport("SRG", True, (v, k, lam, mu), detail=detail)


def _group_matrix(m: int, n: int) -> np.ndarray:
    return np.kron(np.eye(m, dtype=np.int64), np.ones((n, n), dtype=np.int64))


def gdd_check(A, m: int, n: int, symmetric: bool = False) -> DesignReport:
    """AA^T = A^TA = kI + l1 (Jmn - I) + l2 (J - Jmn) against the canonical partition."""
    A = _int01(A)
    v = A.shape[0]
    kind = "DDG" if symmetric else "SGDD"
    if v != m * n or A.shape[1] != v:
        raise ValueError(f"order {v} does not equal m*n = {m * n}")
    if symmetric and not np.array_equal(A, A.T):
        return DesignReport(kind, False, (v, None, m, n, None, None), witness=_first_bad(A != A.T),
                            detail={"reason": "not symmetric"})
    G = _group_matrix(m, n)
    I = np.eye(v, dtype=np.int64)
    AAt = exact_matmul(A, A.T)
    k = int(AAt[0, 0])
    within = (G == 1) & (I == 0)
    across = G == 0
    l1 = int(AAt[within][0]) if within.any() else 0
    l2 = int(AAt[across][0]) if across.any() else 0
    expect = k * I + l1 * (G - I) + l2 * (1 - G)
    params = (v, k, m, n, l1, l2)
    for label, P in (("AA^T", AAt), ("A^TA", exact_matmul(A.T, A))):
        if not np.array_equal(P, expect):
            return DesignReport(kind, False, params, witness=_first_bad(P != expect), detail={"product": label})
    if not (A.sum(axis=1) == k).all():
        return DesignReport(kind, False, params, detail={"reason": "row sums differ from k"})
    return DesignReport(kind, True, params)


def ddg_check(A, m: int, n: int) -> DesignReport:
    return gdd_check(A, m, n, symmetric=True)


def j_property_check(A, m: int, n: int, case: str) -> DesignReport:
    """|W| Jmn = Jmn |W| = c J (case 'kJ/m') or c (J - Jmn) (case 'k(J-Jmn)/(m-1)')."""
    A = _int01(A)
    v = A.shape[0]
    G = _group_matrix(m, n)
    left, right = exact_matmul(A, G), exact_matmul(G, A)
    if not np.array_equal(left, right):
        return DesignReport("JProperty", False, (case, None), witness=_first_bad(left != right))
    if case == "kJ/m":
        base = np.ones((v, v), dtype=np.int64)
    elif case == "k(J-Jmn)/(m-1)":
        base = 1 - G
    else:
        raise ValueError(f"unknown case {case!r}")
    c = int(left[0, 0]) if case == "kJ/m" else int(left[0, n]) if m > 1 else 0
    ok = np.array_equal(left, c * base)
    return DesignReport("JProperty", ok, (case, c), witness=None if ok else _first_bad(left != c * base))


def deza_check(A) -> DesignReport:
    A = _int01(A)
    v = A.shape[0]
    if not np.array_equal(A, A.T) or A.diagonal().any():
        return DesignReport("Deza", False, (v, None, None, None), detail={"reason": "not a simple graph"})
    deg = A.sum(axis=1)
    k = int(deg[0])
    if not (deg == k).all():
        return DesignReport("Deza", False, (v, None, None, None), detail={"reason": "not regular"})
    A2 = exact_matmul(A, A)
    vals = sorted({int(x) for x in _offdiag(A2)})
    if len(vals) > 2 or not vals:
        return DesignReport("Deza", False, (v, k, None, None), detail={"values": vals})
    b, a = vals[-1], vals[0]
    X = ((A2 == b) & ~np.eye(v, dtype=bool)).astype(np.int64)
    return DesignReport("Deza", True, (v, k, b, a), detail={"witness_matrix": X if b != a else None})


# -- signings ----------------------------------------------------------------------------------------


def srg_balanced_check(W: GridMatrix, A=None, n: int = 2) -> DesignReport:
    """Every S_ij = {W_il conj(W_jl)} hits each n-th root lambda/n or mu/n times."""
    absW = abs_matrix(W).to_int_array()
    A = absW if A is None else _int01(A)
    if not np.array_equal(A, absW):
        return DesignReport("SrgBalanced", False, (n,), witness=_first_bad(A != absW), detail={"reason": "|W| differs from A"})
    srg = srg_check(A)
    if not srg.passed:
        return DesignReport("SrgBalanced", False, (n,), detail={"reason": "|W| is not an SRG"})
    v, k, lam, mu = srg.params
    if (lam is not None and lam % n) or (mu is not None and mu % n):
        return DesignReport("SrgBalanced", False, (n, v, k, lam, mu), detail={"reason": "divisibility", "structural": True})
    E = exponent_matrix(W, n)
    if E is None:
        return DesignReport("SrgBalanced", False, (n, v, k, lam, mu), detail={"reason": f"entries outside R_{n}"})
    sup = E >= 0
    for i in range(v - 1):
        rest = slice(i + 1, v)
        shared = sup[i] & sup[rest]
        diffs = (E[i] - E[rest]) % n
        target = np.where(A[i, rest] == 1, (lam or 0) // n, (mu or 0) // n)
        for r in range(n):
            counts = ((diffs == r) & shared).sum(axis=1)
            bad = np.nonzero(counts != target)[0]
            if len(bad):
                j = i + 1 + int(bad[0])
                return DesignReport("SrgBalanced", False, (n, v, k, lam, mu), witness=(i, j),
                                    detail={"reason": "unbalanced pair", "residue": r})
    return DesignReport("SrgBalanced", True, (n, v, k, lam, mu))


def _clique_union(S: np.ndarray) -> tuple[int, int] | None:
    """(count, size) if S is a disjoint union of equal complete graphs."""
    v = S.shape[0]
    T = S + np.eye(v, dtype=np.int64)
    size = int(T[0].sum())
    if not (T.sum(axis=1) == size).all():
        return None
    if not np.array_equal(exact_matmul(T, T), size * T):
        return None
    return v // size, size


def siamese_check(family: Sequence[GridMatrix]) -> DesignReport:
    if not family:
        return DesignReport("Siamese", False, (), detail={"reason": "empty family"})
    mats = [abs_matrix(W).to_int_array() for W in family]
    v = mats[0].shape[0]
    params = None
    for idx, M in enumerate(mats):
        if M.shape != (v, v):
            return DesignReport("Siamese", False, (), witness=(idx,), detail={"reason": "orders differ"})
        try:
            rep = srg_check(M)
        except ValueError:
            return DesignReport("Siamese", False, (), witness=(idx,), detail={"reason": "not a graph"})
        if not rep.passed or (params is not None and rep.params != params):
            return DesignReport("Siamese", False, (), witness=(idx,), detail={"reason": "(a) srg parameters"})
        params = rep.params
    if len(mats) == 1:
        S = mats[0]
    else:
        S = mats[0] * mats[1]
        for a, b in combinations(range(len(mats)), 2):
            if not np.array_equal(mats[a] * mats[b], S):
                return DesignReport("Siamese", False, params, witness=(a, b), detail={"reason": "(b) shared edges differ"})
    cliques = _clique_union(S)
    if cliques is None:
        return DesignReport("Siamese", False, params, detail={"reason": "(b) shared part is not a clique union"})
    total = sum(M - S for M in mats) + S
    J_I = 1 - np.eye(v, dtype=np.int64)
    if not np.array_equal(total, J_I):
        return DesignReport("Siamese", False, params, witness=_first_bad(total != J_I), detail={"reason": "(c) union is not complete"})
    return DesignReport("Siamese", True, params, detail={"cliques": cliques[0], "clique_size": cliques[1], "members": len(mats)})


def discover_partition(A) -> tuple[int, int, list[int]] | None:
    """Best-effort group partition: try each off-diagonal value class of AA^T as the within-group relation.

    Returns (m, n, order) where ``order`` lists points group by group.
    """
    A = _int01(A)
    v = A.shape[0]
    P = exact_matmul(A, A.T)
    for val in sorted({int(x) for x in _offdiag(P)}):
        rel = (P == val) | np.eye(v, dtype=bool)
        size = int(rel[0].sum())
        if size in (1, v) or v % size or not (rel.sum(axis=1) == size).all():
            continue
        R = rel.astype(np.int64)
        if not np.array_equal(exact_matmul(R, R), size * R):
            continue
        order, seen = [], set()
        for i in range(v):
            if i not in seen:
                grp = [int(j) for j in np.nonzero(rel[i])[0]]
                seen.update(grp)
                order.extend(grp)
        return v // size, size, order
    return None
