"""Association schemes on 4v points built from signed designs.

Points are split into four blocks of size v.  Every class is a symmetric 0/1
matrix; the signed matrix W = W1 - W2 sits in the upper right 2v x 2v quarter
of the classes with the pattern [[W1, W2], [W2, W1]] and its partner
[[W2, W1], [W1, W2]].
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

from .matrixcore import GridMatrix, abs_matrix, exact_matmul
from .report import DesignReport
from .verify import gdd_check, is_weighing, j_property_check, srg_check

FAMILIES = ("srg", "gdd1", "gdd2")
# class holding W1 in its upper right quarter, and the class holding W2 there
SIGNED_CLASS = {"srg": (5, 6), "gdd1": (4, 5), "gdd2": (4, 5)}
# fixed coefficients of the generic combination sum_i c_i B_i^T
_COEFF_BASES = (math.pi, math.e)
TOL = 1e-6


class SchemeError(ValueError):
    pass


class ParameterMismatch(SchemeError):
    pass


@dataclass
class SchemeData:
    classes: list[np.ndarray]
    p: np.ndarray | None = None
    labels: dict[str, object] = field(default_factory=dict)

    @property
    def points(self) -> int:
        return self.classes[0].shape[0]

    @property
    def d(self) -> int:
        return len(self.classes) - 1

    @property
    def valencies(self) -> tuple[int, ...]:
        return tuple(int(A[0].sum()) for A in self.classes)

    def B(self, i: int) -> np.ndarray:
        """Intersection matrix: B_i[j, k] = p_{ij}^k."""
        if self.p is None:
            raise SchemeError("intersection numbers not computed; run verify_scheme first")
        return self.p[i].copy()


@dataclass
class EigenPair:
    P: np.ndarray
    Q: np.ndarray
    points: int
    matching: list[int] | None = None

    def rounded(self, digits: int = 12) -> tuple[list[list[float]], list[list[float]]]:
        def sig(x: float) -> float:
            return float(f"{x:.{digits}g}") if abs(x) > 1e-9 else 0.0

        return [[sig(x) for x in row] for row in self.P], [[sig(x) for x in row] for row in self.Q]


# -- builders ----------------------------------------------------------------------------------


def _split(W: GridMatrix) -> tuple[np.ndarray, np.ndarray]:
    arr = W.to_int_array()
    if not np.isin(arr, (-1, 0, 1)).all():
        raise SchemeError("scheme builders need a (0, +-1) matrix")
    return (arr == 1).astype(np.int64), (arr == -1).astype(np.int64)


def _diag2(X: np.ndarray) -> np.ndarray:
    z = np.zeros_like(X)
    return np.block([[X, z], [z, X]])


def _off2(X: np.ndarray) -> np.ndarray:
    """[[0, X], [X^T, 0]]."""
    z = np.zeros((X.shape[0], X.shape[0]), dtype=np.int64)
    return np.block([[z, X], [X.T, z]])


_I2 = np.eye(2, dtype=np.int64)
_P2 = np.array([[0, 1], [1, 0]], dtype=np.int64)
_J2 = np.ones((2, 2), dtype=np.int64)


def _common_classes(v: int, W1: np.ndarray, W2: np.ndarray) -> tuple[np.ndarray, ...]:
    I = np.eye(v, dtype=np.int64)
    A0 = np.eye(4 * v, dtype=np.int64)
    A1 = _diag2(np.kron(_P2, I))
    signed = _off2(np.kron(_I2, W1) + np.kron(_P2, W2))
    partner = _off2(np.kron(_I2, W2) + np.kron(_P2, W1))
    return A0, A1, signed, partner


def _group(m: int, n: int) -> np.ndarray:
    return np.kron(np.eye(m, dtype=np.int64), np.ones((n, n), dtype=np.int64))


def build_srg_scheme(W: GridMatrix) -> SchemeData:
    if not is_weighing(W).passed:
        raise SchemeError("W is not a weighing matrix")
    W1, W2 = _split(W)
    A = W1 + W2
    srg = srg_check(A)
    if not srg.passed:
        raise SchemeError("|W| is not a strongly regular graph")
    v = A.shape[0]
    I, J = np.eye(v, dtype=np.int64), np.ones((v, v), dtype=np.int64)
    A0, A1, A5, A6 = _common_classes(v, W1, W2)
    classes = [
        A0,
        A1,
        _diag2(np.kron(_J2, A)),
        _diag2(np.kron(_J2, J - I - A)),
        _off2(np.kron(_J2, I)),
        A5,
        A6,
        _off2(np.kron(_J2, J - I - A)),
    ]
    return SchemeData(classes, labels={"family": "srg", "v": v, "srg": srg.params})


def _gdd_prelude(W: GridMatrix, m: int, n: int, case: str) -> tuple[np.ndarray, np.ndarray, tuple]:
    if not is_weighing(W).passed:
        raise SchemeError("W is not a weighing matrix")
    W1, W2 = _split(W)
    A = W1 + W2
    rep = gdd_check(A, m, n)
    if not rep.passed:
        raise SchemeError("|W| is not a symmetric group divisible design on the canonical partition")
    prop = j_property_check(A, m, n, case)
    k = rep.params[1]
    expected = k // m if case == "kJ/m" else k // (m - 1)
    if not prop.passed or prop.params[1] != expected or (k * 1.0 / (m if case == "kJ/m" else m - 1)) != expected:
        raise SchemeError(f"|W| lacks the property {case}")
    if k >= m * n:
        raise SchemeError("the construction needs k < v")
    return W1, W2, rep.params


def build_gdd_scheme_case1(W: GridMatrix, m: int, n: int) -> SchemeData:
    W1, W2, params = _gdd_prelude(W, m, n, "kJ/m")
    v = m * n
    I, J, G = np.eye(v, dtype=np.int64), np.ones((v, v), dtype=np.int64), _group(m, n)
    A0, A1, A4, A5 = _common_classes(v, W1, W2)
    classes = [
        A0,
        A1,
        _diag2(np.kron(_J2, G - I)),
        _diag2(np.kron(_J2, J - G)),
        A4,
        A5,
        _off2(np.kron(_J2, J - W1 - W2)),
    ]
    return SchemeData(classes, labels={"family": "gdd1", "v": v, "gdd": params})


def build_gdd_scheme_case2(W: GridMatrix, m: int, n: int) -> SchemeData:
    W1, W2, params = _gdd_prelude(W, m, n, "k(J-Jmn)/(m-1)")
    v = m * n
    I, J, G = np.eye(v, dtype=np.int64), np.ones((v, v), dtype=np.int64), _group(m, n)
    A0, A1, A4, A5 = _common_classes(v, W1, W2)
    classes = [
        A0,
        A1,
        _diag2(np.kron(_J2, G - I)),
        _diag2(np.kron(_J2, J - G)),
        A4,
        A5,
        _off2(np.kron(_J2, J - W1 - W2 - G)),
        _off2(np.kron(_J2, G)),
    ]
    return SchemeData(classes, labels={"family": "gdd2", "v": v, "gdd": params})


def build_scheme(family: str, W: GridMatrix, m: int | None = None, n: int | None = None) -> SchemeData:
    if family == "srg":
        return build_srg_scheme(W)
    if m is None or n is None:
        raise SchemeError(f"{family} needs the group shape m, n")
    if family == "gdd1":
        return build_gdd_scheme_case1(W, m, n)
    if family == "gdd2":
        return build_gdd_scheme_case2(W, m, n)
    raise SchemeError(f"unknown family {family!r}")


# -- verification ------------------------------------------------------------------------------


def verify_scheme(S: SchemeData) -> DesignReport:
    """Check the axioms exactly and fill in p_{ij}^k."""
    cls = S.classes
    N = S.points
    d1 = len(cls)
    if not np.array_equal(cls[0], np.eye(N, dtype=np.int64)):
        return DesignReport("Scheme", False, (N, d1 - 1), witness=(0,), detail={"reason": "A0 is not the identity"})
    total = np.zeros((N, N), dtype=np.int64)
    for i, A in enumerate(cls):
        if not np.isin(A, (0, 1)).all():
            return DesignReport("Scheme", False, (N, d1 - 1), witness=(i,), detail={"reason": "class is not 0/1"})
        if not np.array_equal(A, A.T):
            return DesignReport("Scheme", False, (N, d1 - 1), witness=(i,), detail={"reason": "class is not symmetric"})
        total += A
    if not (total == 1).all():
        x, y = np.argwhere(total != 1)[0]
        return DesignReport("Scheme", False, (N, d1 - 1), witness=(int(x), int(y)), detail={"reason": "classes do not partition J"})
    # label[x, y] = class of the pair
    label = sum(i * A for i, A in enumerate(cls))
    reps = [tuple(np.argwhere(A)[0]) for A in cls]
    p = np.zeros((d1, d1, d1), dtype=np.int64)
    for i in range(d1):
        for j in range(i, d1):
            prod = exact_matmul(cls[i], cls[j])
            coeffs = np.array([prod[r] for r in reps], dtype=np.int64)
            expect = coeffs[label]
            if not np.array_equal(prod, expect):
                x, y = np.argwhere(prod != expect)[0]
                return DesignReport("Scheme", False, (N, d1 - 1), witness=(i, j, int(x), int(y)),
                                    detail={"reason": "product is not constant on a class"})
            p[i, j] = coeffs
            p[j, i] = coeffs
    S.p = p
    return DesignReport("Scheme", True, (N, d1 - 1), detail={"valencies": S.valencies, "p": p})


def scheme_identity_check(S: SchemeData) -> bool:
    """(A_a - A_b)^2 = 2k (A_0 - A_1) for the signed pair of classes."""
    fam = S.labels.get("family")
    a, b = SIGNED_CLASS[fam]
    D = S.classes[a] - S.classes[b]
    k = S.valencies[a]
    return bool(np.array_equal(exact_matmul(D, D), 2 * k * (S.classes[0] - S.classes[1])))


# -- eigenmatrices ----------------------------------------------------------------------------


def eigenmatrices(S: SchemeData) -> EigenPair:
    if S.p is None:
        rep = verify_scheme(S)
        if not rep.passed:
            raise SchemeError("not an association scheme")
    d1 = S.d + 1
    Bt = [S.p[i].T.astype(float) for i in range(d1)]
    for base in _COEFF_BASES:
        M = sum(base**i * Bt[i] for i in range(d1))
        vals, vecs = np.linalg.eig(M)
        if np.max(np.abs(vals.imag)) > 1e-8:
            continue
        vals = vals.real
        if np.min(np.diff(np.sort(vals))) < 1e-6:
            continue
        vecs = vecs.real
        P = np.zeros((d1, d1))
        for ell in range(d1):
            q = vecs[:, ell]
            qq = q @ q
            for i in range(d1):
                P[ell, i] = (Bt[i] @ q) @ q / qq
        order = np.lexsort(tuple(np.round(P[:, c], 8) for c in reversed(range(d1))))[::-1]
        P = P[order]
        Q = S.points * np.linalg.inv(P)
        return EigenPair(P, Q, S.points)
    raise SchemeError("generic combination is defective for both coefficient sets")


def closed_form(family: str, params: tuple) -> tuple[np.ndarray, np.ndarray]:
    """Symbolic P and Q of the three families, instantiated."""
    if family == "srg":
        k, s, t = (float(x) for x in params)
        kst = k + s * t
        if kst == 0:
            raise ValueError("closed form needs k + s*t != 0")
        a = -2 * k * (s + 1) * (t + 1) / kst
        rk = math.sqrt(k)
        P = np.array([
            [1, 1, 2 * k, a, 2, k, k, a],
            [1, 1, 2 * k, a, -2, -k, -k, -a],
            [1, 1, 2 * s, -2 * (s + 1), 2, s, s, -2 * (s + 1)],
            [1, 1, 2 * s, -2 * (s + 1), -2, -s, -s, 2 * (s + 1)],
            [1, 1, 2 * t, -2 * (t + 1), 2, t, t, -2 * (t + 1)],
            [1, 1, 2 * t, -2 * (t + 1), -2, -t, -t, 2 * (t + 1)],
            [1, -1, 0, 0, 0, rk, -rk, 0],
            [1, -1, 0, 0, 0, -rk, rk, 0],
        ])
        x1 = k * (k - t) * (t + 1) / ((t - s) * kst)
        x2 = k * (k - s) * (s + 1) / ((s - t) * kst)
        x3 = (k - s) * (k - t) / kst
        y1 = s * (t + 1) * (t - k) / ((s - t) * kst)
        y2 = (k - s) * (s + 1) * t / ((s - t) * kst)
        y3 = s * (k - t) * (t + 1) / ((s - t) * kst)
        z1 = (t - k) / (s - t)
        z2 = (k - s) / (s - t)
        z3 = (k - t) / (s - t)
        w = x3 / rk
        Q = np.array([
            [1, 1, x1, x1, x2, x2, x3, x3],
            [1, 1, x1, x1, x2, x2, -x3, -x3],
            [1, 1, y1, y1, y2, y2, 0, 0],
            [1, 1, z1, z1, z2, z2, 0, 0],
            [1, -1, x1, -x1, x2, -x2, 0, 0],
            [1, -1, y1, y3, y2, -y2, w, -w],
            [1, -1, y1, y3, y2, -y2, -w, w],
            [1, -1, z1, z3, z2, -z2, 0, 0],
        ])
        return P, Q
    k, m, n = (float(x) for x in params)
    rk = math.sqrt(k)
    if family == "gdd1":
        r = math.sqrt(k * (m * n - k)) / math.sqrt(m * (n - 1))
        P = np.array([
            [1, 1, 2 * (n - 1), 2 * (m - 1) * n, k, k, 2 * (m * n - k)],
            [1, -1, 0, 0, rk, -rk, 0],
            [1, 1, 2 * (n - 1), -2 * n, 0, 0, 0],
            [1, -1, 0, 0, -rk, rk, 0],
            [1, 1, 2 * (n - 1), 2 * (m - 1) * n, -k, -k, 2 * (k - m * n)],
            [1, 1, -2, 0, r, r, -2 * r],
            [1, 1, -2, 0, -r, -r, 2 * r],
        ])
        a = math.sqrt(m * (n - 1) * (m * n - k)) / rk
        b = math.sqrt(k * m * (n - 1)) / math.sqrt(m * n - k)
        c = m * n / rk
        Q = np.array([
            [1, m * n, 2 * (m - 1), m * n, 1, m * (n - 1), m * (n - 1)],
            [1, -m * n, 2 * (m - 1), -m * n, 1, m * (n - 1), m * (n - 1)],
            [1, 0, 2 * (m - 1), 0, 1, -m, -m],
            [1, 0, -2, 0, 1, 0, 0],
            [1, c, 0, -c, -1, a, -a],
            [1, -c, 0, c, -1, a, -a],
            [1, 0, 0, 0, -1, -b, b],
        ])
        return P, Q
    if family == "gdd2":
        r = math.sqrt(k * (m * n - n - k)) / math.sqrt((m - 1) * (n - 1))
        P = np.array([
            [1, 1, 2 * (n - 1), 2 * (m - 1) * n, k, k, 2 * (-k + m * n - n), 2 * n],
            [1, -1, 0, 0, rk, -rk, 0, 0],
            [1, 1, 2 * (n - 1), -2 * n, k / (1 - m), k / (1 - m), 2 * (k - m * n + n) / (m - 1), 2 * n],
            [1, 1, 2 * (n - 1), -2 * n, k / (m - 1), k / (m - 1), -2 * (k - m * n + n) / (m - 1), -2 * n],
            [1, -1, 0, 0, -rk, rk, 0, 0],
            [1, 1, 2 * (n - 1), 2 * (m - 1) * n, -k, -k, 2 * (k - m * n + n), -2 * n],
            [1, 1, -2, 0, -r, -r, 2 * r, 0],
            [1, 1, -2, 0, r, r, -2 * r, 0],
        ])
        c = m * n / rk
        a = m * math.sqrt((n - 1) * (m * n - n - k)) / math.sqrt(k * (m - 1))
        b = m * math.sqrt(k * (n - 1)) / math.sqrt((m - 1) * (m * n - n - k))
        Q = np.array([
            [1, m * n, m - 1, m - 1, m * n, 1, m * (n - 1), m * (n - 1)],
            [1, -m * n, m - 1, m - 1, -m * n, 1, m * (n - 1), m * (n - 1)],
            [1, 0, m - 1, m - 1, 0, 1, -m, -m],
            [1, 0, -1, -1, 0, 1, 0, 0],
            [1, c, -1, 1, -c, -1, -a, a],
            [1, -c, -1, 1, c, -1, -a, a],
            [1, 0, -1, 1, 0, -1, b, -b],
            [1, 0, m - 1, -m + 1, 0, -1, 0, 0],
        ])
        return P, Q
    raise SchemeError(f"unknown family {family!r}")


def closed_form_B(family: str, params: tuple) -> tuple[int, np.ndarray]:
    """(index, matrix) of the displayed intersection matrix for the family."""
    if family == "srg":
        k, lam, mu = params
        B = [
            [0, 0, 0, 0, 0, 1, 0, 0],
            [0, 0, 0, 0, 0, 0, 1, 0],
            [0, 0, 0, 0, k, lam, lam, mu],
            [0, 0, 0, 0, 0, k - lam - 1, k - lam - 1, k - mu],
            [0, 0, 1, 0, 0, 0, 0, 0],
            [k, 0, lam / 2, mu / 2, 0, 0, 0, 0],
            [0, k, lam / 2, mu / 2, 0, 0, 0, 0],
            [0, 0, k - lam - 1, k - mu, 0, 0, 0, 0],
        ]
        return 5, np.array(B, dtype=float)
    k, m, n, l1, l2 = params
    if family == "gdd1":
        c = k / m
        B = [
            [0, 0, 0, 0, 1, 0, 0],
            [0, 0, 0, 0, 0, 1, 0],
            [0, 0, 0, 0, c - 1, c - 1, c],
            [0, 0, 0, 0, k - c, k - c, k - c],
            [k, 0, l1 / 2, l2 / 2, 0, 0, 0],
            [0, k, l1 / 2, l2 / 2, 0, 0, 0],
            [0, 0, k - l1, k - l2, 0, 0, 0],
        ]
        return 4, np.array(B, dtype=float)
    if family == "gdd2":
        c = k / (m - 1)
        B = [
            [0, 0, 0, 0, 1, 0, 0, 0],
            [0, 0, 0, 0, 0, 1, 0, 0],
            [0, 0, 0, 0, c - 1, c - 1, c, 0],
            [0, 0, 0, 0, k - c, k - c, k - c, k],
            [k, 0, l1 / 2, l2 / 2, 0, 0, 0, 0],
            [0, k, l1 / 2, l2 / 2, 0, 0, 0, 0],
            [0, 0, k - l1, k - l2 - c, 0, 0, 0, 0],
            [0, 0, 0, c, 0, 0, 0, 0],
        ]
        return 4, np.array(B, dtype=float)
    raise SchemeError(f"unknown family {family!r}")


def compare_closed_form(E: EigenPair, family: str, params: tuple, tol: float = TOL) -> DesignReport:
    """Match numeric P rows to the closed form; Q columns follow the same permutation."""
    Pc, Qc = closed_form(family, params)
    if Pc.shape != E.P.shape:
        return DesignReport("ClosedForm", False, (family, tuple(params)), detail={"reason": "class count differs"})
    cost = np.abs(E.P[:, None, :] - Pc[None, :, :]).max(axis=2)
    rows, cols = linear_sum_assignment(cost)
    # sigma[closed row] = numeric row
    sigma = [0] * len(rows)
    for r, c in zip(rows, cols):
        sigma[c] = int(r)
    dev_p = float(np.abs(E.P[sigma] - Pc).max())
    dev_q = float(np.abs(E.Q[:, sigma] - Qc).max())
    duality = float(np.abs(E.P @ E.Q - E.points * np.eye(len(Pc))).max())
    passed = dev_p < tol and dev_q < tol and duality < tol
    E.matching = sigma
    return DesignReport("ClosedForm", passed, (family, tuple(params)),
                        detail={"max_dev_P": dev_p, "max_dev_Q": dev_q, "duality": duality, "matching": sigma})


# -- parameters and converse ---------------------------------------------------------------------


def family_params(S: SchemeData, family: str) -> tuple:
    """Closed-form parameters read off the classes: (k, s, t) or (k, m, n)."""
    N = S.points
    if N % 4:
        raise ParameterMismatch("point count is not a multiple of 4")
    v = N // 4
    val = S.valencies
    if family == "srg":
        if len(val) != 8:
            raise ParameterMismatch("the SRG family has 8 classes")
        k = val[5]
        expect = (1, 1, 2 * k, 2 * (v - 1 - k), 2, k, k, 2 * (v - 1 - k))
        if val != expect:
            raise ParameterMismatch(f"valencies {val} do not follow the SRG pattern")
        rep = srg_check(S.classes[2][:v, :v])
        if not rep.passed or "eigenvalues" not in rep.detail:
            raise ParameterMismatch("class 2 does not carry a strongly regular graph")
        _, s, t = rep.detail["eigenvalues"]
        return (k, s, t)
    n = val[2] // 2 + 1
    if v % n:
        raise ParameterMismatch("group size does not divide v")
    m = v // n
    k = val[4]
    if family == "gdd1":
        expect = (1, 1, 2 * (n - 1), 2 * (m - 1) * n, k, k, 2 * (m * n - k))
    elif family == "gdd2":
        expect = (1, 1, 2 * (n - 1), 2 * (m - 1) * n, k, k, 2 * (m * n - n - k), 2 * n)
    else:
        raise SchemeError(f"unknown family {family!r}")
    if val != expect:
        raise ParameterMismatch(f"valencies {val} do not follow the {family} pattern")
    return (k, m, n)


def extract_from_scheme(S: SchemeData, family: str) -> GridMatrix:
    """Read W = W1 - W2 back from a scheme stored in builder order and certify it."""
    params = family_params(S, family)
    v = S.points // 4
    a, b = SIGNED_CLASS[family]
    W1 = S.classes[a][:v, 2 * v:3 * v]
    W2 = S.classes[b][:v, 2 * v:3 * v]
    if not np.array_equal(S.classes[a][v:2 * v, 2 * v:3 * v], W2) or not np.array_equal(S.classes[b][v:2 * v, 2 * v:3 * v], W1):
        raise ParameterMismatch("signed classes are not in the [[W1, W2], [W2, W1]] layout")
    if (W1 & W2).any():
        raise SchemeError("W1 and W2 overlap")
    W = GridMatrix.from_ints(W1 - W2)
    rep = is_weighing(W)
    if not rep.passed or rep.params[1] != params[0]:
        raise SchemeError("extracted matrix is not a weighing matrix of the expected weight")
    absW = abs_matrix(W)
    if family == "srg":
        if not srg_check(absW).passed:
            raise SchemeError("extracted |W| is not strongly regular")
    else:
        k, m, n = params
        if not gdd_check(absW, m, n).passed:
            raise SchemeError("extracted |W| is not a group divisible design")
        case = "kJ/m" if family == "gdd1" else "k(J-Jmn)/(m-1)"
        if not j_property_check(absW, m, n, case).passed:
            raise SchemeError("extracted |W| lacks the group property")
    return W


# -- file format ---------------------------------------------------------------------------------------


def format_scheme(S: SchemeData) -> str:
    out = io.StringIO()
    out.write(f"scheme {S.points} {len(S.classes)}\n")
    for A in S.classes:
        out.write(f"qbw {A.shape[0]} {A.shape[1]} kind=int\n")
        for row in A:
            out.write(" ".join(str(int(x)) for x in row))
            out.write("\n")
    return out.getvalue()


def parse_scheme(text: str) -> SchemeData:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    head = lines[0].split()
    if len(head) != 3 or head[0] != "scheme":
        raise ValueError("bad scheme header")
    N, count = int(head[1]), int(head[2])
    classes = []
    pos = 1
    for _ in range(count):
        h = lines[pos].split()
        if h[:3] != ["qbw", str(N), str(N)]:
            raise ValueError("bad class header")
        rows = [list(map(int, ln.split())) for ln in lines[pos + 1:pos + 1 + N]]
        classes.append(np.array(rows, dtype=np.int64))
        pos += 1 + N
    return SchemeData(classes)


def read_scheme(path: str | Path) -> SchemeData:
    return parse_scheme(Path(path).read_text())


def write_scheme(S: SchemeData, path: str | Path) -> None:
    Path(path).write_text(format_scheme(S))
