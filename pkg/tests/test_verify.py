import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qbw.matrixcore import GridMatrix, abs_matrix, read_qbw
from qbw.paths import fixture_path
from qbw.search import FIXTURE_SIGNINGS, paley_graph
from qbw.verify import (
    deza_check,
    discover_partition,
    gdd_check,
    is_weighing,
    quasi_balanced_profile,
    siamese_check,
    srg_balanced_check,
    srg_check,
)


def brute_srg(A: np.ndarray):
    """Oracle: count common neighbours pair by pair."""
    v = len(A)
    k = int(A[0].sum())
    lam, mu = set(), set()
    for i, j in itertools.combinations(range(v), 2):
        c = int(sum(A[i, t] * A[j, t] for t in range(v)))
        (lam if A[i, j] else mu).add(c)
    return v, k, lam, mu


def test_weighing_examples():
    W = read_qbw(fixture_path("w40_12.qbw"))
    assert is_weighing(W).params == (40, 12)
    assert is_weighing(GridMatrix.identity(5)).params == (5, 1)
    rep = is_weighing(GridMatrix.ones(2))
    assert not rep.passed and rep.witness == (0, 1)


def test_srg_examples():
    A = paley_graph(13)
    assert srg_check(A).params == (13, 6, 2, 3)
    assert brute_srg(A) == (13, 6, {2}, {3})
    W = read_qbw(fixture_path("w40_12.qbw"))
    rep = srg_check(abs_matrix(W))
    assert rep.params == (40, 12, 2, 4) and rep.detail["eigenvalues"] == (12, 2, -4)
    K4 = np.ones((4, 4), dtype=int) - np.eye(4, dtype=int)
    rep = srg_check(K4)
    assert rep.passed and rep.params[:3] == (4, 3, 2) and "mu undefined" in rep.detail["flags"]
    with pytest.raises(ValueError):
        srg_check(np.eye(3, dtype=int))


def test_quasi_balanced_random_order6_fails():
    rng = np.random.default_rng(3)
    hits = 0
    for _ in range(200):
        M = rng.choice([-1, 0, 1], size=(6, 6))
        A = np.abs(M)
        P = A @ A.T
        off = {int(P[i, j]) for i in range(6) for j in range(6) if i != j}
        if len(off) == 3:
            hits += 1
            assert not quasi_balanced_profile(GridMatrix.from_ints(M)).passed
    assert hits > 0


def test_balanced_single_value():
    # the Paley conference matrix of order 6 is balanced
    W = GridMatrix.from_ints([
        [0, 1, 1, 1, 1, 1],
        [1, 0, 1, -1, -1, 1],
        [1, 1, 0, 1, -1, -1],
        [1, -1, 1, 0, 1, -1],
        [1, -1, -1, 1, 0, 1],
        [1, 1, -1, -1, 1, 0],
    ])
    assert is_weighing(W).params == (6, 5)
    qb = quasi_balanced_profile(W)
    assert qb.passed and qb.params[1] == (4,)


def test_gdd_examples():
    G = np.kron(np.eye(3, dtype=int), np.ones((4, 4), dtype=int)) - np.eye(12, dtype=int)
    assert gdd_check(G, 3, 4).params == (12, 3, 3, 4, 2, 0)
    with pytest.raises(ValueError):
        gdd_check(G, 5, 2)


def test_gdd_invariant_under_group_permutations(gdd2_instance):
    A = abs_matrix(gdd2_instance).to_int_array()
    rng = np.random.default_rng(0)
    for _ in range(5):
        perm = np.concatenate([4 * g + rng.permutation(4) for g in range(10)])
        assert gdd_check(A[perm][:, perm], 10, 4).params == (40, 27, 10, 4, 18, 18)


def test_deza_examples():
    C5 = np.array([[1 if (i - j) % 5 in (1, 4) else 0 for j in range(5)] for i in range(5)])
    assert deza_check(C5).passed
    assert deza_check(paley_graph(13)).passed


@pytest.mark.parametrize("name,k,n,srg,balanced", FIXTURE_SIGNINGS)
def test_fixture_signings(name, k, n, srg, balanced):
    W = read_qbw(fixture_path(name))
    assert is_weighing(W, n).params == (srg[0], k)
    assert srg_check(abs_matrix(W)).params == srg
    assert srg_balanced_check(W, n=n).passed == balanced


def test_strictly_quasi_balanced_r4():
    W = read_qbw(fixture_path("srg16_6_2_2_r4.qbw"))
    qb = quasi_balanced_profile(W)
    assert qb.passed and qb.params[1] == (2,)
    rep = srg_balanced_check(W, n=4)
    assert not rep.passed and rep.detail.get("structural")


@pytest.mark.parametrize("name", [r[0] for r in FIXTURE_SIGNINGS if r[2] == 2])
def test_prime_order_signings_are_balanced(name):
    """Any Z_2 weighing signing of an SRG is srg-balanced."""
    W = read_qbw(fixture_path(name))
    srg = srg_check(abs_matrix(W))
    assert is_weighing(W, 2).passed and srg.passed
    _, _, lam, mu = srg.params
    assert lam % 2 == 0 and mu % 2 == 0
    assert srg_balanced_check(W, n=2).passed


@pytest.mark.parametrize("name", [r[0] for r in FIXTURE_SIGNINGS])
def test_quasi_balanced_values_follow_srg(name):
    W = read_qbw(fixture_path(name))
    _, _, lam, mu = srg_check(abs_matrix(W)).params
    qb = quasi_balanced_profile(W)
    assert qb.passed and set(qb.params[1]) == {lam, mu}


def test_siamese_rejects_complement(cons1_q3):
    _, family = cons1_q3
    A = abs_matrix(family[1]).to_int_array()
    comp = GridMatrix.from_ints(1 - A - np.eye(40, dtype=int))
    assert not siamese_check([family[0], comp, family[2], family[3]]).passed


def test_siamese_single_complete_graph():
    K5 = GridMatrix.from_ints(np.ones((5, 5), dtype=int) - np.eye(5, dtype=int))
    assert siamese_check([K5]).passed


def test_discover_partition(gdd1_instance, gdd2_instance):
    found = discover_partition(abs_matrix(gdd1_instance))
    assert found is not None and found[:2] == (16, 2)
    # lambda1 = lambda2 leaves nothing to cluster on
    assert discover_partition(abs_matrix(gdd2_instance)) is None


@given(st.lists(st.integers(0, 1), min_size=15, max_size=15), st.integers(0, 2**16))
def test_row_column_scaling_invariance(signs, seed):
    """Independent row and column sign changes preserve weighing and srg-balance."""
    W = read_qbw(fixture_path("srg16_5_0_2.qbw")).to_int_array()
    rng = np.random.default_rng(seed)
    d1 = np.where(rng.integers(0, 2, 16) == 1, -1, 1)
    d2 = np.where(np.array(signs + [0]) == 1, -1, 1)
    M = GridMatrix.from_ints(d1[:, None] * W * d2[None, :])
    assert is_weighing(M).params == (16, 5)
    assert srg_balanced_check(M, n=2).passed
