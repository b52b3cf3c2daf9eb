import numpy as np
import pytest
from hypothesis import given, strategies as st

from qbw.exactring import K, cyc_root
from qbw.matrixcore import (
    GridMatrix,
    NonUnitEntryError,
    ShapeError,
    abs_matrix,
    back_identity,
    block_compose,
    circulant,
    exact_matmul,
    format_qbw,
    group_J,
    kron,
    mat_adjoint,
    mat_mul,
    mat_transpose,
    nega_shift,
    negacirculant,
    omega_circulant,
    omega_shift,
    parse_qbw,
)


def brute_product(A, B):
    """Schoolbook product over the entry objects, row entry times column entry."""
    a, b = A.entries(), B.entries()
    out = []
    for i in range(len(a)):
        row = []
        for j in range(len(b[0])):
            s = 0
            for t in range(len(b)):
                s = a[i][t] * b[t][j] + s
            row.append(s)
        out.append(row)
    return out


@st.composite
def quat_matrices(draw, rows=5, cols=5):
    cells = []
    for _ in range(rows):
        row = []
        for _ in range(cols):
            kind = draw(st.integers(0, 2))
            j = draw(st.integers(0, 11))
            z = cyc_root(12, j)
            row.append([0 * z, z, K * z][kind])
        cells.append(row)
    return GridMatrix.from_entries(cells)


def test_negacirculant_example():
    C = negacirculant([0, 1, 1, -1])
    assert C.entries() == [[0, 1, 1, -1], [1, 0, 1, 1], [-1, 1, 0, 1], [-1, -1, 1, 0]]
    ok, c = (C @ C.T).is_scalar_identity()
    assert ok and c == 3
    assert negacirculant([1]) == GridMatrix.identity(1)


def test_back_identity_reflection():
    R = back_identity(4)
    assert R @ R == GridMatrix.identity(4)
    CR = negacirculant([0, 1, 1, -1]) @ R
    assert CR.T == CR


def test_kron_row_sums():
    M = kron(GridMatrix.identity(2), GridMatrix.ones(2)).to_int_array()
    assert (M.sum(axis=1) == 2).all()


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 8])
def test_nega_shift_group(n):
    N = nega_shift(n)
    assert N**n == -GridMatrix.identity(n)
    assert N ** (2 * n) == GridMatrix.identity(n)
    for ell in range(2 * n):
        g = N**ell
        assert g @ g.T == GridMatrix.identity(n)


def test_omega_shift_power():
    w = cyc_root(3, 1)
    U = omega_shift(5, w)
    assert U**5 == w * GridMatrix.identity(5)


def test_omega_circulant_matches_displayed_q4_core():
    w = cyc_root(3, 1)
    C = omega_circulant([0, w * w, w, w * w, w * w], w)
    ok, c = (C @ C.H).is_scalar_identity()
    assert ok and c == 4
    assert all(C[i, i] == 0 for i in range(5))


def test_omega_one_is_circulant():
    row = [0, 1, 2, 3]
    assert omega_circulant(row, 1) == circulant(row)


def test_block_compose_rejects_ragged():
    A, B = GridMatrix.identity(2), GridMatrix.identity(3)
    with pytest.raises(ShapeError):
        block_compose([[A, B], [B, A]])


def test_shape_mismatch():
    with pytest.raises(ShapeError):
        GridMatrix.identity(2) @ GridMatrix.identity(3)


def test_abs_rejects_non_units():
    with pytest.raises(NonUnitEntryError):
        abs_matrix(GridMatrix.from_ints([[2, 0], [0, 1]]))


def test_group_J():
    G = group_J(3, 2).to_int_array()
    assert np.array_equal(G, np.kron(np.eye(3, dtype=int), np.ones((2, 2), dtype=int)))


@given(quat_matrices(), quat_matrices())
def test_quaternion_product_matches_schoolbook(A, B):
    assert (A @ B) == GridMatrix.from_entries(brute_product(A, B), (A @ B).kind)


@given(quat_matrices(), quat_matrices())
def test_adjoint_anti_homomorphism(A, B):
    assert mat_adjoint(mat_mul(A, B)) == mat_mul(mat_adjoint(B), mat_adjoint(A))


@given(quat_matrices(3, 3), quat_matrices(2, 2))
def test_abs_commutes_with_kron(A, B):
    assert abs_matrix(kron(A, B)) == kron(abs_matrix(A), abs_matrix(B))


@given(quat_matrices(4, 3))
def test_qbw_round_trip(A):
    assert parse_qbw(format_qbw(A)) == A
    assert mat_transpose(mat_transpose(A)) == A


@given(st.integers(1, 6), st.integers(0, 3))
def test_exact_matmul_large_values(n, shift):
    rng = np.random.default_rng(n * 10 + shift)
    big = 2**40 << shift
    a = rng.integers(-3, 4, size=(n, n)).astype(object) * big
    b = rng.integers(-3, 4, size=(n, n)).astype(object) * big
    expect = np.array([[sum(a[i, t] * b[t, j] for t in range(n)) for j in range(n)] for i in range(n)], dtype=object)
    assert (exact_matmul(a, b) == expect).all()
