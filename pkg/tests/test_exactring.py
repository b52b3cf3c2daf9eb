import cmath
import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qbw.exactring import (
    INT,
    K,
    CycEntry,
    OrderCapError,
    QuatEntry,
    cyc_root,
    cyclotomic,
    entry_conj,
    entry_mul,
    format_token,
    is_unit_or_zero,
    kind_of,
    parse_token,
    quaternionic,
    root_exponent,
)

ORDERS = [1, 2, 3, 4, 6, 8, 12]


def zero(n=1):
    return cyc_root(n, 0) - cyc_root(n, 0)


@st.composite
def cyc_entries(draw, orders=ORDERS):
    n = draw(st.sampled_from(orders))
    coeffs = draw(st.lists(st.integers(-3, 3), min_size=n, max_size=n))
    x = zero(n)
    for j, c in enumerate(coeffs):
        x = x + c * cyc_root(n, j)
    return x


@st.composite
def unit_or_zero(draw, n=12):
    j = draw(st.integers(-1, n - 1))
    return zero(n) if j < 0 else cyc_root(n, j)


@st.composite
def quat_entries(draw):
    a = draw(cyc_entries([1, 3, 4, 12]))
    b = draw(cyc_entries([1, 3, 4, 12]))
    return a + K * b


def as_complex_model(x) -> np.ndarray:
    """Independent oracle: a + k b as [[a, -conj(b)], [b, conj(a)]] built from complex values."""
    if isinstance(x, QuatEntry):
        a, b = complex(x.a), complex(x.b)
    else:
        a, b = complex(x), 0j
    return np.array([[a, -b.conjugate()], [b, a.conjugate()]])


# -- oracle examples ----------------------------------------------------------------


def test_cyc_root_examples():
    assert cyc_root(1, 0) == 1
    assert cyc_root(4, 2) == -1
    assert cyc_root(3, 1) + cyc_root(3, 2) == -1


def test_entry_mul_examples():
    assert K * K == -1
    z3 = cyc_root(3, 1)
    # k z = conj(z) k
    assert K * z3 == cyc_root(3, 2) * K
    assert (K * z3).a == 0
    assert cyc_root(4, 1) * cyc_root(4, 3) == 1
    assert entry_mul(K, K) == -1


def test_entry_conj_examples():
    assert entry_conj(cyc_root(4, 1)) == -cyc_root(4, 1)
    assert entry_conj(cyc_root(4, 1)) == cyc_root(4, 3)
    assert entry_conj(K) == -K
    x = 1 + K * cyc_root(3, 1)
    assert entry_conj(x) == 1 - K * cyc_root(3, 1)
    assert x * entry_conj(x) == 2
    assert np.allclose(as_complex_model(x) @ as_complex_model(entry_conj(x)), 2 * np.eye(2))


def test_is_unit_or_zero_examples():
    assert is_unit_or_zero(zero())
    assert is_unit_or_zero(cyc_root(3, 1) + cyc_root(3, 2))
    assert not is_unit_or_zero(1 + cyc_root(4, 1))
    assert is_unit_or_zero(K * cyc_root(12, 5))


def test_kinds_join():
    assert kind_of(3) == INT
    assert kind_of(cyc_root(3, 1)) == cyclotomic(3)
    assert kind_of(K) == quaternionic(1)
    assert INT.join(cyclotomic(4)) == cyclotomic(4)
    assert cyclotomic(4).join(cyclotomic(6)) == cyclotomic(12)
    assert cyclotomic(3).join(quaternionic(1)) == quaternionic(3)


def test_order_cap():
    with pytest.raises(OrderCapError):
        cyc_root(7 * 11 * 13, 1) + cyc_root(5, 1)


def test_canonical_representation():
    a = cyc_root(6, 1)
    b = cyc_root(3, 2) * -1  # -w3^2 = w6^1
    assert a == b and hash(a) == hash(b)
    assert cyc_root(12, 4) == cyc_root(3, 1)


@pytest.mark.parametrize("tok", ["0", "1", "-1", "i", "-i", "k", "-k", "w3^1", "-w3^2", "w12^5*k", "-w5^3*k"])
def test_token_round_trip(tok):
    x = parse_token(tok)
    assert parse_token(format_token(x)) == x


def test_token_dash_alone_is_minus_one():
    assert parse_token("-") == -1


def test_root_exponent():
    assert root_exponent(cyc_root(4, 3), 4) == 3
    assert root_exponent(-1, 2) == 1
    assert root_exponent(cyc_root(3, 1), 4) is None
    assert root_exponent(zero(), 4) is None


# -- invariants ----------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 8, 12, 15])
def test_roots_sum_to_zero(n):
    s = zero(n)
    for j in range(n):
        s = s + cyc_root(n, j)
    assert s == 0 and s.is_zero()


@pytest.mark.parametrize("p", [2, 3, 5])
def test_lam_leung_prime_enumeration(p):
    """sum a_j z_p^j = 0 with a in {0..3}^p exactly when all a_j agree (exhaustive)."""
    roots = [cyc_root(p, j) for j in range(p)]
    for a in itertools.product(range(4), repeat=p):
        s = zero(p)
        for c, r in zip(a, roots):
            s = s + c * r
        assert s.is_zero() == (len(set(a)) == 1), a


@given(cyc_entries())
def test_conj_involution(x):
    assert x.conj().conj() == x
    assert abs(complex(x.conj()) - complex(x).conjugate()) < 1e-9


@given(cyc_entries(), cyc_entries(), cyc_entries())
def test_cyc_ring_axioms(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert abs(complex(x * y) - complex(x) * complex(y)) < 1e-6


@given(quat_entries(), quat_entries())
def test_quaternion_complex_model_is_homomorphism(x, y):
    Mx, My = as_complex_model(x), as_complex_model(y)
    assert np.allclose(as_complex_model(x * y), Mx @ My)
    assert np.allclose(as_complex_model(x + y), Mx + My)
    assert np.allclose(as_complex_model(entry_conj(x)), Mx.conj().T)
    norm = x * entry_conj(x)
    assert norm == entry_conj(x) * x == x.norm()
    assert abs(np.linalg.det(Mx) - complex(x.norm())) < 1e-6


@given(quat_entries(), quat_entries(), quat_entries())
def test_quaternion_associative(x, y, z):
    assert (x * y) * z == x * (y * z)


@given(quat_entries(), quat_entries())
def test_conj_anti_homomorphism(x, y):
    assert entry_conj(x * y) == entry_conj(y) * entry_conj(x)


@given(st.integers(1, 24), st.integers(0, 100))
def test_root_is_unit(n, j):
    z = cyc_root(n, j % n)
    assert is_unit_or_zero(z)
    assert abs(complex(z) - cmath.exp(2j * cmath.pi * (j % n) / n)) < 1e-9
