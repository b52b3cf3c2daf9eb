import numpy as np
import pytest

from qbw import scheme
from qbw.matrixcore import abs_matrix
from qbw.scheme import (
    ParameterMismatch,
    SchemeData,
    closed_form,
    closed_form_B,
    compare_closed_form,
    eigenmatrices,
    extract_from_scheme,
    family_params,
    format_scheme,
    parse_scheme,
    scheme_identity_check,
    verify_scheme,
)
from qbw.search import paley_graph
from qbw.verify import gdd_check

CASES = [
    ("srg", "srg_scheme", (12, 2, -4), (12, 2, 4), 160, 8),
    ("gdd1", "gdd1_scheme", (16, 16, 2), (16, 16, 2, 0, 8), 128, 7),
    ("gdd2", "gdd2_scheme", (27, 10, 4), (27, 10, 4, 18, 18), 160, 8),
]


@pytest.fixture
def schemes(request):
    return {name: request.getfixturevalue(name) for name in ("srg_scheme", "gdd1_scheme", "gdd2_scheme")}


def test_two_class_and_trivial_schemes():
    A = paley_graph(13)
    I = np.eye(13, dtype=np.int64)
    S = SchemeData([I, A, 1 - I - A])
    rep = verify_scheme(S)
    assert rep.passed and rep.params == (13, 2)
    S1 = SchemeData([I, 1 - I])
    assert verify_scheme(S1).params == (13, 1)


def test_corrupted_class_fails_with_witness():
    A = paley_graph(13)
    I = np.eye(13, dtype=np.int64)
    B = A.copy()
    B[0, 1] = B[1, 0] = 1 - B[0, 1]
    rep = verify_scheme(SchemeData([I, B, 1 - I - B]))
    assert not rep.passed and rep.witness is not None


@pytest.mark.parametrize("family,fixture,params,bparams,points,classes", CASES)
def test_scheme_builds(request, family, fixture, params, bparams, points, classes):
    S = request.getfixturevalue(fixture)
    assert S.points == points and len(S.classes) == classes
    assert (S.p >= 0).all() and S.p.dtype.kind == "i"


@pytest.mark.parametrize("family,fixture,params,bparams,points,classes", CASES)
def test_intersection_identities(request, family, fixture, params, bparams, points, classes):
    S = request.getfixturevalue(fixture)
    p, kv = S.p, np.array(S.valencies)
    d1 = len(kv)
    assert np.array_equal(p, p.transpose(1, 0, 2))
    # sum_j p_ij^k = k_i
    assert np.array_equal(p.sum(axis=1), np.tile(kv[:, None], (1, d1)))
    # k_k p_ij^k = k_i p_kj^i
    for i in range(d1):
        for j in range(d1):
            for k in range(d1):
                assert kv[k] * p[i, j, k] == kv[i] * p[k, j, i]
    assert kv.sum() == S.points


@pytest.mark.parametrize("family,fixture,params,bparams,points,classes", CASES)
def test_displayed_B_matrix(request, family, fixture, params, bparams, points, classes):
    S = request.getfixturevalue(fixture)
    idx, B = closed_form_B(family, bparams)
    assert np.array_equal(S.B(idx), B.astype(np.int64))
    assert np.array_equal(S.B(idx).astype(float), B)


def test_B4_entry_gdd1(gdd1_scheme):
    # row 2, col 4 reads k/m - 1
    assert gdd1_scheme.B(4)[2, 4] == 16 // 16 - 1


@pytest.mark.parametrize("family,fixture,params,bparams,points,classes", CASES)
def test_eigenmatrices_match_closed_form(request, family, fixture, params, bparams, points, classes):
    S = request.getfixturevalue(fixture)
    E = eigenmatrices(S)
    rep = compare_closed_form(E, family, params)
    assert rep.passed, rep.detail
    assert rep.detail["max_dev_P"] < 1e-6 and rep.detail["max_dev_Q"] < 1e-6
    assert np.allclose(E.P @ E.Q, points * np.eye(classes), atol=1e-6)
    assert np.allclose(E.P[:, 0], 1) and np.allclose(E.Q[:, 0], 1)
    mult = E.Q[0]
    assert np.allclose(mult, np.round(mult), atol=1e-6) and (mult > 0.5).all()
    assert abs(mult.sum() - points) < 1e-6


def test_closed_form_rows(request):
    P, _ = closed_form("gdd1", (16, 16, 2))
    assert P[0].tolist() == [1, 1, 2, 60, 16, 16, 32] and P[0].sum() == 128
    P, _ = closed_form("gdd2", (27, 10, 4))
    assert P[0].tolist() == [1, 1, 6, 72, 27, 27, 18, 8] and P[0].sum() == 160
    assert abs(P[7, 4] - 3) < 1e-12
    P, Q = closed_form("srg", (12, 2, -4))
    assert np.allclose(P @ Q, 160 * np.eye(8))


def test_closed_form_mismatch_detected(srg_scheme):
    E = eigenmatrices(srg_scheme)
    assert not compare_closed_form(E, "srg", (12, 4, -2)).passed


@pytest.mark.parametrize("family,fixture", [("srg", "srg_scheme"), ("gdd1", "gdd1_scheme"), ("gdd2", "gdd2_scheme")])
def test_converse_identity(request, family, fixture):
    assert scheme_identity_check(request.getfixturevalue(fixture))


def test_round_trips(srg_scheme, gdd1_scheme, gdd2_scheme, cons1_q3, gdd1_instance, gdd2_instance):
    assert extract_from_scheme(srg_scheme, "srg") == cons1_q3[0]
    assert extract_from_scheme(gdd1_scheme, "gdd1") == gdd1_instance
    assert extract_from_scheme(gdd2_scheme, "gdd2") == gdd2_instance


def test_permuted_classes_rejected(srg_scheme):
    cls = list(srg_scheme.classes)
    cls[5], cls[2] = cls[2], cls[5]
    with pytest.raises(ParameterMismatch):
        extract_from_scheme(SchemeData(cls), "srg")
    with pytest.raises(ParameterMismatch):
        extract_from_scheme(srg_scheme, "gdd1")


def test_family_params(srg_scheme, gdd2_scheme):
    assert family_params(srg_scheme, "srg") == (12, 2, -4)
    assert family_params(gdd2_scheme, "gdd2") == (27, 10, 4)


def test_gdd_scheme_requires_property(gdd1_instance):
    with pytest.raises(scheme.SchemeError):
        scheme.build_gdd_scheme_case2(gdd1_instance, 16, 2)


def test_scheme_file_round_trip(gdd1_scheme):
    back = parse_scheme(format_scheme(gdd1_scheme))
    assert all(np.array_equal(a, b) for a, b in zip(back.classes, gdd1_scheme.classes))
    assert format_scheme(gdd1_scheme).splitlines()[0] == "scheme 128 7"


def test_extracted_gdd_structure(gdd2_scheme):
    W = extract_from_scheme(gdd2_scheme, "gdd2")
    assert gdd_check(abs_matrix(W), 10, 4).params == (40, 27, 10, 4, 18, 18)
