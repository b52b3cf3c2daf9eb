import numpy as np
import pytest

from qbw.matrixcore import GridMatrix, abs_matrix, read_qbw
from qbw.paths import fixture_path
from qbw.search import (
    SearchProblem,
    search_signing,
    srg_fixture,
    table_cell,
    verify_fixture_signings,
)
from qbw.verify import is_weighing, quasi_balanced_profile, srg_balanced_check, srg_check


@pytest.mark.parametrize("name,params", [
    ("clebsch", (16, 5, 0, 2)),
    ("shrikhande", (16, 6, 2, 2)),
    ("lattice(4)", (16, 6, 2, 2)),
    ("triangular(6)", (15, 8, 4, 4)),
    ("triangular(8)", (28, 12, 6, 4)),
    ("complement(triangular(7))", (21, 10, 3, 6)),
    ("paley(13)", (13, 6, 2, 3)),
    ("paley(25)", (25, 12, 5, 6)),
    ("complement(clebsch)", (16, 10, 6, 6)),
])
def test_srg_fixtures(name, params):
    assert srg_check(srg_fixture(name)).params == params


def test_unknown_fixture():
    with pytest.raises(ValueError):
        srg_fixture("petersen")


def test_clebsch_found_and_certified():
    out = search_signing(SearchProblem(srg_fixture("clebsch"), 2))
    assert out.status == "found"
    assert srg_balanced_check(out.W, n=2).passed
    assert out.W == out.W.T


@pytest.mark.parametrize("name", ["triangular(6)", "lattice(4)", "shrikhande"])
@pytest.mark.parametrize("symmetry", ["symmetric", "general"])
def test_table_no_rows(name, symmetry):
    out = search_signing(SearchProblem(srg_fixture(name), 2, symmetry=symmetry))
    assert out.status == "exhausted_no"


@pytest.mark.parametrize("name", ["clebsch", "triangular(6)", "lattice(4)", "shrikhande"])
def test_normalizations_agree(name):
    verdicts = {search_signing(SearchProblem(srg_fixture(name), 2, normalization=norm)).status
                for norm in ("vertex0", "tree")}
    assert len(verdicts) == 1


def test_triangular8_needs_general_mode():
    assert search_signing(SearchProblem(srg_fixture("triangular(8)"), 2)).status == "exhausted_no"
    out = search_signing(SearchProblem(srg_fixture("triangular(8)"), 2, symmetry="general"))
    assert out.status == "found"
    assert srg_balanced_check(out.W, n=2).passed and out.W != out.W.T


def test_not_divisible():
    out = search_signing(SearchProblem(srg_fixture("paley(13)"), 2))
    assert out.status == "not_divisible" and out.nodes == 0


@pytest.mark.parametrize("name", ["lattice(4)", "shrikhande"])
def test_strictly_quasi_balanced_r4(name):
    prob = SearchProblem(srg_fixture(name), 4, "weighing_only", "general")
    out = search_signing(prob)
    assert out.status == "found"
    assert is_weighing(out.W, 4).params == (16, 6)
    assert quasi_balanced_profile(out.W).passed
    assert not srg_balanced_check(out.W, n=4).passed


def test_determinism():
    prob = lambda: SearchProblem(srg_fixture("triangular(6)"), 2, symmetry="general")
    a, b = search_signing(prob()), search_signing(prob())
    assert (a.status, a.nodes) == (b.status, b.nodes)


def test_budget_exceeded_outcome_format():
    out = search_signing(SearchProblem(srg_fixture("complement(triangular(7))"), 3, budget=5000))
    d = out.to_dict(timings=False)
    assert d == {"format": "qbw-search/1", "status": "budget_exceeded", "nodes": 5000}


def test_switching_preserves_symmetric_signing():
    """Negating row i and column i keeps a symmetric Z_2 signing certified."""
    W = read_qbw(fixture_path("srg16_5_0_2.qbw")).to_int_array()
    for i in range(16):
        D = np.eye(16, dtype=int)
        D[i, i] = -1
        M = GridMatrix.from_ints(D @ W @ D)
        assert M == M.T
        assert is_weighing(M).params == (16, 5)
        assert abs_matrix(M) == abs_matrix(GridMatrix.from_ints(W))
        assert srg_balanced_check(M, n=2).passed


def test_fixture_signings_certify():
    reps = verify_fixture_signings()
    assert len(reps) == 5 and all(r.passed for r in reps)
    by_name = {r.params[0]: r for r in reps}
    assert by_name["srg16_6_2_2_r4.qbw"].detail["srg_balanced"] is False
    assert by_name["srg16_5_0_2.qbw"].detail["symmetric"] is True


def test_table_cells():
    assert table_cell("16-5-0-2", 2).verdict == "YES"
    assert table_cell("15-8-4-4", 2).verdict == "NO"
    assert table_cell("16-6-2-2", 2).verdict == "NO"
    assert table_cell("5-2-0-1", 2).verdict == "---"
    assert table_cell("21-10-3-6", 2).verdict == "---"
    assert table_cell("27-16-10-8", 2).verdict == "?"
    assert table_cell("16-9-4-6", 2).verdict == "YES"
    assert table_cell("28-12-6-4", 2).verdict == "YES"


def test_table_budget_gives_unknown():
    assert table_cell("21-10-3-6", 3, budget=1000).verdict == "?"
