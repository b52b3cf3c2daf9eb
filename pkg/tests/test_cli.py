import json

import pytest

from qbw.cli import main
from qbw.paths import fixture_path


def run_json(capsys, argv):
    capsys.readouterr()
    code = main(argv + ["--json"])
    return code, json.loads(capsys.readouterr().out)


@pytest.fixture(scope="module")
def cons1_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cons1")
    out = d / "cons1_q3.qbw"
    assert main(["construct", "cons1", "--q", "3", "--out", str(out), "--siamese-dir", str(d / "siam")]) == 0
    return d, out


def test_construct_then_verify(cons1_files, capsys):
    d, out = cons1_files
    assert (d / "cons1_q3.recipe.json").exists()
    code, payload = run_json(capsys, ["verify", str(out), "--kind", "srg-balanced"])
    assert code == 0 and payload["format"] == "qbw-report/1"
    assert payload["reports"][0]["pass"]
    code, payload = run_json(capsys, ["verify", str(out), "--kind", "srg"])
    assert code == 0 and payload["reports"][0]["params"] == [40, 12, 2, 4]
    siam = sorted(str(p) for p in (d / "siam").glob("*.qbw"))
    assert len(siam) == 4
    assert main(["verify", *siam, "--kind", "siamese"]) == 0


def test_construct_is_reproducible(tmp_path, cons1_files):
    _, first = cons1_files
    again = tmp_path / "again.qbw"
    assert main(["construct", "cons1", "--q", "3", "--out", str(again)]) == 0
    assert again.read_bytes() == first.read_bytes()


def test_manifest(tmp_path, cons1_files, capsys):
    _, out = cons1_files
    man = tmp_path / "run.json"
    assert main(["--manifest", str(man), "verify", str(out), "--kind", "weighing"]) == 0
    m = json.loads(man.read_text())
    assert m["format"] == "qbw-manifest/1"
    assert str(out) in m["inputs"] and m["outcome"]["exit"] == 0


def test_scheme_pipeline(tmp_path, cons1_files, capsys):
    _, out = cons1_files
    sch = tmp_path / "cons1.scheme"
    assert main(["scheme", "build", str(out), "--family", "srg", "--out", str(sch)]) == 0
    code, payload = run_json(capsys, ["scheme", "eig", str(sch), "--compare", "srg:12,2,-4"])
    assert code == 0
    assert all(r["pass"] for r in payload["reports"])
    assert len(payload["P"]) == 8
    back = tmp_path / "back.qbw"
    assert main(["scheme", "extract", str(sch), "--family", "srg", "--out", str(back)]) == 0
    assert back.read_bytes() == out.read_bytes()


def test_scheme_compare_mismatch(tmp_path, cons1_files, capsys):
    _, out = cons1_files
    sch = tmp_path / "c.scheme"
    main(["scheme", "build", str(out), "--family", "srg", "--out", str(sch)])
    assert main(["scheme", "eig", str(sch), "--compare", "srg:12,1,-5"]) == 1
    assert main(["scheme", "eig", str(sch), "--compare", "srg:12,3,-4"]) == 2


def test_verify_failure_exit_code(capsys):
    r4 = str(fixture_path("srg16_6_2_2_r4.qbw"))
    assert main(["verify", r4, "--kind", "weighing", "--roots", "4"]) == 0
    assert main(["verify", r4, "--kind", "srg-balanced", "--roots", "4"]) == 1


def test_verify_fixtures(capsys):
    assert main(["verify", "--kind", "fixtures"]) == 0


def test_verify_bgw(capsys):
    code, payload = run_json(capsys, ["verify", str(fixture_path("paley_9_8.bgw")), "--kind", "bgw"])
    assert code == 0
    rep = payload["reports"][0]
    assert rep["params"] == [10, 9, 8] and rep["detail"]["skew"]


def test_search_sign(tmp_path, capsys):
    out = tmp_path / "clebsch.qbw"
    code, payload = run_json(capsys, ["search", "sign", "--graph", "clebsch", "--roots", "2", "--out", str(out)])
    assert code == 0
    assert payload["outcome"]["status"] == "found"
    assert payload["reports"][0]["pass"]
    assert main(["verify", str(out), "--kind", "srg-balanced"]) == 0


def test_search_budget_exit(capsys):
    code, payload = run_json(capsys, ["search", "sign", "--graph", "complement(triangular(7))", "--roots", "3",
                                      "--budget", "100"])
    assert code == 3
    assert payload["outcome"] == {"format": "qbw-search/1", "status": "budget_exceeded", "nodes": 100}


def test_table(capsys):
    code, payload = run_json(capsys, ["table", "--rows", "16-5-0-2,15-8-4-4", "--roots", "2"])
    assert code == 0
    assert [c["verdict"] for c in payload["table"]] == ["YES", "NO"]


def test_usage_errors(tmp_path, capsys):
    assert main(["verify", str(tmp_path / "missing.qbw")]) == 2
    assert main(["search", "sign", "--graph", "petersen"]) == 2
    assert main(["table", "--rows", "1-2-3-4"]) == 2
    assert main(["construct", "cons1"]) == 2
    assert main(["nonsense"]) == 2
    bad = tmp_path / "bad.qbw"
    bad.write_text("not a matrix\n")
    assert main(["verify", str(bad)]) == 2
