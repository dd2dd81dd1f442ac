import io
import json

import pytest

from cantorfill.cli import load_family_file, parse_family, run
from cantorfill.errors import DepthError, PreconditionError


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def result(*argv):
    code, out, err = call(*argv)
    assert code == 0, err
    return json.loads(out)


def test_types():
    rep = result("types", "--k", "4", "--check")
    assert rep["result"]["count"] == 6 and len(rep["result"]["types"]) == 6
    assert rep["version"] and rep["seed"] == 0 and rep["config"]["k"] == 4


def test_density_schreier():
    assert result("density", "--family", "schreier", "--n", "6", "--check")["result"]["value"] == 3
    code, out, _ = call("density", "--family", "schreier", "--n-max", "4", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "n,density,mode,strategy" and out.splitlines()[4].startswith("4,2,")


def test_extract_type_echo():
    rep = result("extract-type", "--k", "3", "--tau", "0,1,0", "--check")["result"]
    assert rep["type_of"] == rep["tau"] == [0, 1, 0]


def test_extract_increasing_and_typed_member():
    rep = result("extract-increasing", "--n", "4", "--k", "2", "--seed", "5", "--check")["result"]
    assert len(rep["H"]) == 4 and set(rep["H"]) <= set(rep["G"])
    rep = result("typed-member", "--family", "all", "--depth", "16", "--n", "4", "--k", "3", "--tau", "0,1", "--check")
    assert rep["result"]["type_of"] == [0, 1]


def test_reports_are_deterministic():
    argv = ["extract-increasing", "--n", "5", "--k", "2", "--seed", "9"]
    assert call(*argv)[1] == call(*argv)[1]


def test_decide_tree_round_trip(tmp_path):
    rep = result("decide-tree", "build", "--family", "fremlin:D=8", "--n", "2", "--depth", "8", "--check")
    assert rep["result"]["mixed"] == 0
    path = tmp_path / "tree.json"
    path.write_text(json.dumps(rep["result"]["tree"]))
    assert result("decide-tree", "check", "--family", "fremlin:D=8", "--n", "2", "--tree", str(path))["result"]["mixed"] == 0
    assert result("measure", "--tree", str(path), "--n", "2", "--check")["result"]["measure"] == "1"


def test_dyadic_commands():
    rep = result("trapped", "--family", "coordinate:c=0", "--n", "3", "--eps", "1/2", "--depth", "6", "--check")
    assert rep["result"]["size"] >= 4
    rep = result("limit-set", "--family", "coordinate:c=0", "--eps", "1/2", "--n", "3", "--r", "2", "--depth", "6", "--check")
    assert rep["result"]["measure"] == "1/2"
    assert result("graded-tree", "--family", "fremlin:D=8", "--n", "2", "--depth", "8", "--check")["result"]["g"] == [6, 10, 18]
    code, _, err = call("graded-tree", "--family", "bounded:k=1", "--g", "2", "--n", "1", "--depth", "6")
    assert code == 1 and json.loads(err)["error"] == "SearchFailed"


def test_banach_commands(tmp_path):
    vec = tmp_path / "v.json"
    vec.write_text(json.dumps({"entries": {"000": "1/2", "011": "-3", "101": "2"}}))
    assert result("norm", "--family", "bounded:k=2", "--vector", str(vec), "--check")["result"]["norm"] == "5"
    code, out, _ = call("cesaro", "--family", "all", "--depth", "5", "--imax", "7", "--format", "csv", "--check")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "i,norm,bound" and lines[-1] == "7,1,2"
    rep = result("half-filling", "--family", "schreier", "--m", "5", "--ground-size", "10", "--check")
    assert len(rep["result"]["indices"]) == 5


def test_probe_and_fremlin_and_filling():
    rep = result("star-probe", "--family", "all", "--n", "4", "--depth", "5", "--check")
    assert [r["density"] for r in rep["result"]["rows"]] == [4, 8, 16]
    rep = result("fremlin", "--n", "30", "--depth", "5", "--check")
    assert rep["result"]["family"]["caps"] == [6, 10, 18]
    rep = result("filling-check", "--family", "schreier", "--eps", "1/2", "--n", "6", "--check")
    assert rep["result"]["ok"]


def test_exit_codes():
    assert call("density", "--bogus")[0] == 2
    assert call("density", "--family", "schreier")[0] == 2
    assert call("types")[0] == 2
    code, _, err = call("density", "--family", "nope", "--n", "3")
    assert code == 1 and json.loads(err)["error"] == "PreconditionError"


def test_family_files(tmp_path):
    good = tmp_path / "fam.json"
    good.write_text(json.dumps({"depth": 2, "members": [["00", "01"], ["10", "11"]]}))
    with pytest.warns(UserWarning):
        fam = load_family_file(good)
    assert len(fam) >= 4 and fam.member(("00",))
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"depth": 3, "members": []}))
    assert len(load_family_file(empty)) == 1
    mixed = tmp_path / "mixed.json"
    mixed.write_text(json.dumps({"depth": 2, "members": [["00", "011"]]}))
    with pytest.raises(DepthError):
        load_family_file(mixed)
    broken = tmp_path / "broken.json"
    broken.write_text('{"depth": 2,\n "members": [}')
    with pytest.raises(PreconditionError) as info:
        load_family_file(broken)
    assert info.value.details["line"] == 2
    with pytest.warns(UserWarning):
        assert parse_family(str(good)).member(("10", "11"))
    code, _, err = call("density", "--family", str(good), "--n", "2", "--depth", "2")
    assert code == 0 and "warning" in err
