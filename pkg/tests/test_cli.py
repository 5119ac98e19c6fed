import json
import subprocess
import sys

import pytest

from sunitgraph.cli import main, verify_document


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


# check

def test_check_examples(capsys):
    code, out, _ = run(capsys, "check", "4/9", "--primes", "2,3")
    assert code == 0 and out["kind"] == "check" and out["s_unit"] is True
    assert out["valuations"] == {"2": 2, "3": -2}
    _, out, _ = run(capsys, "check", "3/2", "--primes", "2")
    # 3/2 lies in Z[1/2]: not a unit, but an S-integer
    assert out["s_unit"] is False and out["s_integer"] is True
    _, out, _ = run(capsys, "check", "7", "--primes", "2")
    assert out["s_unit"] is False and out["s_integer"] is True


def test_check_parse_error(capsys):
    code, out, err = run(capsys, "check", "x/y", "--primes", "2")
    assert code == 2 and out is None and "cannot parse" in err


def test_missing_primes(capsys, monkeypatch):
    monkeypatch.delenv("SUNIT_CONFIG", raising=False)
    code, _, err = run(capsys, "check", "1")
    assert code == 2 and "--primes" in err


def test_bad_primes(capsys):
    code, _, _ = run(capsys, "check", "1", "--primes", "4")
    assert code == 2


def test_argparse_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["cycle", "six", "--primes", "3"])
    assert exc.value.code == 2


# cycle

def test_cycle_verified(capsys, tmp_path):
    code, out, _ = run(capsys, "cycle", "6", "--primes", "3")
    assert code == 0 and out["kind"] == "cycle"
    assert len(out["vertices"]) == 6 and len(out["units"]) == 5
    v = out["verification"]
    assert v["sum"] and v["induced_condition"] and v["nondegenerate"] and v["induced_representation"]
    report, rc = verify_document(out)
    assert rc == 0 and report["matches_embedded"] is True


def test_cycle_residue(capsys):
    code, out, err = run(capsys, "cycle", "7", "--primes", "5")
    assert code == 3 and out is None and "mod 4" in err


def test_cycle_base(capsys):
    _, plain, _ = run(capsys, "cycle", "6", "--primes", "3")
    _, shifted, _ = run(capsys, "cycle", "6", "--primes", "3", "--base", "10")
    assert shifted["units"] == plain["units"]
    assert shifted["vertices"][0] == "10/1" and shifted["vertices"][-1] == "11/1"


def test_cycle_two_primes(capsys):
    code, out, _ = run(capsys, "cycle", "12", "--primes", "3,7")
    assert code == 0 and len(out["vertices"]) == 12


# zerosum

def test_zerosum(capsys):
    code, out, _ = run(capsys, "zerosum", "6", "--primes", "3,7")
    assert code == 0 and len(out["units"]) == 6
    assert out["units"][0] == "7/1" and out["units"][-1] == "-9/1"
    assert out["plan"]["s_r"] == 4
    assert out["verification"]["nondegenerate"] is True


@pytest.mark.parametrize("argv,code", [
    (["zerosum", "5", "--primes", "3,7"], 3),
    (["zerosum", "6", "--primes", "2,3"], 5),
    (["zerosum", "4", "--primes", "3,7"], 4),
])
def test_zerosum_errors(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


# solve

def test_solve_three_term(capsys):
    code, out, _ = run(capsys, "solve", "three_term", "--primes", "2", "--bound", "3")
    assert code == 0 and out["kind"] == "solutions"
    assert {"x": "2/1", "y": "4/1", "z": "-1/1", "tag": "none", "nondegenerate": True} in out["solutions"]
    assert out["header"]["evertse_bound"] == 3 * 7**5
    assert out["header"]["bound_H"] == 3


def test_solve_two_term(capsys):
    code, out, _ = run(capsys, "solve", "two_term", "--a", "1", "--b", "1", "--primes", "2", "--bound", "2")
    assert code == 0 and ["1/2", "1/2"] in out["solutions"]
    assert out["count"] <= out["header"]["evertse_bound"]


def test_solve_unitsum(capsys):
    code, out, _ = run(capsys, "solve", "unitsum", "--k", "3", "--primes", "3", "--bound", "2", "--positive")
    assert code == 0 and out["solutions"] == [["1/3", "1/3", "1/3"]]
    assert run(capsys, "solve", "unitsum", "--primes", "3")[0] == 2


def test_solve_budget(capsys):
    code, _, err = run(capsys, "solve", "three_term", "--primes", "2,3,5", "--bound", "6", "--budget", "1000")
    assert code == 6 and "budget" in err


# counterexample

def test_counterexample(capsys):
    code, out, _ = run(capsys, "counterexample", "--primes", "2", "--bound", "3")
    assert code == 0 and out["case"] == 2
    assert len(out["graph_minus"]["edges"]) == len(out["graph"]["edges"]) - 1
    assert out["omitted_edge"] and out["omitted_edge"] not in out["graph_minus"]["edges"]
    cert = out["certificate"]
    assert cert["search_bound"] == 8
    assert cert["graph_minus_search"]["found"] is False
    assert cert["graph_search"]["found"] is True
    assert out["verification"]["representation"] and not out["verification"]["induced_representation"]
    report, rc = verify_document(out)
    assert rc == 0 and report["matches_embedded"]


def test_counterexample_byte_identical(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["counterexample", "--primes", "2", "--bound", "3", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_counterexample_case1(capsys):
    code, out, _ = run(capsys, "counterexample", "--primes", "5", "--bound", "3", "--search-bound", "6")
    assert code == 0 and out["case"] == 1 and out["omitted_edge"] == ["1+a", "1+a+b"]


# verify

def test_verify_detects_broken_sum(capsys, tmp_path):
    _, out, _ = run(capsys, "cycle", "6", "--primes", "3")
    out["units"][0] = "1/3"
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(out))
    code, report, _ = run(capsys, "verify", str(path))
    assert code == 1
    assert report["verification"]["sum"] is False and report["passed"] is False


def test_verify_zerosum_round_trip(capsys, tmp_path):
    _, out, _ = run(capsys, "zerosum", "8", "--primes", "3,7")
    path = tmp_path / "z.json"
    path.write_text(json.dumps(out))
    code, report, _ = run(capsys, "verify", str(path))
    assert code == 0 and report["matches_embedded"] is True


def test_verify_plain_graph():
    doc = {"kind": "graph", "primes": [2], "vertices": ["a", "b", "c"],
           "edges": [["a", "b"]], "values": {"a": "0", "b": "1", "c": "2"}}
    report, rc = verify_document(doc)
    assert rc == 1 and report["verification"]["representation"]
    assert not report["verification"]["induced_representation"]


@pytest.mark.parametrize("text", ["[]", "{\"kind\": \"cycle\"}", "{\"kind\": \"nope\", \"primes\": [2]}", "not json"])
def test_verify_schema_errors(capsys, tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    assert run(capsys, "verify", str(path))[0] == 2


# configuration

def test_env_config_and_precedence(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"primes": [2], "bound": 2}))
    monkeypatch.setenv("SUNIT_CONFIG", str(cfg))
    _, out, _ = run(capsys, "solve", "three_term")
    assert out["header"]["primes"] == [2] and out["header"]["bound_H"] == 2
    _, out, _ = run(capsys, "solve", "three_term", "--bound", "1", "--primes", "3")
    assert out["header"]["primes"] == [3] and out["header"]["bound_H"] == 1


def test_env_config_rejected(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"primes": [2], "colour": "blue"}))
    monkeypatch.setenv("SUNIT_CONFIG", str(cfg))
    assert run(capsys, "check", "1")[0] == 2
    cfg.write_text(json.dumps({"bound": "three"}))
    assert run(capsys, "check", "1", "--primes", "2")[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sunitgraph", "check", "4/9", "--primes", "2,3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["s_unit"] is True
