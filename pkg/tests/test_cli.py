import io
import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from qpainleve.cli import CHECKS, main, parse_l, plan

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def reports(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_parse_l():
    assert parse_l("1..3,7") == [1, 2, 3, 7]
    assert parse_l("2") == [2]
    with pytest.raises(ValueError):
        parse_l("x")


def test_plan_rejects_invalid_l():
    with pytest.raises(ValueError):
        plan(["climit.qp2"], [3])


def test_list():
    code, text = run("--list")
    assert code == 0
    for name in ("theorem1", "weyl.braid", "climit.qp2", "classical.flow"):
        assert name in text and name in CHECKS


def test_passing_check_exits_zero():
    code, text = run("--check", "theorem1", "--l", "2", "--mode", "exact")
    assert code == 0
    (rep,) = reports(text)
    assert rep["status"] == "pass" and rep["params"]["l"] == 2


def test_braid_is_skipped_for_l1():
    code, text = run("--check", "weyl.braid", "--l", "1,2", "--trials", "1")
    assert code == 0
    statuses = [r["status"] for r in reports(text)]
    assert statuses == ["skipped", "pass"]


def test_failing_check_exits_one():
    code, text = run("--check", "climit.qp2", "--l", "2", "--trials", "1")
    assert code == 1
    (rep,) = reports(text)
    assert rep["status"] == "fail"
    failed = {e["label"] for e in rep["entries"] if not e["passed"]}
    assert failed == {f"r{i} d = d r{i} on phi{j}" for i in range(2) for j in range(2)}


@pytest.mark.parametrize("argv", [
    ["--check", "nope"],
    ["--check", "climit.qp2", "--l", "3"],
    ["--check", "theorem1", "--trials", "0"],
    [],
    ["bogus"],
])
def test_usage_errors_exit_two(argv):
    assert run(*argv)[0] == 2


def test_json_output_is_deterministic(tmp_path):
    argv = ["--check", "heisenberg,weyl.relations", "--l", "2", "--trials", "1", "--seed", "4"]
    p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run(*argv, "--json", str(p1))
    run(*argv, "--json", str(p2))
    a, b = reports(p1.read_text()), reports(p2.read_text())
    for r in a + b:
        r.pop("elapsed")
    assert a == b and len(a) == 2
    for key in ("name", "params", "mode", "status", "entries", "notes", "algebra",
                "trials", "prime", "failure_bound"):
        assert key in a[1]


def test_summary_table():
    code, text = run("--check", "theorem1,conservation", "--l", "1..2", "--summary")
    assert code == 0
    assert text.count("pass") >= 4


def test_fixtures_round_trip(tmp_path):
    d = tmp_path / "fx"
    shutil.copytree(FIXTURES, d)
    assert run("fixtures", "verify", "--fixtures-dir", str(d))[0] == 0
    path = d / "h0_l2.json"
    data = json.loads(path.read_text())
    data["hamiltonian"]["coeffs"][0]["num"][0][1] = "7/1"
    path.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
    code, text = run("fixtures", "verify", "--fixtures-dir", str(d), "--summary")
    assert code == 1 and "FAIL h0_l2.json" in text and "stored 7" in text
    assert run("fixtures", "regenerate", "--fixtures-dir", str(d))[0] == 2
    code, _ = run("fixtures", "regenerate", "--yes", "--fixtures-dir", str(d))
    assert code == 0
    assert path.read_text() == (FIXTURES / "h0_l2.json").read_text()


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qpainleve.cli", "--check", "theorem1",
                           "--l", "3", "--mode", "exact"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "pass"
