import json

from qpainleve.report import CheckReport, combine


def _rep(results, trials=1, degree=3):
    r = CheckReport("x", {"l": 2}, "modular", prime=2**61 - 1, trials=trials, max_degree=degree)
    for label, ok in results:
        r.check(label, ok)
    return r


def test_status_and_summary():
    r = _rep([("a", True), ("b", False)])
    assert r.status == "fail" and [e.label for e in r.failures] == ["b"]
    assert r.summary_line().startswith("FAIL x")
    s = CheckReport("y", {"l": 1}, skipped="no braid relations")
    assert s.status == "skipped" and s.passed
    assert "no braid relations" in s.summary_line()


def test_bound():
    assert CheckReport("e", mode="exact").bound == 0.0
    one, three = _rep([], 1).bound, _rep([], 3).bound
    assert 0 < three < one < 1e-17


def test_combine_requires_every_run():
    merged = combine([_rep([("a", True), ("b", True)]), _rep([("a", False), ("b", True)], degree=5)])
    assert [e.passed for e in merged.entries] == [False, True]
    assert merged.trials == 2 and merged.max_degree == 5


def test_json_round_trip():
    r = _rep([("a", True)])
    obj = json.loads(r.to_json())
    assert obj["status"] == "pass" and obj["entries"] == [{"label": "a", "passed": True}]
