"""Acceptance suite: every criterion must pass inside its budget."""

import pytest

from currentlab.acceptance import CRITERIA, run_all


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion_passes(number):
    record = CRITERIA[number]()
    assert record["passed"], "\n".join(record["details"])
    assert record["elapsed"] <= record["budget"]
    assert record["criterion"] == number


def test_run_all_selection_and_order():
    records = run_all([2, 1])
    assert [r["criterion"] for r in records] == [2, 1]
    with pytest.raises(ValueError):
        run_all([42])


def test_records_are_serializable():
    import json
    rec = CRITERIA[1]()
    json.dumps(rec)
    assert set(rec) == {"criterion", "name", "passed", "details",
                        "elapsed", "budget"}


def test_raising_criterion_reported_not_thrown(monkeypatch):
    import currentlab.acceptance as acceptance

    def boom(seed=0):
        raise RuntimeError("synthetic breakage")

    monkeypatch.setitem(acceptance.CRITERIA, 3, boom)
    rec = run_all([3])[0]
    assert rec["passed"] is False
    assert "synthetic breakage" in rec["details"][0]
    assert rec["name"] == "pinched-loop study"
    assert rec["budget"] == 10.0
