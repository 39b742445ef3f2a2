import json
import math
import os

import numpy as np
import pytest

from capplan.analysis import certify_equivalence, quantify_milestone_bias
from capplan.model import ObjectiveVariant as V, cost_breakdown, solve_scenario
from capplan.reports import (
    bias_section,
    equivalence_section,
    read_csv_rows,
    run_report,
    to_csv,
    to_json,
    write_atomic,
    write_reports,
)
from scenario_gen import random_scenario


def numbers(doc, path=()):
    """All numeric leaves of a report keyed by a path that matches the CSV layout."""
    out = {}
    for key, value in doc.items():
        if isinstance(value, dict):
            out.update(numbers(value, path + (key,)))
        elif isinstance(value, list):
            for rec in value:
                index = tuple(str(rec[f]) for f in ("variant", "tech", "year", "period", "timestep") if f in rec)
                for q, v in rec.items():
                    if isinstance(v, (int, float)) and q not in ("year", "timestep", "period"):
                        out[(".".join(path + (key,)), index, q)] = v
        elif isinstance(value, (int, float)):
            out[(".".join(path) or "report", (), key)] = value
    return out


def csv_numbers(rows):
    out = {}
    for r in rows:
        index = tuple(r[f] for f in ("variant", "tech", "year", "period", "timestep") if f in r)
        if isinstance(r["value"], (int, float)):
            out[(r["section"], index, r["quantity"])] = r["value"]
    return out


def same_bits(a, b):
    return type(a) is type(b) and (a == b or (isinstance(a, float) and math.isnan(a) and math.isnan(b)))


def solved_report(seed):
    s = random_scenario(np.random.default_rng(seed), sparse=True)
    lp, sol = solve_scenario(s, V.ANNUALISED_MILESTONE)
    doc = run_report("solve", lp, sol, cost_breakdown(s, V.ANNUALISED_MILESTONE, sol))
    doc["equivalence"] = equivalence_section(
        certify_equivalence(s, V.ANNUALISED_MILESTONE, V.TOTAL_SALVAGE_MILESTONE))
    doc["bias"] = bias_section(quantify_milestone_bias(s))
    return doc


@pytest.mark.parametrize("seed", range(8))
def test_json_round_trip_is_bit_exact(seed):
    doc = solved_report(seed)
    again = json.loads(to_json(doc))
    a, b = numbers(doc), numbers(again)
    assert a.keys() == b.keys()
    assert all(same_bits(a[k], b[k]) for k in a)


@pytest.mark.parametrize("seed", range(8))
def test_csv_round_trip_is_bit_exact(seed):
    doc = solved_report(seed)
    expected = numbers(doc)
    parsed = csv_numbers(read_csv_rows(to_csv(doc)))
    assert expected.keys() == parsed.keys()
    assert all(same_bits(expected[k], parsed[k]) for k in expected)


def test_report_totals_match_objective():
    doc = solved_report(3)
    summary = doc["summary"]
    total = summary["total_investment_cost"] + summary["total_operational_cost"]
    assert total == pytest.approx(summary["objective"], rel=1e-9)


def test_reports_are_deterministic():
    assert to_json(solved_report(4)) == to_json(solved_report(4))
    assert to_csv(solved_report(4)) == to_csv(solved_report(4))


def test_write_reports(tmp_path):
    doc = solved_report(1)
    paths = write_reports(tmp_path / "out", doc, ["solve", "x.yaml"])
    assert [os.path.basename(p) for p in paths] == ["report.json", "report.csv", "meta.json"]
    assert json.loads((tmp_path / "out" / "report.json").read_text()) == json.loads(to_json(doc))
    assert "created" in json.loads((tmp_path / "out" / "meta.json").read_text())
    assert "created" not in (tmp_path / "out" / "report.json").read_text()
    assert not [p for p in os.listdir(tmp_path / "out") if p.startswith(".tmp-")]


def test_write_atomic_leaves_old_file_on_failure(tmp_path, monkeypatch):
    target = tmp_path / "r.json"
    target.write_text("old")

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        write_atomic(target, "new")
    assert target.read_text() == "old"
    assert os.listdir(tmp_path) == ["r.json"]
