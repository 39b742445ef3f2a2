"""Run reports as a hierarchical JSON document and a flat CSV table.

Both carry floats at full precision (``repr``), so re-reading either file
reproduces the numbers bit for bit. Wall-clock data is kept out of the
payload and goes to a separate ``meta.json`` sidecar.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from datetime import datetime, timezone
from typing import Any, Iterable, Optional, Union

from .analysis import BiasReport, EquivalenceReport
from .model import CostBreakdown, LinearProgram, Solution

__all__ = [
    "REPORT_VERSION",
    "run_report",
    "equivalence_section",
    "bias_section",
    "to_json",
    "to_csv",
    "read_csv_rows",
    "csv_rows",
    "write_atomic",
    "write_reports",
]

REPORT_VERSION = 1
INDEX_FIELDS = ("variant", "tech", "year", "period", "timestep")
CSV_HEADER = ("section",) + INDEX_FIELDS + ("quantity", "value")


def run_report(
    command: str,
    lp: LinearProgram,
    solution: Solution,
    breakdown: Optional[CostBreakdown] = None,
) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "report_version": REPORT_VERSION,
        "command": command,
        "variant": lp.variant.value,
        "summary": {
            "status": solution.status.value,
            "objective": solution.objective,
            "iterations": solution.iterations,
        },
    }
    if breakdown is not None:
        doc["summary"].update(
            total_investment_cost=breakdown.total_investment,
            total_operational_cost=breakdown.total_operational,
        )
        doc["investment"] = [
            {"tech": tech, "year": m, "level": solution.invest[(tech, m)], "cost": cost}
            for (tech, m), cost in breakdown.investment.items()
        ]
        doc["operational_cost"] = [
            {"year": m, "cost": cost} for m, cost in breakdown.operational.items()
        ]
        doc["production"] = [
            {"tech": tech, "year": m, "period": k, "timestep": t, "level": level}
            for (tech, m, k, t), level in solution.production.items()
        ]
    return doc


def equivalence_section(report: EquivalenceReport) -> dict[str, Any]:
    return {
        "variant_a": report.variant_a.value,
        "variant_b": report.variant_b.value,
        "status_a": report.status_a.value,
        "status_b": report.status_b.value,
        "objective_a": report.objective_a,
        "objective_b": report.objective_b,
        "max_coefficient_deviation": report.max_coefficient_deviation,
        "max_objective_deviation": report.max_objective_deviation,
        "threshold": report.threshold,
        "verdict": report.verdict,
    }


def bias_section(report: BiasReport) -> dict[str, Any]:
    return {
        "investment": [
            {
                "tech": e.tech,
                "year": e.milestone,
                "exact": e.exact,
                "annualised_milestone": e.annualised_milestone,
                "total_salvage_milestone": e.total_salvage_milestone,
                "annualised_gap": e.annualised_gap,
                "total_salvage_gap": e.total_salvage_gap,
                "overcounted_years": e.overcounted_years,
            }
            for e in report.investment
        ],
        "operational": [
            {
                "tech": e.tech,
                "year": e.milestone,
                "period": e.period,
                "milestone_weighted": e.milestone_weighted,
                "exact": e.exact,
                "gap": e.gap,
            }
            for e in report.operational
        ],
        "optimum": [
            {
                "variant": o.variant.value,
                "status": o.status.value,
                "milestone_objective": o.milestone_objective,
                "exact_objective": o.exact_objective,
                "gap": o.gap,
            }
            for o in report.optimum
        ],
    }


def to_json(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_rows(doc: dict[str, Any], prefix: str = "") -> Iterable[dict[str, str]]:
    """Flatten a report: one row per numeric or string leaf.

    Records in lists keep their index fields (tech, year, ...) as columns;
    nested mappings extend the section name with a dot.
    """
    for key, value in doc.items():
        section = f"{prefix}{key}"
        if isinstance(value, dict):
            leaves = {k: v for k, v in value.items() if not isinstance(v, (dict, list))}
            for q, v in leaves.items():
                yield {"section": section, "quantity": q, "value": _fmt(v)}
            nested = {k: v for k, v in value.items() if isinstance(v, (dict, list))}
            yield from csv_rows(nested, prefix=section + ".")
        elif isinstance(value, list):
            for rec in value:
                index = {f: _fmt(rec[f]) for f in INDEX_FIELDS if f in rec}
                for q, v in rec.items():
                    if q not in INDEX_FIELDS:
                        yield {"section": section, **index, "quantity": q, "value": _fmt(v)}
        else:
            yield {"section": prefix.rstrip(".") or "report", "quantity": key, "value": _fmt(value)}


def to_csv(doc: dict[str, Any]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    for row in csv_rows(doc):
        writer.writerow(row)
    return buf.getvalue()


def _parse_value(text: str) -> Union[float, int, str]:
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_csv_rows(text: str) -> list[dict[str, Any]]:
    """Parse :func:`to_csv` output; numeric values come back as int/float."""
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        row = {k: v for k, v in row.items() if v != ""}
        row["value"] = _parse_value(row["value"])
        rows.append(row)
    return rows


def write_atomic(path: Union[str, os.PathLike], text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_reports(out_dir: Union[str, os.PathLike], doc: dict[str, Any], argv: list[str]) -> list[str]:
    """Write ``report.json``, ``report.csv`` and the ``meta.json`` sidecar."""
    from . import __version__

    out_dir = os.fspath(out_dir)
    paths = [os.path.join(out_dir, name) for name in ("report.json", "report.csv", "meta.json")]
    meta = {
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "capplan_version": __version__,
        "argv": argv,
    }
    write_atomic(paths[0], to_json(doc))
    write_atomic(paths[1], to_csv(doc))
    write_atomic(paths[2], to_json(meta))
    return paths
