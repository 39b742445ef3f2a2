"""Scenario documents: YAML (or JSON) files validated against a versioned schema.

Example::

    schema_version: 1
    horizon:
      last_year: 5
      milestones: [0, 2, 5]      # optional, default every year
      weights: [2, 3, 1]         # optional, default forward gaps
    discounting:
      social_rate: 2%
    technologies:
      - name: wind
        overnight_cost: 100      # or annualised_cost, or both if consistent
        wacc: 5%
        lifetime: 6
        max_invest: 50           # optional, null for unbounded
        variable_cost: 3.0       # or [{year: 0, value: 3.0}, ...]
        last_invest_year: 2      # optional
        overrides:               # optional per investment year
          - {year: 2, overnight_cost: 90, wacc: 4%}
    demand:
      - {year: 0, period: winter, timestep: 1, value: 10}
    operational_weights:
      - {year: 0, period: winter, weight: 100}
"""

from __future__ import annotations

import os
from typing import Any, Mapping, Union

import jsonschema
import yaml

from .errors import ValidationError
from .finance import DiscountRate, TechnologyParams, YearOverride
from .horizon import Horizon
from .model import Scenario

__all__ = ["SCHEMA_VERSION", "SCENARIO_SCHEMA", "parse_scenario", "load_scenario", "scenario_to_document"]

SCHEMA_VERSION = 1

_rate = {
    "oneOf": [
        {"type": "number", "minimum": 0},
        {"type": "string", "pattern": r"^\s*[0-9]*\.?[0-9]+([eE][-+]?[0-9]+)?\s*%?\s*$"},
    ]
}
_year = {"type": "integer", "minimum": 0}
_label = {"type": ["string", "integer"]}
_cost = {"type": "number", "minimum": 0}

SCENARIO_SCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "horizon", "discounting", "technologies"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "horizon": {
            "type": "object",
            "additionalProperties": False,
            "required": ["last_year"],
            "properties": {
                "last_year": _year,
                "milestones": {"type": "array", "items": _year, "minItems": 1},
                "weights": {"type": "array", "items": {"type": "integer", "minimum": 1}},
            },
        },
        "discounting": {
            "type": "object",
            "additionalProperties": False,
            "required": ["social_rate"],
            "properties": {"social_rate": _rate},
        },
        "technologies": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name", "wacc", "lifetime"],
                "anyOf": [{"required": ["overnight_cost"]}, {"required": ["annualised_cost"]}],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "overnight_cost": _cost,
                    "annualised_cost": _cost,
                    "wacc": _rate,
                    "lifetime": {"type": "integer", "minimum": 1},
                    "max_invest": {"type": ["number", "null"], "minimum": 0},
                    "last_invest_year": _year,
                    "variable_cost": {
                        "oneOf": [
                            {"type": "number"},
                            {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "additionalProperties": False,
                                    "required": ["year", "value"],
                                    "properties": {"year": _year, "value": {"type": "number"}},
                                },
                            },
                        ]
                    },
                    "overrides": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["year"],
                            "properties": {
                                "year": _year,
                                "overnight_cost": _cost,
                                "annualised_cost": _cost,
                                "wacc": _rate,
                            },
                        },
                    },
                },
            },
        },
        "demand": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["year", "period", "timestep", "value"],
                "properties": {
                    "year": _year, "period": _label, "timestep": _label,
                    "value": {"type": "number", "minimum": 0},
                },
            },
        },
        "operational_weights": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["year", "period", "weight"],
                "properties": {
                    "year": _year, "period": _label,
                    "weight": {"type": "number", "exclusiveMinimum": 0},
                },
            },
        },
    },
}


def _validate(doc: Any) -> None:
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ValidationError(f"scenario schema violation at {where}: {err.message}")


def parse_scenario(doc: Mapping[str, Any]) -> Scenario:
    """Build a :class:`Scenario` from an already-loaded document."""
    _validate(doc)
    try:
        h = doc["horizon"]
        horizon = Horizon(
            h["last_year"],
            tuple(h["milestones"]) if "milestones" in h else None,
            tuple(h["weights"]) if "weights" in h else None,
        )
        techs, variable_cost = [], {}
        for t in doc["technologies"]:
            overrides = {}
            for ov in t.get("overrides", []):
                if ov["year"] in overrides:
                    raise ValidationError(f"{t['name']}: duplicate override for year {ov['year']}")
                overrides[ov["year"]] = YearOverride(
                    ov.get("overnight_cost"),
                    ov.get("annualised_cost"),
                    DiscountRate.parse(ov["wacc"]) if "wacc" in ov else None,
                )
            techs.append(TechnologyParams(
                name=t["name"],
                wacc=DiscountRate.parse(t["wacc"]),
                lifetime_years=t["lifetime"],
                overnight_cost=t.get("overnight_cost"),
                annualised_cost=t.get("annualised_cost"),
                max_invest=t.get("max_invest"),
                overrides=overrides,
                last_invest_year=t.get("last_invest_year"),
            ))
            vc = t.get("variable_cost", 0.0)
            if isinstance(vc, list):
                for rec in vc:
                    variable_cost[(t["name"], rec["year"])] = rec["value"]
            else:
                for m in horizon.milestones:
                    variable_cost[(t["name"], m)] = vc

        demand = {}
        for rec in doc.get("demand", []):
            key = (rec["year"], rec["period"], rec["timestep"])
            if key in demand:
                raise ValidationError(f"duplicate demand record {key}")
            demand[key] = rec["value"]
        weights = {}
        for rec in doc.get("operational_weights", []):
            key = (rec["year"], rec["period"])
            if key in weights:
                raise ValidationError(f"duplicate operational weight {key}")
            weights[key] = rec["weight"]

        return Scenario(
            technologies=tuple(techs),
            horizon=horizon,
            social_rate=DiscountRate.parse(doc["discounting"]["social_rate"]),
            demand=demand,
            operational_weight=weights,
            variable_cost=variable_cost,
        )
    except ValidationError:
        raise
    except (ValueError, KeyError) as exc:
        raise ValidationError(str(exc)) from exc


def load_scenario(path: Union[str, os.PathLike]) -> Scenario:
    """Read and validate a scenario file (YAML or JSON)."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ValidationError(f"cannot parse {os.fspath(path)}: {exc}") from exc
    return parse_scenario(doc)


def scenario_to_document(scenario: Scenario) -> dict[str, Any]:
    """Inverse of :func:`parse_scenario`; rates are written as fractions."""
    h = scenario.horizon
    techs = []
    for t in scenario.technologies:
        rec: dict[str, Any] = {
            "name": t.name,
            "overnight_cost": t.overnight_cost,
            "wacc": t.wacc.value,
            "lifetime": t.lifetime_years,
            "max_invest": None if t.max_invest == float("inf") else t.max_invest,
            "variable_cost": [
                {"year": m, "value": scenario.variable_cost_at(t.name, m)} for m in h.milestones
            ],
        }
        if t.last_invest_year is not None:
            rec["last_invest_year"] = t.last_invest_year
        if t.overrides:
            rec["overrides"] = [
                {"year": y, "overnight_cost": ov.overnight_cost, "wacc": ov.wacc.value}
                for y, ov in sorted(t.overrides.items())
            ]
        techs.append(rec)
    return {
        "schema_version": SCHEMA_VERSION,
        "horizon": {"last_year": h.end, "milestones": list(h.milestones), "weights": list(h.weights)},
        "discounting": {"social_rate": scenario.social_rate.value},
        "technologies": techs,
        "demand": [
            {"year": m, "period": k, "timestep": t, "value": v}
            for (m, k, t), v in scenario.demand.items()
        ],
        "operational_weights": [
            {"year": m, "period": k, "weight": w}
            for (m, k), w in scenario.operational_weight.items()
        ],
    }
