import copy

import numpy as np
import pytest
import yaml

from capplan.errors import ValidationError
from capplan.model import ObjectiveVariant, build_lp
from capplan.scenario_file import load_scenario, parse_scenario, scenario_to_document
from scenario_gen import random_scenario

BASE = {
    "schema_version": 1,
    "horizon": {"last_year": 5, "milestones": [0, 2, 5]},
    "discounting": {"social_rate": "2%"},
    "technologies": [
        {"name": "wind", "overnight_cost": 100, "wacc": 0.05, "lifetime": 6, "variable_cost": 1.5,
         "overrides": [{"year": 2, "overnight_cost": 90, "wacc": "4%"}]},
        {"name": "gas", "annualised_cost": 12.0, "wacc": "7%", "lifetime": 20, "max_invest": 4,
         "variable_cost": [{"year": 0, "value": 30}, {"year": 5, "value": 35}]},
    ],
    "demand": [
        {"year": 0, "period": "winter", "timestep": 1, "value": 8},
        {"year": 2, "period": "summer", "timestep": 1, "value": 5},
    ],
    "operational_weights": [{"year": 0, "period": "winter", "weight": 100}],
}


def test_parse_full_document():
    s = parse_scenario(BASE)
    assert s.horizon.weights == (2, 3, 1)
    assert s.social_rate.value == 0.02
    wind, gas = s.technologies
    assert wind.overnight_cost_at(2) == 90 and wind.wacc_at(2).value == 0.04
    assert gas.max_invest == 4.0 and gas.overnight_cost > 12.0
    assert s.variable_cost_at("wind", 5) == 1.5
    assert s.variable_cost_at("gas", 2) == 0.0 and s.variable_cost_at("gas", 5) == 35
    assert s.timeslices == (("winter", 1), ("summer", 1))
    assert s.operational_weight_at(0, "winter") == 100 and s.operational_weight_at(2, "winter") == 1.0


@pytest.mark.parametrize("mutate, fragment", [
    (lambda d: d.update(schema_version=2), "schema_version"),
    (lambda d: d.update(extra=1), "extra"),
    (lambda d: d["horizon"].update(first_year=0), "horizon"),
    (lambda d: d["technologies"][0].update(colour="blue"), "technologies/0"),
    (lambda d: d["technologies"][0].pop("overnight_cost"), "technologies/0"),
    (lambda d: d["technologies"][0].update(wacc="-2%"), "technologies/0/wacc"),
    (lambda d: d["demand"][0].update(value=-1), "demand/0/value"),
    (lambda d: d["operational_weights"][0].update(weight=0), "operational_weights/0/weight"),
    (lambda d: d.pop("technologies"), "technologies"),
])
def test_schema_violations(mutate, fragment):
    doc = copy.deepcopy(BASE)
    mutate(doc)
    with pytest.raises(ValidationError, match=fragment):
        parse_scenario(doc)


@pytest.mark.parametrize("mutate", [
    lambda d: d["horizon"].update(milestones=[1, 2]),
    lambda d: d["horizon"].update(weights=[1, 1, 1]),
    lambda d: d["demand"][0].update(year=1),
    lambda d: d["demand"].append(dict(d["demand"][0])),
    lambda d: d["technologies"][0].update(annualised_cost=5.0),
    lambda d: d["technologies"][0].update(wacc="150%"),
    lambda d: d["technologies"].append(dict(d["technologies"][0])),
])
def test_domain_violations(mutate):
    doc = copy.deepcopy(BASE)
    mutate(doc)
    with pytest.raises(ValidationError):
        parse_scenario(doc)


def test_load_yaml(tmp_path):
    path = tmp_path / "s.yaml"
    path.write_text(yaml.safe_dump(BASE))
    assert load_scenario(path).horizon.end == 5


def test_load_rejects_bad_yaml(tmp_path):
    path = tmp_path / "s.yaml"
    path.write_text("horizon: [unclosed")
    with pytest.raises(ValidationError):
        load_scenario(path)


def test_bundled_scenarios_load(scenario_dir):
    files = sorted(scenario_dir.glob("*.yaml"))
    assert files
    for f in files:
        load_scenario(f)


@pytest.mark.parametrize("seed", range(10))
def test_document_round_trip(seed):
    s = random_scenario(np.random.default_rng(seed), sparse=bool(seed % 2))
    again = parse_scenario(yaml.safe_load(yaml.safe_dump(scenario_to_document(s))))
    for variant in (ObjectiveVariant.ANNUALISED_MILESTONE, ObjectiveVariant.TOTAL_SALVAGE_MILESTONE):
        a, b = build_lp(s, variant), build_lp(again, variant)
        assert a.columns == b.columns
        np.testing.assert_allclose(a.c, b.c, rtol=1e-12)
        assert np.array_equal(a.form.A, b.form.A) and np.array_equal(a.form.b, b.form.b)
