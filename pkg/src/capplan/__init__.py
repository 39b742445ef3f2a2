"""Multi-year capacity-expansion planning with explicit investment-cost discounting.

Overnight versus annualised investment costs, salvage value for truncated
horizons, milestone-year weighting, and a small LP builder with an embedded
simplex solver to compare the formulations end to end.
"""

__version__ = "0.1.0"

from .finance import (
    DiscountRate,
    TechnologyParams,
    YearOverride,
    annualise,
    annuity_factor,
    discount_factor,
    salvage_value,
    totalise,
)
from .horizon import Horizon, capacity_window, derive_milestone_weights, detect_lifetime_gap
from .model import (
    ObjectiveVariant,
    Scenario,
    build_lp,
    cost_breakdown,
    objective_value,
    solve_scenario,
)
from .simplex import StandardFormLP, Status, solve
from .analysis import certify_equivalence, quantify_milestone_bias
from .scenario_file import load_scenario, parse_scenario

__all__ = [
    "DiscountRate",
    "TechnologyParams",
    "YearOverride",
    "annualise",
    "annuity_factor",
    "discount_factor",
    "salvage_value",
    "totalise",
    "Horizon",
    "capacity_window",
    "derive_milestone_weights",
    "detect_lifetime_gap",
    "ObjectiveVariant",
    "Scenario",
    "build_lp",
    "cost_breakdown",
    "objective_value",
    "solve_scenario",
    "StandardFormLP",
    "Status",
    "solve",
    "certify_equivalence",
    "quantify_milestone_bias",
    "load_scenario",
    "parse_scenario",
]
