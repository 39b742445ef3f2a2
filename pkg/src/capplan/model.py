"""Planning LP assembly: variables, constraints and the objective variants.

Decision variables are investments ``x[a, m]`` per technology and milestone
and production ``p[a, m, k, t]`` per milestone, representative period and
timestep. Production is capped by the capacity of still-alive investments
and must cover demand. Investment costs are priced by one of five objective
variants; operational costs are the same for all of them.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Mapping, NamedTuple, Optional, Union

import numpy as np

from .errors import InfeasibleSolutionError, ValidationError
from .finance import DiscountRate, TechnologyParams, discount_factor, salvage_value
from .horizon import Horizon, capacity_window
from .simplex import SolveResult, SolverOptions, StandardFormLP, Status, solve

log = logging.getLogger(__name__)

__all__ = [
    "ObjectiveVariant",
    "Scenario",
    "InvestVar",
    "ProductionVar",
    "LinearProgram",
    "Solution",
    "CostBreakdown",
    "build_lp",
    "investment_coefficient",
    "operational_coefficient",
    "objective_value",
    "solve_scenario",
    "cost_breakdown",
]

FEASIBILITY_ATOL = 1e-6


class ObjectiveVariant(str, enum.Enum):
    TOTAL = "total"
    ANNUALISED = "annualised"
    TOTAL_SALVAGE = "total-salvage"
    ANNUALISED_MILESTONE = "annualised-milestone"
    TOTAL_SALVAGE_MILESTONE = "total-salvage-milestone"

    @property
    def requires_yearly(self) -> bool:
        return self in (ObjectiveVariant.TOTAL, ObjectiveVariant.ANNUALISED)

    @classmethod
    def parse(cls, name: Union[str, "ObjectiveVariant"]) -> "ObjectiveVariant":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        try:
            return cls(key)
        except ValueError:
            choices = ", ".join(v.value for v in cls)
            raise ValidationError(f"unknown objective variant {name!r} (choose from {choices})") from None


Timeslice = tuple[Hashable, Hashable]


@dataclass(frozen=True)
class Scenario:
    """Technologies, horizon, social discount rate and operational data.

    ``demand`` is keyed by ``(milestone, period, timestep)`` in MW,
    ``operational_weight`` by ``(milestone, period)`` and ``variable_cost``
    by ``(technology name, milestone)``. Missing demand is zero, missing
    weights are one and missing variable costs are zero. ``timeslices``
    lists the ``(period, timestep)`` pairs modelled at every milestone; by
    default they are collected from the demand keys in first-seen order.
    """

    technologies: tuple[TechnologyParams, ...]
    horizon: Horizon
    social_rate: DiscountRate
    demand: Mapping[tuple[int, Hashable, Hashable], float] = field(default_factory=dict)
    operational_weight: Mapping[tuple[int, Hashable], float] = field(default_factory=dict)
    variable_cost: Mapping[tuple[str, int], float] = field(default_factory=dict)
    timeslices: Optional[tuple[Timeslice, ...]] = None

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "technologies", tuple(self.technologies))
        set_(self, "social_rate", DiscountRate.parse(self.social_rate))
        names = [t.name for t in self.technologies]
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate technology names: {names}")
        milestones = set(self.horizon.milestones)

        demand = {}
        for (m, k, t), value in dict(self.demand).items():
            if m not in milestones:
                raise ValidationError(f"demand at year {m}, which is not a milestone")
            value = float(value)
            if not (math.isfinite(value) and value >= 0):
                raise ValidationError(f"demand must be finite and >= 0, got {value} at {(m, k, t)}")
            demand[(m, k, t)] = value
        set_(self, "demand", demand)

        if self.timeslices is None:
            seen = dict.fromkeys((k, t) for _, k, t in demand)
            slices = tuple(seen)
        else:
            slices = tuple(tuple(s) for s in self.timeslices)
            if len(set(slices)) != len(slices):
                raise ValidationError("duplicate timeslices")
            unknown = {(k, t) for _, k, t in demand} - set(slices)
            if unknown:
                raise ValidationError(f"demand references unknown timeslices {sorted(map(str, unknown))}")
        set_(self, "timeslices", slices)

        periods = {k for k, _ in slices}
        weights = {}
        for (m, k), w in dict(self.operational_weight).items():
            if m not in milestones:
                raise ValidationError(f"operational weight at year {m}, which is not a milestone")
            if k not in periods:
                raise ValidationError(f"operational weight for unknown period {k!r}")
            w = float(w)
            if not (math.isfinite(w) and w > 0):
                raise ValidationError(f"operational weight must be > 0, got {w} at {(m, k)}")
            weights[(m, k)] = w
        set_(self, "operational_weight", weights)

        costs = {}
        for (name, m), c in dict(self.variable_cost).items():
            if name not in names:
                raise ValidationError(f"variable cost for unknown technology {name!r}")
            if m not in milestones:
                raise ValidationError(f"variable cost at year {m}, which is not a milestone")
            c = float(c)
            if not math.isfinite(c):
                raise ValidationError(f"variable cost must be finite at {(name, m)}")
            costs[(name, m)] = c
        set_(self, "variable_cost", costs)

        r = self.social_rate.value
        for tech in self.technologies:
            for m in self.horizon.milestones:
                if tech.wacc_at(m).value < r:
                    log.warning(
                        "%s: WACC %s below social discount rate %s in year %d",
                        tech.name, tech.wacc_at(m), self.social_rate, m,
                    )
                    break

    def technology(self, name: str) -> TechnologyParams:
        for tech in self.technologies:
            if tech.name == name:
                return tech
        raise KeyError(name)

    def demand_at(self, m: int, k: Hashable, t: Hashable) -> float:
        return self.demand.get((m, k, t), 0.0)

    def operational_weight_at(self, m: int, k: Hashable) -> float:
        return self.operational_weight.get((m, k), 1.0)

    def variable_cost_at(self, name: str, m: int) -> float:
        return self.variable_cost.get((name, m), 0.0)

    def investment_years(self, tech: TechnologyParams) -> tuple[int, ...]:
        return tuple(m for m in self.horizon.milestones if tech.can_invest_in(m))


class InvestVar(NamedTuple):
    tech: str
    year: int

    @property
    def kind(self) -> str:
        return "invest"


class ProductionVar(NamedTuple):
    tech: str
    year: int
    period: Hashable
    timestep: Hashable

    @property
    def kind(self) -> str:
        return "production"


VarKey = Union[InvestVar, ProductionVar]


def _weighted_annuity(tech: TechnologyParams, m: int, years, weights) -> float:
    """Sum of ``weight * (1 + WACC_m) ** -(j - m)`` over the given years."""
    wacc = tech.wacc_at(m)
    total = 0.0
    for j, w in zip(years, weights):
        total += w * discount_factor(wacc, j - m)
    return total


def investment_coefficient(
    scenario: Scenario, variant: ObjectiveVariant, tech: TechnologyParams, m: int
) -> float:
    """Objective coefficient of the investment in ``tech`` at milestone ``m``."""
    variant = ObjectiveVariant.parse(variant)
    horizon = scenario.horizon
    to_now = discount_factor(scenario.social_rate, m)
    if variant is ObjectiveVariant.TOTAL:
        return to_now * tech.overnight_cost_at(m)
    if variant in (ObjectiveVariant.TOTAL_SALVAGE, ObjectiveVariant.TOTAL_SALVAGE_MILESTONE):
        return to_now * (tech.overnight_cost_at(m) - salvage_value(tech, m, horizon.end))
    window = capacity_window(m, tech.lifetime_years, horizon)
    if variant is ObjectiveVariant.ANNUALISED:
        years = window.clipped_years
        weights = [1] * len(years)
    else:
        years = window.active_milestones
        weights = [horizon.weight(j) for j in years]
    return to_now * tech.annualised_cost_at(m) * _weighted_annuity(tech, m, years, weights)


def operational_coefficient(scenario: Scenario, tech: TechnologyParams, m: int, k: Hashable) -> float:
    """Objective coefficient of one unit of production at ``(m, k, t)``, any ``t``."""
    return (
        discount_factor(scenario.social_rate, m)
        * scenario.horizon.weight(m)
        * scenario.variable_cost_at(tech.name, m)
        * scenario.operational_weight_at(m, k)
    )


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """A built planning LP together with its variable and row directories.

    Rows are labelled ``("limit", tech, m, k, t)`` for production limits and
    ``("demand", m, k, t)`` for demand balances.
    """

    form: StandardFormLP
    columns: tuple[VarKey, ...]
    rows: tuple[tuple, ...]
    variant: ObjectiveVariant

    @cached_property
    def index(self) -> dict[VarKey, int]:
        return {key: i for i, key in enumerate(self.columns)}

    def column(self, key: VarKey) -> int:
        return self.index[key]

    @property
    def c(self) -> np.ndarray:
        return self.form.c

    def invest_columns(self) -> list[int]:
        return [i for i, key in enumerate(self.columns) if key.kind == "invest"]

    def production_columns(self) -> list[int]:
        return [i for i, key in enumerate(self.columns) if key.kind == "production"]


def _check_variant(scenario: Scenario, variant: ObjectiveVariant) -> ObjectiveVariant:
    variant = ObjectiveVariant.parse(variant)
    if variant.requires_yearly and not scenario.horizon.is_yearly:
        raise ValidationError(
            f"variant {variant.value} needs every year to be a milestone; "
            "use a *-milestone variant for sparse milestones"
        )
    return variant


def build_lp(scenario: Scenario, variant: Union[ObjectiveVariant, str]) -> LinearProgram:
    variant = _check_variant(scenario, variant)
    horizon = scenario.horizon

    columns: list[VarKey] = []
    cost: list[float] = []
    upper: list[float] = []
    for tech in scenario.technologies:
        for m in scenario.investment_years(tech):
            columns.append(InvestVar(tech.name, m))
            cost.append(investment_coefficient(scenario, variant, tech, m))
            upper.append(tech.max_invest)
    for tech in scenario.technologies:
        for m in horizon.milestones:
            for k, t in scenario.timeslices:
                columns.append(ProductionVar(tech.name, m, k, t))
                cost.append(operational_coefficient(scenario, tech, m, k))
                upper.append(math.inf)
    index = {key: i for i, key in enumerate(columns)}

    n_prod = len(scenario.technologies) * len(horizon.milestones) * len(scenario.timeslices)
    n_demand = len(horizon.milestones) * len(scenario.timeslices)
    A = np.zeros((n_prod + n_demand, len(columns)))
    senses: list[str] = []
    rhs: list[float] = []
    rows: list[tuple] = []

    # investments alive at each milestone, per technology
    alive: dict[tuple[str, int], list[int]] = {}
    for tech in scenario.technologies:
        for j in scenario.investment_years(tech):
            window = capacity_window(j, tech.lifetime_years, horizon)
            for m in window.active_milestones:
                alive.setdefault((tech.name, m), []).append(index[InvestVar(tech.name, j)])

    r = 0
    for tech in scenario.technologies:
        for m in horizon.milestones:
            for k, t in scenario.timeslices:
                A[r, index[ProductionVar(tech.name, m, k, t)]] = 1.0
                for col in alive.get((tech.name, m), ()):
                    A[r, col] = -1.0
                senses.append("<=")
                rhs.append(0.0)
                rows.append(("limit", tech.name, m, k, t))
                r += 1
    for m in horizon.milestones:
        for k, t in scenario.timeslices:
            for tech in scenario.technologies:
                A[r, index[ProductionVar(tech.name, m, k, t)]] = 1.0
            senses.append(">=")
            rhs.append(scenario.demand_at(m, k, t))
            rows.append(("demand", m, k, t))
            r += 1

    form = StandardFormLP(
        c=np.array(cost), A=A, senses=tuple(senses), b=np.array(rhs),
        lower=np.zeros(len(columns)), upper=np.array(upper),
    )
    return LinearProgram(form, tuple(columns), tuple(rows), variant)


@dataclass(frozen=True)
class Solution:
    """Solver outcome mapped back onto investment and production keys."""

    status: Status
    objective: float
    invest: Mapping[tuple[str, int], float]
    production: Mapping[tuple[str, int, Hashable, Hashable], float]
    iterations: int = 0

    @classmethod
    def from_result(cls, lp: LinearProgram, result: SolveResult) -> "Solution":
        invest, production = {}, {}
        if result.optimal:
            for key, value in zip(lp.columns, result.x):
                target = invest if key.kind == "invest" else production
                target[tuple(key)] = float(value)
        return cls(result.status, result.objective, invest, production, result.iterations)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def solve_scenario(
    scenario: Scenario,
    variant: Union[ObjectiveVariant, str],
    options: Optional[SolverOptions] = None,
) -> tuple[LinearProgram, Solution]:
    lp = build_lp(scenario, variant)
    return lp, Solution.from_result(lp, solve(lp.form, options))


def _check_levels(scenario: Scenario, invest_levels, production_levels):
    known_invest = {
        (tech.name, m) for tech in scenario.technologies for m in scenario.investment_years(tech)
    }
    for key in invest_levels:
        if tuple(key) not in known_invest:
            raise ValidationError(f"no investment variable {tuple(key)}")
    slices = set(scenario.timeslices)
    names = {t.name for t in scenario.technologies}
    for key in production_levels:
        name, m, k, t = key
        if name not in names or m not in scenario.horizon.milestones or (k, t) not in slices:
            raise ValidationError(f"no production variable {tuple(key)}")


def _itemise(scenario, variant, invest_levels, production_levels):
    invest_items = {}
    for tech in scenario.technologies:
        for m in scenario.investment_years(tech):
            level = invest_levels.get((tech.name, m), 0.0)
            invest_items[(tech.name, m)] = investment_coefficient(scenario, variant, tech, m) * level
    operational_items = {m: 0.0 for m in scenario.horizon.milestones}
    for tech in scenario.technologies:
        for m in scenario.horizon.milestones:
            for k, t in scenario.timeslices:
                level = production_levels.get((tech.name, m, k, t), 0.0)
                if level:
                    operational_items[m] += operational_coefficient(scenario, tech, m, k) * level
    return invest_items, operational_items


def objective_value(
    scenario: Scenario,
    variant: Union[ObjectiveVariant, str],
    invest_levels: Mapping[tuple[str, int], float],
    production_levels: Mapping[tuple, float],
) -> float:
    """Investment plus operational cost of fixed decisions (no optimisation).

    Missing keys count as zero.
    """
    variant = _check_variant(scenario, variant)
    _check_levels(scenario, invest_levels, production_levels)
    invest_items, operational_items = _itemise(scenario, variant, invest_levels, production_levels)
    return math.fsum(invest_items.values()) + math.fsum(operational_items.values())


@dataclass(frozen=True)
class CostBreakdown:
    """Discounted costs per (technology, milestone) investment and per milestone operation."""

    investment: Mapping[tuple[str, int], float]
    operational: Mapping[int, float]

    @property
    def total_investment(self) -> float:
        return math.fsum(self.investment.values())

    @property
    def total_operational(self) -> float:
        return math.fsum(self.operational.values())

    @property
    def total(self) -> float:
        return self.total_investment + self.total_operational


def cost_breakdown(
    scenario: Scenario, variant: Union[ObjectiveVariant, str], solution: Solution
) -> CostBreakdown:
    """Itemise the objective at ``solution``; rejects infeasible points."""
    lp = build_lp(scenario, variant)
    _check_levels(scenario, solution.invest, solution.production)
    v = np.zeros(len(lp.columns))
    for i, key in enumerate(lp.columns):
        levels = solution.invest if key.kind == "invest" else solution.production
        v[i] = levels.get(tuple(key), 0.0)
    worst_row = float(lp.form.residuals(v).max(initial=0.0))
    worst_bound = float(
        np.max(np.concatenate([lp.form.lower - v, v - lp.form.upper]), initial=0.0)
    )
    if max(worst_row, worst_bound) > FEASIBILITY_ATOL:
        raise InfeasibleSolutionError(
            f"solution violates constraints by {max(worst_row, worst_bound):.3g}"
        )
    invest_items, operational_items = _itemise(
        scenario, lp.variant, solution.invest, solution.production
    )
    return CostBreakdown(invest_items, operational_items)
