"""Equivalence certificates between objective variants and milestone-bias reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Optional, Union

import numpy as np

from .errors import StructuralMismatchError
from .finance import discount_factor
from .horizon import capacity_window, detect_lifetime_gap
from .model import (
    LinearProgram,
    ObjectiveVariant,
    Scenario,
    build_lp,
    investment_coefficient,
    operational_coefficient,
)
from .simplex import SolverOptions, Status, solve

__all__ = [
    "EquivalenceReport",
    "InvestmentBias",
    "OperationalBias",
    "OptimumBias",
    "BiasReport",
    "relative_deviation",
    "certify_equivalence",
    "exact_investment_coefficient",
    "exact_operational_coefficient",
    "quantify_milestone_bias",
]

EQUIVALENCE_THRESHOLD = 1e-9


def relative_deviation(a: float, b: float) -> float:
    """``|a - b| / max(|a|, |b|)``, defined as 0 when both are 0."""
    scale = max(abs(a), abs(b))
    if scale == 0.0:
        return 0.0
    return abs(a - b) / scale


@dataclass(frozen=True)
class EquivalenceReport:
    variant_a: ObjectiveVariant
    variant_b: ObjectiveVariant
    max_coefficient_deviation: float
    max_objective_deviation: float
    status_a: Status
    status_b: Status
    objective_a: float
    objective_b: float
    threshold: float = EQUIVALENCE_THRESHOLD

    @property
    def passed(self) -> bool:
        return (
            self.max_coefficient_deviation <= self.threshold
            and self.max_objective_deviation <= self.threshold
        )

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def _assert_same_structure(a: LinearProgram, b: LinearProgram) -> None:
    if a.columns != b.columns:
        raise StructuralMismatchError("variants have different variable directories")
    fa, fb = a.form, b.form
    same = (
        a.rows == b.rows
        and fa.senses == fb.senses
        and np.array_equal(fa.A, fb.A)
        and np.array_equal(fa.b, fb.b)
        and np.array_equal(fa.lower, fb.lower)
        and np.array_equal(fa.upper, fb.upper)
    )
    if not same:
        raise StructuralMismatchError("variants have different constraint sets")


def certify_equivalence(
    scenario: Scenario,
    variant_a: Union[ObjectiveVariant, str],
    variant_b: Union[ObjectiveVariant, str],
    threshold: float = EQUIVALENCE_THRESHOLD,
    options: Optional[SolverOptions] = None,
) -> EquivalenceReport:
    """Compare two variants by objective coefficients and by solved optimum."""
    lp_a = build_lp(scenario, variant_a)
    lp_b = build_lp(scenario, variant_b)
    _assert_same_structure(lp_a, lp_b)
    coef_dev = max(
        (relative_deviation(x, y) for x, y in zip(lp_a.c, lp_b.c)), default=0.0
    )
    res_a = solve(lp_a.form, options)
    res_b = solve(lp_b.form, options)
    if res_a.optimal and res_b.optimal:
        obj_dev = relative_deviation(res_a.objective, res_b.objective)
    elif res_a.status == res_b.status:
        obj_dev = 0.0
    else:
        obj_dev = math.inf
    return EquivalenceReport(
        lp_a.variant, lp_b.variant, float(coef_dev), float(obj_dev),
        res_a.status, res_b.status, res_a.objective, res_b.objective, threshold,
    )


def exact_investment_coefficient(scenario: Scenario, tech, m: int) -> float:
    """Yearly-resolution cost of investing at ``m``: one annuity per alive modelled year,
    each discounted at its own year."""
    window = capacity_window(m, tech.lifetime_years, scenario.horizon)
    wacc = tech.wacc_at(m)
    annuities = sum(discount_factor(wacc, j - m) for j in window.clipped_years)
    return discount_factor(scenario.social_rate, m) * tech.annualised_cost_at(m) * annuities


def exact_operational_coefficient(scenario: Scenario, tech, m: int, k: Hashable) -> float:
    """Yearly-resolution cost of producing one unit at milestone ``m``.

    Non-modelled years repeat the milestone's dispatch and unit cost but are
    discounted at their own year.
    """
    block = scenario.horizon.block(m)
    to_now = sum(discount_factor(scenario.social_rate, y) for y in block)
    return to_now * scenario.variable_cost_at(tech.name, m) * scenario.operational_weight_at(m, k)


@dataclass(frozen=True)
class InvestmentBias:
    tech: str
    milestone: int
    exact: float
    annualised_milestone: float
    total_salvage_milestone: float
    overcounted_years: int

    @property
    def annualised_gap(self) -> float:
        return self.annualised_milestone - self.exact

    @property
    def total_salvage_gap(self) -> float:
        return self.total_salvage_milestone - self.exact

    @property
    def lifetime_gap(self) -> bool:
        return self.overcounted_years > 0


@dataclass(frozen=True)
class OperationalBias:
    tech: str
    milestone: int
    period: Hashable
    milestone_weighted: float
    exact: float

    @property
    def gap(self) -> float:
        return self.milestone_weighted - self.exact


@dataclass(frozen=True)
class OptimumBias:
    """Milestone objective at a variant's own optimum versus the exact yearly cost of that plan."""

    variant: ObjectiveVariant
    status: Status
    milestone_objective: float
    exact_objective: float

    @property
    def gap(self) -> float:
        return self.milestone_objective - self.exact_objective


@dataclass(frozen=True)
class BiasReport:
    investment: tuple[InvestmentBias, ...]
    operational: tuple[OperationalBias, ...]
    optimum: tuple[OptimumBias, ...] = field(default=())

    @property
    def max_abs_gap(self) -> float:
        gaps = [abs(e.annualised_gap) for e in self.investment]
        gaps += [abs(e.total_salvage_gap) for e in self.investment]
        gaps += [abs(e.gap) for e in self.operational]
        return max(gaps, default=0.0)


def _exact_cost_vector(scenario: Scenario, lp: LinearProgram) -> np.ndarray:
    out = np.zeros(len(lp.columns))
    for i, key in enumerate(lp.columns):
        tech = scenario.technology(key.tech)
        if key.kind == "invest":
            out[i] = exact_investment_coefficient(scenario, tech, key.year)
        else:
            out[i] = exact_operational_coefficient(scenario, tech, key.year, key.period)
    return out


def quantify_milestone_bias(
    scenario: Scenario, solve_optima: bool = True, options: Optional[SolverOptions] = None
) -> BiasReport:
    """Per-coefficient gaps of the milestone variants against yearly resolution.

    With ``solve_optima`` both milestone variants are also solved and their
    optimal plans re-priced at yearly resolution.
    """
    investment = []
    for tech in scenario.technologies:
        for m in scenario.investment_years(tech):
            investment.append(InvestmentBias(
                tech.name,
                m,
                exact_investment_coefficient(scenario, tech, m),
                investment_coefficient(scenario, ObjectiveVariant.ANNUALISED_MILESTONE, tech, m),
                investment_coefficient(scenario, ObjectiveVariant.TOTAL_SALVAGE_MILESTONE, tech, m),
                detect_lifetime_gap(m, tech.lifetime_years, scenario.horizon).overcounted_years,
            ))
    periods = list(dict.fromkeys(k for k, _ in scenario.timeslices))
    operational = [
        OperationalBias(
            tech.name, m, k,
            operational_coefficient(scenario, tech, m, k),
            exact_operational_coefficient(scenario, tech, m, k),
        )
        for tech in scenario.technologies
        for m in scenario.horizon.milestones
        for k in periods
    ]
    optimum = []
    if solve_optima:
        for variant in (ObjectiveVariant.ANNUALISED_MILESTONE, ObjectiveVariant.TOTAL_SALVAGE_MILESTONE):
            lp = build_lp(scenario, variant)
            res = solve(lp.form, options)
            if res.optimal:
                exact = float(_exact_cost_vector(scenario, lp) @ res.x)
            else:
                exact = math.nan
            optimum.append(OptimumBias(variant, res.status, res.objective, exact))
    return BiasReport(tuple(investment), tuple(operational), tuple(optimum))
