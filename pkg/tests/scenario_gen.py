"""Seeded random scenarios for the property suites."""

from __future__ import annotations

import numpy as np

from capplan import DiscountRate, Horizon, Scenario, TechnologyParams, YearOverride


def random_scenario(
    rng: np.random.Generator,
    *,
    sparse: bool = False,
    cover_lifetimes: bool = False,
    positive_wacc: bool = False,
    max_end: int = 12,
    max_techs: int = 3,
    max_lifetime: int = 30,
    social_rate=None,
    wacc=None,
    with_overrides: bool = True,
) -> Scenario:
    end = int(rng.integers(0, max_end + 1))
    if sparse and end >= 1:
        inner = [y for y in range(1, end + 1) if rng.random() < 0.35]
        horizon = Horizon(end, tuple([0] + inner))
    else:
        horizon = Horizon.yearly(end)

    r = float(rng.uniform(0.0, 0.08)) if social_rate is None else social_rate
    techs = []
    for i in range(int(rng.integers(1, max_techs + 1))):
        if cover_lifetimes:
            lifetime = int(rng.integers(1, end + 2))
            last_invest = end - lifetime + 1
        else:
            lifetime = int(rng.integers(1, max_lifetime + 1))
            last_invest = None
        if wacc is not None:
            w = wacc
        else:
            w = float(rng.uniform(max(r, 1e-3) if positive_wacc else r, 0.2))
        overrides = {}
        if with_overrides:
            for y in horizon.milestones:
                if rng.random() < 0.3:
                    ov_wacc = float(rng.uniform(max(r, 1e-3) if positive_wacc else r, 0.2))
                    overrides[y] = YearOverride(
                        overnight_cost=float(rng.uniform(10, 2000)),
                        wacc=DiscountRate(ov_wacc) if wacc is None else DiscountRate(wacc),
                    )
        techs.append(TechnologyParams(
            name=f"tech{i}",
            wacc=DiscountRate(w),
            lifetime_years=lifetime,
            overnight_cost=float(rng.uniform(10, 2000)),
            overrides=overrides,
            last_invest_year=last_invest,
        ))

    n_slices = int(rng.integers(1, 3))
    slices = [("p0", t) for t in range(n_slices)]
    demand = {
        (m, k, t): float(rng.uniform(0, 50))
        for m in horizon.milestones for k, t in slices
    }
    weights = {(m, "p0"): float(rng.uniform(1, 100)) for m in horizon.milestones}
    variable_cost = {
        (tech.name, m): float(rng.uniform(0, 50)) for tech in techs for m in horizon.milestones
    }
    return Scenario(
        technologies=tuple(techs),
        horizon=horizon,
        social_rate=DiscountRate(r),
        demand=demand,
        operational_weight=weights,
        variable_cost=variable_cost,
        timeslices=tuple(slices),
    )


def random_small_lp(rng: np.random.Generator):
    """Bounded LP with at most 8 columns and independent equality rows."""
    while True:
        n = int(rng.integers(1, 9))
        m = int(rng.integers(1, 5))
        A = rng.integers(-5, 6, size=(m, n)).astype(float)
        b = rng.integers(-4, 12, size=m).astype(float)
        senses = list(rng.choice(["<=", ">=", "="], size=m, p=[0.5, 0.35, 0.15]))
        lower = rng.integers(-2, 2, size=n).astype(float)
        has_upper = rng.random(n) < (0.5 if n <= 5 else 0.25)
        upper = np.where(has_upper, lower + rng.integers(1, 6, size=n), np.inf)
        c = rng.integers(-5, 6, size=n).astype(float)
        # unbounded-above columns get non-negative cost so the LP is bounded
        c = np.where(np.isinf(upper), np.abs(c), c)
        eq = A[[i for i, s in enumerate(senses) if s == "="]]
        if eq.shape[0] and np.linalg.matrix_rank(eq) < eq.shape[0]:
            continue
        return c, A, senses, b, lower, upper
