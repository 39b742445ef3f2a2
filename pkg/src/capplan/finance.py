"""Discounting arithmetic for investment costs.

Discount factors, annuity windows, conversion between overnight (total) and
annualised unit costs, and the salvage value of annuities that fall past the
last modelled year.

Every annuity window is indexed from 0 = investment year; the first annuity
is paid in the investment year and is not discounted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

__all__ = [
    "DiscountRate",
    "YearOverride",
    "TechnologyParams",
    "discount_factor",
    "annuity_factor",
    "annualise",
    "totalise",
    "salvage_value",
]

# relative tolerance for overnight/annualised pairs supplied together
CONSISTENCY_RTOL = 1e-9


@dataclass(frozen=True)
class DiscountRate:
    """A yearly discount rate stored as a fraction (0.02 for 2%)."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v):
            raise ValueError(f"discount rate must be finite, got {self.value!r}")
        if v < 0:
            raise ValueError(f"discount rate must be >= 0, got {v}")
        if v >= 1:
            raise ValueError(
                f"discount rate must be a fraction below 1, got {v} "
                "(write percentages as '5%')"
            )
        object.__setattr__(self, "value", v)

    @classmethod
    def parse(cls, raw: Union[str, float, int, "DiscountRate"]) -> "DiscountRate":
        """Accept ``0.02``, ``"0.02"`` or ``"2%"``."""
        if isinstance(raw, DiscountRate):
            return raw
        if isinstance(raw, bool):
            raise ValueError(f"not a discount rate: {raw!r}")
        if isinstance(raw, str):
            text = raw.strip()
            if text.endswith("%"):
                try:
                    return cls(float(text[:-1]) / 100.0)
                except ValueError as exc:
                    raise ValueError(f"not a discount rate: {raw!r}") from exc
            try:
                return cls(float(text))
            except ValueError as exc:
                raise ValueError(f"not a discount rate: {raw!r}") from exc
        return cls(float(raw))

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return f"{self.value * 100:g}%"


RateLike = Union[DiscountRate, float, int, str]


def _rate(rate: RateLike) -> float:
    return DiscountRate.parse(rate).value


def discount_factor(rate: RateLike, periods: int) -> float:
    """Return ``(1 + rate) ** -periods``; exactly 1.0 for zero periods."""
    if periods < 0:
        raise ValueError(f"periods must be >= 0, got {periods}")
    if periods == 0:
        return 1.0
    return (1.0 + _rate(rate)) ** (-periods)


def annuity_factor(wacc: RateLike, lifetime: int, first_period: int, last_period: int) -> float:
    """Sum of ``(1 + wacc) ** -n`` for n in ``[first_period, last_period]``.

    The window must lie inside the lifetime, i.e. within ``[0, lifetime - 1]``.
    """
    if lifetime < 1:
        raise ValueError(f"lifetime must be >= 1, got {lifetime}")
    if first_period < 0 or last_period > lifetime - 1 or last_period < first_period:
        raise ValueError(
            f"annuity window [{first_period}, {last_period}] outside [0, {lifetime - 1}]"
        )
    r = _rate(wacc)
    count = last_period - first_period + 1
    if r == 0.0:
        return float(count)
    # closed-form geometric sum written with expm1/log1p so tiny rates keep precision
    log_growth = math.log1p(r)
    head = math.exp(-first_period * log_growth)
    return head * math.expm1(-count * log_growth) / math.expm1(-log_growth)


def annualise(total_cost: float, wacc: RateLike, lifetime: int) -> float:
    """Constant annuity whose discounted sum over the lifetime equals ``total_cost``.

    Zero WACC returns ``total_cost / lifetime``, the limit of the closed form.
    """
    if lifetime < 1:
        raise ValueError(f"lifetime must be >= 1, got {lifetime}")
    if total_cost < 0:
        raise ValueError(f"total cost must be >= 0, got {total_cost}")
    r = _rate(wacc)
    if r == 0.0:
        return total_cost / lifetime
    log_growth = math.log1p(r)
    # 1 - (1 + r)^-LT
    remaining = -math.expm1(-lifetime * log_growth)
    return r / ((1.0 + r) * remaining) * total_cost


def totalise(annualised_cost: float, wacc: RateLike, lifetime: int) -> float:
    """Overnight cost equivalent to a constant annuity over the lifetime."""
    return annualised_cost * annuity_factor(wacc, lifetime, 0, lifetime - 1)


@dataclass(frozen=True)
class YearOverride:
    """Investment-year specific cost data; unset fields fall back to the base values."""

    overnight_cost: Optional[float] = None
    annualised_cost: Optional[float] = None
    wacc: Optional[DiscountRate] = None

    def __post_init__(self):
        if self.wacc is not None:
            object.__setattr__(self, "wacc", DiscountRate.parse(self.wacc))


def _resolve_costs(name, overnight, annualised, wacc, lifetime):
    if overnight is None and annualised is None:
        raise ValueError(f"{name}: one of overnight_cost or annualised_cost is required")
    if overnight is not None and overnight < 0:
        raise ValueError(f"{name}: overnight_cost must be >= 0")
    if annualised is not None and annualised < 0:
        raise ValueError(f"{name}: annualised_cost must be >= 0")
    if overnight is None:
        return totalise(annualised, wacc, lifetime), float(annualised)
    derived = annualise(overnight, wacc, lifetime)
    if annualised is None:
        return float(overnight), derived
    if not math.isclose(annualised, derived, rel_tol=CONSISTENCY_RTOL, abs_tol=0.0) and not (
        annualised == 0.0 and derived == 0.0
    ):
        raise ValueError(
            f"{name}: annualised_cost {annualised!r} inconsistent with overnight_cost "
            f"{overnight!r} at wacc {float(wacc)} and lifetime {lifetime} (expected {derived!r})"
        )
    return float(overnight), float(annualised)


@dataclass(frozen=True)
class TechnologyParams:
    """Cost and lifetime data for one investable technology.

    Give ``overnight_cost`` or ``annualised_cost`` (or both, if consistent);
    the missing one is derived. ``overrides`` maps an investment year to
    cost/WACC values that replace the base ones for investments in that year.
    An override that changes only the WACC keeps the overnight cost and
    re-derives the annuity.

    ``last_invest_year`` closes the investment window; ``None`` allows
    investment at every milestone.
    """

    name: str
    wacc: DiscountRate
    lifetime_years: int
    overnight_cost: Optional[float] = None
    annualised_cost: Optional[float] = None
    max_invest: float = math.inf
    overrides: Mapping[int, YearOverride] = field(default_factory=dict)
    last_invest_year: Optional[int] = None

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "wacc", DiscountRate.parse(self.wacc))
        if int(self.lifetime_years) != self.lifetime_years or self.lifetime_years < 1:
            raise ValueError(f"{self.name}: lifetime_years must be a positive integer")
        set_(self, "lifetime_years", int(self.lifetime_years))
        if self.max_invest is None:
            set_(self, "max_invest", math.inf)
        if not self.max_invest >= 0:
            raise ValueError(f"{self.name}: max_invest must be >= 0")
        set_(self, "max_invest", float(self.max_invest))
        overnight, annualised = _resolve_costs(
            self.name, self.overnight_cost, self.annualised_cost, self.wacc, self.lifetime_years
        )
        set_(self, "overnight_cost", overnight)
        set_(self, "annualised_cost", annualised)

        resolved = {}
        for year, ov in dict(self.overrides).items():
            if not isinstance(ov, YearOverride):
                ov = YearOverride(**ov)
            if int(year) < 0:
                raise ValueError(f"{self.name}: override year must be >= 0, got {year}")
            wacc = ov.wacc if ov.wacc is not None else self.wacc
            if ov.overnight_cost is None and ov.annualised_cost is None:
                o, a = _resolve_costs(self.name, overnight, None, wacc, self.lifetime_years)
            else:
                o, a = _resolve_costs(
                    f"{self.name}[{year}]", ov.overnight_cost, ov.annualised_cost,
                    wacc, self.lifetime_years,
                )
            resolved[int(year)] = YearOverride(overnight_cost=o, annualised_cost=a, wacc=wacc)
        set_(self, "overrides", resolved)

    def _at(self, year: int) -> Optional[YearOverride]:
        return self.overrides.get(year)

    def overnight_cost_at(self, year: int) -> float:
        ov = self._at(year)
        return ov.overnight_cost if ov else self.overnight_cost

    def annualised_cost_at(self, year: int) -> float:
        ov = self._at(year)
        return ov.annualised_cost if ov else self.annualised_cost

    def wacc_at(self, year: int) -> DiscountRate:
        ov = self._at(year)
        return ov.wacc if ov else self.wacc

    def can_invest_in(self, year: int) -> bool:
        return self.last_invest_year is None or year <= self.last_invest_year


def salvage_value(tech: TechnologyParams, invest_year: int, last_modelled_year: int) -> float:
    """Discounted annuities of an investment that fall after the last modelled year.

    Referenced to the investment year. Zero when the lifetime ends at or
    before ``last_modelled_year``.
    """
    if invest_year > last_modelled_year:
        raise ValueError(
            f"invest_year {invest_year} is after the last modelled year {last_modelled_year}"
        )
    lifetime = tech.lifetime_years
    first = last_modelled_year + 1 - invest_year
    if first > lifetime - 1:
        return 0.0
    return tech.annualised_cost_at(invest_year) * annuity_factor(
        tech.wacc_at(invest_year), lifetime, first, lifetime - 1
    )
