"""Time structure of a planning study: modelled years, milestones and weights.

Years are consecutive integer offsets ``0 .. end`` (``end`` inclusive). A
milestone represents itself and the non-modelled years up to the next
milestone; its weight is the number of years it stands for.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

__all__ = [
    "Horizon",
    "LifetimeWindow",
    "LifetimeGap",
    "derive_milestone_weights",
    "capacity_window",
    "detect_lifetime_gap",
]


def _check_milestones(milestones: Sequence[int], horizon_end: int) -> tuple[int, ...]:
    ms = tuple(int(m) for m in milestones)
    if horizon_end < 0:
        raise ValueError(f"horizon end must be >= 0, got {horizon_end}")
    if not ms:
        raise ValueError("at least one milestone is required")
    if ms[0] != 0:
        raise ValueError(f"first milestone must be year 0, got {ms[0]}")
    if any(b <= a for a, b in zip(ms, ms[1:])):
        raise ValueError(f"milestones must be strictly increasing: {list(ms)}")
    if ms[-1] > horizon_end:
        raise ValueError(f"milestone {ms[-1]} beyond horizon end {horizon_end}")
    return ms


def derive_milestone_weights(milestones: Sequence[int], horizon_end: int) -> list[int]:
    """Forward-gap weights: each milestone covers the years until the next one.

    >>> derive_milestone_weights([0, 2, 5], 5)
    [2, 3, 1]
    """
    ms = _check_milestones(milestones, horizon_end)
    ends = ms[1:] + (horizon_end + 1,)
    return [nxt - m for m, nxt in zip(ms, ends)]


@dataclass(frozen=True)
class Horizon:
    """Modelled years ``0..end`` with milestone years and their weights.

    ``milestones`` defaults to every year; ``weights`` defaults to the
    forward-gap rule. Supplied weights must be positive integers summing to
    the number of years.
    """

    end: int
    milestones: Optional[tuple[int, ...]] = None
    weights: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        end = int(self.end)
        object.__setattr__(self, "end", end)
        ms = range(end + 1) if self.milestones is None else self.milestones
        ms = _check_milestones(ms, end)
        object.__setattr__(self, "milestones", ms)
        if self.weights is None:
            weights = tuple(derive_milestone_weights(ms, end))
        else:
            weights = tuple(self.weights)
            if len(weights) != len(ms):
                raise ValueError(f"expected {len(ms)} weights, got {len(weights)}")
            if any(int(w) != w or w < 1 for w in weights):
                raise ValueError(f"weights must be positive integers: {list(weights)}")
            weights = tuple(int(w) for w in weights)
            if sum(weights) != end + 1:
                raise ValueError(
                    f"weights {list(weights)} sum to {sum(weights)}, horizon has {end + 1} years"
                )
        object.__setattr__(self, "weights", weights)

    @classmethod
    def yearly(cls, end: int) -> "Horizon":
        return cls(end)

    @property
    def years(self) -> range:
        return range(self.end + 1)

    @property
    def is_yearly(self) -> bool:
        return len(self.milestones) == self.end + 1

    def weight(self, milestone: int) -> int:
        return self.weights[self.milestones.index(milestone)]

    def block(self, milestone: int) -> range:
        """Years represented by ``milestone``: up to, not including, the next one."""
        i = self.milestones.index(milestone)
        stop = self.milestones[i + 1] if i + 1 < len(self.milestones) else self.end + 1
        return range(milestone, stop)

    def milestone_of(self, year: int) -> int:
        """The milestone whose block contains ``year``."""
        if not 0 <= year <= self.end:
            raise ValueError(f"year {year} outside horizon 0..{self.end}")
        return max(m for m in self.milestones if m <= year)


@dataclass(frozen=True)
class LifetimeWindow:
    """Years an investment is alive and the milestones inside that span.

    ``active_years`` is the unclipped lifetime span; ``active_milestones``
    only holds milestones within the horizon.
    """

    invest_year: int
    lifetime: int
    active_years: range
    active_milestones: tuple[int, ...]
    horizon_end: int

    @property
    def last_alive_year(self) -> int:
        return self.active_years[-1]

    @property
    def clipped_years(self) -> range:
        return range(self.invest_year, min(self.last_alive_year, self.horizon_end) + 1)

    def contains(self, year: int) -> bool:
        return year in self.active_years


def capacity_window(invest_year: int, lifetime: int, horizon: Horizon) -> LifetimeWindow:
    """Lifetime span of an investment made at milestone ``invest_year``."""
    if invest_year not in horizon.milestones:
        raise ValueError(f"investment year {invest_year} is not a milestone")
    if lifetime < 1:
        raise ValueError(f"lifetime must be >= 1, got {lifetime}")
    last = invest_year + lifetime - 1
    reach = min(last, horizon.end)
    active = tuple(m for m in horizon.milestones if invest_year <= m <= reach)
    return LifetimeWindow(invest_year, lifetime, range(invest_year, last + 1), active, horizon.end)


@dataclass(frozen=True)
class LifetimeGap:
    """Years charged through milestone blocks after the asset has retired."""

    invest_year: int
    lifetime: int
    overcounted_years: int
    interval: Optional[tuple[int, int]]

    @property
    def flagged(self) -> bool:
        return self.overcounted_years > 0


def detect_lifetime_gap(invest_year: int, lifetime: int, horizon: Horizon) -> LifetimeGap:
    """Count represented years beyond end-of-life for an investment.

    Milestone weighting charges an alive milestone for its whole block, so
    if the lifetime ends inside a block the remaining block years are
    overcounted.
    """
    window = capacity_window(invest_year, lifetime, horizon)
    if not window.active_milestones:
        return LifetimeGap(invest_year, lifetime, 0, None)
    last_block = horizon.block(window.active_milestones[-1])
    eol = window.last_alive_year
    if eol >= last_block[-1]:
        return LifetimeGap(invest_year, lifetime, 0, None)
    return LifetimeGap(invest_year, lifetime, last_block[-1] - eol, (eol + 1, last_block[-1]))
