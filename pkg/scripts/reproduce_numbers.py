"""Print the reference numbers of the discounting study next to the library values.

    python scripts/reproduce_numbers.py
"""

from capplan import DiscountRate, Horizon, Scenario, TechnologyParams
from capplan.finance import annualise, salvage_value
from capplan.horizon import derive_milestone_weights
from capplan.model import InvestVar, ObjectiveVariant, build_lp

ROWS = []


def row(label, value, reference):
    ROWS.append((label, value, reference))


def main():
    row("annualised cost, 100 @ 2% over 5 yr", annualise(100.0, 0.02, 5), 20.80)
    row("annualised cost, 100 @ 5% over 8 yr", annualise(100.0, 0.05, 8), 14.74)

    tech = TechnologyParams("a", DiscountRate(0.05), 8, overnight_cost=100.0)
    sv = salvage_value(tech, 0, 4)
    row("salvage value, invest 0, last year 4", sv, 33.01)
    row("overnight cost net of salvage", 100.0 - sv, 66.99)

    weights = derive_milestone_weights((0, 2, 5), 5)
    print("milestone weights for {0, 2, 5}, last year 5:", list(weights))

    horizon = Horizon(5, (0, 2, 5))
    tech = TechnologyParams("a", DiscountRate(0.05), 6, overnight_cost=100.0)
    s = Scenario((tech,), horizon, DiscountRate(0.02), {(m, "k", 1): 10.0 for m in horizon.milestones})
    ca = tech.annualised_cost
    for variant in (ObjectiveVariant.ANNUALISED_MILESTONE, ObjectiveVariant.TOTAL_SALVAGE_MILESTONE):
        lp = build_lp(s, variant)
        coefs = [lp.c[lp.column(InvestVar("a", m))] for m in horizon.milestones]
        print(f"{variant.value:>24}: " + "  ".join(f"x_{m}={c:9.4f}" for m, c in zip(horizon.milestones, coefs)))
    print(f"{'':>24}  (annualised cost {ca:.4f}, lifetime 6, WACC 5%, social rate 2%)")

    print()
    print(f"{'quantity':<40} {'computed':>10} {'reference':>10}")
    for label, value, reference in ROWS:
        ok = "ok" if abs(value - reference) <= 0.005 else "MISMATCH"
        print(f"{label:<40} {value:>10.4f} {reference:>10.2f}  {ok}")


if __name__ == "__main__":
    main()
