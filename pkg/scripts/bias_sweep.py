"""Sweep WACC and lifetime on a sparse milestone horizon and tabulate the
overestimate of the annualised-milestone investment cost.

    python scripts/bias_sweep.py --milestones 0 5 10 20 --last-year 29
"""

import argparse

from capplan import DiscountRate, Horizon, Scenario, TechnologyParams
from capplan.analysis import quantify_milestone_bias


def sweep(horizon, social_rate, waccs, lifetimes):
    for wacc in waccs:
        for lifetime in lifetimes:
            tech = TechnologyParams("a", DiscountRate(wacc), lifetime, overnight_cost=1000.0)
            s = Scenario((tech,), horizon, DiscountRate(social_rate),
                         {(m, "k", 1): 1.0 for m in horizon.milestones})
            report = quantify_milestone_bias(s, solve_optima=False)
            for e in report.investment:
                yield wacc, lifetime, e


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--last-year", type=int, default=29)
    parser.add_argument("--milestones", type=int, nargs="+", default=[0, 5, 10, 20])
    parser.add_argument("--social-rate", type=float, default=0.02)
    parser.add_argument("--waccs", type=float, nargs="+", default=[0.03, 0.05, 0.08])
    parser.add_argument("--lifetimes", type=int, nargs="+", default=[7, 15, 25])
    args = parser.parse_args(argv)

    horizon = Horizon(args.last_year, tuple(args.milestones))
    print(f"milestones {list(horizon.milestones)}  weights {list(horizon.weights)}")
    print(f"{'wacc':>6} {'LT':>4} {'year':>5} {'exact':>10} {'milestone':>10} {'rel gap':>8} {'overcount':>9}")
    for wacc, lifetime, e in sweep(horizon, args.social_rate, args.waccs, args.lifetimes):
        rel = e.annualised_gap / e.exact if e.exact else 0.0
        print(f"{wacc:>6.2%} {lifetime:>4} {e.milestone:>5} {e.exact:>10.2f} "
              f"{e.annualised_milestone:>10.2f} {rel:>8.2%} {e.overcounted_years:>9}")


if __name__ == "__main__":
    main()
