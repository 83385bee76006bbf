"""Tabulate how far each fluid mode sits from the Monte Carlo mean on a grid of (W, L_max)."""

import argparse

import numpy as np

from d2dbackoff.core import ScenarioConfig
from d2dbackoff.experiments import Engine, run_engine


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--windows", type=int, nargs="+", default=[1, 2, 3, 6])
    ap.add_argument("--limits", type=int, nargs="+", default=[2, 3, 7, 20])
    ap.add_argument("--ues", type=int, default=450)
    args = ap.parse_args()

    seeds = tuple(range(args.seeds))
    print(f"{'W':>3} {'L':>3} {'mc':>9} {'+-se':>6} {'literal':>9} {'coupled':>9} {'z_lit':>7} {'z_cpl':>7}")
    for W in args.windows:
        for L in args.limits:
            cfg = ScenarioConfig(total_ues=args.ues, backoff_window=W, max_transmissions=L)
            mc = run_engine(cfg, Engine.MC, seeds)
            lit = run_engine(cfg, Engine.ANALYTIC_LITERAL).cumulative_success
            cpl = run_engine(cfg, Engine.ANALYTIC_COUPLED).cumulative_success
            se = mc.cumulative_success_stderr or np.nan
            print(f"{W:>3} {L:>3} {mc.cumulative_success:9.2f} {se:6.2f} {lit:9.2f} {cpl:9.2f} "
                  f"{(lit - mc.cumulative_success) / se:7.1f} {(cpl - mc.cumulative_success) / se:7.1f}")


if __name__ == "__main__":
    main()
