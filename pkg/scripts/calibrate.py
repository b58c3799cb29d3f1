"""Planner weight calibration on the intro scenario.

Sweeps (w_R, w_U, w_O, w_V) around the shipped defaults and evaluates each
combination against the intro scenario's expectation record: constant speed
with the filter, an acceleration phase then a braking phase without it, and
no contact in either mode. The defaults in PlannerConfig are the centre of
the passing region found this way; rerun after changing the planner.

Usage: python scripts/calibrate.py [--scenario intro_truck_shadow] [--quick]
"""
from __future__ import annotations

import argparse
import dataclasses
import itertools
import sys

from riskshadow.planner import PlannerConfig
from riskshadow.scenarios import catalog, check_scenario

FULL_GRID = {
    "w_R": (8.0, 10.0, 12.0),
    "w_U": (0.01, 0.02, 0.05),
    "w_O": (0.02, 0.05, 0.07),
    "w_V": (0.0, 0.03, 0.05, 0.1),
}
# the defaults and their immediate neighbours only
QUICK_GRID = {
    "w_R": (8.0, 10.0, 12.0),
    "w_U": (0.02,),
    "w_O": (0.04, 0.05, 0.07),
    "w_V": (0.04, 0.05, 0.06),
}


def sweep(name: str, grid: dict):
    cat = catalog()
    base = cat.get(name)
    expect = cat.expectation(name)
    keys = list(grid)
    for values in itertools.product(*(grid[k] for k in keys)):
        weights = dict(zip(keys, values))
        sc = base.replace(planner_cfg=dataclasses.replace(base.planner_cfg, **weights))
        res = check_scenario(sc, expect)
        yield weights, res


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="sweep planner weights on a catalog scenario")
    ap.add_argument("--scenario", default="intro_truck_shadow")
    ap.add_argument("--quick", action="store_true", help="only the defaults' neighbourhood")
    args = ap.parse_args(argv)
    default = PlannerConfig()
    grid = QUICK_GRID if args.quick else FULL_GRID
    n_pass = 0
    for weights, res in sweep(args.scenario, grid):
        is_default = all(getattr(default, k) == v for k, v in weights.items())
        n_pass += res.passed
        label = " ".join(f"{k}={v:g}" for k, v in weights.items())
        first = "" if res.passed else res.failures[0]
        print(f"{'PASS' if res.passed else 'fail'} {label}{'  <- default' if is_default else ''}  {first}",
              flush=True)
    print(f"{n_pass} passing combinations")
    return 0


if __name__ == "__main__":
    sys.exit(main())
