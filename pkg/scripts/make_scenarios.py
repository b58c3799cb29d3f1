"""Regenerate the shipped scenario files under src/riskshadow/scenarios/data.

Only topology and rough timing are fixed, so every scene here is a
reconstruction: a four-way junction with 3.5 m lanes centred
on the origin, right-hand traffic, cars 4.5 x 1.8 m, trucks 10 x 2.5 m.
Road names used below:

    ego road      west -> east on y = -1.75
    cross road    north -> south on x = -1.75 (other car), south -> north on x = +1.75

Usage: python scripts/make_scenarios.py [--out DIR] [--check]
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path as FsPath

import numpy as np

from riskshadow.encounter import AgentState
from riskshadow.geometry import Footprint, Path
from riskshadow.scenario_io import dumps
from riskshadow.scenarios import DATA_DIR
from riskshadow.simulator import AgentSpec, Scenario

CAR = Footprint(4.5, 1.8)
TRUCK = Footprint(10.0, 2.5)
LANE = 1.75
FAR = 200.0


def _arc(cx, cy, r, a0, a1, n=12):
    return [(round(cx + r * math.cos(a), 6), round(cy + r * math.sin(a), 6)) for a in np.linspace(a0, a1, n)]


def straight(p0, p1) -> Path:
    return Path([p0, p1])


def left_turn_north_to_west(r=5.25, start=-60.0, end=-60.0) -> Path:
    """Northbound on x=+1.75, left into westbound y=+1.75."""
    cx, cy = LANE - r, LANE - r
    return Path([(LANE, start)] + _arc(cx, cy, r, 0.0, math.pi / 2) + [(end, LANE)])


def right_turn_south_to_west(r=10.0, start=60.0, end=-60.0) -> Path:
    """Southbound on x=-1.75, right into westbound y=+1.75."""
    cx, cy = -LANE - r, LANE + r
    return Path([(-LANE, start)] + _arc(cx, cy, r, 0.0, -math.pi / 2) + [(end, LANE)])


def right_turn_east_to_south(r=7.0, start=-60.0, end=-60.0) -> Path:
    """Eastbound on y=-1.75, right into southbound x=+1.75."""
    cx, cy = LANE - r, -LANE - r
    return Path([(start, -LANE)] + _arc(cx, cy, r, math.pi / 2, 0.0) + [(LANE, end)])


def stop_schedule(y0, v0, t_brake, y_stop, t_go=None, a_go=2.0):
    """Constant-speed approach, brake to a stop at ``y_stop`` (distance along
    the road), optionally pull away again at ``t_go``."""
    y_brake = y0 - v0 * t_brake
    decel = v0 * v0 / (2.0 * (y_brake - y_stop))
    sched = [(0.0, 0.0), (t_brake, -round(decel, 4))]
    if t_go is not None:
        sched.append((t_go, a_go))
    return tuple(sched)


def agent(aid, path, l, v, fp, schedule=()):
    return AgentSpec(AgentState(aid, path, float(l), float(v), fp), tuple(schedule))


def ego_east(x0, v, end=FAR):
    return agent("ego", straight((x0, -LANE), (end, -LANE)), 0.0, v, CAR)


def car_south(y0, v, schedule=(), end=-60.0):
    return agent("car", straight((-LANE, y0), (-LANE, end)), 0.0, v, CAR, schedule)


SAFE = {"kind": "min_distance", "above": 0.0}


def intro_rules(car="car"):
    return [
        {"kind": "filter", "agent": car, "t": [0.0, 4.0], "filtered": True, "quantifier": "all"},
        {"kind": "filter", "agent": car, "t": [6.0, 10.0], "filtered": False, "quantifier": "all"},
        {"kind": "accel", "mode": "risk_shadowing", "t": [0.0, 10.0], "check": "max_abs_below", "value": 0.1},
        {"kind": "accel", "mode": "baseline", "t": [0.0, 3.0], "check": "exists_above", "value": 0.3},
        {"kind": "accel", "mode": "baseline", "t": [3.0, 8.0], "check": "exists_below", "value": -0.3},
        SAFE,
    ]


def variant_rules(car="car"):
    return [
        {"kind": "filter", "agent": car, "t": [0.0, 2.0], "filtered": True, "quantifier": "all"},
        {"kind": "accel", "mode": "risk_shadowing", "t": [0.0, 10.0], "check": "max_abs_below", "value": 0.1},
        {"kind": "accel", "mode": "baseline", "t": [0.0, 10.0], "check": "exists_above", "value": 0.3},
        SAFE,
    ]


def variant_rules_brake(car="car"):
    rules = variant_rules(car)
    rules[2] = {"kind": "accel", "mode": "baseline", "t": [0.0, 10.0], "check": "exists_below", "value": -0.3}
    return rules


def snapshot_rules(filtered: dict):
    return [
        {"kind": "filter", "agent": aid, "t": [0.0, 0.0], "filtered": f, "quantifier": "all"}
        for aid, f in filtered.items()
    ] + [SAFE]


# --- intro scenario ----------------------------------------------------------

def intro_truck_shadow():
    notes = ("Ego crosses at 8 m/s. A fast car (13 m/s) comes from the north; a truck that is already "
             "inside the junction turns left across the car's lane. The car brakes and waits behind the "
             "truck, then pulls away once the ego is through. Reconstructed geometry; the car's stop "
             "position and the truck's speed were chosen so the car's first predicted collision is "
             "with the truck until about t = 5 s.")
    agents = (
        ego_east(-35.0, 8.0),
        car_south(60.0, 13.0, stop_schedule(60.0, 13.0, 1.5, 9.0, t_go=6.0)),
        agent("truck", left_turn_north_to_west(), 54.0, 2.5, TRUCK),
    )
    sc = Scenario("intro_truck_shadow", agents, "ego", duration=10.0, notes=notes)
    return sc, {"notes": "filter window +-1 s around the expected switch near 5 s", "rules": intro_rules()}


# --- crossing / following / turning variants ---------------------------------

def crossing():
    notes = ("A truck drives straight through the junction westbound on y = +1.75 and blocks the fast "
             "car coming from the north; the ego crosses eastbound at constant speed.")
    agents = (
        ego_east(-35.0, 8.0),
        car_south(55.0, 12.0, stop_schedule(55.0, 12.0, 1.5, 10.0)),
        agent("truck", straight((30.0, LANE), (-FAR, LANE)), 20.0, 3.0, TRUCK),
    )
    sc = Scenario("crossing", agents, "ego", duration=10.0, notes=notes)
    return sc, {"rules": variant_rules()}


def following():
    notes = ("The fast car follows a slow truck down the cross road; the truck turns right into the "
             "far westbound lane, so the car's predicted path runs into the truck before it reaches "
             "the ego road.")
    agents = (
        ego_east(-35.0, 8.0),
        car_south(40.0, 11.0, stop_schedule(40.0, 11.0, 1.0, 14.0)),
        agent("truck", right_turn_south_to_west(), 45.0, 2.5, TRUCK),
    )
    sc = Scenario("following", agents, "ego", duration=10.0, notes=notes)
    return sc, {"rules": variant_rules()}


def turning():
    notes = ("The ego turns right at 6 m/s through the junction; the fast car from the north is held "
             "up by a truck crossing westbound on y = +1.75.")
    agents = (
        agent("ego", right_turn_east_to_south(), 30.0, 6.0, CAR),
        car_south(50.0, 12.0, stop_schedule(50.0, 12.0, 1.5, 10.0)),
        agent("truck", straight((30.0, LANE), (-FAR, LANE)), 22.0, 3.0, TRUCK),
    )
    sc = Scenario("turning", agents, "ego", duration=10.0, notes=notes)
    return sc, {"rules": variant_rules()}


# --- filter and non-filter snapshots -----------------------------------------

SNAP = 3.0


def longitudinal_brake():
    notes = "Three cars in one lane; the middle car brakes hard, so the ego cannot reach the lead car."
    lane = straight((0.0, -LANE), (400.0, -LANE))
    agents = (
        agent("ego", lane, 0.0, 10.0, CAR),
        agent("middle", lane, 30.0, 4.0, CAR, ((0.0, -4.0),)),
        agent("lead", lane, 60.0, 8.0, CAR),
    )
    sc = Scenario("longitudinal_brake", agents, "ego", duration=SNAP, notes=notes)
    return sc, {"rules": snapshot_rules({"lead": True, "middle": False})}


def snapshot_of(name, builder, filtered):
    sc, _ = builder()
    return sc.replace(name=name, duration=SNAP, notes=f"t = 0 of the {sc.name} scene. " + sc.notes), {
        "rules": snapshot_rules(filtered)}


def intersection_truck_shadow():
    return snapshot_of("intersection_truck_shadow", intro_truck_shadow, {"car": True})


def intersection_truck_crossing():
    return snapshot_of("intersection_truck_crossing", crossing, {"car": True})


def intersection_truck_following():
    return snapshot_of("intersection_truck_following", following, {"car": True})


def longitudinal_equal_speed():
    notes = "Three cars in one lane, all at 10 m/s: nobody is predicted to close in, nothing is shadowed."
    lane = straight((0.0, -LANE), (400.0, -LANE))
    agents = (
        agent("ego", lane, 0.0, 10.0, CAR),
        agent("middle", lane, 20.0, 10.0, CAR),
        agent("lead", lane, 40.0, 10.0, CAR),
    )
    sc = Scenario("longitudinal_equal_speed", agents, "ego", duration=SNAP, notes=notes)
    return sc, {"rules": snapshot_rules({"middle": False, "lead": False})}


def truck_far():
    notes = ("Intro layout, but the truck is still south of the ego road: it reaches the ego's lane "
             "within the horizon, yet cannot get into the car's lane in time, so the car can reach the ego.")
    agents = (
        ego_east(-35.0, 8.0),
        car_south(60.0, 13.0),
        agent("truck", left_turn_north_to_west(), 30.0, 2.5, TRUCK),
    )
    sc = Scenario("truck_far", agents, "ego", duration=SNAP, notes=notes)
    return sc, {"rules": snapshot_rules({"car": False, "truck": False})}


def already_passed():
    notes = ("The ego is just past the junction; the car leaves northbound and the truck leaves "
             "westbound. Both are moving away, so they are tagged already passed and kept.")
    agents = (
        agent("ego", straight((-40.0, -LANE), (FAR, -LANE)), 45.0, 8.0, CAR),
        agent("car", straight((LANE, -60.0), (LANE, 60.0)), 68.0, 8.0, CAR),
        agent("truck", straight((40.0, LANE), (-FAR, LANE)), 52.0, 4.0, TRUCK),
    )
    sc = Scenario("already_passed", agents, "ego", duration=SNAP, notes=notes)
    return sc, {"rules": snapshot_rules({"car": False, "truck": False})}


def crossing_without_truck():
    notes = "Only the ego and the fast car: with no third agent nothing can shadow the car."
    agents = (ego_east(-35.0, 8.0), car_south(60.0, 13.0))
    sc = Scenario("crossing_without_truck", agents, "ego", duration=SNAP, notes=notes)
    return sc, {"rules": snapshot_rules({"car": False})}


BUILDERS = [
    intro_truck_shadow, crossing, following, turning,
    longitudinal_brake, intersection_truck_shadow, intersection_truck_crossing, intersection_truck_following,
    longitudinal_equal_speed, truck_far, already_passed, crossing_without_truck,
]


def build_all():
    return [b() for b in BUILDERS]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(DATA_DIR))
    ap.add_argument("--check", action="store_true", help="only report files that would change")
    args = ap.parse_args(argv)
    out = FsPath(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stale = 0
    for sc, expect in build_all():
        path = out / f"{sc.name}.yaml"
        text = dumps(sc, expect)
        if path.exists() and path.read_text() == text:
            continue
        stale += 1
        if args.check:
            print(f"stale: {path}")
        else:
            path.write_text(text)
            print(f"wrote {path}")
    return 1 if (args.check and stale) else 0


if __name__ == "__main__":
    sys.exit(main())
