"""Command-line front end.

    riskshadow run NAME|FILE [--mode both] [--emit csv,svg] [--out DIR] [--override k=v ...]
    riskshadow check [--only NAME ...] [--override k=v ...]
    riskshadow bench [--n 10 20 40] [--seed 0]
    riskshadow export-scenario NAME [-o FILE]

Exit codes: 0 success, 1 expectation failure (check), 2 bad scenario or
arguments, 3 planner abort during simulation.
"""
from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
import time
from pathlib import Path as FsPath
from typing import Optional, Sequence

import numpy as np
import yaml

from .encounter import AgentState, EncounterConfig
from .filtering import write_filter_csv, run_filter
from .geometry import Footprint, Path
from .scenario_io import ScenarioFormatError, dumps, load_scenario
from .scenarios import catalog, check_scenario
from .simulator import Mode, Scenario, SimulationError, run

OUT_ENV = "RISKSHADOW_OUT"
DEFAULT_OUT = "riskshadow_out"
EMIT_CHOICES = ("csv", "svg")

# shorthand override keys -> (config section, field)
_SHORTHANDS = {
    "d_thr": ("encounter", "d_thr"),
    "horizon": ("encounter", "horizon"),
    "dt_pred": ("encounter", "dt_pred"),
    "slack": ("reach", "slack"),
    "margin": ("reach", "margin"),
    "extend_by_length": ("reach", "extend_by_length"),
    "w_R": ("planner", "w_R"),
    "w_U": ("planner", "w_U"),
    "w_O": ("planner", "w_O"),
    "w_V": ("planner", "w_V"),
    "v_ref": ("planner", "v_ref"),
    "d0": ("planner", "risk_scale_d0"),
    "contact_penalty": ("planner", "contact_penalty"),
    "curve_risk": ("planner", "curve_risk_enabled"),
    "a_lat_max": ("planner", "a_lat_max"),
    "duration": ("scenario", "duration"),
    "dt_sim": ("scenario", "dt_sim"),
    "filter": ("scenario", "filter_enabled"),
}
_SECTION_ATTR = {"encounter": "encounter_cfg", "reach": "reach_cfg", "planner": "planner_cfg"}


class UsageError(Exception):
    pass


def parse_override(text: str) -> tuple[str, str, object]:
    if "=" not in text:
        raise UsageError(f"override {text!r} is not key=value")
    key, raw = (part.strip() for part in text.split("=", 1))
    if key in _SHORTHANDS:
        section, name = _SHORTHANDS[key]
    elif "." in key:
        section, name = key.split(".", 1)
    else:
        raise UsageError(f"unknown override key {key!r}; known: {', '.join(sorted(_SHORTHANDS))}")
    if section not in _SECTION_ATTR and section != "scenario":
        raise UsageError(f"unknown override section {section!r}")
    value = yaml.safe_load(raw)
    if section == "scenario" and name == "filter_enabled" and isinstance(value, str):
        value = {"on": True, "off": False}.get(value.lower(), value)
    if isinstance(value, list):
        value = tuple(value)
    return section, name, value


def apply_overrides(sc: Scenario, overrides: Sequence[str]) -> Scenario:
    for text in overrides:
        section, name, value = parse_override(text)
        try:
            if section == "scenario":
                if name not in {"duration", "dt_sim", "filter_enabled"}:
                    raise UsageError(f"scenario field {name!r} cannot be overridden")
                sc = sc.replace(**{name: value})
            else:
                attr = _SECTION_ATTR[section]
                cfg = getattr(sc, attr)
                if name not in {f.name for f in dataclasses.fields(cfg)}:
                    raise UsageError(f"{section} has no field {name!r}")
                sc = sc.replace(**{attr: dataclasses.replace(cfg, **{name: value})})
                if section == "encounter" and name == "horizon":
                    sc = sc.replace(reach_cfg=dataclasses.replace(sc.reach_cfg, horizon=value))
        except (TypeError, ValueError) as exc:
            raise UsageError(f"override {text!r}: {exc}") from exc
    return sc


def resolve_scenario(ref: str) -> Scenario:
    """Catalog name, or a path to a scenario file."""
    cat = catalog()
    if ref in cat:
        return cat.get(ref)
    path = FsPath(ref)
    if path.suffix in (".yaml", ".yml") or path.exists():
        try:
            return load_scenario(path)[0]
        except OSError as exc:
            raise ScenarioFormatError(f"cannot read {ref}: {exc}") from exc
    raise ScenarioFormatError(f"unknown scenario {ref!r}; catalog: {', '.join(cat.names())}")


def _modes(choice: str) -> list[Mode]:
    return list(Mode) if choice == "both" else [Mode(choice)]


def _emit_flags(text: str) -> set[str]:
    flags = {f.strip() for f in text.split(",") if f.strip()}
    bad = flags - set(EMIT_CHOICES)
    if bad:
        raise UsageError(f"unknown --emit value(s) {sorted(bad)}; choose from {EMIT_CHOICES}")
    return flags


# --- figures ------------------------------------------------------------------

def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    # stable element ids so identical traces give identical files
    matplotlib.rcParams["svg.hashsalt"] = "riskshadow"
    return plt


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})


def behavior_figure(traces: dict, path) -> None:
    """Ego speed and acceleration over time, every mode on the same axes."""
    plt = _pyplot()
    fig, (ax_v, ax_a) = plt.subplots(2, 1, sharex=True, figsize=(6.4, 4.8))
    for mode, tr in traces.items():
        t = tr.times()
        ax_v.plot(t, tr.series(tr.ego_id, "v"), label=mode.value)
        ax_a.plot(t, tr.ego_accel(), label=mode.value)
    ax_v.set_ylabel("v [m/s]")
    ax_a.set_ylabel("a [m/s²]")
    ax_a.set_xlabel("t [s]")
    ax_v.legend(loc="best")
    name = next(iter(traces.values())).scenario
    ax_v.set_title(f"{name}: ego behavior")
    for ax in (ax_v, ax_a):
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def filter_figure(trace, path) -> None:
    """Per other agent: 1 while filtered out, 0 while kept."""
    plt = _pyplot()
    others = [k for k in trace.records[0].agents if k != trace.ego_id] if trace.records else []
    fig, ax = plt.subplots(figsize=(6.4, 1.2 + 0.6 * max(1, len(others))))
    t = trace.times()
    for i, aid in enumerate(others):
        flags = [1 if r.filtered(aid) else 0 for r in trace.records]
        ax.step(t, [i * 1.5 + f for f in flags], where="post", label=str(aid))
    ax.set_yticks([i * 1.5 + 0.5 for i in range(len(others))])
    ax.set_yticklabels([str(a) for a in others])
    ax.set_xlabel("t [s]")
    ax.set_title(f"{trace.scenario}: filtered out (high) / kept (low)")
    ax.grid(True, axis="x", alpha=0.3)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


# --- commands -----------------------------------------------------------------

def cmd_run(args) -> int:
    sc = apply_overrides(resolve_scenario(args.scenario), args.override)
    emit = _emit_flags(args.emit)
    out = FsPath(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)
    out.mkdir(parents=True, exist_ok=True)
    traces = {}
    for mode in _modes(args.mode):
        try:
            traces[mode] = run(sc, mode)
        except SimulationError as exc:
            print(f"planner abort in {sc.name} ({mode.value}): {exc}", file=sys.stderr)
            return 3
    written = []
    if "csv" in emit:
        for mode, tr in traces.items():
            path = out / f"{sc.name}_{mode.value}_trace.csv"
            with open(path, "w", newline="") as fh:
                tr.write_csv(fh)
            written.append(path)
        rs = traces.get(Mode.RISK_SHADOWING)
        if rs is not None:
            path = out / f"{sc.name}_filter.csv"
            with open(path, "w", newline="") as fh:
                write_filter_csv([r.report for r in rs.records if r.report is not None], fh)
            written.append(path)
    if "svg" in emit:
        path = out / f"{sc.name}_behavior.svg"
        behavior_figure(traces, path)
        written.append(path)
        rs = traces.get(Mode.RISK_SHADOWING)
        if rs is not None:
            path = out / f"{sc.name}_filter.svg"
            filter_figure(rs, path)
            written.append(path)
    for mode, tr in traces.items():
        a = np.abs(tr.ego_accel())
        print(f"{sc.name} {mode.value}: steps={len(tr.records)} max|a|={a.max():.3f} "
              f"min_ego_distance={tr.min_ego_distance():.3f}")
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_check(args) -> int:
    cat = catalog()
    names = sorted(args.only) if args.only else cat.names()
    unknown = [n for n in names if n not in cat]
    if unknown:
        raise ScenarioFormatError(f"unknown scenario(s) {unknown}")
    width = max(len(n) for n in names)
    failed = 0
    for name in names:
        sc = apply_overrides(cat.get(name), args.override)
        t0 = time.perf_counter()
        try:
            res = check_scenario(sc, cat.expectation(name))
            first = res.failures[0] if res.failures else ""
            ok = res.passed
        except SimulationError as exc:
            ok, first = False, f"planner abort: {exc}"
        failed += not ok
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  {time.perf_counter() - t0:6.2f}s  {first}".rstrip())
    print(f"{len(names) - failed}/{len(names)} scenarios pass")
    return 1 if failed else 0


def random_scene(n: int, rng: np.random.Generator, extent: float = 100.0) -> list[AgentState]:
    """n cars on random straight 60 m paths inside a square of side ``extent``."""
    agents = []
    for i in range(n):
        start = rng.uniform(0.0, extent, size=2)
        heading = rng.uniform(-math.pi, math.pi)
        end = start + 60.0 * np.array([math.cos(heading), math.sin(heading)])
        path = Path([tuple(start), tuple(end)])
        agents.append(AgentState(f"a{i}", path, float(rng.uniform(0.0, 20.0)), float(rng.uniform(0.0, 15.0)),
                                 Footprint(4.5, 1.8)))
    return agents


def bench(n_values: Sequence[int], seed: int = 0, repeat: int = 3, cfg: Optional[EncounterConfig] = None):
    """[(n, directed pairs, best wall time in s)] for one random scene per n."""
    cfg = cfg or EncounterConfig()
    rows = []
    for n in n_values:
        if n < 2:
            raise UsageError("bench needs n >= 2")
        agents = random_scene(n, np.random.default_rng(seed + n))
        best, pairs = math.inf, None
        for _ in range(repeat):
            t0 = time.perf_counter()
            rep = run_filter(agents[0], agents[1:], cfg)
            best = min(best, time.perf_counter() - t0)
            pairs = rep.encounter_count
        rows.append((n, pairs, best))
    return rows


def cmd_bench(args) -> int:
    rows = bench(args.n, args.seed, args.repeat)
    print(f"{'n':>4}  {'pairs':>6}  {'wall_s':>9}")
    for n, pairs, wall in rows:
        print(f"{n:>4}  {pairs:>6}  {wall:9.4f}")
    if len(rows) > 1:
        (n0, p0, w0), (n1, p1, w1) = rows[0], rows[-1]
        print(f"ratio n={n0}->{n1}: pairs {p1 / p0:.3f}, wall time {w1 / w0:.2f}")
    return 0


def cmd_export(args) -> int:
    cat = catalog()
    sc = resolve_scenario(args.scenario)
    expect = cat.expectation(sc.name).raw if args.scenario in cat else None
    text = dumps(sc, expect)
    if args.output:
        FsPath(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="riskshadow", description="Risk-shadowing filter and planner toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a scenario and write traces/figures")
    p.add_argument("scenario", help="catalog name or scenario file")
    p.add_argument("--mode", choices=[m.value for m in Mode] + ["both"], default="both")
    p.add_argument("--emit", default="csv", help="comma list of csv,svg (default csv)")
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--seed", type=int, default=0, help="accepted for symmetry; runs are deterministic")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="run catalog scenarios against their expectations")
    p.add_argument("--only", nargs="+", metavar="NAME")
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="time the all-pairs filter on random scenes")
    p.add_argument("--n", type=int, nargs="+", default=[10, 20, 40])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeat", type=int, default=3)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export-scenario", help="print a scenario in the file format")
    p.add_argument("scenario")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioFormatError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
