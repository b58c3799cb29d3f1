"""Built-in scenario library and its expectation records.

Each scenario ships as a YAML file under ``data/`` (format in
:mod:`riskshadow.scenario_io`) with an ``expect`` block listing rules such as::

    expect:
      rules:
        - {kind: filter, agent: car, t: [0.0, 4.0], filtered: true, quantifier: all}
        - {kind: accel, mode: baseline, t: [0.0, 3.0], check: exists_above, value: 0.3}
        - {kind: min_distance, above: 0.0}

Rule kinds:

``filter``
    The filter decision for ``agent`` in risk_shadowing mode, at every step
    (``quantifier: all``) or at least one step (``any``) with time inside the
    closed window ``t``.
``accel``
    Ego acceleration in ``mode`` over the window; ``check`` is one of
    ``max_abs_below``, ``exists_above``, ``exists_below``.
``min_distance``
    Ego-to-other rectangle distance stays strictly above ``above`` at every
    step, in every mode listed in ``modes`` (default: both).
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Iterator, Optional

from ..scenario_io import ScenarioFormatError, load_scenario
from ..simulator import Mode, Scenario, SimTrace, run

DATA_DIR = FsPath(__file__).with_name("data")
_EPS = 1e-9
ACCEL_CHECKS = ("max_abs_below", "exists_above", "exists_below")


@dataclass(frozen=True)
class Rule:
    kind: str
    params: dict

    @classmethod
    def from_dict(cls, data: dict) -> "Rule":
        data = dict(data)
        kind = data.pop("kind", None)
        if kind == "filter":
            need = {"agent", "t", "filtered"}
        elif kind == "accel":
            need = {"mode", "t", "check", "value"}
            if data.get("check") not in ACCEL_CHECKS:
                raise ScenarioFormatError(f"accel rule: unknown check {data.get('check')!r}")
            Mode(data.get("mode"))
        elif kind == "min_distance":
            need = {"above"}
        else:
            raise ScenarioFormatError(f"unknown expectation kind {kind!r}")
        missing = need - set(data)
        if missing:
            raise ScenarioFormatError(f"{kind} rule missing {sorted(missing)}")
        if "t" in data:
            t0, t1 = (float(x) for x in data["t"])
            if t1 < t0:
                raise ScenarioFormatError(f"{kind} rule: empty window {data['t']}")
        if data.get("quantifier", "all") not in ("all", "any"):
            raise ScenarioFormatError(f"unknown quantifier {data['quantifier']!r}")
        return cls(kind, data)

    def modes(self) -> tuple[Mode, ...]:
        if self.kind == "filter":
            return (Mode.RISK_SHADOWING,)
        if self.kind == "accel":
            return (Mode(self.params["mode"]),)
        return tuple(Mode(m) for m in self.params.get("modes", [m.value for m in Mode]))

    def describe(self) -> str:
        p = self.params
        if self.kind == "filter":
            state = "filtered" if p["filtered"] else "not filtered"
            return f"{p['agent']} {state} ({p.get('quantifier', 'all')}) for t in {list(p['t'])}"
        if self.kind == "accel":
            return f"{p['mode']} ego accel {p['check']} {p['value']} for t in {list(p['t'])}"
        return f"min ego distance > {p['above']}"

    def check(self, traces: dict) -> Optional[str]:
        """None when satisfied, else a message naming the violation."""
        p = self.params
        if self.kind == "min_distance":
            for mode in self.modes():
                d = traces[mode].min_ego_distance()
                if not d > p["above"]:
                    return f"{mode.value}: min ego distance {d:.3f} <= {p['above']}"
            return None

        trace: SimTrace = traces[self.modes()[0]]
        t0, t1 = (float(x) for x in p["t"])
        recs = [r for r in trace.records if t0 - _EPS <= r.time <= t1 + _EPS]
        if not recs:
            return f"no simulation steps inside window {[t0, t1]}"

        if self.kind == "filter":
            want = bool(p["filtered"])
            hits = [r.filtered(p["agent"]) == want for r in recs]
            if p.get("quantifier", "all") == "all":
                if not all(hits):
                    bad = next(r.time for r, h in zip(recs, hits) if not h)
                    return f"{p['agent']}: filtered={not want} at t={bad:.2f} (expected {want} on {[t0, t1]})"
            elif not any(hits):
                return f"{p['agent']}: never filtered={want} on {[t0, t1]}"
            return None

        acc = [r.agents[trace.ego_id].a for r in recs]
        value = float(p["value"])
        if p["check"] == "max_abs_below":
            worst = max(abs(a) for a in acc)
            return None if worst < value else f"{p['mode']}: max |a| {worst:.3f} >= {value} on {[t0, t1]}"
        if p["check"] == "exists_above":
            best = max(acc)
            return None if best > value else f"{p['mode']}: max a {best:.3f} <= {value} on {[t0, t1]}"
        best = min(acc)
        return None if best < value else f"{p['mode']}: min a {best:.3f} >= {value} on {[t0, t1]}"


@dataclass(frozen=True)
class Expectation:
    rules: tuple[Rule, ...]
    notes: str = ""
    raw: dict = field(default_factory=dict, compare=False)  # as written in the file

    @classmethod
    def from_dict(cls, data: Optional[dict]) -> "Expectation":
        if not data or not data.get("rules"):
            raise ScenarioFormatError("expectation record needs at least one rule")
        return cls(tuple(Rule.from_dict(r) for r in data["rules"]), data.get("notes", ""), data)

    def modes(self) -> tuple[Mode, ...]:
        wanted = {m for r in self.rules for m in r.modes()}
        return tuple(m for m in Mode if m in wanted)


@dataclass
class CheckResult:
    name: str
    failures: list[str]
    traces: dict = field(default_factory=dict)
    seconds: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures


def run_modes(scenario: Scenario, modes) -> tuple[dict, dict]:
    traces, seconds = {}, {}
    for mode in modes:
        t0 = time.perf_counter()
        traces[mode] = run(scenario, mode)
        seconds[mode] = time.perf_counter() - t0
    return traces, seconds


def check_scenario(scenario: Scenario, expectation: Expectation, traces: Optional[dict] = None) -> CheckResult:
    """Run (or reuse) the traces an expectation needs and evaluate every rule."""
    seconds = {}
    if traces is None:
        traces, seconds = run_modes(scenario, expectation.modes())
    failures = []
    for rule in expectation.rules:
        msg = rule.check(traces)
        if msg is not None:
            failures.append(f"{rule.describe()}: {msg}")
    return CheckResult(scenario.name, failures, traces, seconds)


@dataclass(frozen=True)
class ScenarioCatalog:
    entries: dict
    expected: dict

    def __post_init__(self):
        missing = set(self.entries) ^ set(self.expected)
        if missing:
            raise ValueError(f"scenarios without expectation records: {sorted(missing)}")

    def names(self) -> list[str]:
        return sorted(self.entries)

    def __contains__(self, name) -> bool:
        return name in self.entries

    def __iter__(self) -> Iterator[str]:
        return iter(self.names())

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, name: str) -> Scenario:
        try:
            return self.entries[name]
        except KeyError:
            raise KeyError(f"unknown scenario {name!r}; known: {', '.join(self.names())}") from None

    def expectation(self, name: str) -> Expectation:
        return self.expected[name]

    def check(self, name: str, scenario: Optional[Scenario] = None) -> CheckResult:
        return check_scenario(scenario or self.get(name), self.expected[name])


def load_dir(directory) -> ScenarioCatalog:
    entries, expected = {}, {}
    for path in sorted(FsPath(directory).glob("*.yaml")):
        sc, exp = load_scenario(path)
        if sc.name in entries:
            raise ScenarioFormatError(f"duplicate scenario name {sc.name!r} in {path}")
        entries[sc.name] = sc
        expected[sc.name] = Expectation.from_dict(exp)
    return ScenarioCatalog(entries, expected)


_CATALOG: Optional[ScenarioCatalog] = None


def catalog() -> ScenarioCatalog:
    """The shipped scenarios (loaded once; scenarios are immutable)."""
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = load_dir(DATA_DIR)
    return _CATALOG


__all__ = [
    "DATA_DIR", "CheckResult", "Expectation", "Rule", "ScenarioCatalog",
    "catalog", "check_scenario", "load_dir", "run_modes",
]
