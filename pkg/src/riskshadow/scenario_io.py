"""YAML scenario files.

Layout::

    name: intro_truck_shadow
    notes: free text
    ego_id: ego
    duration: 10.0
    dt_sim: 0.1
    mode: risk_shadowing          # or baseline
    filter_enabled: true
    encounter: {d_thr: 1.0, horizon: 10.0, dt_pred: 0.1}
    reach: {slack: 5.0, margin: 0.0, extend_by_length: true}
    planner: {horizon: 8.0, dt: 0.2, accel_grid: [...], switch_times: [...], w_R: ..., ...}
    agents:
      - id: ego
        path: [[x, y], ...]
        l: 0.0
        v: 8.0
        footprint: {length: 4.5, width: 1.8}
        schedule: [[t_start, accel], ...]
    expect: {...}                 # optional, see scenarios.catalog

Numbers are written with Python's shortest round-trip repr, so
load -> dump -> load reproduces every value exactly.
"""
from __future__ import annotations

import dataclasses
from pathlib import Path as FsPath
from typing import Any, Optional

import yaml

from .encounter import AgentState, EncounterConfig
from .geometry import Footprint, Path
from .planner import PlannerConfig
from .reachability import ReachConfig
from .simulator import AgentSpec, Mode, Scenario


class ScenarioFormatError(ValueError):
    pass


def _cfg_to_dict(cfg) -> dict:
    out = {}
    for f in dataclasses.fields(cfg):
        val = getattr(cfg, f.name)
        out[f.name] = list(val) if isinstance(val, tuple) else val
    return out


def _cfg_from_dict(cls, data: Optional[dict], where: str):
    data = dict(data or {})
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ScenarioFormatError(f"{where}: unknown keys {sorted(unknown)}")
    for k, v in data.items():
        if isinstance(v, list):
            data[k] = tuple(v)
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ScenarioFormatError(f"{where}: {exc}") from exc


def scenario_to_dict(sc: Scenario, expect: Optional[dict] = None) -> dict:
    agents = []
    for spec in sc.agents:
        st = spec.state
        agents.append({
            "id": st.id,
            "path": st.path.to_list(),
            "l": float(st.l),
            "v": float(st.v),
            "footprint": {"length": st.footprint.length, "width": st.footprint.width},
            "schedule": [list(e) for e in spec.schedule],
        })
    out = {
        "name": sc.name,
        "notes": sc.notes,
        "ego_id": sc.ego_id,
        "duration": sc.duration,
        "dt_sim": sc.dt_sim,
        "mode": sc.mode.value,
        "filter_enabled": sc.filter_enabled,
        "encounter": _cfg_to_dict(sc.encounter_cfg),
        "reach": {k: v for k, v in _cfg_to_dict(sc.reach_cfg).items() if k != "horizon"},
        "planner": _cfg_to_dict(sc.planner_cfg),
        "agents": agents,
    }
    if expect is not None:
        out["expect"] = expect
    return out


def scenario_from_dict(data: Any) -> tuple[Scenario, Optional[dict]]:
    if not isinstance(data, dict):
        raise ScenarioFormatError("scenario document must be a mapping")
    try:
        name = data["name"]
        agents = []
        for i, a in enumerate(data["agents"]):
            fp = Footprint(float(a["footprint"]["length"]), float(a["footprint"]["width"]))
            state = AgentState(a["id"], Path(a["path"]), float(a.get("l", 0.0)), float(a["v"]), fp)
            agents.append(AgentSpec(state, tuple(tuple(e) for e in a.get("schedule", []))))
        enc = _cfg_from_dict(EncounterConfig, data.get("encounter"), f"{name}.encounter")
        reach = _cfg_from_dict(ReachConfig, data.get("reach"), f"{name}.reach")
        reach = dataclasses.replace(reach, horizon=enc.horizon)
        sc = Scenario(
            name=name,
            agents=tuple(agents),
            ego_id=data["ego_id"],
            duration=float(data.get("duration", 10.0)),
            dt_sim=float(data.get("dt_sim", 0.1)),
            mode=Mode(data.get("mode", Mode.RISK_SHADOWING.value)),
            encounter_cfg=enc,
            planner_cfg=_cfg_from_dict(PlannerConfig, data.get("planner"), f"{name}.planner"),
            reach_cfg=reach,
            filter_enabled=bool(data.get("filter_enabled", True)),
            notes=data.get("notes", ""),
        )
    except ScenarioFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioFormatError(f"invalid scenario: {exc!r}") from exc
    return sc, data.get("expect")


def dumps(sc: Scenario, expect: Optional[dict] = None) -> str:
    return yaml.safe_dump(scenario_to_dict(sc, expect), sort_keys=False, default_flow_style=None, width=100)


def loads(text: str) -> tuple[Scenario, Optional[dict]]:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioFormatError(f"not valid YAML: {exc}") from exc
    return scenario_from_dict(data)


def load_scenario(path) -> tuple[Scenario, Optional[dict]]:
    return loads(FsPath(path).read_text())


def save_scenario(path, sc: Scenario, expect: Optional[dict] = None) -> None:
    FsPath(path).write_text(dumps(sc, expect))
