import csv

import pytest

from riskshadow import cli, simulator
from riskshadow.filtering import FILTER_CSV_COLUMNS
from riskshadow.scenarios import catalog
from riskshadow.simulator import TRACE_CSV_COLUMNS, Mode, run

GOLDEN_TRACE_HEADER = ("time,agent_id,l,v,a,x,y,heading,ego_distance,"
                       "filtered,profile_id,cost_total,cost_min,cost_max")
GOLDEN_FILTER_HEADER = ("time,other_id,filtered,reason,ego_ra_start,ego_ra_end,"
                        "other_ra_start,other_ra_end,limiting_agent")


def header(path):
    return path.read_text().splitlines()[0]


def test_golden_headers():
    assert ",".join(TRACE_CSV_COLUMNS) == GOLDEN_TRACE_HEADER
    assert ",".join(FILTER_CSV_COLUMNS) == GOLDEN_FILTER_HEADER


@pytest.fixture(scope="module")
def intro_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("intro")
    code = cli.main(["run", "intro_truck_shadow", "--mode", "both", "--emit", "csv,svg", "--out", str(out)])
    return code, out


def test_run_writes_traces_and_figures(intro_out):
    code, out = intro_out
    assert code == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == [
        "intro_truck_shadow_baseline_trace.csv",
        "intro_truck_shadow_behavior.svg",
        "intro_truck_shadow_filter.csv",
        "intro_truck_shadow_filter.svg",
        "intro_truck_shadow_risk_shadowing_trace.csv",
    ]
    assert header(out / "intro_truck_shadow_baseline_trace.csv") == GOLDEN_TRACE_HEADER
    assert header(out / "intro_truck_shadow_filter.csv") == GOLDEN_FILTER_HEADER
    for svg in out.glob("*.svg"):
        assert svg.read_text().lstrip().startswith("<?xml")
    rows = list(csv.DictReader(open(out / "intro_truck_shadow_risk_shadowing_trace.csv")))
    assert len(rows) == 100 * 3


def test_run_is_byte_identical(intro_out, tmp_path):
    _, first = intro_out
    assert cli.main(["run", "intro_truck_shadow", "--emit", "csv,svg", "--out", str(tmp_path)]) == 0
    for path in first.iterdir():
        assert (tmp_path / path.name).read_bytes() == path.read_bytes(), path.name


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    assert cli.main(["run", "truck_far", "--mode", "baseline", "--override", "duration=0.5"]) == 0
    assert (tmp_path / "env" / "truck_far_baseline_trace.csv").exists()


def test_d_thr_zero_runs_without_collision_points():
    sc = cli.apply_overrides(catalog().get("intro_truck_shadow"), ["d_thr=0.0"])
    assert sc.encounter_cfg.d_thr == 0.0
    trace = run(sc, Mode.RISK_SHADOWING)
    assert all(r.report.collision_points == () for r in trace.records)
    # while the ego still approaches the crossing, unconstrained areas keep the car in view
    assert not any(r.filtered("car") for r in trace.records if r.time < 4.0)


def test_unknown_scenario_exit_2(capsys):
    assert cli.main(["run", "no_such_scenario"]) == 2
    assert "unknown scenario" in capsys.readouterr().err


def test_malformed_file_exit_2(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("name: [")
    assert cli.main(["run", str(bad)]) == 2


@pytest.mark.parametrize("override", ["nonsense", "bogus=1", "planner.nope=1", "w_R=-1", "duration=x"])
def test_bad_override_exit_2(override, tmp_path):
    assert cli.main(["run", "truck_far", "--out", str(tmp_path), "--override", override]) == 2


def test_bad_emit_exit_2(tmp_path):
    assert cli.main(["run", "truck_far", "--out", str(tmp_path), "--emit", "png"]) == 2


def test_planner_abort_exit_3(monkeypatch, tmp_path, capsys):
    monkeypatch.setattr(simulator, "score_all", lambda *a, **k: [])
    assert cli.main(["run", "truck_far", "--out", str(tmp_path)]) == 3
    assert "step 0" in capsys.readouterr().err


def test_check_only_passes(capsys):
    assert cli.main(["check", "--only", "intersection_truck_shadow", "crossing_without_truck"]) == 0
    assert "2/2 scenarios pass" in capsys.readouterr().out


def test_check_without_filter_fails(capsys):
    assert cli.main(["check", "--only", "intersection_truck_shadow", "--override", "filter=off"]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out and "car" in out


def test_check_unknown_name_exit_2():
    assert cli.main(["check", "--only", "nope"]) == 2


def test_bench_counts_directed_pairs(capsys):
    rows = cli.bench([3, 6], repeat=1)
    assert [(n, p) for n, p, _ in rows] == [(3, 6), (6, 30)]
    assert cli.main(["bench", "--n", "3", "6", "--repeat", "1"]) == 0
    assert "ratio n=3->6: pairs 5.000" in capsys.readouterr().out
    assert cli.main(["bench", "--n", "1"]) == 2


def test_export_round_trips(tmp_path):
    path = tmp_path / "intro.yaml"
    assert cli.main(["export-scenario", "intro_truck_shadow", "-o", str(path)]) == 0
    from riskshadow.scenario_io import load_scenario

    sc, expect = load_scenario(path)
    assert sc == catalog().get("intro_truck_shadow")
    assert expect == catalog().expectation("intro_truck_shadow").raw
    assert cli.main(["run", str(path), "--mode", "baseline", "--override", "duration=0.3",
                     "--out", str(tmp_path)]) == 0


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["run"])
    assert exc.value.code == 2
