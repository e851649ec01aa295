import json
import shutil

import pytest
from click.testing import CliRunner

from navhunt.cli import main

from conftest import BUILDING_PATH, SCENARIO_PATH


@pytest.fixture()
def workdir(tmp_path):
    building = tmp_path / "b.json"
    scenario = tmp_path / "s.json"
    shutil.copy(BUILDING_PATH, building)
    shutil.copy(SCENARIO_PATH, scenario)
    return tmp_path, building, scenario


def run(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def test_validate_good_scenario(workdir):
    _, building, scenario = workdir
    result = run("author", "validate", building, scenario)
    assert result.exit_code == 0
    assert "ok:" in result.output


def test_validate_corrupt_building(workdir):
    tmp, building, scenario = workdir
    building.write_text("{broken")
    result = run("author", "validate", building, scenario)
    assert result.exit_code == 2


def test_validate_json_output(workdir):
    _, building, scenario = workdir
    result = run("author", "validate", building, scenario, "--json")
    assert result.exit_code == 0
    assert json.loads(result.output)["start_room"] == "R_C"


def test_add_obstacle_rejected_leaves_file_untouched(workdir):
    _, building, scenario = workdir
    before = scenario.read_bytes()
    result = run("author", "add-obstacle", building, scenario, "e3")
    assert result.exit_code == 2
    assert scenario.read_bytes() == before


def test_add_obstacle_accepted_rewrites_file(workdir, minibuild):
    tmp, building, scenario = workdir
    # switch to a scenario whose objective tolerates blocking e1
    scenario.write_text(json.dumps({
        "version": 1, "building_id": "minibuild",
        "hunt_type": {"kind": "regroup_in_zone", "floor_id": "F0",
                      "center": [7.0, 5.0], "radius": 0.5},
        "start_room": "R_B", "objective_text": "", "obstacles": [], "markings": [],
    }))
    result = run("author", "add-obstacle", building, scenario, "e1")
    assert result.exit_code == 0
    assert json.loads(scenario.read_text())["obstacles"] == ["e1"]


def test_add_unknown_edge(workdir):
    _, building, scenario = workdir
    result = run("author", "add-obstacle", building, scenario, "e99")
    assert result.exit_code == 2


def test_simulate_writes_log_and_scoreboard(workdir):
    tmp, building, scenario = workdir
    out = tmp / "run.hunt.ndjson"
    result = run("simulate", building, scenario, "--seed", 4, "--out", out, "--json")
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert out.exists()
    assert doc["scoreboard"][0]["seconds"] == pytest.approx(18.43, abs=0.05)


def test_simulate_deterministic_bytes(workdir):
    tmp, building, scenario = workdir
    out1, out2 = tmp / "a.ndjson", tmp / "b.ndjson"
    assert run("simulate", building, scenario, "--seed", 6, "--out", out1).exit_code == 0
    assert run("simulate", building, scenario, "--seed", 6, "--out", out2).exit_code == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_replay_and_hash_agree_with_simulate(workdir):
    tmp, building, scenario = workdir
    out = tmp / "run.hunt.ndjson"
    sim = run("simulate", building, scenario, "--seed", 8, "--out", out, "--json")
    live_hash = json.loads(sim.output)["final_hash"]
    hashed = run("hash", building, out)
    assert hashed.exit_code == 0
    assert hashed.output.strip() == live_hash
    replayed = run("replay", building, out, "--json")
    assert replayed.exit_code == 0
    assert json.loads(replayed.output)["final_hash"] == live_hash


def test_replay_export_bundle(workdir):
    tmp, building, scenario = workdir
    out = tmp / "run.hunt.ndjson"
    run("simulate", building, scenario, "--seed", 9, "--out", out, "--screenshot-at", 50)
    export = tmp / "debrief"
    result = run("replay", building, out, "--export", export)
    assert result.exit_code == 0
    for name in ("bundle.json", "timeline.json", "paths.json", "cursors.json", "scoreboard.csv"):
        assert (export / name).exists(), name
    timeline = json.loads((export / "timeline.json").read_text())
    assert len(timeline["screenshots"]) == 1
    board = (export / "scoreboard.csv").read_text().strip().splitlines()
    assert board[0] == "team_id,seconds"
    assert len(board) == 2


def test_replay_truncated_log_fails(workdir):
    tmp, building, scenario = workdir
    out = tmp / "run.hunt.ndjson"
    run("simulate", building, scenario, "--seed", 10, "--out", out)
    data = out.read_bytes()
    out.write_bytes(data[: len(data) // 2])  # torn mid-line
    result = run("replay", building, out)
    assert result.exit_code == 2


def test_simulate_timeout_exit_code(workdir):
    tmp, building, scenario = workdir
    result = run("simulate", building, scenario, "--max-rounds", 10,
                 "--out", tmp / "x.ndjson")
    assert result.exit_code == 2
