import json

import pytest

from navhunt import bots, recording
from navhunt.errors import CorruptLog, DigestMismatch, OutOfOrder, RangeError, UnknownTeam
from navhunt.recording import EventLog, load_log


def sim(minibuild, scenario, **kw):
    kw.setdefault("seed", 21)
    return bots.run_simulation(minibuild, scenario, **kw)


# -- append / flush -------------------------------------------------------------


def test_append_out_of_order_tick():
    log = EventLog.fresh("digest", {}, 1)
    log.append(7, 1, "x", {})
    with pytest.raises(OutOfOrder):
        log.append(5, 2, "x", {})


def test_append_out_of_order_seq():
    log = EventLog.fresh("digest", {}, 1)
    log.append(7, 5, "x", {})
    with pytest.raises(OutOfOrder):
        log.append(7, 5, "y", {})


def test_flush_then_reload_round_trip(tmp_path):
    log = EventLog.fresh("digest", {"k": 1}, 9, started_at="t0")
    log.append(0, 1, "cmd/hello", {"client": "a", "body": {}, "outcome": "ack"})
    log.append(3, 2, "phase", {"phase": "hunting"})
    path = tmp_path / "x.hunt.ndjson"
    log.flush(path)
    log.append(4, 3, "checkpoint", {"hash": "00"})
    log.flush(path)  # incremental append
    loaded = recording.load_log_file(path)
    assert loaded.header == log.header
    assert loaded.events == log.events


def test_empty_log_reload_header_only(tmp_path):
    log = EventLog.fresh("digest", {}, 1)
    path = tmp_path / "empty.hunt.ndjson"
    log.flush(path)
    loaded = recording.load_log_file(path)
    assert loaded.events == []
    assert loaded.header["seed"] == 1


def test_corrupt_line_detected():
    data = json.dumps({"version": 1, "building_digest": "d", "scenario": {}, "seed": 1}) + "\n{oops\n"
    with pytest.raises(CorruptLog):
        load_log(data)


def test_missing_header_detected():
    with pytest.raises(CorruptLog):
        load_log('{"tick":0,"seq":1,"type":"x","payload":{}}\n')


# -- replay ----------------------------------------------------------------------


def test_replay_reproduces_live_hashes(minibuild, eq1_scenario):
    result = sim(minibuild, eq1_scenario)
    replayed = recording.replay(minibuild, result.log)
    assert replayed.state_hash() == result.session.state_hash()
    assert replayed.scoreboard() == result.scoreboard
    assert recording.verify_checkpoints(minibuild, result.log) >= 3


def test_edited_payload_detected_at_checkpoint(minibuild, eq1_scenario):
    result = sim(minibuild, eq1_scenario)
    data = result.log.to_bytes().decode()
    # retarget one hunter's first move, keeping the line valid
    assert '"node_id":"n4"' in data
    tampered = data.replace('"node_id":"n4"', '"node_id":"n3"', 1)
    with pytest.raises(CorruptLog):
        recording.replay(minibuild, load_log(tampered))


def test_log_for_other_building_refused(minibuild, eq1_scenario):
    result = sim(minibuild, eq1_scenario)
    doc = dict(result.log.header)
    doc["building_digest"] = "f" * 64
    other = EventLog(header=doc, events=list(result.log.events))
    with pytest.raises(DigestMismatch):
        recording.replay(minibuild, other)


def test_truncated_log_still_replays_prefix(minibuild, eq1_scenario):
    # cutting at a line boundary keeps a valid (shorter) log
    result = sim(minibuild, eq1_scenario)
    lines = result.log.to_bytes().decode().strip().split("\n")
    shorter = load_log("\n".join(lines[: len(lines) // 2]) + "\n")
    session = recording.replay(minibuild, shorter)
    assert session.tick_count <= result.session.tick_count


# -- debrief queries ----------------------------------------------------------------


def test_team_paths_full_range_visits_chain(minibuild, eq1_scenario):
    result = sim(minibuild, eq1_scenario)
    duration = recording.hunt_duration_seconds(result.log)
    paths = recording.team_paths(minibuild, result.log, 1, 0.0, duration)
    floors_seen = {run["floor_id"] for runs in paths.values() for run in runs}
    assert floors_seen == {"F0", "F1"}
    # the slow hunter ends at the validation node n1
    last_run = paths["h1b"][-1]
    assert last_run["floor_id"] == "F0"
    assert last_run["points"][-1] == [0.0, 0.0]


def test_team_paths_single_instant(minibuild, eq1_scenario):
    result = sim(minibuild, eq1_scenario)
    paths = recording.team_paths(minibuild, result.log, 1, 0.0, 0.0)
    for runs in paths.values():
        assert len(runs) == 1
        assert len(runs[0]["points"]) == 1


def test_team_paths_range_checks(minibuild, eq1_scenario):
    result = sim(minibuild, eq1_scenario)
    duration = recording.hunt_duration_seconds(result.log)
    with pytest.raises(RangeError):
        recording.team_paths(minibuild, result.log, 1, 0.0, duration + 5.0)
    with pytest.raises(RangeError):
        recording.team_paths(minibuild, result.log, 1, 3.0, 1.0)
    with pytest.raises(UnknownTeam):
        recording.team_paths(minibuild, result.log, 9, 0.0, 1.0)


def test_timeline_matches_scoreboard_and_screenshots(minibuild, eq1_scenario):
    script = [{"at_tick": 100, "type": "screenshot", "floor_id": "F0",
               "viewpoint": [2.0, 2.0]}]
    result = sim(minibuild, eq1_scenario, trainer_script=script)
    tl = recording.timeline(result.log)
    board = dict(result.scoreboard)
    assert {f["team_id"]: f["seconds"] for f in tl["finishes"]} == board
    assert len(tl["screenshots"]) == 1
    marker = tl["screenshots"][0]
    assert marker["seconds"] == pytest.approx(marker["tick"] * 0.05)
    assert tl["duration_seconds"] >= max(v for v in board.values())


def test_screenshot_marker_at_25s(minibuild, eq1_scenario):
    # a screenshot stamped at tick 500 sits at 25.0 s on the timeline
    log = EventLog.fresh(minibuild.digest(), {}, 1)
    log.append(0, 1, "phase", {"phase": "hunting"})
    log.append(500, 2, "cmd/screenshot",
               {"client": "t", "outcome": "ack",
                "body": {"floor_id": "F0", "viewpoint": [0, 0], "team_id": None}})
    tl = recording.timeline(log)
    assert tl["screenshots"][0]["seconds"] == pytest.approx(25.0)


def test_empty_hunt_timeline(minibuild):
    log = EventLog.fresh(minibuild.digest(), {}, 1)
    tl = recording.timeline(log)
    assert tl == {"finishes": [], "screenshots": [], "duration_seconds": 0.0}


def test_cursor_state_start_and_end(minibuild, eq1_scenario):
    result = sim(minibuild, eq1_scenario)
    duration = recording.hunt_duration_seconds(result.log)
    at_start = recording.cursor_state(minibuild, result.log, 0.0)
    assert at_start["floors_occupied"] == ["F1"]  # spawn floor
    spawn_points = {h: tuple(v["point"]) for h, v in at_start["per_hunter"].items()}
    assert spawn_points == {"h1a": (7.0, 5.0), "h1b": (0.0, 5.0)}
    at_end = recording.cursor_state(minibuild, result.log, duration)
    assert at_end["floors_occupied"] == ["F0"]
    for v in at_end["per_hunter"].values():
        assert v["point"] == [0.0, 0.0]  # validated from n1
    with pytest.raises(RangeError):
        recording.cursor_state(minibuild, result.log, duration + 1.0)


def test_paths_never_exceed_speed_or_blocked_edges(minibuild, eq1_scenario):
    import math

    result = sim(minibuild, eq1_scenario)
    duration = recording.hunt_duration_seconds(result.log)
    paths = recording.team_paths(minibuild, result.log, 1, 0.0, duration)
    for runs in paths.values():
        for run in runs:
            pts = run["points"]
            for a, b in zip(pts, pts[1:]):
                assert math.hypot(b[0] - a[0], b[1] - a[1]) <= 0.07 + 1e-9


def test_debrief_bundle_consistency(minibuild, eq1_scenario):
    result = sim(minibuild, eq1_scenario)
    bundle = recording.build_debrief_bundle(minibuild, result.log)
    assert bundle["scoreboard"] == result.session.scoreboard_view()
    assert bundle["timeline"]["finishes"][0]["seconds"] == result.scoreboard[0][1]
    assert len(bundle["cursors"]) == 5
    # breakpoint polylines reconstruct the cursor positions at sampled times
    for cursor in bundle["cursors"]:
        live = recording.cursor_state(minibuild, result.log, cursor["t"])
        assert cursor["floors_occupied"] == live["floors_occupied"]
        for hunter, entry in cursor["per_hunter"].items():
            assert entry == live["per_hunter"][hunter]
