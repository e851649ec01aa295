"""Operator entry points.

Exit codes: 0 ok, 2 validation failure, 3 environment failure. Every
subcommand is scriptable; pass --json for machine-readable output.
"""

from __future__ import annotations

import csv
import json
import os
import socket
import sys
from pathlib import Path

import click

from . import bots, recording
from .building import Building, load_building
from .errors import HuntError, SinkError, Timeout
from .scenario import Scenario, load_scenario, render_scenario, scenario_summary

EXIT_VALIDATION = 2
EXIT_ENVIRONMENT = 3


def _load_assets(building_path: str, scenario_path: str | None) -> tuple[Building, Scenario | None]:
    try:
        building = load_building(Path(building_path).read_bytes())
    except OSError as exc:
        raise click.exceptions.Exit(_fail(f"cannot read building: {exc}"))
    except HuntError as exc:
        raise click.exceptions.Exit(_fail(f"invalid building: {type(exc).__name__}: {exc.detail}"))
    if scenario_path is None:
        return building, None
    try:
        scn = load_scenario(building, Path(scenario_path).read_bytes())
    except OSError as exc:
        raise click.exceptions.Exit(_fail(f"cannot read scenario: {exc}"))
    except HuntError as exc:
        raise click.exceptions.Exit(_fail(f"invalid scenario: {type(exc).__name__}: {exc.detail}"))
    return building, scn


def _fail(message: str, code: int = EXIT_VALIDATION) -> int:
    click.echo(message, err=True)
    return code


@click.group()
def main() -> None:
    """Authoritative treasure-hunt session server and tools."""


@main.command()
@click.argument("building_path", type=click.Path())
@click.argument("scenario_path", type=click.Path())
@click.option("--port", default=8000, show_default=True)
@click.option("--host", "bind_host", default="127.0.0.1", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--tick-hz", default=20.0, show_default=True)
@click.option("--log-dir", default=None, help="defaults to $HUNT_LOG_DIR or cwd")
@click.option("--console-dir", default=None, help="static console files to mount at /console")
def serve(building_path, scenario_path, port, bind_host, seed, tick_hz, log_dir, console_dir):
    """Run the session server until interrupted; flushes the event log."""
    import uvicorn

    from .server import create_app

    building, scn = _load_assets(building_path, scenario_path)
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((bind_host, port))
    except OSError as exc:
        raise click.exceptions.Exit(
            _fail(f"cannot bind {bind_host}:{port}: {exc}", EXIT_ENVIRONMENT)
        )
    finally:
        probe.close()
    log_dir = log_dir or os.environ.get("HUNT_LOG_DIR") or "."
    os.makedirs(log_dir, exist_ok=True)
    log_path = Path(log_dir) / f"session-{seed}.hunt.ndjson"
    app = create_app(building, scn, seed=seed, tick_hz=tick_hz,
                     log_path=log_path, console_dir=console_dir)
    click.echo(f"listening on {bind_host}:{port} (log: {log_path})")
    uvicorn.run(app, host=bind_host, port=port, log_level="warning")


@main.group()
def author() -> None:
    """Validate scenarios and place obstacles."""


@author.command("validate")
@click.argument("building_path", type=click.Path())
@click.argument("scenario_path", type=click.Path())
@click.option("--json", "as_json", is_flag=True)
def author_validate(building_path, scenario_path, as_json):
    """Check a scenario against its building; exit 2 if invalid."""
    building, scn = _load_assets(building_path, scenario_path)
    if as_json:
        click.echo(json.dumps(scenario_summary(scn)))
    else:
        kind = scn.hunt_type.kind
        click.echo(
            f"ok: {scn.id} ({kind}) from {scn.start_room}, "
            f"{len(scn.obstacles)} obstacle(s), {len(scn.markings)} marking(s)"
        )


@author.command("add-obstacle")
@click.argument("building_path", type=click.Path())
@click.argument("scenario_path", type=click.Path())
@click.argument("edge_id")
@click.option("--json", "as_json", is_flag=True)
def author_add_obstacle(building_path, scenario_path, edge_id, as_json):
    """Add an obstacle edge; refused (exit 2) if it cuts off the objective."""
    from .scenario import place_obstacle

    building, scn = _load_assets(building_path, scenario_path)
    try:
        updated = place_obstacle(building, scn, edge_id)
    except HuntError as exc:
        raise click.exceptions.Exit(_fail(f"{type(exc).__name__}: {exc.detail}"))
    tmp = scenario_path + ".tmp"
    Path(tmp).write_bytes(render_scenario(updated))
    os.replace(tmp, scenario_path)
    if as_json:
        click.echo(json.dumps({"obstacles": sorted(updated.obstacles)}))
    else:
        click.echo(f"obstacle {edge_id} placed; now {len(updated.obstacles)} obstacle(s)")


@main.command()
@click.argument("building_path", type=click.Path())
@click.argument("scenario_path", type=click.Path())
@click.option("--teams", default=1, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--hunters-per-team", default=2, show_default=True)
@click.option("--compliance", default=1.0, show_default=True)
@click.option("--delay", default=0, show_default=True, help="hunter reaction delay in ticks")
@click.option("--screenshot-at", default=None, type=int,
              help="have the trainer take one screenshot at this tick")
@click.option("--out", default=None, help="log path; defaults to $HUNT_LOG_DIR/sim-<seed>.hunt.ndjson")
@click.option("--max-rounds", default=30000, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def simulate(building_path, scenario_path, teams, seed, hunters_per_team, compliance,
             delay, screenshot_at, out, max_rounds, as_json):
    """Run an unattended bot hunt; writes the event log and prints the scoreboard."""
    building, scn = _load_assets(building_path, scenario_path)
    script = []
    if screenshot_at is not None:
        region_floor = scenario_summary(scn)["hunt_type"].get("floor_id", "F0")
        script.append({"at_tick": screenshot_at, "type": "screenshot",
                       "floor_id": region_floor, "viewpoint": [0.0, 0.0]})
    try:
        result = bots.run_simulation(
            building, scn, n_teams=teams, seed=seed, hunters_per_team=hunters_per_team,
            compliance=compliance, reaction_delay=delay, trainer_script=script,
            max_rounds=max_rounds,
        )
    except Timeout as exc:
        raise click.exceptions.Exit(_fail(f"Timeout: {exc.detail}"))
    out = out or str(Path(os.environ.get("HUNT_LOG_DIR", ".")) / f"sim-{seed}.hunt.ndjson")
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    Path(out).write_bytes(result.log.to_bytes())
    board = [{"team_id": tid, "seconds": secs} for tid, secs in result.scoreboard]
    if as_json:
        click.echo(json.dumps({"log": out, "scoreboard": board,
                               "final_hash": result.session.state_hash()}))
    else:
        click.echo(f"log written to {out}")
        for entry in board:
            secs = entry["seconds"]
            shown = f"{secs:.2f}s" if secs is not None else "DNF"
            click.echo(f"  team {entry['team_id']}: {shown}")


@main.command()
@click.argument("building_path", type=click.Path())
@click.argument("log_path", type=click.Path())
@click.option("--export", "export_dir", default=None, help="write the debrief bundle here")
@click.option("--cursors", default=None, help="comma-separated cursor times in seconds")
@click.option("--json", "as_json", is_flag=True)
def replay(building_path, log_path, export_dir, cursors, as_json):
    """Re-simulate a log, verify its checkpoints, optionally export a debrief bundle."""
    building, _ = _load_assets(building_path, None)
    try:
        log = recording.load_log_file(log_path)
        session = recording.replay(building, log)
    except (HuntError, SinkError) as exc:
        raise click.exceptions.Exit(_fail(f"{type(exc).__name__}: {exc.detail}"))
    cursor_times = None
    if cursors:
        cursor_times = [float(x) for x in cursors.split(",") if x.strip()]
    payload = {
        "final_tick": session.tick_count,
        "final_hash": session.state_hash(),
        "scoreboard": session.scoreboard_view(),
    }
    if export_dir:
        bundle = recording.build_debrief_bundle(building, log, cursor_times)
        outdir = Path(export_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "bundle.json").write_text(json.dumps(bundle, indent=2))
        (outdir / "timeline.json").write_text(json.dumps(bundle["timeline"], indent=2))
        (outdir / "paths.json").write_text(json.dumps(bundle["paths"], indent=2))
        (outdir / "cursors.json").write_text(json.dumps(bundle["cursors"], indent=2))
        with open(outdir / "scoreboard.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["team_id", "seconds"])
            for entry in bundle["scoreboard"]:
                secs = entry["seconds"]
                writer.writerow([entry["team_id"], "DNF" if secs is None else f"{secs:.2f}"])
        payload["export"] = str(outdir)
    if as_json:
        click.echo(json.dumps(payload))
    else:
        click.echo(f"replayed to tick {payload['final_tick']}, hash {payload['final_hash']}")
        if export_dir:
            click.echo(f"debrief bundle exported to {export_dir}")


@main.command("hash")
@click.argument("building_path", type=click.Path())
@click.argument("log_path", type=click.Path())
def hash_cmd(building_path, log_path):
    """Print the replayed final state digest (CI determinism checks)."""
    building, _ = _load_assets(building_path, None)
    try:
        log = recording.load_log_file(log_path)
        session = recording.replay(building, log)
    except (HuntError, SinkError) as exc:
        raise click.exceptions.Exit(_fail(f"{type(exc).__name__}: {exc.detail}"))
    click.echo(session.state_hash())


if __name__ == "__main__":
    main()
