"""Regenerate the frontend's test fixtures from a real bot hunt.

Run from the repo root after any protocol or simulation change:
    python scripts/gen_console_fixtures.py
"""

import json
from pathlib import Path

from navhunt import bots, recording
from navhunt.building import load_building, render_building
from navhunt.scenario import load_scenario

ROOT = Path(__file__).parent.parent
OUT = ROOT / "frontend" / "tests" / "fixtures"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    building = load_building((ROOT / "assets" / "minibuild.building.json").read_bytes())
    scenario = load_scenario(building, (ROOT / "assets" / "minibuild.scenario.json").read_bytes())

    script = [
        {"at_tick": 60, "type": "set_visibility", "team_ids": [1]},
        {"at_tick": 120, "type": "screenshot", "floor_id": "F0", "viewpoint": [3.5, 2.0]},
    ]
    result = bots.run_simulation(building, scenario, n_teams=2, seed=2026,
                                 trainer_script=script)
    bundle = recording.build_debrief_bundle(building, result.log)

    (OUT / "building.json").write_bytes(render_building(building))
    (OUT / "bundle.json").write_text(json.dumps(bundle, indent=2))
    (OUT / "cursors.json").write_text(json.dumps(bundle["cursors"], indent=2))
    for client in ("trainer1", "h1a"):
        lines = b"".join(result.frames[client])
        (OUT / f"{client}_frames.ndjson").write_bytes(lines)
    print(f"fixtures written to {OUT}")
    print("scoreboard:", result.scoreboard)


if __name__ == "__main__":
    main()
