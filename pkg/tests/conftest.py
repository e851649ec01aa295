import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for oracles.py

from navhunt.building import load_building
from navhunt.scenario import load_scenario

ASSETS = Path(__file__).parent.parent / "assets"
BUILDING_PATH = ASSETS / "minibuild.building.json"
SCENARIO_PATH = ASSETS / "minibuild.scenario.json"


@pytest.fixture(scope="session")
def minibuild():
    return load_building(BUILDING_PATH.read_bytes())


@pytest.fixture(scope="session")
def eq1_scenario(minibuild):
    return load_scenario(minibuild, SCENARIO_PATH.read_bytes())


@pytest.fixture()
def zone_scenario(minibuild):
    from navhunt.scenario import create_hunt

    return create_hunt(
        minibuild,
        {
            "hunt_type": {
                "kind": "regroup_in_zone",
                "floor_id": "F0",
                "center": [0.0, 0.0],
                "radius": 0.5,
            },
            "start_room": "R_C",
            "objective_text": "Regroup at the west entry.",
        },
    )
