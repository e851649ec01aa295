"""Hunt authoring: objective, start room, obstacles, markings.

A scenario is immutable; obstacle placement returns a new scenario and
rejects (leaving the original untouched) any edge set that would cut the
objective off from the start room.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace

from .building import Building
from .constants import POINTING_RANGE
from .errors import (
    EmptyZone,
    SchemaError,
    UnknownEdge,
    UnknownEquipment,
    UnknownRoom,
    UnreachableObjective,
)
from .geometry import Point, circle_intersects_polygon, distance

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PointAtEquipment:
    equipment_id: str
    kind: str = "point_at_equipment"


@dataclass(frozen=True)
class RegroupInZone:
    floor_id: str
    center: Point
    radius: float
    kind: str = "regroup_in_zone"


HuntType = PointAtEquipment | RegroupInZone


@dataclass(frozen=True)
class Marking:
    floor_id: str
    point: Point
    label: str


@dataclass(frozen=True)
class Scenario:
    id: str
    building_id: str
    hunt_type: HuntType
    start_room: str
    objective_text: str
    obstacles: frozenset[str]
    markings: tuple[Marking, ...]


def create_hunt(building: Building, config: dict) -> Scenario:
    """Build and validate a scenario from an authoring config dict."""
    try:
        ht_raw = config["hunt_type"]
        kind = ht_raw["kind"]
        start_room = config["start_room"]
        objective_text = config.get("objective_text", "")
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"scenario config missing field: {exc}") from None

    if kind == "point_at_equipment":
        hunt_type: HuntType = PointAtEquipment(ht_raw["equipment_id"])
        building.equipment_item(hunt_type.equipment_id)  # UnknownEquipment
    elif kind == "regroup_in_zone":
        center = ht_raw["center"]
        hunt_type = RegroupInZone(
            ht_raw["floor_id"], (float(center[0]), float(center[1])), float(ht_raw["radius"])
        )
        floor = building.floor(hunt_type.floor_id)
        if hunt_type.radius <= 0:
            raise EmptyZone("zone radius must be positive")
        if not any(
            circle_intersects_polygon(hunt_type.center, hunt_type.radius, list(r.polygon))
            for r in floor.rooms
        ):
            raise EmptyZone("zone circle touches no room on its floor")
    else:
        raise SchemaError(f"unknown hunt type {kind!r}")

    building.room(start_room)  # UnknownRoom

    markings = []
    for m in config.get("markings", []):
        building.floor(m["floor_id"])
        markings.append(Marking(m["floor_id"], (float(m["point"][0]), float(m["point"][1])), m["label"]))

    obstacles = frozenset(config.get("obstacles", []))
    for edge_id in obstacles:
        building.edge(edge_id)  # UnknownEdge

    scenario = Scenario(
        id=config.get("id") or "",
        building_id=building.id,
        hunt_type=hunt_type,
        start_room=start_room,
        objective_text=objective_text,
        obstacles=obstacles,
        markings=tuple(markings),
    )
    if not scenario.id:
        digest = hashlib.sha256(render_scenario(scenario)).hexdigest()[:8]
        scenario = replace(scenario, id=f"hunt-{digest}")

    if not _objective_reachable(building, scenario, obstacles):
        raise UnreachableObjective(
            "objective is not reachable from every start-room node"
        )
    return scenario


def objective_target_nodes(building: Building, scenario: Scenario) -> list[str]:
    """Nodes from which the objective can be validated, sorted by distance
    to the objective center (ties by node id).

    Equipment hunts: nodes on the equipment's floor whose center-aimed ray
    actually hits it (walls occlude). Zone hunts: nodes inside the circle.
    """
    floor_id, center, radius = objective_region(building, scenario)
    floor = building.floor(floor_id)
    out = []
    for node in floor.nodes:
        p = (node.x, node.y)
        if isinstance(scenario.hunt_type, RegroupInZone):
            if distance(p, center) <= radius:
                out.append((distance(p, center), node.id))
        else:
            eq = scenario.hunt_type.equipment_id
            angle = math.atan2(center[1] - p[1], center[0] - p[0])
            hit = building.ray_cast(floor_id, p, angle, POINTING_RANGE)
            if hit is not None and hit.equipment_id == eq:
                out.append((distance(p, center), node.id))
    return [node_id for _, node_id in sorted(out)]


def _objective_reachable(
    building: Building, scenario: Scenario, obstacles: frozenset[str]
) -> bool:
    targets = set(objective_target_nodes(building, scenario))
    if not targets:
        return False
    start_nodes = building.room_nodes(scenario.start_room)
    if not start_nodes:
        return False
    return all(building.reachable(n, targets, set(obstacles)) for n in start_nodes)


def place_obstacle(building: Building, scenario: Scenario, edge_id: str) -> Scenario:
    """Add an obstacle; rejected placements leave the scenario unchanged.

    Placing an already-present obstacle is idempotent.
    """
    building.edge(edge_id)  # UnknownEdge
    if edge_id in scenario.obstacles:
        return scenario
    grown = scenario.obstacles | {edge_id}
    if not _objective_reachable(building, scenario, frozenset(grown)):
        raise UnreachableObjective(f"blocking {edge_id} cuts off the objective")
    return replace(scenario, obstacles=frozenset(grown))


def objective_region(building: Building, scenario: Scenario) -> tuple[str, Point, float]:
    """The circle hunters must satisfy: configured zone or equipment disc."""
    ht = scenario.hunt_type
    if isinstance(ht, RegroupInZone):
        return (ht.floor_id, ht.center, ht.radius)
    eq = building.equipment_item(ht.equipment_id)
    return (building.equipment_floor(eq.id), (eq.x, eq.y), eq.radius)


# -- file format -------------------------------------------------------------


def render_scenario(scenario: Scenario) -> bytes:
    ht = scenario.hunt_type
    if isinstance(ht, RegroupInZone):
        ht_doc = {
            "kind": ht.kind,
            "floor_id": ht.floor_id,
            "center": [ht.center[0], ht.center[1]],
            "radius": ht.radius,
        }
    else:
        ht_doc = {"kind": ht.kind, "equipment_id": ht.equipment_id}
    doc = {
        "version": SCHEMA_VERSION,
        "building_id": scenario.building_id,
        "hunt_type": ht_doc,
        "start_room": scenario.start_room,
        "objective_text": scenario.objective_text,
        "obstacles": sorted(scenario.obstacles),
        "markings": [
            {"floor_id": m.floor_id, "point": [m.point[0], m.point[1]], "label": m.label}
            for m in scenario.markings
        ],
    }
    return (json.dumps(doc, indent=2) + "\n").encode()


def load_scenario(building: Building, data: bytes | str) -> Scenario:
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    if doc.get("version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported scenario version {doc.get('version')}")
    if doc.get("building_id") != building.id:
        from .errors import ScenarioBuildingMismatch
        raise ScenarioBuildingMismatch(
            f"scenario is for {doc.get('building_id')!r}, building is {building.id!r}"
        )
    return create_hunt(building, doc)


def scenario_summary(scenario: Scenario) -> dict:
    """Plain-JSON view sent to clients in the welcome frame."""
    doc = json.loads(render_scenario(scenario))
    doc["id"] = scenario.id
    del doc["version"]
    return doc
