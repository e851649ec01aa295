"""The 2.5D building mockup: per-floor 2D geometry joined by stairs edges.

A building is immutable after load and safe to share across threads.
The file format is UTF-8 JSON; see docs/building-format.md.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

from . import geometry, pathfind
from .errors import (
    DanglingRef,
    DisconnectedGraph,
    DuplicateId,
    SchemaError,
    UnknownEdge,
    UnknownFloor,
    UnknownNode,
)
from .geometry import Hit, Point, Segment2D

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Room:
    id: str
    name: str
    polygon: tuple[Point, ...]


@dataclass(frozen=True)
class NavNode:
    id: str
    x: float
    y: float
    room: str


@dataclass(frozen=True)
class Edge:
    id: str
    a: str
    b: str
    kind: str                     # "walk" | "stairs"
    length: float | None = None   # declared only for stairs


@dataclass(frozen=True)
class Equipment:
    id: str
    tag: str
    x: float
    y: float
    radius: float


@dataclass(frozen=True)
class PhotoAnchor:
    id: str
    node: str
    asset: str


@dataclass(frozen=True)
class Floor:
    id: str
    elevation: float
    walls: tuple[Segment2D, ...]
    rooms: tuple[Room, ...]
    nodes: tuple[NavNode, ...]
    edges: tuple[Edge, ...]
    equipment: tuple[Equipment, ...]
    photo_anchors: tuple[PhotoAnchor, ...]


@dataclass(frozen=True)
class Building:
    id: str
    floors: tuple[Floor, ...]
    version: int = SCHEMA_VERSION

    # derived indexes, filled in by __post_init__
    _nodes: dict[str, NavNode] = field(default_factory=dict, repr=False, compare=False)
    _node_floor: dict[str, str] = field(default_factory=dict, repr=False, compare=False)
    _edges: dict[str, Edge] = field(default_factory=dict, repr=False, compare=False)
    _equipment: dict[str, Equipment] = field(default_factory=dict, repr=False, compare=False)
    _equipment_floor: dict[str, str] = field(default_factory=dict, repr=False, compare=False)
    _rooms: dict[str, Room] = field(default_factory=dict, repr=False, compare=False)
    _room_floor: dict[str, str] = field(default_factory=dict, repr=False, compare=False)
    _floors: dict[str, Floor] = field(default_factory=dict, repr=False, compare=False)
    _adjacency: pathfind.Adjacency = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for floor in self.floors:
            self._floors[floor.id] = floor
            for room in floor.rooms:
                self._rooms[room.id] = room
                self._room_floor[room.id] = floor.id
            for node in floor.nodes:
                self._nodes[node.id] = node
                self._node_floor[node.id] = floor.id
            for eq in floor.equipment:
                self._equipment[eq.id] = eq
                self._equipment_floor[eq.id] = floor.id
        for floor in self.floors:
            for edge in floor.edges:
                self._edges[edge.id] = edge
        for edge in self._edges.values():
            if edge.a not in self._nodes or edge.b not in self._nodes:
                continue  # validation reports the dangling reference
            length = self.edge_length(edge.id)
            self._adjacency.setdefault(edge.a, []).append((edge.b, edge.id, length))
            self._adjacency.setdefault(edge.b, []).append((edge.a, edge.id, length))
        for entries in self._adjacency.values():
            entries.sort()

    # -- lookups -----------------------------------------------------------

    def floor(self, floor_id: str) -> Floor:
        try:
            return self._floors[floor_id]
        except KeyError:
            raise UnknownFloor(floor_id) from None

    def node(self, node_id: str) -> NavNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    def node_floor(self, node_id: str) -> str:
        self.node(node_id)
        return self._node_floor[node_id]

    def node_point(self, node_id: str) -> Point:
        n = self.node(node_id)
        return (n.x, n.y)

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edges[edge_id]
        except KeyError:
            raise UnknownEdge(edge_id) from None

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._edges

    def equipment_item(self, equipment_id: str) -> Equipment:
        try:
            return self._equipment[equipment_id]
        except KeyError:
            from .errors import UnknownEquipment
            raise UnknownEquipment(equipment_id) from None

    def equipment_floor(self, equipment_id: str) -> str:
        self.equipment_item(equipment_id)
        return self._equipment_floor[equipment_id]

    def room(self, room_id: str) -> Room:
        try:
            return self._rooms[room_id]
        except KeyError:
            from .errors import UnknownRoom
            raise UnknownRoom(room_id) from None

    def room_nodes(self, room_id: str) -> list[str]:
        self.room(room_id)
        floor = self._floors[self._room_floor[room_id]]
        return sorted(n.id for n in floor.nodes if n.room == room_id)

    def edge_between(self, a: str, b: str) -> Edge | None:
        for neighbor, edge_id, _ in self._adjacency.get(a, ()):
            if neighbor == b:
                return self._edges[edge_id]
        return None

    @property
    def adjacency(self) -> pathfind.Adjacency:
        return self._adjacency

    @property
    def node_ids(self) -> list[str]:
        return sorted(self._nodes)

    @property
    def edge_ids(self) -> list[str]:
        return sorted(self._edges)

    # -- operations ---------------------------------------------------------

    def edge_length(self, edge_id: str) -> float:
        edge = self.edge(edge_id)
        if edge.kind == "stairs":
            return float(edge.length)  # declared, validated positive
        a = self._nodes[edge.a]
        b = self._nodes[edge.b]
        return math.hypot(b.x - a.x, b.y - a.y)

    def shortest_path(
        self, from_node: str, to_node: str, blocked_edges: set[str] = frozenset()
    ) -> tuple[list[str], float] | None:
        self.node(from_node)
        self.node(to_node)
        return pathfind.shortest_path(self._adjacency, from_node, to_node, blocked_edges)

    def reachable(
        self, from_node: str, to_nodes: set[str], blocked_edges: set[str] = frozenset()
    ) -> bool:
        self.node(from_node)
        for n in to_nodes:
            self.node(n)
        return pathfind.reachable(self._adjacency, from_node, set(to_nodes), blocked_edges)

    def ray_cast(
        self, floor_id: str, origin: Point, angle: float, max_range: float
    ) -> Hit | None:
        floor = self.floor(floor_id)
        discs = [(eq.id, (eq.x, eq.y), eq.radius) for eq in floor.equipment]
        return geometry.cast_ray(origin, angle, max_range, list(floor.walls), discs)

    def digest(self) -> str:
        return hashlib.sha256(render_building(self)).hexdigest()


# -- file format -------------------------------------------------------------


def _require(mapping: dict, key: str, kind, where: str):
    if not isinstance(mapping, dict) or key not in mapping:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = mapping[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(f"{where}: field {key!r} must be a number")
        return float(value)
    if not isinstance(value, kind):
        raise SchemaError(f"{where}: field {key!r} must be {kind.__name__}")
    return value


def load_building(data: bytes | str) -> Building:
    """Parse and validate a building document; all invariants hold on return."""
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    version = _require(doc, "version", int, "building")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported version {version}")
    building_id = _require(doc, "id", str, "building")
    floors_raw = _require(doc, "floors", list, "building")

    floors = []
    for fr in floors_raw:
        fid = _require(fr, "id", str, "floor")
        where = f"floor {fid}"
        elevation = _require(fr, "elevation", float, where)
        walls = []
        for w in _require(fr, "walls", list, where):
            try:
                walls.append(
                    Segment2D(
                        _require(w, "x1", float, where), _require(w, "y1", float, where),
                        _require(w, "x2", float, where), _require(w, "y2", float, where),
                    )
                )
            except ValueError as exc:
                raise SchemaError(f"{where}: {exc}") from None
        rooms = []
        for r in _require(fr, "rooms", list, where):
            polygon = tuple(
                (float(p[0]), float(p[1]))
                for p in _require(r, "polygon", list, where)
                if isinstance(p, (list, tuple)) and len(p) == 2
            )
            if len(polygon) != len(r["polygon"]):
                raise SchemaError(f"{where}: polygon points must be [x, y] pairs")
            room = Room(_require(r, "id", str, where), _require(r, "name", str, where), polygon)
            if not geometry.polygon_is_simple(list(room.polygon)):
                raise SchemaError(f"{where}: room {room.id} polygon is not simple")
            rooms.append(room)
        nodes = [
            NavNode(
                _require(n, "id", str, where),
                _require(n, "x", float, where),
                _require(n, "y", float, where),
                _require(n, "room", str, where),
            )
            for n in _require(fr, "nodes", list, where)
        ]
        edges = []
        for e in _require(fr, "edges", list, where):
            kind = _require(e, "kind", str, where)
            if kind not in ("walk", "stairs"):
                raise SchemaError(f"{where}: edge kind must be walk or stairs, got {kind!r}")
            length = e.get("length")
            if kind == "stairs":
                if not isinstance(length, (int, float)) or isinstance(length, bool) or length <= 0:
                    raise SchemaError(f"{where}: stairs edge needs a positive length")
                length = float(length)
            elif length is not None:
                raise SchemaError(f"{where}: walk edges carry no declared length")
            edges.append(
                Edge(_require(e, "id", str, where), _require(e, "a", str, where),
                     _require(e, "b", str, where), kind, length)
            )
        equipment = []
        for q in _require(fr, "equipment", list, where):
            eq = Equipment(
                _require(q, "id", str, where), _require(q, "tag", str, where),
                _require(q, "x", float, where), _require(q, "y", float, where),
                _require(q, "radius", float, where),
            )
            if eq.radius <= 0:
                raise SchemaError(f"{where}: equipment {eq.id} radius must be positive")
            equipment.append(eq)
        anchors = [
            PhotoAnchor(_require(a, "id", str, where), _require(a, "node", str, where),
                        _require(a, "asset", str, where))
            for a in _require(fr, "photo_anchors", list, where)
        ]
        floors.append(
            Floor(fid, elevation, tuple(walls), tuple(rooms), tuple(nodes),
                  tuple(edges), tuple(equipment), tuple(anchors))
        )

    building = Building(building_id, tuple(floors), version)
    _validate(building)
    return building


def _validate(building: Building) -> None:
    seen: set[str] = set()
    for floor in building.floors:
        for some_id in (
            [floor.id]
            + [r.id for r in floor.rooms]
            + [n.id for n in floor.nodes]
            + [e.id for e in floor.edges]
            + [q.id for q in floor.equipment]
            + [a.id for a in floor.photo_anchors]
        ):
            if some_id in seen:
                raise DuplicateId(some_id)
            seen.add(some_id)

    node_floor: dict[str, Floor] = {}
    for floor in building.floors:
        for node in floor.nodes:
            node_floor[node.id] = floor

    for floor in building.floors:
        room_ids = {r.id for r in floor.rooms}
        for node in floor.nodes:
            if node.room not in room_ids:
                raise DanglingRef(f"node {node.id} references missing room {node.room}")
            containing = [r.id for r in floor.rooms
                          if geometry.point_in_polygon((node.x, node.y), list(r.polygon))]
            if containing != [node.room]:
                raise SchemaError(
                    f"node {node.id} must lie inside exactly its room {node.room}, "
                    f"found {containing}"
                )
        for edge in floor.edges:
            for end in (edge.a, edge.b):
                if end not in node_floor:
                    raise DanglingRef(f"edge {edge.id} references missing node {end}")
            if edge.kind == "walk" and node_floor[edge.a].id != node_floor[edge.b].id:
                raise SchemaError(f"walk edge {edge.id} crosses floors")
        for anchor in floor.photo_anchors:
            if anchor.node not in node_floor:
                raise DanglingRef(f"photo anchor {anchor.id} references missing node {anchor.node}")

    all_nodes = [n.id for f in building.floors for n in f.nodes]
    if not pathfind.connected(building.adjacency, all_nodes):
        raise DisconnectedGraph("baseline nav graph is not connected")


def render_building(building: Building) -> bytes:
    """Canonical serialization; load_building(render_building(b)) == b."""
    doc = {
        "version": building.version,
        "id": building.id,
        "floors": [
            {
                "id": f.id,
                "elevation": f.elevation,
                "walls": [{"x1": w.x1, "y1": w.y1, "x2": w.x2, "y2": w.y2} for w in f.walls],
                "rooms": [
                    {"id": r.id, "name": r.name, "polygon": [[x, y] for x, y in r.polygon]}
                    for r in f.rooms
                ],
                "nodes": [{"id": n.id, "x": n.x, "y": n.y, "room": n.room} for n in f.nodes],
                "edges": [
                    {"id": e.id, "a": e.a, "b": e.b, "kind": e.kind}
                    | ({"length": e.length} if e.kind == "stairs" else {})
                    for e in f.edges
                ],
                "equipment": [
                    {"id": q.id, "tag": q.tag, "x": q.x, "y": q.y, "radius": q.radius}
                    for q in f.equipment
                ],
                "photo_anchors": [
                    {"id": a.id, "node": a.node, "asset": a.asset} for a in f.photo_anchors
                ],
            }
            for f in building.floors
        ],
    }
    return (json.dumps(doc, indent=2) + "\n").encode()
