import json
import math
import random

import pytest

from navhunt.building import load_building, render_building
from navhunt.errors import (
    DanglingRef,
    DisconnectedGraph,
    DuplicateId,
    SchemaError,
    UnknownEdge,
    UnknownFloor,
)
from oracles import ray_march

from conftest import BUILDING_PATH


def doc():
    return json.loads(BUILDING_PATH.read_text())


def test_fixture_shape(minibuild):
    assert len(minibuild.floors) == 2
    assert len(minibuild.node_ids) == 5
    assert len(minibuild.edge_ids) == 4


def test_dangling_edge_ref():
    d = doc()
    d["floors"][0]["edges"][0]["b"] = "nX"
    with pytest.raises(DanglingRef):
        load_building(json.dumps(d))


def test_duplicate_room_id():
    d = doc()
    d["floors"][0]["rooms"][1]["id"] = "R_A"
    with pytest.raises(DuplicateId):
        load_building(json.dumps(d))


def test_duplicate_id_across_kinds():
    d = doc()
    d["floors"][1]["nodes"][0]["id"] = "e1"  # collides with an edge id
    with pytest.raises(DuplicateId):
        load_building(json.dumps(d))


def test_malformed_json():
    with pytest.raises(SchemaError):
        load_building(b"{nope")


def test_missing_field():
    d = doc()
    del d["floors"][0]["nodes"][0]["room"]
    with pytest.raises(SchemaError):
        load_building(json.dumps(d))


def test_walk_edge_with_declared_length_rejected():
    d = doc()
    d["floors"][0]["edges"][0]["length"] = 9.0
    with pytest.raises(SchemaError):
        load_building(json.dumps(d))


def test_stairs_need_positive_length():
    d = doc()
    d["floors"][0]["edges"][2]["length"] = 0.0
    with pytest.raises(SchemaError):
        load_building(json.dumps(d))


def test_node_outside_room_rejected():
    d = doc()
    d["floors"][0]["nodes"][0]["x"] = 100.0
    with pytest.raises(SchemaError):
        load_building(json.dumps(d))


def test_disconnected_graph_rejected():
    d = doc()
    d["floors"][0]["edges"] = [e for e in d["floors"][0]["edges"] if e["id"] != "e3"]
    with pytest.raises(DisconnectedGraph):
        load_building(json.dumps(d))


def test_equipment_radius_positive():
    d = doc()
    d["floors"][0]["equipment"][0]["radius"] = -1.0
    with pytest.raises(SchemaError):
        load_building(json.dumps(d))


def test_edge_lengths(minibuild):
    assert minibuild.edge_length("e1") == pytest.approx(7.0)   # (0,0)-(7,0)
    assert minibuild.edge_length("e2") == pytest.approx(5.0)   # (7,0)-(7,5)
    assert minibuild.edge_length("e3") == 4.0                  # declared stairs
    assert minibuild.edge_length("e4") == pytest.approx(7.0)
    with pytest.raises(UnknownEdge):
        minibuild.edge_length("e99")


def test_pythagoras_length():
    tiny = {
        "version": 1,
        "id": "tiny",
        "floors": [
            {
                "id": "F",
                "elevation": 0.0,
                "walls": [],
                "rooms": [{"id": "R", "name": "r",
                           "polygon": [[-1, -1], [5, -1], [5, 5], [-1, 5]]}],
                "nodes": [
                    {"id": "a", "x": 0.0, "y": 0.0, "room": "R"},
                    {"id": "b", "x": 3.0, "y": 4.0, "room": "R"},
                ],
                "edges": [{"id": "ab", "a": "a", "b": "b", "kind": "walk"}],
                "equipment": [],
                "photo_anchors": [],
            }
        ],
    }
    b = load_building(json.dumps(tiny))
    assert b.edge_length("ab") == pytest.approx(5.0)


def test_round_trip_identity(minibuild):
    rendered = render_building(minibuild)
    again = load_building(rendered)
    assert again == minibuild
    assert render_building(again) == rendered
    assert again.digest() == minibuild.digest()


def test_ray_cast_examples(minibuild):
    # collinear shot down the equipment corridor
    hit = minibuild.ray_cast("F0", (5.0, 4.0), 0.0, 10.0)
    assert hit is not None and hit.equipment_id == "EQ1"
    assert hit.distance == pytest.approx(1.2)
    # unknown floor refused
    with pytest.raises(UnknownFloor):
        minibuild.ray_cast("F9", (0.0, 0.0), 0.0, 10.0)
    # pointing into a wall renders no highlight
    assert minibuild.ray_cast("F0", (5.0, 4.0), math.pi, 10.0) is None


def test_ray_cast_wall_interposed():
    d = doc()
    d["floors"][0]["walls"].append({"x1": 6.0, "y1": 3.0, "x2": 6.0, "y2": 5.0})
    b = load_building(json.dumps(d))
    assert b.ray_cast("F0", (5.0, 4.0), 0.0, 10.0) is None


def test_random_rays_agree_with_march_oracle(minibuild):
    floor = minibuild.floor("F0")
    discs = [(q.id, (q.x, q.y), q.radius) for q in floor.equipment]
    rng = random.Random(1234)
    checked = 0
    for _ in range(300):
        origin = (rng.uniform(-0.5, 8.5), rng.uniform(-1.5, 5.5))
        angle = rng.uniform(-math.pi, math.pi)
        got = minibuild.ray_cast("F0", origin, angle, 10.0)
        want = ray_march(list(floor.walls), discs, origin, angle, 10.0)
        if want[0] == "hit":
            assert got is not None, (origin, angle)
            assert got.equipment_id == want[1]
            assert abs(got.distance - want[2]) <= 0.011
        else:
            assert got is None, (origin, angle, got)
        checked += 1
    assert checked == 300
