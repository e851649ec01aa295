import pytest

from navhunt.errors import (
    EmptyZone,
    UnknownEdge,
    UnknownEquipment,
    UnknownRoom,
    UnreachableObjective,
)
from navhunt.scenario import (
    create_hunt,
    load_scenario,
    objective_region,
    objective_target_nodes,
    place_obstacle,
    render_scenario,
)
from oracles import dijkstra_length


def make(minibuild, **overrides):
    config = {
        "hunt_type": {"kind": "point_at_equipment", "equipment_id": "EQ1"},
        "start_room": "R_C",
        "objective_text": "find it",
    }
    config.update(overrides)
    return create_hunt(minibuild, config)


def test_equipment_hunt_from_rc_is_valid(minibuild):
    scn = make(minibuild)
    assert scn.start_room == "R_C"
    assert scn.obstacles == frozenset()
    # a route to a validation node exists for both start nodes
    for start in minibuild.room_nodes("R_C"):
        assert any(
            dijkstra_length(minibuild.adjacency, start, t) is not None
            for t in objective_target_nodes(minibuild, scn)
        )


def test_unknown_equipment(minibuild):
    with pytest.raises(UnknownEquipment):
        make(minibuild, hunt_type={"kind": "point_at_equipment", "equipment_id": "EQ_none"})


def test_unknown_room(minibuild):
    with pytest.raises(UnknownRoom):
        make(minibuild, start_room="R_X")


def test_zero_radius_zone(minibuild):
    with pytest.raises(EmptyZone):
        make(minibuild, hunt_type={"kind": "regroup_in_zone", "floor_id": "F1",
                                   "center": [0.0, 5.0], "radius": 0.0})


def test_zone_outside_all_rooms(minibuild):
    with pytest.raises(EmptyZone):
        make(minibuild, hunt_type={"kind": "regroup_in_zone", "floor_id": "F1",
                                   "center": [50.0, 50.0], "radius": 1.0})


def test_zone_without_any_node_is_unreachable(minibuild):
    # touches a room but no node stands inside, so no one can validate
    with pytest.raises(UnreachableObjective):
        make(minibuild, hunt_type={"kind": "regroup_in_zone", "floor_id": "F1",
                                   "center": [3.5, 6.5], "radius": 0.6})


def test_objective_region_equipment(minibuild, eq1_scenario):
    assert objective_region(minibuild, eq1_scenario) == ("F0", (6.5, 4.0), 0.3)


def test_objective_region_zone(minibuild):
    scn = make(minibuild, hunt_type={"kind": "regroup_in_zone", "floor_id": "F1",
                                     "center": [0.0, 5.0], "radius": 1.5})
    assert objective_region(minibuild, scn) == ("F1", (0.0, 5.0), 1.5)


def test_equipment_pointable_only_past_the_alcove(minibuild, eq1_scenario):
    # the alcove walls make n1 the only node with a clear shot
    assert objective_target_nodes(minibuild, eq1_scenario) == ["n1"]


def test_blocking_only_route_refused(minibuild, eq1_scenario):
    # n5's only edge: blocking it cuts the objective off from R_C
    with pytest.raises(UnreachableObjective):
        place_obstacle(minibuild, eq1_scenario, "e4")


def test_rejected_placement_leaves_scenario_byte_identical(minibuild, eq1_scenario):
    before = render_scenario(eq1_scenario)
    with pytest.raises(UnreachableObjective):
        place_obstacle(minibuild, eq1_scenario, "e4")
    assert render_scenario(eq1_scenario) == before


def test_accepted_obstacle_off_route(minibuild):
    # start in R_B, regroup at n3: e1 (n1-n2) is not on any start-objective route
    scn = make(
        minibuild,
        hunt_type={"kind": "regroup_in_zone", "floor_id": "F0",
                   "center": [7.0, 5.0], "radius": 0.5},
        start_room="R_B",
    )
    grown = place_obstacle(minibuild, scn, "e1")
    assert grown.obstacles == frozenset({"e1"})
    assert scn.obstacles == frozenset()  # original untouched


def test_placement_idempotent(minibuild):
    scn = make(
        minibuild,
        hunt_type={"kind": "regroup_in_zone", "floor_id": "F0",
                   "center": [7.0, 5.0], "radius": 0.5},
        start_room="R_B",
    )
    once = place_obstacle(minibuild, scn, "e1")
    twice = place_obstacle(minibuild, once, "e1")
    assert twice == once


def test_unknown_edge(minibuild, eq1_scenario):
    with pytest.raises(UnknownEdge):
        place_obstacle(minibuild, eq1_scenario, "e99")


def test_scenario_file_round_trip(minibuild, eq1_scenario):
    data = render_scenario(eq1_scenario)
    again = load_scenario(minibuild, data)
    assert again == eq1_scenario
    assert render_scenario(again) == data


def test_obstacle_config_referencing_unknown_edge(minibuild):
    with pytest.raises(UnknownEdge):
        make(minibuild, obstacles=["e99"])


def test_markings_do_not_affect_pathing(minibuild):
    scn = make(minibuild, markings=[{"floor_id": "F0", "point": [1.0, 1.0], "label": "x"}])
    plain = make(minibuild)
    assert objective_target_nodes(minibuild, scn) == objective_target_nodes(minibuild, plain)
