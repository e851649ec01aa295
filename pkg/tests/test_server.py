import json

import pytest
from fastapi.testclient import TestClient

from navhunt.building import render_building
from navhunt.protocol import Frame, HelloBody, MoveBody, decode, encode
from navhunt.server import create_app


@pytest.fixture()
def client(minibuild, eq1_scenario):
    app = create_app(minibuild, eq1_scenario, seed=5, tick_hz=200.0)
    with TestClient(app) as tc:
        yield tc


def send(ws, seq, msg_type, body):
    ws.send_text(encode(Frame(seq, msg_type, body)).decode())


def recv(ws) -> Frame:
    return decode(ws.receive_text())


def recv_until(ws, wanted: str, limit: int = 200) -> Frame:
    for _ in range(limit):
        frame = recv(ws)
        if frame.type == wanted:
            return frame
    raise AssertionError(f"no {wanted} frame within {limit} frames")


def test_health_endpoint(client):
    response = client.get("/health")
    assert response.status_code == 200
    doc = response.json()
    assert doc["status"] == "ok"
    assert doc["phase"] == "lobby"


def test_building_endpoint_serves_exact_document(client, minibuild):
    response = client.get("/building")
    assert response.status_code == 200
    assert response.content == render_building(minibuild)


def test_scenario_endpoint(client):
    doc = client.get("/scenario").json()
    assert doc["start_room"] == "R_C"
    assert doc["hunt_type"]["equipment_id"] == "EQ1"


def test_debrief_endpoint_requires_hunt(client):
    assert client.get("/debrief").status_code == 409


def test_ws_handshake_and_snapshot(client):
    with client.websocket_connect("/ws") as ws:
        send(ws, 1, "hello", HelloBody(protocol_version=1, client_name="trainer1",
                                       role="trainer"))
        welcome = recv(ws)
        assert welcome.type == "welcome"
        assert welcome.body.client_id == "trainer1"
        snapshot = recv_until(ws, "snapshot")
        assert snapshot.body.phase == "lobby"
        assert snapshot.body.you["client_id"] == "trainer1"


def test_ws_version_mismatch(client):
    with client.websocket_connect("/ws") as ws:
        send(ws, 1, "hello", HelloBody(protocol_version=9, client_name="x", role="trainer"))
        frame = recv(ws)
        assert frame.type == "refused"
        assert frame.body.reason == "VersionMismatch"


def test_ws_command_nacked_in_wrong_phase(client):
    with client.websocket_connect("/ws") as ws:
        send(ws, 1, "hello", HelloBody(protocol_version=1, client_name="h1",
                                       role="hunter", team_id=1))
        recv_until(ws, "welcome")
        send(ws, 2, "move_to", MoveBody(node_id="n4"))
        nack = recv_until(ws, "nack")
        assert nack.body.error == "WrongPhase"
        assert nack.body.seq == 2


def test_ws_bad_frame_nacked(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_text(json.dumps({"seq": 1, "type": "nope", "body": {}}))
        frame = recv(ws)
        assert frame.type == "nack"
        assert frame.body.error == "DecodeError"


def test_two_clients_distinct_snapshots(client):
    with client.websocket_connect("/ws") as ws1, client.websocket_connect("/ws") as ws2:
        send(ws1, 1, "hello", HelloBody(protocol_version=1, client_name="trainer1",
                                        role="trainer"))
        send(ws2, 1, "hello", HelloBody(protocol_version=1, client_name="radio1",
                                        role="radio", team_id=1))
        recv_until(ws1, "welcome")
        recv_until(ws2, "welcome")
        snap1 = recv_until(ws1, "snapshot")
        snap2 = recv_until(ws2, "snapshot")
        assert snap1.body.you["client_id"] == "trainer1"
        assert snap2.body.you["client_id"] == "radio1"
