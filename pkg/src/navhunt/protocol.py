"""Versioned wire protocol: framing, message catalog, handshake, host.

Every exchange is one UTF-8 JSON object per frame (one WebSocket text
message, or one NDJSON line in TCP/test mode). ``SessionHost`` is the
transport-agnostic server side: the network layer feeds it raw frame
bytes in arrival order and it answers through per-connection senders.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

from pydantic import BaseModel, ConfigDict, ValidationError

from .building import Building
from .commands import MUTATING_COMMANDS, apply_command
from .constants import MAX_FRAME_BYTES, PROTOCOL_VERSION
from .errors import (
    DecodeError,
    DuplicateClient,
    HuntError,
    JoinRejected,
    OversizeFrame,
    VersionMismatch,
)
from .recording import EventLog
from .scenario import Scenario, scenario_summary
from .session import DEBRIEF, HUNTING, Session


class Body(BaseModel):
    model_config = ConfigDict(extra="forbid")


class HelloBody(Body):
    protocol_version: int
    client_name: str
    role: str
    team_id: int | None = None


class WelcomeBody(Body):
    session_id: str
    client_id: str
    building_digest: str
    scenario_summary: dict
    protocol_version: int = PROTOCOL_VERSION


class AckBody(Body):
    seq: int


class NackBody(Body):
    seq: int
    error: str
    detail: str = ""


class RefusedBody(Body):
    reason: str
    detail: str = ""


class CreateHuntBody(Body):
    config: dict


class PlaceObstacleBody(Body):
    edge_id: str


class EmptyBody(Body):
    pass


class MoveBody(Body):
    node_id: str


class PointBody(Body):
    angle: float | None = None


class GuidanceBody(Body):
    payload: Any = None
    # set on server->client relays only
    from_radio: str | None = None
    team_id: int | None = None


class ScreenshotBody(Body):
    floor_id: str
    viewpoint: list[float]
    team_id: int | None = None


class TeamsBody(Body):
    team_ids: list[int]


class ResumeBody(Body):
    client_id: str
    token: str


class SnapshotBody(Body):
    tick: int
    phase: str
    you: dict
    avatars: list[dict]
    teams: dict
    markings: list[dict]
    scoreboard: list[dict] | None = None


class ScoreEntry(Body):
    team_id: int
    seconds: float | None = None


class ScoreboardBody(Body):
    entries: list[ScoreEntry]


class HuntEndedBody(Body):
    final_tick: int


class DebriefDataBody(Body):
    bundle: dict


CLIENT_CATALOG: dict[str, type[Body]] = {
    "hello": HelloBody,
    "create_hunt": CreateHuntBody,
    "place_obstacle": PlaceObstacleBody,
    "start_preparation": EmptyBody,
    "start_hunt": EmptyBody,
    "move_to": MoveBody,
    "move_radio": MoveBody,
    "point": PointBody,
    "guidance": GuidanceBody,
    "screenshot": ScreenshotBody,
    "set_visibility": TeamsBody,
    "observe": TeamsBody,
    "debrief_query": EmptyBody,
    "resume": ResumeBody,  # reserved; v1 treats reconnection as a fresh join
}

SERVER_CATALOG: dict[str, type[Body]] = {
    "welcome": WelcomeBody,
    "ack": AckBody,
    "nack": NackBody,
    "snapshot": SnapshotBody,
    "guidance": GuidanceBody,
    "scoreboard": ScoreboardBody,
    "hunt_ended": HuntEndedBody,
    "debrief_data": DebriefDataBody,
    "refused": RefusedBody,
}

CATALOG: dict[str, type[Body]] = {**CLIENT_CATALOG, **SERVER_CATALOG}


@dataclass(frozen=True)
class Frame:
    seq: int
    type: str
    body: Body
    tick: int | None = None


def encode(frame: Frame) -> bytes:
    """One NDJSON line; raises OversizeFrame above 64 KiB."""
    doc: dict = {"seq": frame.seq, "type": frame.type, "body": frame.body.model_dump()}
    if frame.tick is not None:
        doc["tick"] = frame.tick
    data = (json.dumps(doc, separators=(",", ":")) + "\n").encode()
    if len(data) > MAX_FRAME_BYTES:
        raise OversizeFrame(f"{len(data)} bytes")
    return data


def decode(data: bytes | str) -> Frame:
    if isinstance(data, str):
        data = data.encode()
    if len(data) > MAX_FRAME_BYTES:
        raise OversizeFrame(f"{len(data)} bytes")
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DecodeError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DecodeError("frame must be a JSON object")
    tag = doc.get("type")
    model = CATALOG.get(tag)
    if model is None:
        raise DecodeError(str(tag))
    seq = doc.get("seq")
    if not isinstance(seq, int):
        raise DecodeError(f"{tag}: missing integer seq")
    tick = doc.get("tick")
    if tick is not None and not isinstance(tick, int):
        raise DecodeError(f"{tag}: tick must be an integer")
    try:
        body = model.model_validate(doc.get("body") or {})
    except ValidationError as exc:
        raise DecodeError(f"{tag}: {exc.errors()[0]['msg']}") from None
    return Frame(seq=seq, type=tag, body=body, tick=tick)


# -- server side ---------------------------------------------------------------


@dataclass
class ConnState:
    send: Callable[[bytes], None]
    client_id: str | None = None
    last_seq_seen: int = 0
    out_seq: int = 0
    alive: bool = True

    def push(self, msg_type: str, body: Body, tick: int | None = None) -> None:
        if not self.alive:
            return
        self.out_seq += 1
        try:
            self.send(encode(Frame(self.out_seq, msg_type, body, tick)))
        except Exception:
            # transport failure detaches the client; the tick loop never stalls
            self.alive = False


class SessionHost:
    """Owns the session, the event log, and all connected clients.

    Single-threaded by contract: the owner loop calls ``handle_bytes`` for
    every inbound frame in arrival order, then ``advance`` once per tick.
    """

    def __init__(
        self,
        building: Building,
        scenario: Scenario,
        seed: int,
        started_at: str = "",
    ):
        self.building = building
        self.session = Session(building, scenario, seed)
        self.log = EventLog.fresh(
            building_digest=building.digest(),
            scenario_doc=scenario_summary(scenario),
            seed=seed,
            started_at=started_at,
        )
        self.connections: list[ConnState] = []
        self._by_client: dict[str, ConnState] = {}
        self._seq = 0
        self._tick_armed: bool | None = None

    # -- connection lifecycle --

    def connect(self, send: Callable[[bytes], None]) -> ConnState:
        conn = ConnState(send=send)
        self.connections.append(conn)
        return conn

    def disconnect(self, conn: ConnState) -> None:
        conn.alive = False
        if conn in self.connections:
            self.connections.remove(conn)
        if conn.client_id and self._by_client.get(conn.client_id) is conn:
            del self._by_client[conn.client_id]

    # -- inbound --

    def handle_bytes(self, conn: ConnState, data: bytes | str) -> None:
        try:
            frame = decode(data)
        except (DecodeError, OversizeFrame) as exc:
            conn.push("nack", NackBody(seq=0, error=type(exc).__name__, detail=exc.detail))
            return
        if frame.type == "hello":
            self._handshake(conn, frame)
            return
        if conn.client_id is None:
            conn.push("refused", RefusedBody(reason="HandshakeRequired"))
            return
        if frame.seq <= conn.last_seq_seen:
            # duplicate delivery: acknowledge, never re-apply
            conn.push("ack", AckBody(seq=frame.seq), tick=self.session.tick_count)
            return
        conn.last_seq_seen = frame.seq
        self._dispatch(conn, frame)

    def _handshake(self, conn: ConnState, frame: Frame) -> None:
        hello: HelloBody = frame.body
        if hello.protocol_version != PROTOCOL_VERSION:
            conn.push(
                "refused",
                RefusedBody(
                    reason="VersionMismatch",
                    detail=f"server speaks protocol {PROTOCOL_VERSION}",
                ),
            )
            return
        if conn.client_id is not None:
            conn.push("refused", RefusedBody(reason="AlreadyJoined", detail=conn.client_id))
            return
        client_id = hello.client_name
        if client_id in self._by_client:
            err = JoinRejected(DuplicateClient(client_id))
            conn.push("refused", RefusedBody(reason="JoinRejected", detail=err.detail))
            return
        outcome = self._apply_logged(client_id, "hello", hello.model_dump())
        if not outcome.ok:
            err = f"{outcome.error}: {outcome.detail}"
            conn.push("refused", RefusedBody(reason="JoinRejected", detail=err))
            return
        conn.client_id = client_id
        conn.last_seq_seen = frame.seq
        self._by_client[client_id] = conn
        conn.push(
            "welcome",
            WelcomeBody(
                session_id=self.session.session_id,
                client_id=client_id,
                building_digest=self.log.header["building_digest"],
                scenario_summary=scenario_summary(self.session.scenario),
            ),
        )

    def _dispatch(self, conn: ConnState, frame: Frame) -> None:
        tick = self.session.tick_count
        if frame.type == "debrief_query":
            self._answer_debrief(conn, frame)
            return
        if frame.type == "resume":
            conn.push(
                "nack",
                NackBody(seq=frame.seq, error="NotSupported",
                         detail="v1 reconnection is a fresh lobby join"),
                tick=tick,
            )
            return
        if frame.type not in MUTATING_COMMANDS:
            conn.push("nack", NackBody(seq=frame.seq, error="DecodeError",
                                       detail=f"unexpected type {frame.type}"), tick=tick)
            return
        outcome = self._apply_logged(conn.client_id, frame.type, frame.body.model_dump())
        if outcome.ok:
            conn.push("ack", AckBody(seq=frame.seq), tick=tick)
        else:
            conn.push("nack", NackBody(seq=frame.seq, error=outcome.error,
                                       detail=outcome.detail), tick=tick)
        if outcome.guidance is not None:
            team_id, recipients = outcome.guidance
            relay = GuidanceBody(
                payload=frame.body.payload, from_radio=conn.client_id, team_id=team_id
            )
            for rcpt in recipients:
                target = self._by_client.get(rcpt)
                if target is not None:
                    target.push("guidance", relay, tick=tick)
        if any(e["type"] == "phase" for e in outcome.events):
            self._checkpoint()

    def _apply_logged(self, client_id: str, msg_type: str, body: dict):
        """Log then apply; logging first keeps the record complete even for
        commands the session refuses (replay re-refuses them identically)."""
        self._seq += 1
        outcome = apply_command(self.session, client_id, msg_type, body)
        self.log.append(
            self.session.tick_count,
            self._seq,
            f"cmd/{msg_type}",
            {
                "client": client_id,
                "body": body,
                "outcome": "ack" if outcome.ok else f"nack:{outcome.error}",
            },
        )
        for event in outcome.events:
            self._seq += 1
            self.log.append(self.session.tick_count, self._seq, event["type"],
                            {k: v for k, v in event.items() if k != "type"})
        return outcome

    def _answer_debrief(self, conn: ConnState, frame: Frame) -> None:
        from . import recording  # local import: recording also consumes this module's codec

        if self.session.phase not in (HUNTING, DEBRIEF):
            conn.push("nack", NackBody(seq=frame.seq, error="WrongPhase",
                                       detail="no hunt data yet"), tick=self.session.tick_count)
            return
        bundle = recording.build_debrief_bundle(self.building, self.log)
        conn.push("ack", AckBody(seq=frame.seq), tick=self.session.tick_count)
        conn.push("debrief_data", DebriefDataBody(bundle=bundle), tick=self.session.tick_count)

    # -- tick / fan-out --

    def round_start(self) -> None:
        """Mark the start of an owner-loop turn, before inbound frames.

        The clock only advances on turns that began in the hunting phase:
        the tick after start_hunt first carries the spawn snapshot (the
        starting gun), so clients reacting to it act at hunt time zero.
        """
        self._tick_armed = self.session.phase == HUNTING

    def advance(self) -> None:
        """One owner-loop turn: advance the clock if hunting, then fan out."""
        was_hunting = self._tick_armed
        if was_hunting is None:
            was_hunting = self.session.phase == HUNTING
        self._tick_armed = None
        ended = False
        if was_hunting and self.session.phase == HUNTING:
            for event in self.session.tick():
                self._seq += 1
                self.log.append(self.session.tick_count, self._seq, event["type"],
                                {k: v for k, v in event.items() if k != "type"})
                if event["type"] == "hunt_ended":
                    ended = True
            if self.session.tick_count % 100 == 0:
                self._checkpoint()
        if ended:
            self._checkpoint()
            board = ScoreboardBody(
                entries=[ScoreEntry(**e) for e in self.session.scoreboard_view()]
            )
            for conn in list(self.connections):
                conn.push("hunt_ended", HuntEndedBody(final_tick=self.session.tick_count),
                          tick=self.session.tick_count)
                conn.push("scoreboard", board, tick=self.session.tick_count)
        self.broadcast_snapshots()

    def broadcast_snapshots(self) -> None:
        for conn in list(self.connections):
            if not conn.alive or conn.client_id is None:
                continue
            view = self.session.visibility_view(conn.client_id)
            conn.push("snapshot", SnapshotBody(**view), tick=self.session.tick_count)
        for conn in list(self.connections):
            if not conn.alive:
                self.disconnect(conn)

    def _checkpoint(self) -> None:
        self._seq += 1
        self.log.append(self.session.tick_count, self._seq, "checkpoint",
                        {"hash": self.session.state_hash(), "phase": self.session.phase})
