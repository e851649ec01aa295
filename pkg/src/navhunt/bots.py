"""Scripted protocol clients: guiding radios, route-following hunters,
and a phase-driving trainer, wired through an in-process loopback.

Bots never touch the session directly; every mutation travels through the
real codec and ``SessionHost``, so a simulation exercises the whole stack
and its event log replays exactly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .building import Building
from .constants import TICK_SECONDS
from .errors import Timeout
from .protocol import (
    Body,
    EmptyBody,
    Frame,
    GuidanceBody,
    HelloBody,
    MoveBody,
    PointBody,
    ScreenshotBody,
    SessionHost,
    TeamsBody,
    decode,
    encode,
)
from .recording import EventLog
from .scenario import RegroupInZone, Scenario, objective_region, objective_target_nodes
from .session import DEBRIEF, HUNTING, PREPARATION, spawn_assignment


@dataclass
class BotPolicy:
    role: str
    reaction_delay: int = 0      # rounds a hunter waits before acting on guidance
    compliance: float = 1.0      # 1.0 = follows guidance exactly


# -- planning helpers (shared by the radio bot and its unit tests) -----------


def plan_route(
    building: Building, scenario: Scenario, from_node: str,
    obstacles: frozenset[str] | None = None,
) -> tuple[str, list[str], float | None] | None:
    """(target node, waypoints after start, final point angle) or None.

    Picks the reachable validation node nearest the objective center,
    avoiding obstacle edges. The pointing angle aims at the region center
    from the target node; zone hunts need no pointing.
    """
    blocked = scenario.obstacles if obstacles is None else obstacles
    floor_id, center, _ = objective_region(building, scenario)
    for target in objective_target_nodes(building, scenario):
        found = building.shortest_path(from_node, target, set(blocked))
        if found is None:
            continue
        path, _ = found
        angle = None
        if not isinstance(scenario.hunt_type, RegroupInZone):
            node = building.node(target)
            angle = math.atan2(center[1] - node.y, center[0] - node.x)
        return target, path[1:], angle
    return None


def radio_bot_step(
    building: Building,
    scenario: Scenario,
    hunter_nodes: dict[str, str | None],
    hunter_highlights: dict[str, str | None],
    obstacles: frozenset[str] | None = None,
) -> list[dict]:
    """Guidance payloads for hunters currently idle at a node.

    Emits next-waypoint directives toward the objective and point
    directives once a hunter stands on a validation node. Recomputes
    routes against the obstacle set it is handed, so a changed plan is
    replanned around blocked edges.
    """
    payloads: list[dict] = []
    for hunter_id, node in hunter_nodes.items():
        if node is None:
            continue  # mid-edge; let the hunter finish the hop
        plan = plan_route(building, scenario, node, obstacles)
        if plan is None:
            continue
        target, waypoints, angle = plan
        if waypoints:
            payloads.append({"kind": "waypoint", "hunter": hunter_id, "node": waypoints[0]})
        elif angle is not None and hunter_highlights.get(hunter_id) != _target_equipment(scenario):
            payloads.append({"kind": "point", "hunter": hunter_id, "node": target,
                             "angle": angle})
    return payloads


def _target_equipment(scenario: Scenario) -> str | None:
    if isinstance(scenario.hunt_type, RegroupInZone):
        return None
    return scenario.hunt_type.equipment_id


def hunter_bot_step(
    directive: dict | None,
    current_node: str | None,
    pointing: float | None,
) -> tuple[str, Body] | None:
    """Single-directive compliance: a waypoint becomes a move, a point
    directive becomes a held pointing command once the hunter stands on
    the directive's node."""
    if directive is None or current_node is None:
        return None
    if directive.get("kind") == "waypoint":
        return ("move_to", MoveBody(node_id=directive["node"]))
    if directive.get("kind") == "point" and directive.get("node") == current_node:
        if pointing != directive["angle"]:
            return ("point", PointBody(angle=directive["angle"]))
    return None


# -- live bots ----------------------------------------------------------------


class BotBase:
    def __init__(self, client_id: str, role: str, team_id: int | None):
        self.client_id = client_id
        self.role = role
        self.team_id = team_id
        self.hello_sent = False
        self.snapshot: dict | None = None
        self._round = 0

    def step(self, inbox: list[Frame], round_no: int) -> list[tuple[str, Body]]:
        self._round = round_no
        out: list[tuple[str, Body]] = []
        if not self.hello_sent:
            self.hello_sent = True
            out.append(
                ("hello", HelloBody(protocol_version=1, client_name=self.client_id,
                                    role=self.role, team_id=self.team_id))
            )
            return out
        for frame in inbox:
            if frame.type == "snapshot":
                self.snapshot = frame.body.model_dump()
            else:
                self.on_frame(frame)
        if self.snapshot is not None:
            out.extend(self.act(round_no))
        return out

    def on_frame(self, frame: Frame) -> None:
        pass

    def act(self, round_no: int) -> list[tuple[str, Body]]:
        return []


class RadioBot(BotBase):
    """Pre-briefs full routes while the team prepares its itinerary, then
    re-guides stragglers mid-hunt with next-waypoint directives."""

    def __init__(
        self, client_id: str, team_id: int, building: Building, scenario: Scenario,
        team_hunters: list[str], all_hunters: list[str],
    ):
        super().__init__(client_id, "radio", team_id)
        self.building = building
        self.scenario = scenario
        self.team_hunters = team_hunters
        self.all_hunters = all_hunters
        self.briefed = False
        self._last_sent: dict[str, int] = {}

    def act(self, round_no: int) -> list[tuple[str, Body]]:
        phase = self.snapshot["phase"]
        out: list[tuple[str, Body]] = []
        if phase == PREPARATION and not self.briefed:
            self.briefed = True
            start_nodes = self.building.room_nodes(self.scenario.start_room)
            assignment = spawn_assignment(start_nodes, self.all_hunters)
            for hunter_id in self.team_hunters:
                plan = plan_route(self.building, self.scenario, assignment[hunter_id])
                if plan is None:
                    continue
                target, waypoints, angle = plan
                payload = {"kind": "route", "hunter": hunter_id, "waypoints": waypoints,
                           "target": target, "point_angle": angle}
                out.append(("guidance", GuidanceBody(payload=payload)))
            return out
        if phase == HUNTING:
            idle_nodes: dict[str, str | None] = {}
            highlights: dict[str, str | None] = {}
            for avatar in self.snapshot["avatars"]:
                if avatar["role"] != "hunter":
                    continue
                cid = avatar["client_id"]
                idle_nodes[cid] = avatar.get("node")
                highlights[cid] = avatar.get("highlight")
            for payload in radio_bot_step(
                self.building, self.scenario, idle_nodes, highlights
            ):
                hunter_id = payload["hunter"]
                if round_no - self._last_sent.get(hunter_id, -10) < 4:
                    continue  # cooldown: give the hunter time to react
                self._last_sent[hunter_id] = round_no
                out.append(("guidance", GuidanceBody(payload=payload)))
        return out


class HunterBot(BotBase):
    """Map-blind route follower. Fully compliant hunters execute the
    pre-briefed route as one chained walk and point on arrival; partially
    compliant ones sometimes wander to a random adjacent node instead."""

    def __init__(
        self, client_id: str, team_id: int, policy: BotPolicy, seed: int,
        building: Building, scenario: Scenario,
    ):
        super().__init__(client_id, "hunter", team_id)
        self.policy = policy
        self.rng = random.Random(f"{seed}:{client_id}")
        # graph knowledge is used only to wander off-route believably
        self.building = building
        self.scenario = scenario
        self.route: dict | None = None
        self.route_done = False
        self.route_due: int | None = None
        self.pending: list[tuple[int, dict]] = []   # (due round, directive)
        self._hunt_seen: int | None = None
        self._last_point_round = -10

    def on_frame(self, frame: Frame) -> None:
        if frame.type != "guidance":
            return
        payload = frame.body.payload
        if not isinstance(payload, dict) or payload.get("hunter") != self.client_id:
            return
        if payload.get("kind") == "route":
            self.route = payload
        else:
            self.pending.append((self._round + self.policy.reaction_delay, payload))

    def act(self, round_no: int) -> list[tuple[str, Body]]:
        if self.snapshot["phase"] != HUNTING:
            return []
        if self._hunt_seen is None:
            self._hunt_seen = round_no
            self.route_due = round_no + self.policy.reaction_delay
        out: list[tuple[str, Body]] = []
        you = self.snapshot["you"]
        node = you.get("node")

        if (
            self.route is not None and not self.route_done
            and self.policy.compliance >= 1.0 and round_no >= self.route_due
        ):
            self.route_done = True
            for waypoint in self.route["waypoints"]:
                out.append(("move_to", MoveBody(node_id=waypoint)))
            return out

        if (
            self.route is not None and self.route_done
            and node == self.route["target"]
            and self.route.get("point_angle") is not None
            and you.get("pointing") != self.route["point_angle"]
            and round_no - self._last_point_round >= 3
        ):
            self._last_point_round = round_no
            out.append(("point", PointBody(angle=self.route["point_angle"])))
            return out

        # directive-following path (used by partially compliant hunters)
        ready = [d for due, d in self.pending if due <= round_no]
        self.pending = [(due, d) for due, d in self.pending if due > round_no]
        for directive in ready[-1:]:  # newest wins
            if self.rng.random() >= self.policy.compliance:
                wander = self._wander_target(node)
                if wander is not None:
                    out.append(("move_to", MoveBody(node_id=wander)))
                continue
            cmd = hunter_bot_step(directive, node, you.get("pointing"))
            if cmd is not None:
                if cmd[0] == "point":
                    if round_no - self._last_point_round < 3:
                        continue
                    self._last_point_round = round_no
                out.append(cmd)
        return out

    def _wander_target(self, node: str | None) -> str | None:
        if node is None:
            return None
        options = [
            neighbor
            for neighbor, edge_id, _ in self.building.adjacency.get(node, ())
            if edge_id not in self.scenario.obstacles
        ]
        return self.rng.choice(options) if options else None


class TrainerBot(BotBase):
    """Drives the phase machine and runs a scripted action list
    (visibility toggles, observation changes, screenshots) keyed on tick."""

    def __init__(self, client_id: str, n_teams: int, script: list[dict] | None = None):
        super().__init__(client_id, "trainer", None)
        self.n_teams = n_teams
        self.script = sorted(script or [], key=lambda a: a["at_tick"])
        self.all_joined = False   # set by the driver once every hello is in
        self.sent_preparation = False
        self.sent_start = False
        self.briefed_teams: set[int] = set()
        self.debrief_asked = False

    def on_frame(self, frame: Frame) -> None:
        if frame.type == "guidance":
            payload = frame.body.payload
            if isinstance(payload, dict) and payload.get("kind") == "route":
                if frame.body.team_id is not None:
                    self.briefed_teams.add(frame.body.team_id)

    def act(self, round_no: int) -> list[tuple[str, Body]]:
        phase = self.snapshot["phase"]
        out: list[tuple[str, Body]] = []
        if phase == "lobby" and self.all_joined and not self.sent_preparation:
            self.sent_preparation = True
            out.append(("start_preparation", EmptyBody()))
        elif phase == PREPARATION and not self.sent_start and len(self.briefed_teams) >= self.n_teams:
            self.sent_start = True
            out.append(("start_hunt", EmptyBody()))
        elif phase == HUNTING:
            tick = self.snapshot["tick"]
            while self.script and self.script[0]["at_tick"] <= tick:
                action = self.script.pop(0)
                out.append(self._scripted(action))
        elif phase == DEBRIEF and not self.debrief_asked:
            self.debrief_asked = True
            out.append(("debrief_query", EmptyBody()))
        return out

    @staticmethod
    def _scripted(action: dict) -> tuple[str, Body]:
        kind = action["type"]
        if kind == "set_visibility":
            return ("set_visibility", TeamsBody(team_ids=action["team_ids"]))
        if kind == "observe":
            return ("observe", TeamsBody(team_ids=action["team_ids"]))
        if kind == "screenshot":
            return (
                "screenshot",
                ScreenshotBody(
                    floor_id=action["floor_id"],
                    viewpoint=list(action["viewpoint"]),
                    team_id=action.get("team_id"),
                ),
            )
        raise ValueError(f"unknown scripted action {kind!r}")


# -- loopback simulation -------------------------------------------------------


@dataclass
class BotClient:
    bot: BotBase
    conn: object = None
    inbox: list[bytes] = field(default_factory=list)
    frames: list[bytes] = field(default_factory=list)
    seq: int = 0


@dataclass
class SimResult:
    log: EventLog
    scoreboard: list[tuple[int, float | None]]
    session: object
    host: SessionHost
    frames: dict[str, list[bytes]]
    rounds: int

    @property
    def winning_seconds(self) -> float:
        finished = [s for _, s in self.scoreboard if s is not None]
        return min(finished) if finished else math.inf


def run_simulation(
    building: Building,
    scenario: Scenario,
    n_teams: int = 1,
    seed: int = 0,
    hunters_per_team: int = 2,
    compliance: float = 1.0,
    reaction_delay: int | dict[int, int] = 0,
    trainer_script: list[dict] | None = None,
    max_rounds: int = 30000,
) -> SimResult:
    """Run a whole hunt over loopback: lobby to debrief, bots only.

    Fully deterministic for a given argument set; identical seeds produce
    byte-identical event logs.
    """
    host = SessionHost(building, scenario, seed, started_at=f"sim-seed-{seed}")

    def delay_for(team_id: int) -> int:
        if isinstance(reaction_delay, dict):
            return reaction_delay.get(team_id, 0)
        return reaction_delay

    all_hunters = [
        f"h{team}{chr(ord('a') + i)}"
        for team in range(1, n_teams + 1)
        for i in range(hunters_per_team)
    ]
    trainer = TrainerBot("trainer1", n_teams, trainer_script)
    bots: list[BotBase] = [trainer]
    for team in range(1, n_teams + 1):
        team_hunters = [h for h in all_hunters if h.startswith(f"h{team}")]
        bots.append(
            RadioBot(f"radio{team}", team, building, scenario, team_hunters, all_hunters)
        )
        policy = BotPolicy("hunter", delay_for(team), compliance)
        for hunter_id in team_hunters:
            bots.append(HunterBot(hunter_id, team, policy, seed, building, scenario))

    clients = []
    for bot in bots:
        client = BotClient(bot=bot)
        client.conn = host.connect(client.inbox.append)
        clients.append(client)

    rounds = 0
    trailing = 0
    while True:
        rounds += 1
        if rounds > max_rounds:
            raise Timeout(f"hunt did not finish within {max_rounds} rounds")
        host.round_start()
        for client in clients:
            delivered = list(client.inbox)
            client.inbox.clear()   # the connection keeps appending to this list
            client.frames.extend(delivered)
            frames_in = [decode(b) for b in delivered]
            for msg_type, body in client.bot.step(frames_in, rounds):
                client.seq += 1
                host.handle_bytes(client.conn, encode(Frame(client.seq, msg_type, body)))
        host.advance()
        if rounds == 1:
            trainer.all_joined = True
        if host.session.phase == DEBRIEF:
            trailing += 1
            if trailing >= 3:  # let hunt_ended/scoreboard/debrief frames flow
                break

    for client in clients:  # final fan-out not yet delivered
        client.frames.extend(client.inbox)

    return SimResult(
        log=host.log,
        scoreboard=host.session.scoreboard(),
        session=host.session,
        host=host,
        frames={c.bot.client_id: c.frames for c in clients},
        rounds=rounds,
    )


def expected_finish_seconds(
    building: Building, scenario: Scenario, hunters_per_team: int = 2
) -> float:
    """Oracle arithmetic: slowest pre-briefed route length / walking speed
    plus the two-second validation hold.

    Zone hunts validate from the circle boundary, so the final straight leg
    is shortened by however much of the zone radius extends past the target
    node along the approach.
    """
    start_nodes = building.room_nodes(scenario.start_room)
    hunters = [chr(ord("a") + i) for i in range(hunters_per_team)]
    assignment = spawn_assignment(start_nodes, hunters)
    longest = 0.0
    for node in assignment.values():
        plan = plan_route(building, scenario, node)
        if plan is None:
            return math.inf
        target, _, _ = plan
        _, length = building.shortest_path(node, target, set(scenario.obstacles))
        if isinstance(scenario.hunt_type, RegroupInZone):
            _, center, radius = objective_region(building, scenario)
            target_node = building.node(target)
            slack = radius - math.hypot(target_node.x - center[0], target_node.y - center[1])
            length = max(0.0, length - max(0.0, slack))
        longest = max(longest, length)
    return longest / 1.4 + 2.0
