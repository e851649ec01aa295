"""Authoritative hunt simulation: phases, avatars, movement, validation.

The session is single-owner and fully deterministic: identical command
sequences applied at identical ticks reproduce identical state hashes.
The network layer funnels all commands into one totally ordered queue;
this module never sees a socket.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .building import Building
from .constants import POINTING_RANGE, STEP_METERS, TICK_SECONDS, VALIDATION_TICKS
from .errors import (
    DuplicateClient,
    EdgeBlocked,
    HuntError,
    IncompleteTeam,
    NoTrainer,
    NotAdjacent,
    NotTeamRadio,
    NotTrainer,
    ScenarioBuildingMismatch,
    SecondTrainer,
    UnknownClient,
    UnknownTeam,
    WrongPhase,
)
from .scenario import RegroupInZone, Scenario, objective_region
from .geometry import distance

LOBBY = "lobby"
PREPARATION = "preparation"
HUNTING = "hunting"
DEBRIEF = "debrief"

HUNTER = "hunter"
RADIO = "radio"
TRAINER = "trainer"


class RoleMismatch(HuntError):
    """Command is not available to the sender's role."""


@dataclass
class Motion:
    from_node: str
    edge_id: str
    progress: float          # meters along the current edge
    path: list[str]          # remaining waypoint node ids, current target first


@dataclass
class Avatar:
    client_id: str
    role: str
    team_id: int | None
    floor_id: str | None = None
    x: float | None = None
    y: float | None = None
    node: str | None = None          # set when standing on a node
    motion: Motion | None = None
    pointing: float | None = None    # ray angle, radians
    highlight: str | None = None     # equipment id resolved this tick

    @property
    def spawned(self) -> bool:
        return self.floor_id is not None


@dataclass
class Team:
    team_id: int
    radios: list[str] = field(default_factory=list)
    hunters: list[str] = field(default_factory=list)
    validation_progress: int = 0
    finish_tick: int | None = None

    @property
    def radio(self) -> str | None:
        return self.radios[0] if self.radios else None

    @property
    def finished(self) -> bool:
        return self.finish_tick is not None


@dataclass
class Screenshot:
    tick: int
    floor_id: str
    viewpoint: tuple[float, float]
    team_id: int | None = None


@dataclass
class TrainerState:
    client_id: str | None = None
    visible_to: set[int] = field(default_factory=set)
    observed_teams: set[int] = field(default_factory=set)
    screenshots: list[Screenshot] = field(default_factory=list)


def spawn_assignment(start_nodes: list[str], hunter_ids: list[str]) -> dict[str, str]:
    """Deterministic hunter spawn rule: sorted client ids wrap around the
    sorted start-room node list. Shared with bots so they can pre-plan."""
    nodes = sorted(start_nodes)
    return {cid: nodes[i % len(nodes)] for i, cid in enumerate(sorted(hunter_ids))}


class Session:
    """One live hunt. Mutate only through the command methods and tick()."""

    def __init__(self, building: Building, scenario: Scenario, seed: int):
        if scenario.building_id != building.id:
            raise ScenarioBuildingMismatch(
                f"scenario targets {scenario.building_id!r}, building is {building.id!r}"
            )
        self.building = building
        self.scenario = scenario
        self.rng_seed = seed
        self.session_id = "s-" + hashlib.sha256(
            f"{building.id}:{scenario.id}:{seed}".encode()
        ).hexdigest()[:12]
        self.phase = LOBBY
        self.tick_count = 0
        self.hunt_start_tick = 0
        self.avatars: dict[str, Avatar] = {}
        self.teams: dict[int, Team] = {}
        self.trainer = TrainerState()

    # -- roster -------------------------------------------------------------

    def join(self, client_id: str, role: str, team_id: int | None = None) -> None:
        if self.phase != LOBBY:
            raise WrongPhase("joining is only possible in the lobby")
        if client_id in self.avatars:
            raise DuplicateClient(client_id)
        if role == TRAINER:
            if self.trainer.client_id is not None:
                raise SecondTrainer(self.trainer.client_id)
            self.trainer.client_id = client_id
            self.avatars[client_id] = Avatar(client_id, role, None)
            return
        if role not in (HUNTER, RADIO):
            raise RoleMismatch(f"unknown role {role!r}")
        if not isinstance(team_id, int) or team_id < 1:
            raise UnknownTeam(f"{role} must join a team (positive id), got {team_id!r}")
        team = self.teams.setdefault(team_id, Team(team_id))
        if role == RADIO:
            team.radios.append(client_id)
        else:
            team.hunters.append(client_id)
        self.avatars[client_id] = Avatar(client_id, role, team_id)

    def start_preparation(self) -> list[dict]:
        if self.phase != LOBBY:
            raise WrongPhase(f"cannot start preparation from {self.phase}")
        if self.trainer.client_id is None:
            raise NoTrainer("a trainer must join before preparation")
        if not self.teams:
            raise IncompleteTeam("no teams joined")
        for team in self.teams.values():
            if len(team.radios) != 1 or not (2 <= len(team.hunters) <= 3):
                raise IncompleteTeam(
                    f"team {team.team_id} has {len(team.radios)} radios and "
                    f"{len(team.hunters)} hunters; need 1 radio and 2-3 hunters"
                )
        self.phase = PREPARATION
        self.trainer.observed_teams = set(self.teams)
        return [{"type": "phase", "phase": PREPARATION}]

    def start_hunt(self) -> list[dict]:
        if self.phase != PREPARATION:
            raise WrongPhase(f"cannot start the hunt from {self.phase}")
        start_nodes = self.building.room_nodes(self.scenario.start_room)
        hunters = [a.client_id for a in self.avatars.values() if a.role == HUNTER]
        assignment = spawn_assignment(start_nodes, hunters)
        events: list[dict] = [{"type": "phase", "phase": HUNTING}]
        first = sorted(start_nodes)[0]
        for avatar in self.avatars.values():
            node = assignment[avatar.client_id] if avatar.role == HUNTER else first
            self._place(avatar, node)
            events.append(
                {"type": "spawn", "client": avatar.client_id, "node": node}
            )
        self.phase = HUNTING
        self.hunt_start_tick = self.tick_count
        return events

    def _place(self, avatar: Avatar, node_id: str) -> None:
        node = self.building.node(node_id)
        avatar.node = node_id
        avatar.floor_id = self.building.node_floor(node_id)
        avatar.x, avatar.y = node.x, node.y
        avatar.motion = None

    def _avatar(self, client_id: str) -> Avatar:
        try:
            return self.avatars[client_id]
        except KeyError:
            raise UnknownClient(client_id) from None

    # -- commands -------------------------------------------------------------

    def move_to(self, client_id: str, node_id: str) -> None:
        if self.phase != HUNTING:
            raise WrongPhase("hunters move only during the hunt")
        avatar = self._avatar(client_id)
        if avatar.role != HUNTER:
            raise RoleMismatch("only hunters walk the nav graph")
        self.building.node(node_id)
        tail = avatar.motion.path[-1] if avatar.motion else avatar.node
        edge = self.building.edge_between(tail, node_id)
        if edge is None:
            raise NotAdjacent(f"{node_id} is not adjacent to {tail}")
        if edge.id in self.scenario.obstacles:
            raise EdgeBlocked(edge.id)
        if avatar.motion:
            avatar.motion.path.append(node_id)
        else:
            avatar.motion = Motion(avatar.node, edge.id, 0.0, [node_id])
            avatar.node = None

    def move_radio(self, client_id: str, node_id: str) -> None:
        if self.phase != HUNTING:
            raise WrongPhase("radios reposition only during the hunt")
        avatar = self._avatar(client_id)
        if avatar.role != RADIO:
            raise RoleMismatch("only radios teleport between nodes")
        self._place(avatar, node_id)

    def set_pointing(self, client_id: str, angle: float | None) -> None:
        if self.phase != HUNTING:
            raise WrongPhase("pointing works only during the hunt")
        avatar = self._avatar(client_id)
        avatar.pointing = angle
        if angle is None:
            avatar.highlight = None

    def send_guidance(self, client_id: str, payload) -> tuple[int, list[str]]:
        """Validate the sender and return (team_id, recipient client ids).

        The caller relays the payload verbatim; the session stores nothing.
        """
        if self.phase not in (PREPARATION, HUNTING):
            raise WrongPhase("guidance flows during preparation and the hunt")
        avatar = self._avatar(client_id)
        team = self.teams.get(avatar.team_id) if avatar.team_id else None
        if avatar.role != RADIO or team is None or team.radio != client_id:
            raise NotTeamRadio(client_id)
        recipients = list(team.hunters)
        if self.trainer.client_id:
            recipients.append(self.trainer.client_id)
        return team.team_id, recipients

    def trainer_screenshot(
        self, client_id: str, floor_id: str, viewpoint: tuple[float, float],
        team_id: int | None = None,
    ) -> Screenshot:
        if self.phase != HUNTING:
            raise WrongPhase("screenshots are taken during the hunt")
        if client_id != self.trainer.client_id:
            raise NotTrainer(client_id)
        self.building.floor(floor_id)
        if team_id is not None and team_id not in self.teams:
            raise UnknownTeam(str(team_id))
        shot = Screenshot(self.tick_count, floor_id, (viewpoint[0], viewpoint[1]), team_id)
        self.trainer.screenshots.append(shot)
        return shot

    def set_visibility(self, client_id: str, team_ids: list[int]) -> None:
        if client_id != self.trainer.client_id:
            raise NotTrainer(client_id)
        for t in team_ids:
            if t not in self.teams:
                raise UnknownTeam(str(t))
        self.trainer.visible_to = set(team_ids)

    def observe(self, client_id: str, team_ids: list[int]) -> None:
        if client_id != self.trainer.client_id:
            raise NotTrainer(client_id)
        for t in team_ids:
            if t not in self.teams:
                raise UnknownTeam(str(t))
        self.trainer.observed_teams = set(team_ids)

    # -- simulation ------------------------------------------------------------

    def tick(self) -> list[dict]:
        """Advance 50 ms: motion, rays, validation. Returns transition events."""
        if self.phase != HUNTING:
            raise WrongPhase("ticks advance only while hunting")
        self.tick_count += 1
        for avatar in self.avatars.values():
            if avatar.motion is not None:
                self._integrate(avatar)
        for avatar in self.avatars.values():
            self._resolve_highlight(avatar)
        events: list[dict] = []
        for team_id in sorted(self.teams):
            events.extend(self._validation_events(team_id))
        if self.teams and all(t.finished for t in self.teams.values()):
            self.phase = DEBRIEF
            events.append({"type": "hunt_ended", "final_tick": self.tick_count})
            events.append({"type": "phase", "phase": DEBRIEF})
        return events

    def _integrate(self, avatar: Avatar) -> None:
        budget = STEP_METERS
        while budget > 0.0 and avatar.motion is not None:
            m = avatar.motion
            edge_len = self.building.edge_length(m.edge_id)
            remaining = edge_len - m.progress
            if budget < remaining:
                m.progress += budget
                budget = 0.0
                a = self.building.node(m.from_node)
                b = self.building.node(m.path[0])
                frac = m.progress / edge_len
                avatar.x = a.x + (b.x - a.x) * frac
                avatar.y = a.y + (b.y - a.y) * frac
                # mid-edge the avatar still counts on the origin node's floor
                avatar.floor_id = self.building.node_floor(m.from_node)
            else:
                budget -= remaining
                reached = m.path.pop(0)
                self._place(avatar, reached)
                if m.path:
                    edge = self.building.edge_between(reached, m.path[0])
                    avatar.motion = Motion(reached, edge.id, 0.0, m.path)
                    avatar.node = None

    def validation_step(self, team_id: int) -> int:
        """Advance one team's two-second timer for the current tick and
        return its progress. The all-hunters condition either increments
        the run or hard-resets it; 40 consecutive held ticks finish."""
        self._validation_events(team_id)
        return self.teams[team_id].validation_progress

    def _validation_events(self, team_id: int) -> list[dict]:
        team = self.teams[team_id]
        if team.finished:
            return []
        if self._objective_condition(team):
            team.validation_progress += 1
        else:
            team.validation_progress = 0
        if team.validation_progress >= VALIDATION_TICKS:
            team.finish_tick = self.tick_count
            seconds = (team.finish_tick - self.hunt_start_tick) * TICK_SECONDS
            return [{"type": "validated", "team": team_id,
                     "finish_tick": team.finish_tick, "seconds": seconds}]
        return []

    def _resolve_highlight(self, avatar: Avatar) -> None:
        if avatar.pointing is None or not avatar.spawned:
            avatar.highlight = None
            return
        hit = self.building.ray_cast(
            avatar.floor_id, (avatar.x, avatar.y), avatar.pointing, POINTING_RANGE
        )
        avatar.highlight = hit.equipment_id if hit else None

    def _objective_condition(self, team: Team) -> bool:
        """All of the team's hunters satisfy the objective this tick."""
        floor_id, center, radius = objective_region(self.building, self.scenario)
        for hunter_id in team.hunters:
            avatar = self.avatars[hunter_id]
            if isinstance(self.scenario.hunt_type, RegroupInZone):
                if avatar.floor_id != floor_id:
                    return False
                if distance((avatar.x, avatar.y), center) > radius:
                    return False
            else:
                if avatar.highlight != self.scenario.hunt_type.equipment_id:
                    return False
        return True

    # -- views -----------------------------------------------------------------

    def visibility_view(self, client_id: str) -> dict:
        """The role-filtered snapshot delivered to one client each tick."""
        me = self._avatar(client_id)
        visible: list[Avatar] = []
        if me.role == TRAINER:
            for avatar in self.avatars.values():
                if avatar.client_id == client_id:
                    continue
                if avatar.team_id in self.trainer.observed_teams:
                    visible.append(avatar)
        else:
            for avatar in self.avatars.values():
                if avatar.client_id == client_id:
                    continue
                if avatar.role == HUNTER and avatar.team_id == me.team_id:
                    visible.append(avatar)
            if me.team_id in self.trainer.visible_to and self.trainer.client_id:
                visible.append(self.avatars[self.trainer.client_id])

        if me.role == TRAINER:
            team_ids = sorted(self.trainer.observed_teams)
        else:
            team_ids = [me.team_id] if me.team_id in self.teams else []
        teams_view = {}
        for tid in team_ids:
            team = self.teams[tid]
            teams_view[str(tid)] = {
                "progress": team.validation_progress,
                "finish_seconds": (
                    (team.finish_tick - self.hunt_start_tick) * TICK_SECONDS
                    if team.finished else None
                ),
            }

        snapshot = {
            "tick": self.tick_count,
            "phase": self.phase,
            "you": self._avatar_view(me, own=True),
            "avatars": [self._avatar_view(a) for a in visible],
            "teams": teams_view,
            "markings": [
                {"floor_id": m.floor_id, "point": [m.point[0], m.point[1]], "label": m.label}
                for m in self.scenario.markings
            ],
        }
        if self.phase == DEBRIEF:
            snapshot["scoreboard"] = self.scoreboard_view()
        return snapshot

    @staticmethod
    def _avatar_view(avatar: Avatar, own: bool = False) -> dict:
        view = {
            "client_id": avatar.client_id,
            "role": avatar.role,
            "team_id": avatar.team_id,
            "floor_id": avatar.floor_id,
            "x": avatar.x,
            "y": avatar.y,
            "node": avatar.node,   # set only when standing on a node
            "pointing": avatar.pointing,
            "highlight": avatar.highlight,
        }
        if own:
            view["moving"] = avatar.motion is not None
        return view

    def scoreboard(self) -> list[tuple[int, float | None]]:
        """(team_id, total seconds) entries; finished first, ascending."""
        finished = sorted(
            ((t.finish_tick - self.hunt_start_tick) * TICK_SECONDS, tid)
            for tid, t in self.teams.items() if t.finished
        )
        unfinished = [tid for tid in self.teams if not self.teams[tid].finished]
        return [(tid, secs) for secs, tid in finished] + [(tid, None) for tid in unfinished]

    def scoreboard_view(self) -> list[dict]:
        return [{"team_id": tid, "seconds": secs} for tid, secs in self.scoreboard()]

    # -- determinism -------------------------------------------------------------

    def state_hash(self) -> str:
        """64-bit digest of all mutable state; equal states hash equal."""
        state = {
            "phase": self.phase,
            "tick": self.tick_count,
            "hunt_start": self.hunt_start_tick,
            "seed": self.rng_seed,
            "obstacles": sorted(self.scenario.obstacles),
            "teams": {
                str(tid): {
                    "radios": t.radios,
                    "hunters": t.hunters,
                    "progress": t.validation_progress,
                    "finish": t.finish_tick,
                }
                for tid, t in sorted(self.teams.items())
            },
            "avatars": {
                cid: {
                    "role": a.role,
                    "team": a.team_id,
                    "floor": a.floor_id,
                    "x": a.x,
                    "y": a.y,
                    "node": a.node,
                    "pointing": a.pointing,
                    "highlight": a.highlight,
                    "motion": (
                        [a.motion.from_node, a.motion.edge_id, repr(a.motion.progress),
                         a.motion.path]
                        if a.motion else None
                    ),
                }
                for cid, a in sorted(self.avatars.items())
            },
            "trainer": {
                "client": self.trainer.client_id,
                "visible_to": sorted(self.trainer.visible_to),
                "observed": sorted(self.trainer.observed_teams),
                "screenshots": [
                    [s.tick, s.floor_id, repr(s.viewpoint[0]), repr(s.viewpoint[1]), s.team_id]
                    for s in self.trainer.screenshots
                ],
            },
        }
        blob = json.dumps(state, sort_keys=True, default=repr).encode()
        return hashlib.blake2b(blob, digest_size=8).hexdigest()


def create_session(building: Building, scenario: Scenario, seed: int) -> Session:
    return Session(building, scenario, seed)
