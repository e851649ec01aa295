"""Command application shared by the live host and the replayer.

Both paths funnel the same (client, type, body) triples through
``apply_command`` so a replayed log reproduces the live session exactly.
Bodies are plain dicts, already validated at the wire boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import scenario as scenario_mod
from .errors import HuntError, NotTrainer, WrongPhase
from .session import HUNTING, LOBBY, PREPARATION, Session

# commands that mutate session state and therefore get logged and replayed
MUTATING_COMMANDS = frozenset(
    {
        "hello",
        "create_hunt",
        "place_obstacle",
        "start_preparation",
        "start_hunt",
        "move_to",
        "move_radio",
        "point",
        "guidance",
        "screenshot",
        "set_visibility",
        "observe",
    }
)


@dataclass
class ApplyOutcome:
    ok: bool
    error: str = ""
    detail: str = ""
    events: list[dict] = field(default_factory=list)
    # guidance relay (team_id, recipient client ids); the caller delivers
    guidance: tuple[int, list[str]] | None = None


def _require_trainer(session: Session, client_id: str) -> None:
    if client_id != session.trainer.client_id:
        raise NotTrainer(client_id)


def apply_command(session: Session, client_id: str, msg_type: str, body: dict) -> ApplyOutcome:
    """Apply one mutating command; never raises for domain errors."""
    out = ApplyOutcome(ok=True)
    try:
        if msg_type == "hello":
            session.join(client_id, body["role"], body.get("team_id"))
        elif msg_type == "create_hunt":
            _require_trainer(session, client_id)
            if session.phase != LOBBY:
                raise WrongPhase("hunts are re-authored only in the lobby")
            session.scenario = scenario_mod.create_hunt(session.building, body["config"])
        elif msg_type == "place_obstacle":
            _require_trainer(session, client_id)
            if session.phase not in (LOBBY, PREPARATION):
                raise WrongPhase("obstacles are placed before the hunt starts")
            session.scenario = scenario_mod.place_obstacle(
                session.building, session.scenario, body["edge_id"]
            )
        elif msg_type == "start_preparation":
            _require_trainer(session, client_id)
            out.events = session.start_preparation()
        elif msg_type == "start_hunt":
            _require_trainer(session, client_id)
            out.events = session.start_hunt()
        elif msg_type == "move_to":
            session.move_to(client_id, body["node_id"])
        elif msg_type == "move_radio":
            session.move_radio(client_id, body["node_id"])
        elif msg_type == "point":
            session.set_pointing(client_id, body.get("angle"))
        elif msg_type == "guidance":
            out.guidance = session.send_guidance(client_id, body.get("payload"))
        elif msg_type == "screenshot":
            vp = body["viewpoint"]
            session.trainer_screenshot(
                client_id, body["floor_id"], (float(vp[0]), float(vp[1])), body.get("team_id")
            )
        elif msg_type == "set_visibility":
            session.set_visibility(client_id, body["team_ids"])
        elif msg_type == "observe":
            session.observe(client_id, body["team_ids"])
        else:
            raise HuntError(f"not a mutating command: {msg_type}")
    except HuntError as exc:
        return ApplyOutcome(ok=False, error=type(exc).__name__, detail=exc.detail)
    return out
