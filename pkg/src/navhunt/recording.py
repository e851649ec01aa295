"""Append-only event log, deterministic replay, and debrief queries.

The log keeps commands and transitions only; positions are reconstructed
by replaying, which the determinism contract makes exact. Checkpoint
hashes every 100 ticks (and at phase changes) localize any divergence.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Callable

from .building import Building
from .commands import apply_command
from .constants import TICK_SECONDS
from .errors import (
    CorruptLog,
    DigestMismatch,
    OutOfOrder,
    RangeError,
    SinkError,
    UnknownTeam,
    WrongPhase,
)
from .scenario import create_hunt
from .session import HUNTER, Session

LOG_VERSION = 1


@dataclass(frozen=True)
class LogEvent:
    tick: int
    seq: int
    type: str
    payload: dict


@dataclass
class EventLog:
    header: dict
    events: list[LogEvent] = field(default_factory=list)
    _flushed: int = field(default=0, repr=False)

    @classmethod
    def fresh(cls, building_digest: str, scenario_doc: dict, seed: int,
              started_at: str = "") -> "EventLog":
        return cls(
            header={
                "version": LOG_VERSION,
                "building_digest": building_digest,
                "scenario": scenario_doc,
                "seed": seed,
                "started_at": started_at,
            }
        )

    def append(self, tick: int, seq: int, type: str, payload: dict) -> LogEvent:
        if self.events:
            last = self.events[-1]
            if tick < last.tick:
                raise OutOfOrder(f"tick {tick} after tick {last.tick}")
            if (tick, seq) <= (last.tick, last.seq):
                raise OutOfOrder(f"(tick,seq) ({tick},{seq}) after ({last.tick},{last.seq})")
        event = LogEvent(tick, seq, type, payload)
        self.events.append(event)
        return event

    def flush(self, sink) -> None:
        """Append unwritten lines to ``sink`` (path or file object).

        Each line is written in a single call so a crash never leaves a
        torn event, only a truncated file.
        """
        try:
            if hasattr(sink, "write"):
                self._flush_to(sink)
            else:
                fresh = not os.path.exists(sink) or os.path.getsize(sink) == 0
                with open(sink, "a", encoding="utf-8") as fh:
                    self._flush_to(fh, write_header=fresh)
                    fh.flush()
                    os.fsync(fh.fileno())
        except OSError as exc:
            raise SinkError(str(exc)) from None

    def _flush_to(self, fh, write_header: bool | None = None) -> None:
        if write_header is None:
            write_header = self._flushed == 0
        if write_header and self._flushed == 0:
            fh.write(json.dumps(self.header, separators=(",", ":")) + "\n")
        for event in self.events[self._flushed:]:
            fh.write(_event_line(event))
        self._flushed = len(self.events)

    def to_bytes(self) -> bytes:
        lines = [json.dumps(self.header, separators=(",", ":")) + "\n"]
        lines += [_event_line(e) for e in self.events]
        return "".join(lines).encode()

    @property
    def final_tick(self) -> int:
        return self.events[-1].tick if self.events else 0


def _event_line(event: LogEvent) -> str:
    doc = {"tick": event.tick, "seq": event.seq, "type": event.type,
           "payload": event.payload}
    return json.dumps(doc, separators=(",", ":")) + "\n"


def load_log(data: bytes | str) -> EventLog:
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="strict")
    lines = [ln for ln in data.split("\n") if ln.strip()]
    if not lines:
        raise CorruptLog("empty log")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CorruptLog(f"bad header: {exc}") from None
    if not isinstance(header, dict) or header.get("version") != LOG_VERSION:
        raise CorruptLog("missing or unsupported log header")
    for key in ("building_digest", "scenario", "seed"):
        if key not in header:
            raise CorruptLog(f"header missing {key!r}")
    log = EventLog(header=header)
    for i, line in enumerate(lines[1:], start=2):
        try:
            doc = json.loads(line)
            event = (int(doc["tick"]), int(doc["seq"]), str(doc["type"]), doc["payload"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CorruptLog(f"line {i}: {exc}") from None
        try:
            log.append(*event)
        except OutOfOrder as exc:
            raise CorruptLog(f"line {i}: {exc.detail}") from None
    log._flushed = len(log.events)
    return log


def load_log_file(path) -> EventLog:
    try:
        with open(path, "rb") as fh:
            return load_log(fh.read())
    except OSError as exc:
        raise SinkError(str(exc)) from None
    except UnicodeDecodeError as exc:
        raise CorruptLog(str(exc)) from None


# -- replay ----------------------------------------------------------------


def replay(
    building: Building,
    log: EventLog,
    on_tick: Callable[[Session], None] | None = None,
) -> Session:
    """Re-simulate the log from its seed; checkpoint hashes must all match.

    ``on_tick`` observes the session after the spawn and after every tick.
    """
    if log.header["building_digest"] != building.digest():
        raise DigestMismatch("log was recorded against a different building")
    scenario = create_hunt(building, log.header["scenario"])
    session = Session(building, scenario, log.header["seed"])

    def step_to(target_tick: int) -> None:
        while session.tick_count < target_tick:
            try:
                session.tick()
            except WrongPhase:
                raise CorruptLog(
                    f"log expects tick {target_tick} but phase is {session.phase}"
                ) from None
            if on_tick:
                on_tick(session)

    for event in log.events:
        step_to(event.tick)
        if event.type.startswith("cmd/"):
            payload = event.payload
            outcome = apply_command(
                session, payload["client"], event.type[4:], payload["body"]
            )
            live = "ack" if outcome.ok else f"nack:{outcome.error}"
            recorded = payload.get("outcome")
            if recorded is not None and recorded != live:
                raise CorruptLog(
                    f"replay diverged at tick {event.tick} seq {event.seq}: "
                    f"recorded {recorded}, got {live}"
                )
            if event.type == "cmd/start_hunt" and outcome.ok and on_tick:
                on_tick(session)  # tick-0 spawn positions
        elif event.type == "checkpoint":
            if session.state_hash() != event.payload["hash"]:
                raise CorruptLog(
                    f"checkpoint hash mismatch at tick {event.tick}"
                )
        # derived events (phase/spawn/validated/hunt_ended) are recomputed
    return session


def verify_checkpoints(building: Building, log: EventLog) -> int:
    """Replay and count verified checkpoints; raises CorruptLog on mismatch."""
    count = sum(1 for e in log.events if e.type == "checkpoint")
    replay(building, log)
    return count


# -- debrief queries ----------------------------------------------------------


def _hunt_start_tick(log: EventLog) -> int:
    for event in log.events:
        if event.type == "phase" and event.payload.get("phase") == "hunting":
            return event.tick
    return 0


def hunt_duration_seconds(log: EventLog) -> float:
    return (log.final_tick - _hunt_start_tick(log)) * TICK_SECONDS


def _seconds_to_tick(log: EventLog, t: float) -> int:
    # nearest tick at or below t, hunt-relative
    return _hunt_start_tick(log) + int(math.floor(t / TICK_SECONDS + 1e-9))


def _collect_positions(building: Building, log: EventLog) -> dict[str, dict[int, tuple]]:
    """tick -> (floor, x, y) per hunter, replayed from the log."""
    samples: dict[str, dict[int, tuple]] = {}

    def observe(session: Session) -> None:
        for avatar in session.avatars.values():
            if avatar.role == HUNTER and avatar.spawned:
                samples.setdefault(avatar.client_id, {})[session.tick_count] = (
                    avatar.floor_id, avatar.x, avatar.y
                )

    replay(building, log, on_tick=observe)
    return samples


def team_paths(
    building: Building, log: EventLog, team_id: int, t0: float, t1: float
) -> dict[str, list[dict]]:
    """Per-hunter polylines over [t0, t1]; each run stays on one floor."""
    duration = hunt_duration_seconds(log)
    if not (0.0 <= t0 <= t1 <= duration + 1e-9):
        raise RangeError(f"[{t0}, {t1}] outside hunt duration {duration:.2f}s")
    session_probe = replay(building, log)
    if team_id not in session_probe.teams:
        raise UnknownTeam(str(team_id))
    hunters = set(session_probe.teams[team_id].hunters)
    samples = _collect_positions(building, log)
    tick0, tick1 = _seconds_to_tick(log, t0), _seconds_to_tick(log, t1)
    out: dict[str, list[dict]] = {}
    for hunter_id in sorted(hunters):
        per_tick = samples.get(hunter_id, {})
        runs: list[dict] = []
        for tick in range(tick0, tick1 + 1):
            if tick not in per_tick:
                continue
            floor_id, x, y = per_tick[tick]
            if runs and runs[-1]["floor_id"] == floor_id:
                runs[-1]["points"].append([x, y])
            else:
                runs.append({"floor_id": floor_id, "points": [[x, y]]})
        out[hunter_id] = runs
    return out


def timeline(log: EventLog) -> dict:
    """Finish markers, screenshot markers, and total duration in seconds."""
    finishes = []
    screenshots = []
    start = _hunt_start_tick(log)
    for event in log.events:
        if event.type == "validated":
            finishes.append(
                {"team_id": event.payload["team"], "seconds": event.payload["seconds"],
                 "tick": event.payload["finish_tick"]}
            )
        elif event.type == "cmd/screenshot" and event.payload.get("outcome") == "ack":
            body = event.payload["body"]
            screenshots.append(
                {
                    "tick": event.tick,
                    "seconds": (event.tick - start) * TICK_SECONDS,
                    "floor_id": body["floor_id"],
                    "viewpoint": body["viewpoint"],
                    "team_id": body.get("team_id"),
                }
            )
    return {
        "finishes": finishes,
        "screenshots": screenshots,
        "duration_seconds": hunt_duration_seconds(log),
    }


def cursor_state(building: Building, log: EventLog, t: float) -> dict:
    """Hunter positions at the nearest tick at or below t, plus the set of
    floors currently occupied."""
    duration = hunt_duration_seconds(log)
    if not (0.0 <= t <= duration + 1e-9):
        raise RangeError(f"t={t} outside hunt duration {duration:.2f}s")
    target = _seconds_to_tick(log, t)
    samples = _collect_positions(building, log)
    per_hunter = {}
    floors = set()
    for hunter_id, per_tick in sorted(samples.items()):
        usable = [tick for tick in per_tick if tick <= target]
        if not usable:
            continue
        floor_id, x, y = per_tick[max(usable)]
        per_hunter[hunter_id] = {"floor_id": floor_id, "point": [x, y]}
        floors.add(floor_id)
    return {"t": t, "tick": target, "per_hunter": per_hunter,
            "floors_occupied": sorted(floors)}


def _breakpoints(per_tick: dict[int, tuple], start_tick: int) -> list[dict]:
    """Compress per-tick samples to motion breakpoints; linear interpolation
    between breakpoints reproduces every same-floor sample."""
    ticks = sorted(per_tick)
    if not ticks:
        return []
    keep: list[int] = []
    for i, tick in enumerate(ticks):
        if i == 0 or i == len(ticks) - 1:
            keep.append(tick)
            continue
        f0, x0, y0 = per_tick[ticks[i - 1]]
        f1, x1, y1 = per_tick[tick]
        f2, x2, y2 = per_tick[ticks[i + 1]]
        if f0 != f1 or f1 != f2:
            keep.append(tick)
            continue
        vin = (x1 - x0, y1 - y0)
        vout = (x2 - x1, y2 - y1)
        if abs(vin[0] - vout[0]) > 1e-9 or abs(vin[1] - vout[1]) > 1e-9:
            keep.append(tick)
    out = []
    for tick in keep:
        floor_id, x, y = per_tick[tick]
        out.append(
            {"tick": tick, "t": (tick - start_tick) * TICK_SECONDS,
             "floor_id": floor_id, "x": x, "y": y}
        )
    return out


def build_debrief_bundle(
    building: Building, log: EventLog, cursor_times: list[float] | None = None
) -> dict:
    """Everything the debrief console needs, as one JSON-able document."""
    session = replay(building, log)
    samples = _collect_positions(building, log)
    start = _hunt_start_tick(log)
    if cursor_times is None:
        duration = hunt_duration_seconds(log)
        cursor_times = [duration * k / 4.0 for k in range(5)] if duration > 0 else []

    paths: dict[str, dict[str, list[dict]]] = {}
    for team_id in sorted(session.teams):
        team_paths_doc = {}
        for hunter_id in sorted(session.teams[team_id].hunters):
            team_paths_doc[hunter_id] = _breakpoints(samples.get(hunter_id, {}), start)
        paths[str(team_id)] = team_paths_doc

    cursors = []
    for t in cursor_times:
        target = _seconds_to_tick(log, t)
        per_hunter = {}
        floors = set()
        for hunter_id, per_tick in sorted(samples.items()):
            usable = [tick for tick in per_tick if tick <= target]
            if not usable:
                continue
            floor_id, x, y = per_tick[max(usable)]
            per_hunter[hunter_id] = {"floor_id": floor_id, "point": [x, y]}
            floors.add(floor_id)
        cursors.append({"t": t, "tick": target, "per_hunter": per_hunter,
                        "floors_occupied": sorted(floors)})

    return {
        "meta": {
            "building_id": building.id,
            "building_digest": log.header["building_digest"],
            "scenario": log.header["scenario"],
            "seed": log.header["seed"],
            "duration_seconds": hunt_duration_seconds(log),
            "final_tick": log.final_tick,
            "hunt_start_tick": start,
        },
        "scoreboard": session.scoreboard_view(),
        "timeline": timeline(log),
        "paths": paths,
        "cursors": cursors,
        "markings": [
            {"floor_id": m.floor_id, "point": [m.point[0], m.point[1]], "label": m.label}
            for m in session.scenario.markings
        ],
    }
