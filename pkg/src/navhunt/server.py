"""FastAPI service hosting one live session.

The WebSocket endpoint `/ws` speaks the frame protocol; a few REST
endpoints expose read-only state for consoles and health checks. All
commands funnel through a single owner task that drains the inbound
queue, advances the clock, and fans out snapshots at the tick rate.
"""

from __future__ import annotations

import asyncio
import contextlib
import os
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import recording
from .building import Building, render_building
from .constants import MAX_FRAME_BYTES
from .protocol import SessionHost
from .scenario import Scenario, scenario_summary
from .session import DEBRIEF, HUNTING

SEND_BACKLOG = 256   # frames buffered per connection before it is dropped


class HealthOut(BaseModel):
    status: str
    session_id: str
    phase: str
    tick: int
    clients: int


class _WsPeer:
    """Bridges one WebSocket to the host with a bounded outbound queue."""

    def __init__(self, websocket: WebSocket):
        self.websocket = websocket
        self.outbox: asyncio.Queue[bytes] = asyncio.Queue(maxsize=SEND_BACKLOG)
        self.overflowed = False

    def send(self, data: bytes) -> None:
        # called from the owner task; never blocks the tick loop
        try:
            self.outbox.put_nowait(data)
        except asyncio.QueueFull:
            self.overflowed = True
            raise RuntimeError("send backlog exceeded")

    async def writer(self) -> None:
        while True:
            data = await self.outbox.get()
            await self.websocket.send_text(data.decode())


def create_app(
    building: Building,
    scenario: Scenario,
    seed: int = 0,
    tick_hz: float = 20.0,
    log_path: str | os.PathLike | None = None,
    console_dir: str | os.PathLike | None = None,
) -> FastAPI:
    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.owner = asyncio.create_task(owner_loop())
        yield
        app.state.owner.cancel()
        with contextlib.suppress(asyncio.CancelledError):
            await app.state.owner

    app = FastAPI(title="navhunt", version="0.1.0", lifespan=lifespan)
    host = SessionHost(building, scenario, seed, started_at=_now_iso())
    inbound: asyncio.Queue[tuple[object, str]] = asyncio.Queue()
    app.state.host = host

    async def owner_loop() -> None:
        interval = 1.0 / tick_hz
        try:
            while True:
                host.round_start()
                deadline = asyncio.get_event_loop().time() + interval
                while True:
                    budget = deadline - asyncio.get_event_loop().time()
                    if budget <= 0:
                        break
                    try:
                        conn, data = await asyncio.wait_for(inbound.get(), timeout=budget)
                    except asyncio.TimeoutError:
                        break
                    host.handle_bytes(conn, data)
                host.advance()
                if log_path is not None:
                    host.log.flush(log_path)
        except asyncio.CancelledError:
            if log_path is not None:
                host.log.flush(log_path)
            raise

    @app.get("/health", response_model=HealthOut)
    def health() -> HealthOut:
        return HealthOut(
            status="ok",
            session_id=host.session.session_id,
            phase=host.session.phase,
            tick=host.session.tick_count,
            clients=len(host.connections),
        )

    @app.get("/building")
    def get_building() -> Response:
        return Response(content=render_building(building), media_type="application/json")

    @app.get("/scenario")
    def get_scenario() -> dict:
        return scenario_summary(host.session.scenario)

    @app.get("/debrief")
    def get_debrief() -> dict:
        if host.session.phase not in (HUNTING, DEBRIEF):
            raise HTTPException(status_code=409, detail="no hunt data yet")
        return recording.build_debrief_bundle(building, host.log)

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket) -> None:
        await websocket.accept()
        peer = _WsPeer(websocket)
        conn = host.connect(peer.send)
        writer = asyncio.create_task(peer.writer())
        try:
            while True:
                text = await websocket.receive_text()
                if len(text.encode()) > MAX_FRAME_BYTES:
                    text = text[: MAX_FRAME_BYTES + 1]  # let decode refuse it
                await inbound.put((conn, text))
        except WebSocketDisconnect:
            pass
        finally:
            writer.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await writer
            host.disconnect(conn)

    if console_dir and Path(console_dir).is_dir():
        app.mount("/console", StaticFiles(directory=console_dir, html=True), name="console")

    return app


def _now_iso() -> str:
    import datetime

    return datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
