"""HTTP session API around the two-slit instrument.

Sessions are created with a seed and a config, then started and stopped.
While running, detection events accrue on a wall-clock cadence, but their
content is fully determined by the seed, the draw counter, and the config
history, so two sessions driven the same way agree event for event no matter
how they are polled. Periods where both slits are closed consume time without
producing events.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .doubleslit import (
    GRID_POINTS,
    SlitConfig,
    events_due,
    pattern_csv,
    sample_events,
    source_representation,
)
from .errors import ConfigurationError, ContractViolation, DomainError


@dataclass
class Session:
    id: str
    seed: int
    config: SlitConfig
    lock: threading.Lock = field(default_factory=threading.Lock)
    running: bool = False
    anchor: float = 0.0
    base_count: int = 0
    dropped: int = 0
    draw_counter: int = 0
    ticks: list = field(default_factory=list)
    xs: list = field(default_factory=list)
    ys: list = field(default_factory=list)

    def counted_total(self) -> int:
        return len(self.ticks) + self.dropped

    def _emit_up_to(self, due: int) -> None:
        fresh = due - self.counted_total()
        if fresh <= 0:
            return
        if not self.config.any_open:
            self.dropped += fresh
            return
        batch = sample_events(
            self.config,
            fresh,
            self.seed,
            first_tick=len(self.ticks),
            draw_start=self.draw_counter,
        )
        self.draw_counter += 2 * fresh
        self.ticks.extend(int(t) for t in batch.ticks)
        self.xs.extend(float(v) for v in batch.x)
        self.ys.extend(float(v) for v in batch.y)

    def materialize(self) -> None:
        """Bring the event log up to date with the wall clock."""
        if not self.running:
            return
        elapsed = time.monotonic() - self.anchor
        self._emit_up_to(self.base_count + events_due(self.config.rate, elapsed))

    def start(self) -> None:
        if self.running:
            return
        self.anchor = time.monotonic()
        self.base_count = self.counted_total()
        self.running = True

    def stop(self) -> None:
        if not self.running:
            return
        self.materialize()
        self.running = False

    def reconfigure(self, changes: dict) -> None:
        # Events due before the change are drawn under the old config.
        self.materialize()
        self.config = self.config.patched(changes)
        if self.running:
            self.anchor = time.monotonic()
            self.base_count = self.counted_total()

    def describe(self) -> dict:
        return {
            "id": self.id,
            "seed": self.seed,
            "config": self.config.to_dict(),
            "running": self.running,
            "event_count": len(self.ticks),
        }


class SessionRegistry:
    def __init__(self):
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}
        self._counter = 0

    def create(self, seed, config_changes: dict) -> Session:
        with self._lock:
            self._counter += 1
            sid = f"s{self._counter}"
            if seed is None:
                seed = self._counter
            config = SlitConfig().patched(config_changes)
            session = Session(id=sid, seed=int(seed), config=config)
            self._sessions[sid] = session
            return session

    def get(self, sid: str) -> Session:
        with self._lock:
            session = self._sessions.get(sid)
        if session is None:
            raise KeyError(sid)
        return session


def _require_object(payload, name: str) -> dict:
    if payload is None:
        return {}
    if not isinstance(payload, dict):
        raise ConfigurationError(f"{name} body must be a JSON object")
    return payload


async def _read_json(request: Request):
    body = await request.body()
    if not body:
        return None
    try:
        return json.loads(body)
    except ValueError:
        raise ConfigurationError("request body is not valid JSON")


def create_app() -> FastAPI:
    app = FastAPI(title="obsbox service", docs_url=None, redoc_url=None)
    registry = SessionRegistry()

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request, exc):
        return JSONResponse({"error": str(exc.detail)}, status_code=exc.status_code)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request, exc):
        return JSONResponse({"error": str(exc)}, status_code=400)

    @app.exception_handler(ConfigurationError)
    async def _config_error(request, exc):
        return JSONResponse({"error": str(exc)}, status_code=400)

    @app.exception_handler(DomainError)
    async def _domain_error(request, exc):
        return JSONResponse({"error": str(exc)}, status_code=409)

    @app.exception_handler(ContractViolation)
    async def _contract_error(request, exc):
        return JSONResponse({"error": str(exc)}, status_code=409)

    @app.exception_handler(KeyError)
    async def _missing(request, exc):
        return JSONResponse(
            {"error": f"unknown session {exc.args[0]!r}"}, status_code=404
        )

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        payload = _require_object(await _read_json(request), "session")
        seed = payload.get("seed")
        if seed is not None and not isinstance(seed, int):
            raise ConfigurationError("seed must be an integer")
        changes = _require_object(payload.get("config"), "config")
        session = registry.create(seed, changes)
        return {
            "id": session.id,
            "seed": session.seed,
            "config": session.config.to_dict(),
        }

    @app.get("/sessions/{sid}")
    async def get_session(sid: str):
        session = registry.get(sid)
        with session.lock:
            session.materialize()
            return session.describe()

    @app.patch("/sessions/{sid}/config")
    async def patch_config(sid: str, request: Request):
        session = registry.get(sid)
        changes = _require_object(await _read_json(request), "config")
        with session.lock:
            session.reconfigure(changes)
            return {"id": session.id, "config": session.config.to_dict()}

    @app.post("/sessions/{sid}/start")
    async def start_session(sid: str):
        session = registry.get(sid)
        with session.lock:
            session.start()
            return {"id": session.id, "running": True}

    @app.post("/sessions/{sid}/stop")
    async def stop_session(sid: str):
        session = registry.get(sid)
        with session.lock:
            session.stop()
            return {"id": session.id, "running": False}

    @app.get("/sessions/{sid}/events")
    async def get_events(sid: str, since: int = -1):
        session = registry.get(sid)
        with session.lock:
            session.materialize()
            # Emitted ticks are contiguous from zero, so "tick > since" is a slice.
            start = max(0, since + 1)
            events = [
                {"tick": t, "x_m": x, "y_m": y}
                for t, x, y in zip(
                    session.ticks[start:], session.xs[start:], session.ys[start:]
                )
            ]
            return {"events": events, "total": len(session.ticks)}

    @app.get("/sessions/{sid}/pattern")
    async def get_pattern(sid: str, grid: int = GRID_POINTS):
        session = registry.get(sid)
        with session.lock:
            csv = pattern_csv(session.config, grid)
        return PlainTextResponse(csv, media_type="text/csv")

    @app.get("/sessions/{sid}/source")
    async def get_source(sid: str):
        session = registry.get(sid)
        with session.lock:
            return source_representation(session.config).to_dict()

    return app
