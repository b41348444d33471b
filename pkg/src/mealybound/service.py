"""Local HTTP API for interactive egg-search sessions.

Wraps `strategies.Session` in a small JSON-over-HTTP service for the
steering console and for scripts:

* ``POST /sessions`` — create a session from a builtin name or automaton
  text, with optional block partition, weights and target; returns the id
  and the initial snapshot.
* ``GET /sessions/{id}`` — current snapshot (read-only).
* ``POST /sessions/{id}/command`` — apply one command (expand / optimize /
  set_target / checkpoint / rollback / stop) atomically; returns the new
  snapshot.  One command in flight per session; contention gets 409, as
  does any command on a stopped session.
* ``GET /sessions/{id}/events`` — newline-delimited JSON stream of
  per-level progress events (level, yolk_size, shell_size, eta_max),
  replayed from the start so reconnects see full history.
* ``GET /zoo`` — the builtin machine list.

Every applied command is journaled to the working directory together with
the creation record, so a restarted server rebuilds a session by replaying
its journal (the engine is deterministic).  Checkpoint snapshots are also
written out as JSON for inspection.
"""

from __future__ import annotations

import json
import threading
import uuid
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from .formats import (
    builtin,
    builtin_blocks,
    builtin_names,
    builtin_text,
    parse_automaton,
)
from .machine import MachineError
from .search import SearchCaps, normalize_weights
from .strategies import Session, SessionError
from .words import AuxiliaryGroup, CalculusError


class CreateSession(BaseModel):
    machine: str | None = None
    text: str | None = None
    blocks: list[list[str]] | None = None
    weights: list[float] | None = None
    target: float = 1.0
    dedup: str = "global"
    radius_cap: int | None = 256


class _Held:
    """One live session plus its lock, journal and event history."""

    def __init__(self, session: Session, directory: Path):
        self.session = session
        self.directory = directory
        self.lock = threading.Lock()
        self.events: list[dict] = []
        self.events_ready = threading.Condition()

    def push_event(self, ev: dict) -> None:
        if ev.get("type") != "level":
            return
        with self.events_ready:
            self.events.append(
                {
                    "level": ev["length"],
                    "yolk_size": ev["pending"],
                    "shell_size": ev["shell"],
                    "eta_max": ev["eta_max"],
                }
            )
            self.events_ready.notify_all()

    def journal(self, record: dict) -> None:
        with (self.directory / "journal.ndjson").open("a") as f:
            f.write(json.dumps(record) + "\n")


def _build_session(spec: CreateSession, trace) -> Session:
    if (spec.machine is None) == (spec.text is None):
        raise HTTPException(422, "provide exactly one of 'machine' or 'text'")
    if spec.machine is not None:
        if spec.machine not in builtin_names():
            raise HTTPException(422, f"unknown builtin {spec.machine!r}")
        m = builtin(spec.machine)
        default_blocks = builtin_blocks(spec.machine)
    else:
        try:
            m = parse_automaton(spec.text)
        except MachineError as exc:
            raise HTTPException(422, f"bad automaton text: {exc}") from exc
        default_blocks = None
    blocks = spec.blocks if spec.blocks is not None else default_blocks
    try:
        if blocks is not None:
            aux = AuxiliaryGroup.free_product(m, blocks)
        else:
            aux = AuxiliaryGroup.discover(m)
    except (MachineError, CalculusError) as exc:
        raise HTTPException(422, f"bad block partition: {exc}") from exc
    n_gen = len(aux.generators)
    weights = spec.weights if spec.weights is not None else [1.0] * n_gen
    if len(weights) != n_gen:
        raise HTTPException(
            422, f"expected {n_gen} weights for generators {aux.generators}"
        )
    try:
        weights = normalize_weights(weights)
    except MachineError as exc:
        raise HTTPException(422, str(exc)) from exc
    if spec.dedup not in ("global", "level", "none"):
        raise HTTPException(422, f"unknown dedup scope {spec.dedup!r}")
    return Session(
        m,
        aux,
        weights,
        target=spec.target,
        caps=SearchCaps(max_radius=spec.radius_cap),
        dedup=spec.dedup,
        trace=trace,
    )


def create_app(workdir: str | Path | None = None) -> FastAPI:
    """Build the service app; sessions persist under `workdir`."""
    root = Path(workdir) if workdir is not None else Path.cwd() / "mealybound-sessions"
    root.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="mealybound service")
    held: dict[str, _Held] = {}
    registry_lock = threading.Lock()

    def _revive(session_id: str) -> _Held | None:
        """Rebuild a session from its on-disk journal (deterministic replay)."""
        directory = root / session_id
        meta_path = directory / "meta.json"
        if not meta_path.exists():
            return None
        meta = json.loads(meta_path.read_text())
        holder_box: list[_Held] = []

        def trace(ev):
            if holder_box:
                holder_box[0].push_event(ev)

        session = _build_session(CreateSession(**meta), trace)
        holder = _Held(session, directory)
        holder_box.append(holder)
        journal_path = directory / "journal.ndjson"
        if journal_path.exists():
            with journal_path.open() as f:
                for line in f:
                    if line.strip():
                        session.command(json.loads(line))
        return holder

    def _get_holder(session_id: str) -> _Held:
        with registry_lock:
            holder = held.get(session_id)
            if holder is None:
                holder = _revive(session_id)
                if holder is not None:
                    held[session_id] = holder
        if holder is None:
            raise HTTPException(404, f"no session {session_id}")
        return holder

    @app.get("/zoo")
    def zoo():
        out = []
        for name in builtin_names():
            m = builtin(name)
            out.append(
                {
                    "name": name,
                    "states": m.n_states,
                    "letters": m.degree,
                    "blocks": builtin_blocks(name),
                    "text": builtin_text(name),
                }
            )
        return {"machines": out}

    @app.post("/sessions")
    def create_session(spec: CreateSession):
        session_id = uuid.uuid4().hex[:12]
        while (root / session_id).exists():
            session_id = uuid.uuid4().hex[:12]
        directory = root / session_id
        directory.mkdir(parents=True)
        holder_box: list[_Held] = []

        def trace(ev):
            if holder_box:
                holder_box[0].push_event(ev)

        session = _build_session(spec, trace)
        holder = _Held(session, directory)
        holder_box.append(holder)
        (directory / "meta.json").write_text(json.dumps(spec.model_dump()) + "\n")
        with registry_lock:
            held[session_id] = holder
        return {"id": session_id, "snapshot": session.snapshot()}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        holder = _get_holder(session_id)
        with holder.lock:
            return holder.session.snapshot()

    @app.post("/sessions/{session_id}/command")
    def post_command(session_id: str, cmd: dict = Body(...)):
        holder = _get_holder(session_id)
        if not holder.lock.acquire(blocking=False):
            raise HTTPException(409, "another command is in flight")
        try:
            snapshot = holder.session.command(cmd)
            holder.journal(cmd)
        except SessionError as exc:
            if "stopped" in str(exc):
                raise HTTPException(409, str(exc)) from exc
            raise HTTPException(422, str(exc)) from exc
        except (MachineError, CalculusError, KeyError, ValueError, TypeError) as exc:
            raise HTTPException(422, f"bad command: {exc}") from exc
        finally:
            holder.lock.release()
        if cmd.get("op") == "checkpoint" and snapshot.get("checkpoint_id"):
            path = holder.directory / f"checkpoint-{snapshot['checkpoint_id']}.json"
            path.write_text(json.dumps(snapshot, indent=2) + "\n")
        return snapshot

    @app.get("/sessions/{session_id}/events")
    def get_events(session_id: str):
        holder = _get_holder(session_id)

        def stream():
            index = 0
            while True:
                with holder.events_ready:
                    while (
                        index >= len(holder.events)
                        and not holder.session.stopped
                    ):
                        holder.events_ready.wait(timeout=0.2)
                    batch = holder.events[index:]
                    index = len(holder.events)
                    done = holder.session.stopped and index >= len(holder.events)
                for ev in batch:
                    yield json.dumps(ev) + "\n"
                if done:
                    return

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    app.state.sessions = held
    app.state.workdir = root
    return app


def serve(host: str = "127.0.0.1", port: int = 8642, workdir=None) -> None:
    """Run the service with uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(workdir), host=host, port=port, log_level="warning")
