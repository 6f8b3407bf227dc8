"""HTTP and WebSocket front end for the session store.

One POST endpoint carries every request/reply exchange; a WebSocket on the
same port delivers ``state_push`` messages and accepts the same request
envelopes bidirectionally.  Protocol errors travel in-band as ``error``
replies with HTTP status 200, so clients handle exactly one failure shape.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .sessions import PROTOCOL_VERSION, ProtocolError, SessionStore

__all__ = ["create_app"]


class PushRegistry:
    """Live sockets per (session_id, seat), fanned out on every state change."""

    def __init__(self) -> None:
        self._sockets: dict[tuple[str, str], set[WebSocket]] = {}

    def add(self, session_id: str, seat: str, socket: WebSocket) -> None:
        self._sockets.setdefault((session_id, seat), set()).add(socket)

    def remove(self, session_id: str, seat: str, socket: WebSocket) -> None:
        self._sockets.get((session_id, seat), set()).discard(socket)

    async def deliver(self, pushes) -> None:
        for push in pushes:
            for socket in list(self._sockets.get((push.session_id, push.seat), ())):
                try:
                    await socket.send_json(push.message)
                except Exception:
                    # a dead socket must not fail the request that pushed
                    self.remove(push.session_id, push.seat, socket)


def create_app(
    store: SessionStore | None = None, static_dir: str | Path | None = None
) -> FastAPI:
    """Build the service around ``store``, optionally serving a static UI."""
    store = store or SessionStore()
    registry = PushRegistry()
    # messages are handled strictly one at a time, which honours the
    # per-session serialization contract
    dispatch_lock = asyncio.Lock()
    app = FastAPI(title="tencards", docs_url=None, redoc_url=None)
    app.state.store = store

    async def handle(message: object) -> dict:
        async with dispatch_lock:
            reply, pushes = store.dispatch(message)
            await registry.deliver(pushes)
        return reply

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"status": "ok", "protocol_version": PROTOCOL_VERSION}

    @app.post("/api")
    async def api(message: dict) -> dict:
        return await handle(message)

    @app.websocket("/ws")
    async def ws(socket: WebSocket) -> None:
        session_id = socket.query_params.get("session_id", "")
        token = socket.query_params.get("token", "")
        session = store.sessions.get(session_id)
        if session is None:
            await socket.close(code=4404)
            return
        try:
            seat = session.seat_for(token)
        except ProtocolError:
            await socket.close(code=4401)
            return
        await socket.accept()
        registry.add(session_id, seat, socket)
        try:
            # a fresh snapshot so the client never waits for the next change
            await socket.send_json(
                {
                    "protocol_version": PROTOCOL_VERSION,
                    "kind": "state_push",
                    "payload": session.view(seat),
                }
            )
            while True:
                raw = await socket.receive_text()
                try:
                    message: object = json.loads(raw)
                except json.JSONDecodeError:
                    # a malformed frame must not kill the connection
                    await socket.send_json(
                        {
                            "protocol_version": PROTOCOL_VERSION,
                            "kind": "error",
                            "to": None,
                            "payload": {"code": "bad_request", "message": "frames must be JSON"},
                        }
                    )
                    continue
                await socket.send_json(await handle(message))
        except WebSocketDisconnect:
            pass
        finally:
            registry.remove(session_id, seat, socket)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
