"""Session service for live two-player matches over HTTP and WebSocket."""

from tencards.server.sessions import PROTOCOL_VERSION, Push, SessionStore

__all__ = ["PROTOCOL_VERSION", "Push", "SessionStore"]
