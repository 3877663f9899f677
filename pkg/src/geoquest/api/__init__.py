"""HTTP interface: FastAPI app factory and session handling."""

from .app import create_app
from .sessions import SessionStore

__all__ = ["SessionStore", "create_app"]
