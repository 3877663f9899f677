"""Bearer-token sessions.

Tokens are 128-bit random values minted at login and kept only in memory:
they are credentials, not game state, so they are never journaled and do
not survive a restart — clients simply log in again.
"""

from __future__ import annotations

import random
import secrets
import threading
from dataclasses import dataclass

from ..clock import Clock, SystemClock
from ..errors import BadSession

IDLE_TTL_MS_DEFAULT = 24 * 60 * 60 * 1000


@dataclass
class _Session:
    player_id: str
    last_used_ms: int


class SessionStore:
    def __init__(
        self,
        clock: Clock | None = None,
        idle_ttl_ms: int = IDLE_TTL_MS_DEFAULT,
        token_rng: random.Random | None = None,
    ) -> None:
        self.clock = clock if clock is not None else SystemClock()
        self.idle_ttl_ms = idle_ttl_ms
        self._token_rng = token_rng  # seeded only in test mode; None means crypto-random
        self._sessions: dict[str, _Session] = {}
        self._lock = threading.Lock()

    def _mint(self) -> str:
        if self._token_rng is not None:
            return f"{self._token_rng.getrandbits(128):032x}"
        return secrets.token_hex(16)

    def create(self, player_id: str) -> str:
        token = self._mint()
        with self._lock:
            self._sessions[token] = _Session(player_id=player_id, last_used_ms=self.clock.now_ms())
        return token

    def resolve(self, token: str) -> str:
        """Map a bearer token to its player id, refreshing the idle timer."""
        now = self.clock.now_ms()
        with self._lock:
            session = self._sessions.get(token)
            if session is None:
                raise BadSession("unknown or expired session token")
            if now - session.last_used_ms > self.idle_ttl_ms:
                del self._sessions[token]
                raise BadSession("session expired; log in again")
            session.last_used_ms = now
            return session.player_id
