"""Injectable time sources.

Anything that checks fix freshness takes a Clock rather than reading wall
time, so the simulator and the tests can drive a manual clock
deterministically.
"""

from __future__ import annotations

import time
from typing import Protocol


class Clock(Protocol):
    def now_ms(self) -> int: ...


class SystemClock:
    """Wall clock in integer milliseconds since epoch."""

    def now_ms(self) -> int:
        return int(time.time() * 1000)


class ManualClock:
    """A clock that only moves when told to."""

    def __init__(self, start_ms: int = 1_000_000_000_000) -> None:
        self._now_ms = start_ms

    def now_ms(self) -> int:
        return self._now_ms

    def set_ms(self, value: int) -> None:
        if value < self._now_ms:
            raise ValueError("manual clock cannot move backwards")
        self._now_ms = value

    def advance_s(self, seconds: float) -> None:
        self._now_ms += int(round(seconds * 1000))
