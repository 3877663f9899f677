"""The command service: consent gate, single-writer ordering, durability.

Every mutation — whether it arrives over HTTP or from an in-process
simulator — is a command dict executed here. The order is strict:

  1. consent gate: a piggybacked location with consent=false is refused
     before anything at all is touched;
  2. apply to the world (rejections raise, mutating nothing);
  3. durably journal the command with the digest of the resulting state;
  4. only then answer the caller.

If the journal write fails after the world already changed, the world is
rolled back by replaying the journal that *did* get written, so memory
never disagrees with what storage acknowledged.
"""

from __future__ import annotations

import threading
from typing import Callable, TypeVar

from .clock import Clock, SystemClock
from .engine import GameWorld
from .errors import ConsentRequired, DigestMismatch, StorageFailure
from .journal import Journal

T = TypeVar("T")

WorldFactory = Callable[[], GameWorld]


class GameService:
    """Owns a GameWorld and the journal that makes it durable."""

    def __init__(
        self,
        world_factory: WorldFactory,
        journal: Journal | None = None,
        clock: Clock | None = None,
    ) -> None:
        self._factory = world_factory
        self.journal = journal
        self.clock = clock if clock is not None else SystemClock()
        self._lock = threading.Lock()
        self.world = world_factory()
        if journal is not None and journal.last_seq > 0:
            self.world = self._replayed_world()

    # ------------------------------------------------------------------

    def execute(self, command: dict) -> dict:
        """Run one command through gate -> apply -> journal -> respond."""
        with self._lock:
            command = dict(command)
            command.setdefault("now_ms", self.clock.now_ms())
            fix_doc = command.get("fix")
            if fix_doc is not None and not fix_doc.get("consent", False):
                raise ConsentRequired("location reported without consent")
            mutated, result = self.world.apply(command)
            if mutated and self.journal is not None:
                digest = self.world.digest()
                try:
                    seq = self.journal.append(command, digest)
                except StorageFailure:
                    # the world moved but storage did not: put memory back in
                    # line with the acknowledged journal before failing out
                    self.world = self._replayed_world()
                    raise
                self.journal.maybe_snapshot(seq, self.world.to_doc())
            return result

    def read(self, fn: Callable[[GameWorld], T]) -> T:
        """Run a read-only query under the same ordering as mutations."""
        with self._lock:
            return fn(self.world)

    # ------------------------------------------------------------------

    def _replayed_world(self) -> GameWorld:
        """A fresh world brought up to the journal's acknowledged state."""
        world = self._factory()
        records = self.journal.read_records()
        start_seq = 0
        snapshot = self.journal.latest_snapshot()
        if snapshot is not None:
            snap_seq, state_doc = snapshot
            if records and records[-1]["seq"] >= snap_seq:
                world.restore_doc(state_doc)
                start_seq = snap_seq
            # a snapshot newer than the whole journal is ignored: the journal
            # is the authority, snapshots only accelerate it
        for record in records:
            if record["seq"] <= start_seq:
                continue
            world.apply(record["command"])
            digest = world.digest()
            if digest != record["result_digest"]:
                raise DigestMismatch(
                    f"replay diverged at seq {record['seq']}: "
                    f"stored {record['result_digest'][:12]}.., got {digest[:12]}.."
                )
        return world

    def replay_check(self) -> int:
        """Independently replay the journal and compare against live state.

        Returns the number of records verified; raises DigestMismatch if
        the journal does not reproduce the current world.
        """
        if self.journal is None:
            return 0
        with self._lock:
            replayed = self._replayed_world()
            if replayed.digest() != self.world.digest():
                raise DigestMismatch("journal replay does not match the live world")
            return self.journal.last_seq

    def close(self) -> None:
        if self.journal is not None:
            self.journal.close()
