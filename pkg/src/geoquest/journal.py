"""Append-only command journal with periodic state snapshots.

One JSON record per line, UTF-8, LF line endings. Records carry a gapless
sequence number starting at 1 and the digest of the state *after* the
command applied, so replay can prove it reproduced history bit for bit.
The journal is never truncated once acknowledged; snapshots only
shortcut recovery.

A torn final line — a crash mid-append, recognizable by the missing line
ending — is dropped when the journal is opened: its command was never
acknowledged, so it never happened. Every other unreadable byte is
corruption and refuses to load.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .errors import JournalGap, StorageFailure

SNAPSHOT_EVERY_DEFAULT = 1000


def _encode(doc: dict) -> bytes:
    return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


def _parse_record(line: bytes) -> dict:
    record = json.loads(line.decode("utf-8"))
    if not isinstance(record, dict) or "seq" not in record:
        raise ValueError("not a journal record")
    return record


class Journal:
    """One journal file plus its snapshot siblings."""

    def __init__(self, path: str | Path, snapshot_every: int = SNAPSHOT_EVERY_DEFAULT) -> None:
        if snapshot_every < 1:
            raise ValueError("snapshot_every must be at least 1")
        self.path = Path(path)
        self.snapshot_every = snapshot_every
        self._file = None
        records, valid_len = self._scan()
        self._last_seq = records[-1]["seq"] if records else 0
        if self.path.exists() and valid_len < self.path.stat().st_size:
            # drop the torn tail so the next append starts on a clean line
            with open(self.path, "r+b") as f:
                f.truncate(valid_len)

    @property
    def last_seq(self) -> int:
        return self._last_seq

    def _scan(self) -> tuple[list[dict], int]:
        """Parse the file; returns (records, bytes up to the last good one)."""
        if not self.path.exists():
            return [], 0
        try:
            raw = self.path.read_bytes()
        except OSError as exc:
            raise StorageFailure(f"cannot read journal: {exc}") from exc
        records: list[dict] = []
        pos = 0
        line_no = 0
        while pos < len(raw):
            line_no += 1
            newline = raw.find(b"\n", pos)
            complete = newline != -1
            end = newline + 1 if complete else len(raw)
            line = raw[pos:newline] if complete else raw[pos:]
            if not complete:
                break  # torn tail: crashed mid-append, never acknowledged
            try:
                record = _parse_record(line)
            except (ValueError, UnicodeDecodeError) as exc:
                raise StorageFailure(f"unreadable journal record on line {line_no}: {exc}") from exc
            expected = records[-1]["seq"] + 1 if records else 1
            if record["seq"] != expected:
                raise JournalGap(f"line {line_no}: seq {record['seq']}, expected {expected}")
            records.append(record)
            pos = end
        return records, pos

    def read_records(self) -> list[dict]:
        """All acknowledged records, in order, with the seq chain verified."""
        return self._scan()[0]

    def append(self, command: dict, result_digest: str) -> int:
        """Durably write one record; returns its sequence number."""
        seq = self._last_seq + 1
        record = {"seq": seq, "command": command, "result_digest": result_digest}
        try:
            if self._file is None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                self._file = open(self.path, "ab")
            self._file.write(_encode(record))
            self._file.flush()
            os.fsync(self._file.fileno())
        except OSError as exc:
            raise StorageFailure(f"journal append failed: {exc}") from exc
        self._last_seq = seq
        return seq

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None

    # snapshots

    def _snapshot_path(self, seq: int) -> Path:
        return self.path.with_name(f"{self.path.name}.snap-{seq:09d}.json")

    def maybe_snapshot(self, seq: int, state_doc: dict) -> bool:
        """Write a snapshot when seq crosses the configured interval."""
        if seq % self.snapshot_every != 0:
            return False
        self.write_snapshot(seq, state_doc)
        return True

    def write_snapshot(self, seq: int, state_doc: dict) -> None:
        target = self._snapshot_path(seq)
        tmp = target.with_suffix(".tmp")
        try:
            tmp.write_bytes(_encode({"seq": seq, "state": state_doc}))
            os.replace(tmp, target)
        except OSError as exc:
            raise StorageFailure(f"snapshot write failed: {exc}") from exc

    def latest_snapshot(self) -> tuple[int, dict] | None:
        """The newest usable snapshot, or None; unreadable ones are skipped."""
        candidates = sorted(self.path.parent.glob(f"{self.path.name}.snap-*.json"), reverse=True)
        for path in candidates:
            try:
                doc = json.loads(path.read_bytes())
                return doc["seq"], doc["state"]
            except (OSError, ValueError, KeyError):
                continue  # fall back to the next-oldest snapshot
        return None
