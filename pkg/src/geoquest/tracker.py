"""Entity-tracking middleware: a registry of mobile and virtual entities.

Two APIs: push a location update for an entity, and query entity state
(single snapshot, or proximity scan). Location data only ever *arrives*
here — this module must never initiate an outbound request for location,
so it deliberately contains no network client of any kind.

Virtual entities (NPCs, item placements) are stored through the same code
path as real players, as fixes with source="simulator".
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .errors import ConsentRequired, DuplicateEntity, StaleTimestamp, UnknownEntity
from .geo import GeoPoint, haversine_distance

DEFAULT_HISTORY_CAP = 256


class EntityKind(str, Enum):
    player = "player"
    npc = "npc"
    item = "item"


class FixSource(str, Enum):
    client_request = "client_request"
    simulator = "simulator"


@dataclass(frozen=True)
class LocationFix:
    """A timestamped, consent-flagged position report."""

    point: GeoPoint
    timestamp_ms: int
    consent: bool
    source: FixSource = FixSource.client_request

    def __post_init__(self) -> None:
        if self.timestamp_ms <= 0:
            raise ValueError("timestamp_ms must be positive")


@dataclass(frozen=True)
class TrackedEntity:
    """Immutable snapshot of one tracked entity."""

    entity_id: str
    kind: EntityKind
    last_fix: LocationFix | None
    history: tuple[LocationFix, ...]


@dataclass
class _EntityRecord:
    entity_id: str
    kind: EntityKind
    history: deque[LocationFix] = field(default_factory=deque)

    def snapshot(self) -> TrackedEntity:
        hist = tuple(self.history)
        return TrackedEntity(
            entity_id=self.entity_id,
            kind=self.kind,
            last_fix=hist[-1] if hist else None,
            history=hist,
        )


class Tracker:
    """Registry of tracked entities with push updates and spatial queries.

    Writes are serialized under one lock; reads copy out immutable
    snapshots under the same lock, so a query never observes a torn
    last_fix/history pair and cross-entity scans see one point in time.
    """

    def __init__(self, history_cap: int = DEFAULT_HISTORY_CAP) -> None:
        if history_cap < 1:
            raise ValueError("history_cap must be at least 1")
        self.history_cap = history_cap
        self._entities: dict[str, _EntityRecord] = {}
        self._lock = threading.RLock()

    def register_entity(
        self,
        entity_id: str,
        kind: EntityKind,
        initial_fix: LocationFix | None = None,
    ) -> TrackedEntity:
        with self._lock:
            if entity_id in self._entities:
                raise DuplicateEntity(f"entity already registered: {entity_id}")
            record = _EntityRecord(
                entity_id=entity_id,
                kind=kind,
                history=deque(maxlen=self.history_cap),
            )
            self._entities[entity_id] = record
            if initial_fix is not None:
                self._apply_fix(record, initial_fix)
            return record.snapshot()

    def update_location(self, entity_id: str, fix: LocationFix) -> TrackedEntity:
        with self._lock:
            record = self._entities.get(entity_id)
            if record is None:
                raise UnknownEntity(f"unknown entity: {entity_id}")
            self._apply_fix(record, fix)
            return record.snapshot()

    def _apply_fix(self, record: _EntityRecord, fix: LocationFix) -> None:
        if not fix.consent:
            raise ConsentRequired(f"fix without consent rejected for {record.entity_id}")
        if record.history and fix.timestamp_ms < record.history[-1].timestamp_ms:
            raise StaleTimestamp(
                f"fix at {fix.timestamp_ms} older than stored "
                f"{record.history[-1].timestamp_ms} for {record.entity_id}"
            )
        record.history.append(fix)

    def get_state(self, entity_id: str) -> TrackedEntity:
        with self._lock:
            record = self._entities.get(entity_id)
            if record is None:
                raise UnknownEntity(f"unknown entity: {entity_id}")
            return record.snapshot()

    def has_entity(self, entity_id: str) -> bool:
        with self._lock:
            return entity_id in self._entities

    def entity_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._entities)

    def query_nearby(
        self,
        center: GeoPoint,
        radius_m: float,
        kind_filter: set[EntityKind] | None = None,
    ) -> list[tuple[str, float]]:
        """Entities with a last fix inside the closed ball around center.

        Linear scan over the registry; results sorted by distance, ties
        broken by entity id.
        """
        if radius_m < 0:
            raise ValueError("radius must be nonnegative")
        with self._lock:
            hits: list[tuple[str, float]] = []
            for entity_id, record in self._entities.items():
                if kind_filter is not None and record.kind not in kind_filter:
                    continue
                if not record.history:
                    continue
                d = haversine_distance(center, record.history[-1].point)
                if d <= radius_m:
                    hits.append((entity_id, d))
        hits.sort(key=lambda pair: (pair[1], pair[0]))
        return hits

    # persistence support

    def to_doc(self) -> dict:
        """Canonical plain-data form of the registry, for digests and snapshots."""
        with self._lock:
            doc = {}
            for entity_id in sorted(self._entities):
                record = self._entities[entity_id]
                doc[entity_id] = {
                    "kind": record.kind.value,
                    "history": [
                        [
                            f.point.lat_deg,
                            f.point.lon_deg,
                            f.timestamp_ms,
                            f.consent,
                            f.source.value,
                        ]
                        for f in record.history
                    ],
                }
            return doc

    @classmethod
    def from_doc(cls, doc: dict, history_cap: int = DEFAULT_HISTORY_CAP) -> "Tracker":
        tracker = cls(history_cap=history_cap)
        for entity_id, entry in doc.items():
            record = _EntityRecord(
                entity_id=entity_id,
                kind=EntityKind(entry["kind"]),
                history=deque(
                    (
                        LocationFix(
                            point=GeoPoint(lat, lon),
                            timestamp_ms=ts,
                            consent=consent,
                            source=FixSource(source),
                        )
                        for lat, lon, ts, consent, source in entry["history"]
                    ),
                    maxlen=history_cap,
                ),
            )
            tracker._entities[entity_id] = record
        return tracker
