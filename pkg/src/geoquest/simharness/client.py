"""Two ways for a bot to speak to the game: in-process or over HTTP.

Both clients expose the same call surface and reduce every outcome to a
Reply, so the runner never cares which transport a scenario runs on. The
HTTP client exercises the full wire protocol (sessions, status codes);
the in-process client drives the service directly and mirrors the HTTP
layer's consent and login semantics so behavior stays identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from urllib.parse import quote

import httpx

from ..errors import GameError
from ..geo import GeoPoint
from ..service import GameService


@dataclass(frozen=True)
class Reply:
    ok: bool
    code: str | None
    body: dict


def _loc_doc(lat: float, lon: float, timestamp_ms: int, consent: bool) -> dict:
    return {"lat": lat, "lon": lon, "timestamp_ms": timestamp_ms, "consent": consent}


class InProcessClient:
    """Drives a GameService directly; used for deterministic unit runs."""

    def __init__(self, service: GameService, player_id: str, display_name: str) -> None:
        self.service = service
        self.player_id = player_id
        self.display_name = display_name

    def _execute(self, command: dict) -> Reply:
        try:
            return Reply(True, None, self.service.execute(command))
        except GameError as exc:
            body = {"error": exc.code, "message": exc.message}
            body.update(exc.details)
            return Reply(False, exc.code, body)

    def join(self) -> Reply:
        existing = self.service.read(lambda w: w.state.players.get(self.player_id))
        if existing is None:
            reply = self._execute(
                {"op": "join_player", "player_id": self.player_id, "display_name": self.display_name}
            )
            if not reply.ok and reply.code != "DUPLICATE_PLAYER":
                return reply
            existing = self.service.read(lambda w: w.state.players.get(self.player_id))
        if existing is not None and existing.display_name != self.display_name:
            return Reply(False, "DUPLICATE_PLAYER", {"error": "DUPLICATE_PLAYER"})
        return Reply(True, None, {"player_id": self.player_id})

    def push_fix(self, lat: float, lon: float, timestamp_ms: int, consent: bool) -> Reply:
        return self._execute(
            {
                "op": "update_location",
                "player_id": self.player_id,
                "fix": _loc_doc(lat, lon, timestamp_ms, consent),
            }
        )

    def game_map(self, lat: float, lon: float, timestamp_ms: int, consent: bool) -> Reply:
        if not consent:
            return Reply(False, "CONSENT_REQUIRED", {"error": "CONSENT_REQUIRED"})
        center = GeoPoint(lat, lon)
        body = self.service.read(
            lambda w: {
                "center": {"lat": lat, "lon": lon},
                "radius_m": w.config.visibility_radius_m,
                "entities": w.visible_entities(center, w.config.visibility_radius_m),
            }
        )
        return Reply(True, None, body)

    def open_dialog(self, npc_id: str, loc: dict | None) -> Reply:
        return self._execute(
            {"op": "open_dialog", "player_id": self.player_id, "npc_id": npc_id, "fix": loc}
        )

    def choose(self, npc_id: str, node_id: str, choice_index: int, loc: dict | None = None) -> Reply:
        return self._execute(
            {
                "op": "choose",
                "player_id": self.player_id,
                "npc_id": npc_id,
                "node_id": node_id,
                "choice_index": choice_index,
                "fix": loc,
            }
        )

    def accept_quest(self, quest_id: str) -> Reply:
        return self._execute(
            {"op": "accept_quest", "player_id": self.player_id, "quest_id": quest_id}
        )

    def collect(self, item_id: str, loc: dict) -> Reply:
        return self._execute(
            {
                "op": "collect_item",
                "player_id": self.player_id,
                "item_instance_id": item_id,
                "fix": loc,
            }
        )

    def submit_rebus(self, quest_id: str, phrase: str, participants: list[str]) -> Reply:
        reply = self._execute(
            {
                "op": "submit_rebus",
                "quest_id": quest_id,
                "submitting_players": participants,
                "phrase": phrase,
            }
        )
        if reply.ok and not reply.body["accepted"]:
            return Reply(False, reply.body["reason"], reply.body)
        return reply

    def quests(self) -> Reply:
        return Reply(True, None, {"quests": self.service.read(lambda w: w.quest_log(self.player_id))})

    def inventory(self) -> Reply:
        return Reply(
            True, None, {"inventory": self.service.read(lambda w: w.inventory_view(self.player_id))}
        )

    def health(self) -> Reply:
        events, digest = self.service.read(lambda w: (w.state.event_counter, w.digest()))
        return Reply(True, None, {"status": "ok", "events": events, "digest": digest})


class HttpClient:
    """Speaks the real JSON protocol against any httpx-compatible client."""

    def __init__(self, http: httpx.Client, player_id: str, display_name: str) -> None:
        self.http = http
        self.player_id = player_id
        self.display_name = display_name
        self.token: str | None = None

    def _reply(self, response: httpx.Response) -> Reply:
        try:
            body = response.json()
        except ValueError:
            body = {"raw": response.text}
        if response.status_code >= 400:
            return Reply(False, body.get("error", f"HTTP_{response.status_code}"), body)
        return Reply(True, None, body)

    def _headers(self) -> dict:
        return {"Authorization": f"Bearer {self.token}"} if self.token else {}

    def _get(self, path: str, params: dict | None = None) -> Reply:
        return self._reply(self.http.get(path, params=params, headers=self._headers()))

    def _post(self, path: str, body: dict) -> Reply:
        return self._reply(self.http.post(path, json=body, headers=self._headers()))

    def join(self) -> Reply:
        reply = self._post(
            "/api/session", {"player_id": self.player_id, "display_name": self.display_name}
        )
        if reply.ok:
            self.token = reply.body["token"]
        return reply

    def push_fix(self, lat: float, lon: float, timestamp_ms: int, consent: bool) -> Reply:
        return self._post("/api/track/update", {"location": _loc_doc(lat, lon, timestamp_ms, consent)})

    def game_map(self, lat: float, lon: float, timestamp_ms: int, consent: bool) -> Reply:
        return self._get("/api/game/map", _loc_doc(lat, lon, timestamp_ms, consent))

    def open_dialog(self, npc_id: str, loc: dict | None) -> Reply:
        return self._get(f"/api/game/npc/{quote(npc_id, safe='')}/dialog", loc)

    def choose(self, npc_id: str, node_id: str, choice_index: int, loc: dict | None = None) -> Reply:
        body: dict = {"node": node_id, "choice": choice_index}
        if loc is not None:
            body["location"] = loc
        return self._post(f"/api/game/npc/{quote(npc_id, safe='')}/choose", body)

    def accept_quest(self, quest_id: str) -> Reply:
        return self._post(f"/api/game/quest/{quote(quest_id, safe='')}/accept", {})

    def collect(self, item_id: str, loc: dict) -> Reply:
        return self._post(f"/api/game/item/{quote(item_id, safe='')}/collect", {"location": loc})

    def submit_rebus(self, quest_id: str, phrase: str, participants: list[str]) -> Reply:
        return self._post(
            f"/api/game/rebus/{quote(quest_id, safe='')}/answer",
            {"phrase": phrase, "participants": participants},
        )

    def quests(self) -> Reply:
        return self._get("/api/game/quests")

    def inventory(self) -> Reply:
        return self._get("/api/game/inventory")

    def health(self) -> Reply:
        return self._get("/api/health")
