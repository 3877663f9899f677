"""HTTP interface over the game service.

Identity comes exclusively from the bearer session: request bodies never
name the acting player. Location reports piggybacked on game actions are
precondition evidence only — the single path that records a track point
is POST /api/track/update.
"""

from __future__ import annotations

from typing import Literal

from fastapi import Depends, FastAPI, Header, Query
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..errors import ConsentRequired, DuplicatePlayer, GameError, MalformedRequest, NotInGroup
from ..geo import GeoPoint
from ..service import GameService
from .schemas import (
    ChooseIn,
    CollectIn,
    DropIn,
    GiveIn,
    LocationIn,
    RebusAnswerIn,
    SessionIn,
    SessionOut,
    TrackUpdateIn,
)
from .sessions import SessionStore

STATUS_BY_CODE = {
    "MALFORMED": 400,
    "BAD_CHOICE": 400,
    "NOT_IN_GROUP": 400,
    "BAD_SESSION": 401,
    "CONSENT_REQUIRED": 403,
    "UNKNOWN_ENTITY": 404,
    "UNKNOWN_PLAYER": 404,
    "UNKNOWN_NPC": 404,
    "UNKNOWN_QUEST": 404,
    "UNKNOWN_ITEM": 404,
    "DUPLICATE_ENTITY": 409,
    "DUPLICATE_PLAYER": 409,
    "STALE_TIMESTAMP": 409,
    "WRONG_NODE": 409,
    "NOT_OFFERED": 409,
    "ALREADY_ACTIVE": 409,
    "ALREADY_COMPLETED": 409,
    "QUEST_ALREADY_COMPLETED": 409,
    "NOT_IN_WORLD": 409,
    "NOT_HELD": 409,
    "NO_FRAGMENTS_LEFT": 409,
    "QUEST_INACTIVE": 409,
    "OUT_OF_RANGE": 422,
    "STALE_FIX": 422,
    "WRONG_PHRASE": 422,
    "INCOMPLETE_COVERAGE": 422,
    "TOO_FEW_PLAYERS": 422,
    "STORAGE_FAILURE": 503,
    "DIGEST_MISMATCH": 500,
    "JOURNAL_GAP": 500,
}

REBUS_REJECTION_STATUS = {
    "QUEST_INACTIVE": 409,
    "INCOMPLETE_COVERAGE": 422,
    "TOO_FEW_PLAYERS": 422,
    "WRONG_PHRASE": 422,
}


def create_app(
    service: GameService,
    sessions: SessionStore | None = None,
    static_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="geoquest", docs_url=None, redoc_url=None)
    store = sessions if sessions is not None else SessionStore(clock=service.clock)

    @app.exception_handler(GameError)
    async def game_error_handler(_request, exc: GameError):
        status = STATUS_BY_CODE.get(exc.code, 500)
        body = {"error": exc.code, "message": exc.message}
        body.update(exc.details)
        return JSONResponse(status_code=status, content=body)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_request, exc: RequestValidationError):
        problems = [
            {"where": ".".join(str(p) for p in e.get("loc", ())), "why": e.get("msg", "")}
            for e in exc.errors()[:5]
        ]
        return JSONResponse(
            status_code=400,
            content={"error": "MALFORMED", "message": "request body/params invalid", "problems": problems},
        )

    def auth(authorization: str | None = Header(default=None)) -> str:
        from ..errors import BadSession

        if not authorization or not authorization.startswith("Bearer "):
            raise BadSession("send Authorization: Bearer <token>")
        return store.resolve(authorization[len("Bearer "):])

    def query_location(
        lat: float | None = Query(default=None),
        lon: float | None = Query(default=None),
        timestamp_ms: int | None = Query(default=None),
        consent: bool | None = Query(default=None),
    ) -> dict | None:
        parts = (lat, lon, timestamp_ms, consent)
        if all(p is None for p in parts):
            return None
        if any(p is None for p in parts):
            raise MalformedRequest(
                "a location needs all of lat, lon, timestamp_ms and consent"
            )
        return {"lat": lat, "lon": lon, "timestamp_ms": timestamp_ms, "consent": consent}

    # ------------------------------------------------------------- session

    @app.post("/api/session", response_model=SessionOut)
    def open_session(body: SessionIn):
        existing = service.read(lambda w: w.state.players.get(body.player_id))
        if existing is None:
            try:
                service.execute(
                    {"op": "join_player", "player_id": body.player_id, "display_name": body.display_name}
                )
            except DuplicatePlayer:
                existing = service.read(lambda w: w.state.players.get(body.player_id))
        if existing is not None and existing.display_name != body.display_name:
            raise DuplicatePlayer(
                f"player {body.player_id!r} already exists with another display name"
            )
        token = store.create(body.player_id)
        return SessionOut(token=token, player_id=body.player_id, display_name=body.display_name)

    # ------------------------------------------------------------- tracking

    @app.post("/api/track/update")
    def track_update(body: TrackUpdateIn, player: str = Depends(auth)):
        return service.execute(
            {"op": "update_location", "player_id": player, "fix": body.location.as_doc()}
        )

    @app.get("/api/track/state/{entity_id}")
    def track_state(entity_id: str, player: str = Depends(auth)):
        return service.read(lambda w: w.entity_view(entity_id))

    @app.get("/api/track/nearby")
    def track_nearby(
        lat: float,
        lon: float,
        radius: float,
        kind: Literal["player", "npc", "item"] | None = None,
        player: str = Depends(auth),
    ):
        if radius < 0:
            raise MalformedRequest("radius must be nonnegative")

        def run(world):
            from ..tracker import EntityKind

            kinds = {EntityKind(kind)} if kind else None
            hits = world.tracker.query_nearby(GeoPoint(lat, lon), radius, kinds)
            out = []
            for entity_id, distance in hits:
                entity = world.tracker.get_state(entity_id)
                out.append(
                    {
                        "entity_id": entity_id,
                        "kind": entity.kind.value,
                        "distance_m": distance,
                        "lat": entity.last_fix.point.lat_deg,
                        "lon": entity.last_fix.point.lon_deg,
                    }
                )
            return {"entities": out}

        try:
            return service.read(run)
        except ValueError as exc:
            raise MalformedRequest(str(exc)) from exc

    # ------------------------------------------------------------- game reads

    @app.get("/api/game/map")
    def game_map(player: str = Depends(auth), location: dict | None = Depends(query_location)):
        if location is None:
            raise MalformedRequest("the map is drawn around your reported location")
        if not location["consent"]:
            raise ConsentRequired("location reported without consent")
        center = GeoPoint(location["lat"], location["lon"])

        def run(world):
            radius = world.config.visibility_radius_m
            return {
                "center": {"lat": center.lat_deg, "lon": center.lon_deg},
                "radius_m": radius,
                "entities": world.visible_entities(center, radius),
            }

        return service.read(run)

    @app.get("/api/game/quests")
    def quest_log(player: str = Depends(auth)):
        return {"quests": service.read(lambda w: w.quest_log(player))}

    @app.get("/api/game/inventory")
    def inventory(player: str = Depends(auth)):
        return {"inventory": service.read(lambda w: w.inventory_view(player))}

    @app.get("/api/game/rebus/{quest_id}/fragment")
    def rebus_fragment(quest_id: str, player: str = Depends(auth)):
        return {"fragment": service.read(lambda w: w.fragment_view(player, quest_id))}

    # ------------------------------------------------------------- game writes

    @app.get("/api/game/npc/{npc_id}/dialog")
    def open_dialog(
        npc_id: str,
        player: str = Depends(auth),
        location: dict | None = Depends(query_location),
    ):
        # a mutating GET, deliberately: opening a conversation positions the
        # player inside it, and that position is journaled state
        return service.execute(
            {"op": "open_dialog", "player_id": player, "npc_id": npc_id, "fix": location}
        )

    @app.post("/api/game/npc/{npc_id}/choose")
    def choose(npc_id: str, body: ChooseIn, player: str = Depends(auth)):
        return service.execute(
            {
                "op": "choose",
                "player_id": player,
                "npc_id": npc_id,
                "node_id": body.node,
                "choice_index": body.choice,
                "fix": body.location.as_doc() if body.location else None,
            }
        )

    @app.post("/api/game/quest/{quest_id}/accept")
    def accept_quest(quest_id: str, player: str = Depends(auth)):
        return service.execute({"op": "accept_quest", "player_id": player, "quest_id": quest_id})

    @app.post("/api/game/item/{item_id}/collect")
    def collect(item_id: str, body: CollectIn, player: str = Depends(auth)):
        return service.execute(
            {
                "op": "collect_item",
                "player_id": player,
                "item_instance_id": item_id,
                "fix": body.location.as_doc(),
            }
        )

    @app.post("/api/game/item/{item_id}/drop")
    def drop(item_id: str, body: DropIn, player: str = Depends(auth)):
        return service.execute(
            {
                "op": "drop_item",
                "player_id": player,
                "item_instance_id": item_id,
                "fix": body.location.as_doc(),
                "at": {"lat": body.at.lat, "lon": body.at.lon},
            }
        )

    @app.post("/api/game/item/{item_id}/give")
    def give(item_id: str, body: GiveIn, player: str = Depends(auth)):
        return service.execute(
            {
                "op": "give_item",
                "from_player": player,
                "to_player": body.to,
                "item_instance_id": item_id,
            }
        )

    @app.post("/api/game/rebus/{quest_id}/answer")
    def rebus_answer(quest_id: str, body: RebusAnswerIn, player: str = Depends(auth)):
        if player not in body.participants:
            raise NotInGroup("the submitting player must be listed in participants")
        verdict = service.execute(
            {
                "op": "submit_rebus",
                "quest_id": quest_id,
                "submitting_players": body.participants,
                "phrase": body.phrase,
            }
        )
        if not verdict["accepted"]:
            status = REBUS_REJECTION_STATUS.get(verdict["reason"], 422)
            body_out = {"error": verdict["reason"], "message": verdict.get("message", "")}
            for key in ("missing_fragments", "inactive_players"):
                if key in verdict:
                    body_out[key] = verdict[key]
            return JSONResponse(status_code=status, content=body_out)
        return verdict

    # ------------------------------------------------------------- misc

    @app.get("/api/health")
    def health():
        events, digest = service.read(lambda w: (w.state.event_counter, w.digest()))
        return {"status": "ok", "events": events, "digest": digest}

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app
