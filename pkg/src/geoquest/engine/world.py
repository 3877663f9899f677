"""The game world: every mutation of game state flows through here.

GameWorld binds the entity model to the tracker and applies commands one
at a time (single-writer). Commands are plain dicts so the service layer
can journal them and replay them deterministically; each carries the
logical clock reading (now_ms) it was applied under.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

from ..errors import (
    AlreadyActive,
    AlreadyCompleted,
    BadChoice,
    DuplicatePlayer,
    NoFragmentsLeft,
    NotHeld,
    NotInWorld,
    NotOffered,
    OutOfRange,
    QuestAlreadyCompleted,
    QuestInactive,
    StaleFix,
    UnknownItem,
    UnknownNpc,
    UnknownPlayer,
    UnknownQuest,
    WrongNode,
)
from ..geo import GeoPoint, haversine_distance, within_radius
from ..tracker import EntityKind, FixSource, LocationFix, Tracker
from .model import (
    DialogChoice,
    DialogNode,
    EffectKind,
    GameConfig,
    GameState,
    ItemInstance,
    Player,
    QuestInstance,
    QuestKind,
    QuestSpec,
    QuestState,
)
from .text import normalize_phrase

REBUS_ACCEPTED = "ACCEPTED"
REBUS_QUEST_INACTIVE = "QUEST_INACTIVE"
REBUS_INCOMPLETE_COVERAGE = "INCOMPLETE_COVERAGE"
REBUS_TOO_FEW_PLAYERS = "TOO_FEW_PLAYERS"
REBUS_WRONG_PHRASE = "WRONG_PHRASE"


def fix_from_doc(doc: dict) -> LocationFix:
    return LocationFix(
        point=GeoPoint(float(doc["lat"]), float(doc["lon"])),
        timestamp_ms=int(doc["timestamp_ms"]),
        consent=bool(doc["consent"]),
        source=FixSource(doc.get("source", "client_request")),
    )


def fix_to_doc(fix: LocationFix) -> dict:
    return {
        "lat": fix.point.lat_deg,
        "lon": fix.point.lon_deg,
        "timestamp_ms": fix.timestamp_ms,
        "consent": fix.consent,
        "source": fix.source.value,
    }


class GameWorld:
    """Authoritative game state plus the tracker it is linked to."""

    def __init__(self, state: GameState, tracker: Tracker, config: GameConfig) -> None:
        self.state = state
        self.tracker = tracker
        self.config = config

    # ------------------------------------------------------------------
    # helpers

    def _player(self, player_id: str) -> Player:
        player = self.state.players.get(player_id)
        if player is None:
            raise UnknownPlayer(f"unknown player: {player_id}")
        return player

    def _npc(self, npc_id: str):
        npc = self.state.npcs.get(npc_id)
        if npc is None:
            raise UnknownNpc(f"unknown npc: {npc_id}")
        return npc

    def _item(self, item_instance_id: str) -> ItemInstance:
        item = self.state.items.get(item_instance_id)
        if item is None:
            raise UnknownItem(f"unknown item: {item_instance_id}")
        return item

    def _spec(self, quest_id: str) -> QuestSpec:
        spec = self.state.quest_specs.get(quest_id)
        if spec is None:
            raise UnknownQuest(f"unknown quest: {quest_id}")
        return spec

    def _require_fresh(self, fix: LocationFix, now_ms: int) -> None:
        if now_ms - fix.timestamp_ms > self.config.staleness_ms:
            raise StaleFix(
                f"fix is {(now_ms - fix.timestamp_ms) / 1000:.0f}s old, "
                f"limit {self.config.staleness_ms / 1000:.0f}s"
            )

    # ------------------------------------------------------------------
    # operations

    def join_player(self, player_id: str, display_name: str) -> Player:
        if player_id in self.state.players:
            raise DuplicatePlayer(f"player already joined: {player_id}")
        player = Player(player_id=player_id, display_name=display_name)
        self.state.players[player_id] = player
        self.tracker.register_entity(player_id, EntityKind.player)
        return player

    def update_location(self, player_id: str, fix: LocationFix) -> list[dict]:
        """Store a pushed fix and run event-driven quest evaluation on it."""
        self._player(player_id)
        self.tracker.update_location(player_id, fix)
        return self.on_location_update(player_id, fix)

    def on_location_update(self, player_id: str, fix: LocationFix) -> list[dict]:
        """Complete every active reach-target quest satisfied by this fix."""
        player = self._player(player_id)
        events: list[dict] = []
        for quest_id in sorted(player.active_quests):
            instance = player.active_quests[quest_id]
            if instance.state is not QuestState.active:
                continue
            spec = self.state.quest_specs[quest_id]
            if spec.kind is not QuestKind.reach_target:
                continue
            if within_radius(spec.target, fix.point, spec.radius_m):
                self._complete(player, quest_id)
                events.append({"quest_id": quest_id, "state": QuestState.completed.value})
        return events

    def open_dialog(
        self, player_id: str, npc_id: str, player_fix: LocationFix | None, now_ms: int
    ) -> DialogNode:
        player = self._player(player_id)
        npc = self._npc(npc_id)
        if npc.interaction_radius_m > 0:
            if player_fix is None:
                raise OutOfRange(f"{npc_id} requires a location to talk")
            self._require_fresh(player_fix, now_ms)
            if not within_radius(npc.location, player_fix.point, npc.interaction_radius_m):
                d = haversine_distance(npc.location, player_fix.point)
                raise OutOfRange(
                    f"{d:.0f}m from {npc_id}, radius {npc.interaction_radius_m:.0f}m"
                )
        root = npc.dialog.nodes[npc.dialog.root_node_id]
        player.dialog_position = (npc_id, root.node_id)
        return root

    def choose(
        self, player_id: str, npc_id: str, node_id: str, choice_index: int
    ) -> tuple[dict, DialogNode | None]:
        """Apply one dialog choice; returns (effect result, next node or None)."""
        player = self._player(player_id)
        npc = self._npc(npc_id)
        if player.dialog_position != (npc_id, node_id):
            raise WrongNode(
                f"dialog position is {player.dialog_position}, not ({npc_id}, {node_id})"
            )
        node = npc.dialog.nodes[node_id]
        if not 0 <= choice_index < len(node.choices):
            raise BadChoice(f"choice {choice_index} out of range for node {node_id}")
        choice = node.choices[choice_index]
        effect_result = self._apply_effect(player, choice)
        if choice.next_node_id is None:
            player.dialog_position = None
            return effect_result, None
        next_node = npc.dialog.nodes[choice.next_node_id]
        player.dialog_position = (npc_id, next_node.node_id)
        return effect_result, next_node

    def _apply_effect(self, player: Player, choice: DialogChoice) -> dict:
        kind = choice.effect
        if kind is EffectKind.none:
            return {"effect": "none"}
        quest_id = choice.quest_id
        spec = self._spec(quest_id)
        if kind is EffectKind.offer_quest:
            if quest_id in player.completed_quests:
                raise QuestAlreadyCompleted(f"{quest_id} already completed")
            instance = player.active_quests.get(quest_id)
            if instance is not None:
                status = "already_" + instance.state.value
            else:
                player.active_quests[quest_id] = QuestInstance(quest_id=quest_id)
                status = "offered"
            return {"effect": "offer_quest", "quest_id": quest_id, "status": status, "title": spec.title}
        if kind is EffectKind.give_fragment:
            return {"effect": "give_fragment", "fragment": self._give_fragment(player, spec)}
        if kind is EffectKind.report_quest_status:
            return {"effect": "report_quest_status", "status": self.quest_status(player.player_id, quest_id)}
        if kind is EffectKind.complete_quest_check:
            return {"effect": "complete_quest_check", **self._complete_check(player, spec)}
        raise BadChoice(f"unhandled effect {kind}")

    def _give_fragment(self, player: Player, spec: QuestSpec) -> dict:
        if spec.kind is not QuestKind.rebus:
            raise QuestInactive(f"{spec.quest_id} is not a rebus quest")
        instance = player.active_quests.get(spec.quest_id)
        if instance is None or instance.state is not QuestState.active:
            raise QuestInactive(f"{spec.quest_id} not active for {player.player_id}")
        assignments = self.state.rebus_assignments.setdefault(spec.quest_id, {})
        if instance.assigned_fragment_index is None:
            taken = set(assignments)
            index = next((i for i in range(len(spec.fragments)) if i not in taken), None)
            if index is None:
                raise NoFragmentsLeft(
                    f"all {len(spec.fragments)} fragments of {spec.quest_id} are assigned"
                )
            assignments[index] = player.player_id
            instance.assigned_fragment_index = index
        fragment = spec.fragments[instance.assigned_fragment_index]
        player.fragments_viewed.add((spec.quest_id, fragment.fragment_index))
        return {
            "fragment_index": fragment.fragment_index,
            "image_ref": fragment.image_ref,
            "text_label": fragment.text_label,
        }

    def _complete_check(self, player: Player, spec: QuestSpec) -> dict:
        quest_id = spec.quest_id
        if quest_id in player.completed_quests:
            return {"quest_id": quest_id, "status": "already_completed"}
        instance = player.active_quests.get(quest_id)
        if instance is None or instance.state is not QuestState.active:
            raise QuestInactive(f"{quest_id} not active for {player.player_id}")
        if spec.kind is QuestKind.collect and instance.collected_count >= spec.required_count:
            self._complete(player, quest_id)
            return {
                "quest_id": quest_id,
                "status": "completed",
                "collected": spec.required_count,
                "required": spec.required_count,
            }
        return {
            "quest_id": quest_id,
            "status": "in_progress",
            "collected": instance.collected_count,
            "required": spec.required_count,
        }

    def _complete(self, player: Player, quest_id: str) -> None:
        del player.active_quests[quest_id]
        player.completed_quests.add(quest_id)

    def accept_quest(self, player_id: str, quest_id: str) -> QuestInstance:
        player = self._player(player_id)
        self._spec(quest_id)
        if quest_id in player.completed_quests:
            raise AlreadyCompleted(f"{quest_id} already completed")
        instance = player.active_quests.get(quest_id)
        if instance is None:
            raise NotOffered(f"{quest_id} was never offered to {player_id}")
        if instance.state is QuestState.active:
            raise AlreadyActive(f"{quest_id} already active")
        instance.state = QuestState.active
        return instance

    def collect_item(
        self, player_id: str, item_instance_id: str, player_fix: LocationFix | None, now_ms: int
    ) -> list[dict]:
        """Pick an item up from the world; returns progress of affected quests."""
        player = self._player(player_id)
        item = self._item(item_instance_id)
        if not item.in_world:
            raise NotInWorld(f"{item_instance_id} is not in the world")
        if player_fix is None:
            raise OutOfRange("collecting requires a location")
        self._require_fresh(player_fix, now_ms)
        if not within_radius(item.world_point, player_fix.point, self.config.collect_radius_m):
            d = haversine_distance(item.world_point, player_fix.point)
            raise OutOfRange(f"{d:.0f}m from item, radius {self.config.collect_radius_m:.0f}m")
        item.world_point = None
        item.holder_player_id = player_id
        player.inventory.add(item_instance_id)
        progressed: list[dict] = []
        for quest_id in sorted(player.active_quests):
            instance = player.active_quests[quest_id]
            spec = self.state.quest_specs[quest_id]
            if (
                instance.state is QuestState.active
                and spec.kind is QuestKind.collect
                and spec.item_kind == item.kind
                and instance.collected_count < spec.required_count
            ):
                instance.collected_count += 1
                progressed.append(
                    {
                        "quest_id": quest_id,
                        "collected": instance.collected_count,
                        "required": spec.required_count,
                    }
                )
        return progressed

    def drop_item(self, player_id: str, item_instance_id: str, at: GeoPoint, now_ms: int) -> None:
        player = self._player(player_id)
        item = self._item(item_instance_id)
        if item.holder_player_id != player_id:
            raise NotHeld(f"{player_id} does not hold {item_instance_id}")
        item.holder_player_id = None
        item.world_point = at
        player.inventory.discard(item_instance_id)
        self.tracker.update_location(
            item_instance_id,
            LocationFix(point=at, timestamp_ms=now_ms, consent=True, source=FixSource.simulator),
        )

    def give_item(self, from_player: str, to_player: str, item_instance_id: str) -> None:
        giver = self._player(from_player)
        receiver = self._player(to_player)
        item = self._item(item_instance_id)
        if item.holder_player_id != from_player:
            raise NotHeld(f"{from_player} does not hold {item_instance_id}")
        if from_player == to_player:
            return
        giver.inventory.discard(item_instance_id)
        receiver.inventory.add(item_instance_id)
        item.holder_player_id = to_player

    def submit_rebus(
        self, quest_id: str, submitting_players: list[str], phrase: str
    ) -> dict:
        """Group answer verification; completes the quest for the whole group.

        Checks run coverage-first so a lone guesser learns nothing about the
        phrase, and location plays no part at all.
        """
        spec = self._spec(quest_id)
        group = sorted(set(submitting_players))
        if spec.kind is not QuestKind.rebus:
            return self._rejected(REBUS_QUEST_INACTIVE, message=f"{quest_id} is not a rebus quest")
        inactive = []
        for pid in group:
            player = self._player(pid)
            instance = player.active_quests.get(quest_id)
            if instance is None or instance.state is not QuestState.active:
                inactive.append(pid)
        if inactive:
            return self._rejected(
                REBUS_QUEST_INACTIVE,
                message=f"{quest_id} not active for: {', '.join(inactive)}",
                inactive_players=inactive,
            )
        all_indices = {f.fragment_index for f in spec.fragments}
        viewed: set[int] = set()
        for pid in group:
            viewed |= {
                idx for (qid, idx) in self.state.players[pid].fragments_viewed if qid == quest_id
            }
        missing = sorted(all_indices - viewed)
        if missing:
            return self._rejected(
                REBUS_INCOMPLETE_COVERAGE,
                message=f"fragments not covered: {missing}",
                missing_fragments=missing,
            )
        if len(group) < spec.min_players:
            return self._rejected(
                REBUS_TOO_FEW_PLAYERS,
                message=f"{len(group)} players, need at least {spec.min_players}",
            )
        if normalize_phrase(phrase) != normalize_phrase(spec.solution_phrase):
            return self._rejected(REBUS_WRONG_PHRASE, message="that is not the solution")
        for pid in group:
            self._complete(self.state.players[pid], quest_id)
        return {"accepted": True, "reason": REBUS_ACCEPTED, "completed_players": group}

    @staticmethod
    def _rejected(reason: str, message: str, **details: Any) -> dict:
        return {"accepted": False, "reason": reason, "message": message, **details}

    # ------------------------------------------------------------------
    # read-only views

    def node_view(self, node: DialogNode) -> dict:
        return {
            "node_id": node.node_id,
            "text": node.text,
            "choices": [
                {"index": i, "label": c.label} for i, c in enumerate(node.choices)
            ],
        }

    def quest_status(self, player_id: str, quest_id: str) -> dict:
        player = self._player(player_id)
        spec = self._spec(quest_id)
        view = {"quest_id": quest_id, "title": spec.title, "kind": spec.kind.value}
        if quest_id in player.completed_quests:
            view["state"] = QuestState.completed.value
        elif quest_id in player.active_quests:
            instance = player.active_quests[quest_id]
            view["state"] = instance.state.value
            if spec.kind is QuestKind.collect:
                view["collected"] = instance.collected_count
                view["required"] = spec.required_count
            elif spec.kind is QuestKind.rebus:
                view["fragment_index"] = instance.assigned_fragment_index
        else:
            view["state"] = "not_started"
        return view

    def quest_log(self, player_id: str) -> list[dict]:
        player = self._player(player_id)
        quest_ids = sorted(set(player.active_quests) | player.completed_quests)
        return [self.quest_status(player_id, qid) for qid in quest_ids]

    def inventory_view(self, player_id: str) -> list[dict]:
        player = self._player(player_id)
        return [
            {"item_instance_id": iid, "kind": self.state.items[iid].kind}
            for iid in sorted(player.inventory)
        ]

    def fragment_view(self, player_id: str, quest_id: str) -> dict | None:
        player = self._player(player_id)
        spec = self._spec(quest_id)
        instance = player.active_quests.get(quest_id)
        if instance is None or instance.assigned_fragment_index is None:
            return None
        fragment = spec.fragments[instance.assigned_fragment_index]
        return {
            "fragment_index": fragment.fragment_index,
            "image_ref": fragment.image_ref,
            "text_label": fragment.text_label,
        }

    def visible_entities(self, center: GeoPoint, radius_m: float) -> list[dict]:
        """Game-facing map query: world items, NPCs, and located players."""
        out = []
        for entity_id, distance in self.tracker.query_nearby(center, radius_m):
            entity = self.tracker.get_state(entity_id)
            item = None
            if entity.kind is EntityKind.item:
                item = self.state.items.get(entity_id)
                if item is None or not item.in_world:
                    continue
            point = entity.last_fix.point
            view = {
                "entity_id": entity_id,
                "kind": entity.kind.value,
                "lat": point.lat_deg,
                "lon": point.lon_deg,
                "distance_m": distance,
            }
            if item is not None:
                view["item_kind"] = item.kind
            out.append(view)
        return out

    def entity_view(self, entity_id: str) -> dict:
        entity = self.tracker.get_state(entity_id)
        view = {
            "entity_id": entity.entity_id,
            "kind": entity.kind.value,
            "history_len": len(entity.history),
            "last_fix": None,
        }
        if entity.last_fix is not None:
            view["last_fix"] = fix_to_doc(entity.last_fix)
        return view

    # ------------------------------------------------------------------
    # command protocol (journal / replay)

    def apply(self, command: dict) -> tuple[bool, dict]:
        """Apply one command dict; returns (state_mutated, result).

        Raises a GameError subclass when the command is rejected; rejected
        rebus submissions return normally with accepted=False and mutate
        nothing. The event counter ticks once per mutating command.
        """
        op = command["op"]
        now_ms = int(command["now_ms"])
        mutated = True
        if op == "join_player":
            player = self.join_player(command["player_id"], command["display_name"])
            result = {"player_id": player.player_id, "display_name": player.display_name}
        elif op == "update_location":
            events = self.update_location(command["player_id"], fix_from_doc(command["fix"]))
            result = {"entity": self.entity_view(command["player_id"]), "events": events}
        elif op == "open_dialog":
            fix = fix_from_doc(command["fix"]) if command.get("fix") else None
            node = self.open_dialog(command["player_id"], command["npc_id"], fix, now_ms)
            result = {"npc_id": command["npc_id"], "node": self.node_view(node)}
        elif op == "choose":
            effect_result, node = self.choose(
                command["player_id"],
                command["npc_id"],
                command["node_id"],
                int(command["choice_index"]),
            )
            result = {
                "effect_result": effect_result,
                "node": self.node_view(node) if node is not None else None,
                "dialog_ended": node is None,
            }
        elif op == "accept_quest":
            self.accept_quest(command["player_id"], command["quest_id"])
            result = {"quest": self.quest_status(command["player_id"], command["quest_id"])}
        elif op == "collect_item":
            fix = fix_from_doc(command["fix"]) if command.get("fix") else None
            progressed = self.collect_item(
                command["player_id"], command["item_instance_id"], fix, now_ms
            )
            result = {
                "inventory": self.inventory_view(command["player_id"]),
                "quests": progressed,
            }
        elif op == "drop_item":
            at = GeoPoint(float(command["at"]["lat"]), float(command["at"]["lon"]))
            self.drop_item(command["player_id"], command["item_instance_id"], at, now_ms)
            result = {"inventory": self.inventory_view(command["player_id"])}
        elif op == "give_item":
            self.give_item(command["from_player"], command["to_player"], command["item_instance_id"])
            result = {"inventory": self.inventory_view(command["from_player"])}
        elif op == "submit_rebus":
            result = self.submit_rebus(
                command["quest_id"], list(command["submitting_players"]), command["phrase"]
            )
            mutated = result["accepted"]
        else:
            raise ValueError(f"unknown command op: {op}")
        if mutated:
            self.state.event_counter += 1
        return mutated, result

    # ------------------------------------------------------------------
    # persistence

    def to_doc(self) -> dict:
        """Canonical plain-data form of all dynamic state (snapshot format)."""
        s = self.state
        players = {}
        for pid in sorted(s.players):
            p = s.players[pid]
            players[pid] = {
                "display_name": p.display_name,
                "inventory": sorted(p.inventory),
                "active_quests": {
                    qid: [
                        inst.state.value,
                        inst.collected_count,
                        inst.assigned_fragment_index,
                    ]
                    for qid, inst in sorted(p.active_quests.items())
                },
                "completed_quests": sorted(p.completed_quests),
                "fragments_viewed": sorted([q, i] for q, i in p.fragments_viewed),
                "dialog_position": list(p.dialog_position) if p.dialog_position else None,
            }
        items = {}
        for iid in sorted(s.items):
            item = s.items[iid]
            if item.in_world:
                holder = ["world", item.world_point.lat_deg, item.world_point.lon_deg]
            else:
                holder = ["player", item.holder_player_id]
            items[iid] = {"kind": item.kind, "holder": holder}
        return {
            "engine": {
                "event_counter": s.event_counter,
                "players": players,
                "items": items,
                "rebus_assignments": {
                    qid: {str(i): pid for i, pid in sorted(assignment.items())}
                    for qid, assignment in sorted(s.rebus_assignments.items())
                },
            },
            "tracker": self.tracker.to_doc(),
        }

    def restore_doc(self, doc: dict) -> None:
        """Overwrite all dynamic state from a snapshot document."""
        engine = doc["engine"]
        s = self.state
        s.event_counter = engine["event_counter"]
        s.players = {}
        for pid, entry in engine["players"].items():
            s.players[pid] = Player(
                player_id=pid,
                display_name=entry["display_name"],
                inventory=set(entry["inventory"]),
                active_quests={
                    qid: QuestInstance(
                        quest_id=qid,
                        state=QuestState(state),
                        collected_count=collected,
                        assigned_fragment_index=frag,
                    )
                    for qid, (state, collected, frag) in entry["active_quests"].items()
                },
                completed_quests=set(entry["completed_quests"]),
                fragments_viewed={(q, i) for q, i in entry["fragments_viewed"]},
                dialog_position=tuple(entry["dialog_position"])
                if entry["dialog_position"]
                else None,
            )
        s.items = {}
        for iid, entry in engine["items"].items():
            holder = entry["holder"]
            if holder[0] == "world":
                s.items[iid] = ItemInstance(
                    item_instance_id=iid, kind=entry["kind"], world_point=GeoPoint(holder[1], holder[2])
                )
            else:
                s.items[iid] = ItemInstance(
                    item_instance_id=iid, kind=entry["kind"], holder_player_id=holder[1]
                )
        s.rebus_assignments = {
            qid: {int(i): pid for i, pid in assignment.items()}
            for qid, assignment in engine["rebus_assignments"].items()
        }
        self.tracker = Tracker.from_doc(doc["tracker"], history_cap=self.config.history_cap)

    def digest(self) -> str:
        """Stable hash of the dynamic state; bit-identical iff states match."""
        payload = json.dumps(self.to_doc(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()
