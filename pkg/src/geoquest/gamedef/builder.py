"""Instantiate a validated game definition into a live world.

Item instances get ids like "flower#3": the kind plus an ordinal counted
per kind in document order, so the same suite always yields the same ids.
NPCs and placed items are registered in the tracker with a placement fix
at timestamp 1, which keeps freshly built worlds bit-identical across
runs regardless of wall clock.
"""

from __future__ import annotations

from ..engine import (
    DialogChoice,
    DialogNode,
    DialogTree,
    EffectKind,
    GameConfig,
    GameState,
    GameWorld,
    ItemInstance,
    Npc,
    QuestKind,
    QuestSpec,
    RebusFragment,
)
from ..errors import GameError
from ..geo import GeoPoint
from ..tracker import EntityKind, FixSource, LocationFix, Tracker
from .model import GameDefinition, IntegrityError
from .validator import validate

PLACEMENT_TS = 1  # fixed timestamp for world-seeded fixes

QUEST_KIND_BY_NAME = {
    "reach": QuestKind.reach_target,
    "collect": QuestKind.collect,
    "rebus": QuestKind.rebus,
}


class DefinitionInvalid(GameError):
    """Raised by load_world() when the suite fails validation."""

    code = "DEFINITION_INVALID"

    def __init__(self, errors: list[IntegrityError]) -> None:
        super().__init__(f"{len(errors)} integrity error(s)")
        self.errors = errors


def _config(defn: GameDefinition) -> GameConfig:
    p = defn.params
    base = GameConfig()
    return GameConfig(
        collect_radius_m=p.collect_radius_m if p.collect_radius_m is not None else base.collect_radius_m,
        npc_default_radius_m=p.npc_radius_m if p.npc_radius_m is not None else base.npc_default_radius_m,
        staleness_ms=int(round(p.staleness_s * 1000)) if p.staleness_s is not None else base.staleness_ms,
        history_cap=p.history_cap if p.history_cap is not None else base.history_cap,
        visibility_radius_m=p.visibility_radius_m if p.visibility_radius_m is not None else base.visibility_radius_m,
    )

def _quest_spec(raw) -> QuestSpec:
    kind = QUEST_KIND_BY_NAME[raw.kind]
    if kind is QuestKind.reach_target:
        return QuestSpec(
            quest_id=raw.quest_id,
            title=raw.title,
            kind=kind,
            target=GeoPoint(raw.target_lat, raw.target_lon),
            radius_m=raw.target_radius_m,
        )
    if kind is QuestKind.collect:
        return QuestSpec(
            quest_id=raw.quest_id,
            title=raw.title,
            kind=kind,
            item_kind=raw.item_kind,
            required_count=raw.required_count,
            completion_npc_id=raw.completion_npc,
        )
    fragments = tuple(
        RebusFragment(fragment_index=f.index, image_ref=f.image, text_label=f.label)
        for f in sorted(raw.fragments, key=lambda f: f.index)
    )
    return QuestSpec(
        quest_id=raw.quest_id,
        title=raw.title,
        kind=kind,
        fragments=fragments,
        solution_phrase=raw.solution,
        min_players=raw.min_players,
    )


def build_world(defn: GameDefinition) -> GameWorld:
    """Turn a *validated* definition into a GameWorld. Must not fail on any
    definition that validate() passed."""
    config = _config(defn)
    state = GameState()

    for raw in defn.quests:
        state.quest_specs[raw.quest_id] = _quest_spec(raw)

    for raw_npc in defn.npcs:
        nodes = {}
        for raw_node in raw_npc.nodes:
            nodes[raw_node.node_id] = DialogNode(
                node_id=raw_node.node_id,
                text=raw_node.text,
                choices=tuple(
                    DialogChoice(
                        label=c.label,
                        effect=EffectKind(c.effect),
                        quest_id=c.quest,
                        next_node_id=c.next,
                    )
                    for c in raw_node.choices
                ),
            )
        state.npcs[raw_npc.npc_id] = Npc(
            npc_id=raw_npc.npc_id,
            name=raw_npc.name,
            location=GeoPoint(raw_npc.lat, raw_npc.lon),
            dialog=DialogTree(root_node_id=raw_npc.dialog_root, nodes=nodes),
            interaction_radius_m=raw_npc.radius_m
            if raw_npc.radius_m is not None
            else config.npc_default_radius_m,
        )

    ordinals: dict[str, int] = {}
    for placement in defn.placements:
        point = GeoPoint(placement.lat, placement.lon)
        for _ in range(placement.count):
            ordinal = ordinals.get(placement.kind, 0)
            ordinals[placement.kind] = ordinal + 1
            iid = f"{placement.kind}#{ordinal}"
            state.items[iid] = ItemInstance(item_instance_id=iid, kind=placement.kind, world_point=point)

    tracker = Tracker(history_cap=config.history_cap)
    for npc in state.npcs.values():
        tracker.register_entity(
            npc.npc_id,
            EntityKind.npc,
            LocationFix(point=npc.location, timestamp_ms=PLACEMENT_TS, consent=True, source=FixSource.simulator),
        )
    for item in state.items.values():
        tracker.register_entity(
            item.item_instance_id,
            EntityKind.item,
            LocationFix(point=item.world_point, timestamp_ms=PLACEMENT_TS, consent=True, source=FixSource.simulator),
        )
    return GameWorld(state=state, tracker=tracker, config=config)


def load_world(defn: GameDefinition) -> GameWorld:
    """Validate, then build; raises DefinitionInvalid with the full list."""
    errors = validate(defn)
    if errors:
        raise DefinitionInvalid(errors)
    return build_world(defn)
