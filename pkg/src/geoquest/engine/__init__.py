"""Game rules: players, NPC dialogs, items, and the three quest kinds."""

from .model import (
    DialogChoice,
    DialogNode,
    DialogTree,
    EffectKind,
    GameConfig,
    GameState,
    ItemInstance,
    Npc,
    Player,
    QuestInstance,
    QuestKind,
    QuestSpec,
    QuestState,
    RebusFragment,
)
from .text import normalize_phrase
from .world import GameWorld, fix_from_doc, fix_to_doc

__all__ = [
    "DialogChoice",
    "DialogNode",
    "DialogTree",
    "EffectKind",
    "GameConfig",
    "GameState",
    "GameWorld",
    "ItemInstance",
    "Npc",
    "Player",
    "QuestInstance",
    "QuestKind",
    "QuestSpec",
    "QuestState",
    "RebusFragment",
    "fix_from_doc",
    "fix_to_doc",
    "normalize_phrase",
]
