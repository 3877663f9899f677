"""Game entity model: players, NPCs, items, dialogs, quests.

All state lives in GameState; mutation happens only through GameWorld in
world.py so every change is a command that can be journaled and replayed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..geo import GeoPoint


class QuestKind(str, Enum):
    reach_target = "reach_target"
    collect = "collect"
    rebus = "rebus"


class QuestState(str, Enum):
    offered = "offered"
    active = "active"
    completed = "completed"


class EffectKind(str, Enum):
    none = "none"
    offer_quest = "offer_quest"
    give_fragment = "give_fragment"
    report_quest_status = "report_quest_status"
    complete_quest_check = "complete_quest_check"


@dataclass(frozen=True)
class DialogChoice:
    label: str
    effect: EffectKind = EffectKind.none
    quest_id: str | None = None
    next_node_id: str | None = None


@dataclass(frozen=True)
class DialogNode:
    node_id: str
    text: str
    choices: tuple[DialogChoice, ...] = ()


@dataclass(frozen=True)
class DialogTree:
    root_node_id: str
    nodes: dict[str, DialogNode]


@dataclass(frozen=True)
class Npc:
    npc_id: str
    name: str
    location: GeoPoint
    dialog: DialogTree
    interaction_radius_m: float = 100.0  # 0 means interact from anywhere


@dataclass(frozen=True)
class RebusFragment:
    fragment_index: int
    image_ref: str
    text_label: str


@dataclass(frozen=True)
class QuestSpec:
    """One quest definition; fields beyond the shared trio depend on kind."""

    quest_id: str
    title: str
    kind: QuestKind
    # reach_target
    target: GeoPoint | None = None
    radius_m: float | None = None
    # collect
    item_kind: str | None = None
    required_count: int | None = None
    completion_npc_id: str | None = None
    # rebus
    fragments: tuple[RebusFragment, ...] = ()
    solution_phrase: str | None = None
    min_players: int | None = None


@dataclass
class QuestInstance:
    quest_id: str
    state: QuestState = QuestState.offered
    collected_count: int = 0
    assigned_fragment_index: int | None = None


@dataclass
class Player:
    player_id: str
    display_name: str
    inventory: set[str] = field(default_factory=set)
    active_quests: dict[str, QuestInstance] = field(default_factory=dict)
    completed_quests: set[str] = field(default_factory=set)
    fragments_viewed: set[tuple[str, int]] = field(default_factory=set)
    dialog_position: tuple[str, str] | None = None  # (npc_id, node_id)


@dataclass
class ItemInstance:
    """A virtual object; held either by the world at a point or by a player."""

    item_instance_id: str
    kind: str
    world_point: GeoPoint | None = None
    holder_player_id: str | None = None

    def __post_init__(self) -> None:
        if not self.kind:
            raise ValueError("item kind must be nonempty")
        if (self.world_point is None) == (self.holder_player_id is None):
            raise ValueError("item must have exactly one holder")

    @property
    def in_world(self) -> bool:
        return self.world_point is not None


@dataclass
class GameState:
    """The single authoritative world: all dynamic game data."""

    players: dict[str, Player] = field(default_factory=dict)
    npcs: dict[str, Npc] = field(default_factory=dict)
    items: dict[str, ItemInstance] = field(default_factory=dict)
    quest_specs: dict[str, QuestSpec] = field(default_factory=dict)
    rebus_assignments: dict[str, dict[int, str]] = field(default_factory=dict)
    event_counter: int = 0


@dataclass(frozen=True)
class GameConfig:
    """Per-game tunables, overridable from the game definition."""

    collect_radius_m: float = 25.0
    npc_default_radius_m: float = 100.0
    staleness_ms: int = 60_000
    history_cap: int = 256
    visibility_radius_m: float = 250.0
