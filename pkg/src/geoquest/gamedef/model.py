"""Raw (pre-validation) form of a game definition.

The parser produces these as-written: numbers are converted but nothing is
range-checked and references are not resolved, so a defective definition
can still be represented and then described precisely by the validator.
Every element remembers where it came from for error reporting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Integrity error codes, the full closed set.
E_DANGLING_REF = "E_DANGLING_REF"
E_DUP_ID = "E_DUP_ID"
E_BAD_COORD = "E_BAD_COORD"
E_EMPTY_SOLUTION = "E_EMPTY_SOLUTION"
E_ZERO_COUNT = "E_ZERO_COUNT"
E_FRAGMENT_GAP = "E_FRAGMENT_GAP"
E_UNREACHABLE_NODE = "E_UNREACHABLE_NODE"
E_BAD_RADIUS = "E_BAD_RADIUS"

ALL_CODES = frozenset(
    {
        E_DANGLING_REF,
        E_DUP_ID,
        E_BAD_COORD,
        E_EMPTY_SOLUTION,
        E_ZERO_COUNT,
        E_FRAGMENT_GAP,
        E_UNREACHABLE_NODE,
        E_BAD_RADIUS,
    }
)


@dataclass(frozen=True)
class IntegrityError:
    """One defect found by the validator. Not an exception: they are collected."""

    code: str
    message: str
    where: str  # "file.xml:line"

    def __str__(self) -> str:
        return f"{self.where}: {self.code}: {self.message}"


@dataclass(frozen=True)
class Pos:
    file: str
    line: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}"


@dataclass
class RawChoice:
    label: str
    effect: str  # "none" | "offer_quest" | "give_fragment" | ...
    quest: str | None
    next: str | None
    pos: Pos


@dataclass
class RawNode:
    node_id: str
    text: str
    choices: list[RawChoice]
    pos: Pos


@dataclass
class RawNpc:
    npc_id: str
    name: str
    lat: float
    lon: float
    radius_m: float | None  # None -> game default
    dialog_root: str
    nodes: list[RawNode]
    pos: Pos


@dataclass
class RawPlacement:
    kind: str
    lat: float
    lon: float
    count: int
    pos: Pos


@dataclass
class RawFragment:
    index: int
    image: str
    label: str
    pos: Pos


@dataclass
class RawQuest:
    quest_id: str
    title: str
    kind: str  # "reach" | "collect" | "rebus"
    pos: Pos
    # reach
    target_lat: float | None = None
    target_lon: float | None = None
    target_radius_m: float | None = None
    target_pos: Pos | None = None
    # collect
    item_kind: str | None = None
    required_count: int | None = None
    completion_npc: str | None = None
    # rebus
    solution: str | None = None
    min_players: int | None = None
    fragments: list[RawFragment] = field(default_factory=list)


@dataclass
class RawParams:
    collect_radius_m: float | None = None
    npc_radius_m: float | None = None
    staleness_s: float | None = None
    history_cap: int | None = None
    visibility_radius_m: float | None = None
    pos: Pos | None = None


@dataclass
class GameDefinition:
    """One parsed four-file suite, still unchecked."""

    game_id: str
    title: str
    params: RawParams
    npcs: list[RawNpc]
    placements: list[RawPlacement]
    quests: list[RawQuest]
