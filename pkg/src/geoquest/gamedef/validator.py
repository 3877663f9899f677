"""Integrity checking for parsed game definitions.

validate() never stops at the first problem: it walks the whole suite and
returns every defect it can see, so an author fixes a file in one round
trip instead of replaying the parser's complaints one by one. A suite
that comes back clean is guaranteed to instantiate.
"""

from __future__ import annotations

from collections import deque

from ..engine.text import normalize_phrase
from .model import (
    E_BAD_COORD,
    E_BAD_RADIUS,
    E_DANGLING_REF,
    E_DUP_ID,
    E_EMPTY_SOLUTION,
    E_FRAGMENT_GAP,
    E_UNREACHABLE_NODE,
    E_ZERO_COUNT,
    GameDefinition,
    IntegrityError,
    Pos,
    RawNpc,
    RawQuest,
)

MIN_GROUP = 2


def _err(code: str, message: str, pos: Pos | None) -> IntegrityError:
    return IntegrityError(code=code, message=message, where=str(pos) if pos else "?")


def _coord_ok(lat: float, lon: float) -> bool:
    return -90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0


def _check_params(defn: GameDefinition, out: list[IntegrityError]) -> None:
    p = defn.params
    if p.collect_radius_m is not None and p.collect_radius_m <= 0:
        out.append(_err(E_BAD_RADIUS, f"collect-radius-m must be > 0, got {p.collect_radius_m}", p.pos))
    if p.npc_radius_m is not None and p.npc_radius_m < 0:
        out.append(_err(E_BAD_RADIUS, f"npc-radius-m must be >= 0, got {p.npc_radius_m}", p.pos))
    if p.visibility_radius_m is not None and p.visibility_radius_m <= 0:
        out.append(_err(E_BAD_RADIUS, f"visibility-radius-m must be > 0, got {p.visibility_radius_m}", p.pos))
    if p.staleness_s is not None and p.staleness_s <= 0:
        out.append(_err(E_ZERO_COUNT, f"staleness-s must be > 0, got {p.staleness_s}", p.pos))
    if p.history_cap is not None and p.history_cap < 1:
        out.append(_err(E_ZERO_COUNT, f"history-cap must be >= 1, got {p.history_cap}", p.pos))


def _check_npc(npc: RawNpc, quest_ids: set[str], out: list[IntegrityError]) -> None:
    if not _coord_ok(npc.lat, npc.lon):
        out.append(_err(E_BAD_COORD, f"npc {npc.npc_id!r} at ({npc.lat}, {npc.lon})", npc.pos))
    if npc.radius_m is not None and npc.radius_m < 0:
        out.append(_err(E_BAD_RADIUS, f"npc {npc.npc_id!r} radius-m {npc.radius_m}", npc.pos))

    node_ids: set[str] = set()
    for node in npc.nodes:
        if node.node_id in node_ids:
            out.append(
                _err(E_DUP_ID, f"node {node.node_id!r} defined twice in npc {npc.npc_id!r}", node.pos)
            )
        node_ids.add(node.node_id)

    if npc.dialog_root not in node_ids:
        out.append(
            _err(E_DANGLING_REF, f"dialog root {npc.dialog_root!r} is not a node of npc {npc.npc_id!r}", npc.pos)
        )

    edges: dict[str, list[str]] = {node.node_id: [] for node in npc.nodes}
    for node in npc.nodes:
        for choice in node.choices:
            if choice.quest is not None and choice.quest not in quest_ids:
                out.append(
                    _err(E_DANGLING_REF, f"choice references unknown quest {choice.quest!r}", choice.pos)
                )
            if choice.next is not None:
                if choice.next in node_ids:
                    edges[node.node_id].append(choice.next)
                else:
                    out.append(
                        _err(E_DANGLING_REF, f"choice next={choice.next!r} is not a node of npc {npc.npc_id!r}", choice.pos)
                    )

    # reachability from the declared root, over the edges that do resolve
    reached: set[str] = set()
    if npc.dialog_root in node_ids:
        queue = deque([npc.dialog_root])
        reached.add(npc.dialog_root)
        while queue:
            for nxt in edges[queue.popleft()]:
                if nxt not in reached:
                    reached.add(nxt)
                    queue.append(nxt)
    reported: set[str] = set()  # one report per node id, even if defined twice
    for node in npc.nodes:
        if node.node_id in reached or node.node_id in reported:
            continue
        reported.add(node.node_id)
        out.append(
            _err(E_UNREACHABLE_NODE, f"node {node.node_id!r} cannot be reached from root in npc {npc.npc_id!r}", node.pos)
        )


def _check_effect_kinds(defn: GameDefinition, quests: dict[str, RawQuest], out: list[IntegrityError]) -> None:
    wanted = {"give_fragment": "rebus", "complete_quest_check": "collect", "offer_quest": None, "report_quest_status": None}
    for npc in defn.npcs:
        for node in npc.nodes:
            for choice in node.choices:
                if choice.quest is None or choice.quest not in quests:
                    continue
                need = wanted.get(choice.effect)
                if need is not None and quests[choice.quest].kind != need:
                    out.append(
                        _err(
                            E_DANGLING_REF,
                            f"effect {choice.effect!r} needs a {need} quest, "
                            f"but {choice.quest!r} is a {quests[choice.quest].kind} quest",
                            choice.pos,
                        )
                    )


def _check_quest(quest: RawQuest, npc_ids: set[str], out: list[IntegrityError]) -> None:
    if quest.kind == "reach":
        if not _coord_ok(quest.target_lat, quest.target_lon):
            out.append(
                _err(E_BAD_COORD, f"target of {quest.quest_id!r} at ({quest.target_lat}, {quest.target_lon})", quest.target_pos)
            )
        if quest.target_radius_m <= 0:
            out.append(
                _err(E_BAD_RADIUS, f"target radius of {quest.quest_id!r} must be > 0, got {quest.target_radius_m}", quest.target_pos)
            )
    elif quest.kind == "collect":
        if quest.required_count < 1:
            out.append(
                _err(E_ZERO_COUNT, f"required-count of {quest.quest_id!r} must be >= 1, got {quest.required_count}", quest.pos)
            )
        if quest.completion_npc not in npc_ids:
            out.append(
                _err(E_DANGLING_REF, f"completion-npc {quest.completion_npc!r} of {quest.quest_id!r} is not an npc", quest.pos)
            )
    else:  # rebus
        if normalize_phrase(quest.solution) == "":
            out.append(
                _err(E_EMPTY_SOLUTION, f"solution of {quest.quest_id!r} normalizes to nothing", quest.pos)
            )
        if quest.min_players < MIN_GROUP:
            out.append(
                _err(E_ZERO_COUNT, f"min-players of {quest.quest_id!r} must be >= {MIN_GROUP}, got {quest.min_players}", quest.pos)
            )
        if not quest.fragments:
            out.append(_err(E_ZERO_COUNT, f"rebus {quest.quest_id!r} has no fragments", quest.pos))
        else:
            indices = sorted(f.index for f in quest.fragments)
            if indices != list(range(len(indices))):
                out.append(
                    _err(
                        E_FRAGMENT_GAP,
                        f"fragment indices of {quest.quest_id!r} must be 0..{len(indices) - 1}, got {indices}",
                        quest.pos,
                    )
                )


def validate(defn: GameDefinition) -> list[IntegrityError]:
    """Every integrity defect in the suite, in document order per check."""
    out: list[IntegrityError] = []
    _check_params(defn, out)

    npc_ids: set[str] = set()
    for npc in defn.npcs:
        if npc.npc_id in npc_ids:
            out.append(_err(E_DUP_ID, f"npc {npc.npc_id!r} defined twice", npc.pos))
        npc_ids.add(npc.npc_id)

    quests: dict[str, RawQuest] = {}
    for quest in defn.quests:
        if quest.quest_id in quests:
            out.append(_err(E_DUP_ID, f"quest {quest.quest_id!r} defined twice", quest.pos))
        quests.setdefault(quest.quest_id, quest)

    item_ordinals: dict[str, int] = {}
    for placement in defn.placements:
        if not _coord_ok(placement.lat, placement.lon):
            out.append(
                _err(E_BAD_COORD, f"placement of {placement.kind!r} at ({placement.lat}, {placement.lon})", placement.pos)
            )
        if placement.count < 1:
            out.append(
                _err(E_ZERO_COUNT, f"placement of {placement.kind!r} has count {placement.count}", placement.pos)
            )
        else:
            # instance ids the builder will mint for this placement; an npc
            # with such an id would collide in the entity registry
            for _ in range(placement.count):
                ordinal = item_ordinals.get(placement.kind, 0)
                item_ordinals[placement.kind] = ordinal + 1
                minted = f"{placement.kind}#{ordinal}"
                if minted in npc_ids:
                    out.append(
                        _err(E_DUP_ID, f"item instance id {minted!r} collides with an npc id", placement.pos)
                    )

    for npc in defn.npcs:
        _check_npc(npc, set(quests), out)
    _check_effect_kinds(defn, quests, out)
    for quest in defn.quests:
        _check_quest(quest, npc_ids, out)
    return out
