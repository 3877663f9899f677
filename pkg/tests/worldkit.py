"""Hand-built game world used by the engine tests.

Kept separate from the XML loader on purpose: these tests exercise the
engine against a world constructed directly from model objects, so a
loader bug cannot mask (or fake) an engine bug.
"""

from __future__ import annotations

from geoquest.engine import (
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
from geoquest.geo import GeoPoint
from geoquest.tracker import EntityKind, FixSource, LocationFix, Tracker

T0 = 1_700_000_000_000  # fixed epoch for deterministic tests, in ms

GREETER_POS = GeoPoint(35.0, 135.77)
WALK_TARGET = GeoPoint(35.0, 135.80)


def fix(lat: float, lon: float, ts: int = T0, consent: bool = True) -> LocationFix:
    return LocationFix(point=GeoPoint(lat, lon), timestamp_ms=ts, consent=consent)


def _greeter_dialog() -> DialogTree:
    hello = DialogNode(
        node_id="hello",
        text="Welcome to the riverside.",
        choices=(
            DialogChoice(
                label="What needs doing?",
                effect=EffectKind.offer_quest,
                quest_id="bloom-run",
                next_node_id="brief",
            ),
            DialogChoice(
                label="How am I doing?",
                effect=EffectKind.report_quest_status,
                quest_id="bloom-run",
            ),
            DialogChoice(
                label="Here is my basket.",
                effect=EffectKind.complete_quest_check,
                quest_id="bloom-run",
            ),
            DialogChoice(
                label="Anywhere to walk?",
                effect=EffectKind.offer_quest,
                quest_id="walk-east",
            ),
            DialogChoice(label="Bye."),
        ),
    )
    brief = DialogNode(
        node_id="brief",
        text="Bring me three blossoms from along the bank.",
        choices=(DialogChoice(label="Will do."),),
    )
    return DialogTree(root_node_id="hello", nodes={"hello": hello, "brief": brief})


def _riddler_dialog() -> DialogTree:
    root = DialogNode(
        node_id="r",
        text="A puzzle, split among friends.",
        choices=(
            DialogChoice(label="The pair riddle, please.", effect=EffectKind.offer_quest, quest_id="pair-riddle"),
            DialogChoice(label="My piece of the pair.", effect=EffectKind.give_fragment, quest_id="pair-riddle"),
            DialogChoice(label="The trio riddle, please.", effect=EffectKind.offer_quest, quest_id="trio-riddle"),
            DialogChoice(label="My piece of the trio.", effect=EffectKind.give_fragment, quest_id="trio-riddle"),
            DialogChoice(label="The strict riddle, please.", effect=EffectKind.offer_quest, quest_id="strict-riddle"),
            DialogChoice(label="My piece of the strict one.", effect=EffectKind.give_fragment, quest_id="strict-riddle"),
        ),
    )
    return DialogTree(root_node_id="r", nodes={"r": root})


def _fragments(quest: str, n: int) -> tuple[RebusFragment, ...]:
    return tuple(
        RebusFragment(fragment_index=i, image_ref=f"img/{quest}-{i}.png", text_label=f"piece {i}")
        for i in range(n)
    )


def make_world(history_cap: int = 256) -> GameWorld:
    state = GameState()
    state.npcs["greeter"] = Npc(
        npc_id="greeter",
        name="The Greeter",
        location=GREETER_POS,
        dialog=_greeter_dialog(),
        interaction_radius_m=100.0,
    )
    state.npcs["riddler"] = Npc(
        npc_id="riddler",
        name="The Riddler",
        location=GeoPoint(35.01, 135.78),
        dialog=_riddler_dialog(),
        interaction_radius_m=0.0,
    )
    state.quest_specs["bloom-run"] = QuestSpec(
        quest_id="bloom-run",
        title="Blossoms for the Greeter",
        kind=QuestKind.collect,
        item_kind="blossom",
        required_count=3,
        completion_npc_id="greeter",
    )
    state.quest_specs["walk-east"] = QuestSpec(
        quest_id="walk-east",
        title="Walk to the east bridge",
        kind=QuestKind.reach_target,
        target=WALK_TARGET,
        radius_m=50.0,
    )
    state.quest_specs["pair-riddle"] = QuestSpec(
        quest_id="pair-riddle",
        title="A riddle for two",
        kind=QuestKind.rebus,
        fragments=_fragments("pair", 2),
        solution_phrase="Kamo River",
        min_players=2,
    )
    state.quest_specs["trio-riddle"] = QuestSpec(
        quest_id="trio-riddle",
        title="A riddle for three",
        kind=QuestKind.rebus,
        fragments=_fragments("trio", 3),
        solution_phrase="three part answer",
        min_players=2,
    )
    state.quest_specs["strict-riddle"] = QuestSpec(
        quest_id="strict-riddle",
        title="A riddle that wants a crowd",
        kind=QuestKind.rebus,
        fragments=_fragments("strict", 2),
        solution_phrase="crowded answer",
        min_players=3,
    )
    # blossoms 11 m apart heading north from the greeter; #0..#2 are within
    # the 25 m collect radius of someone standing at GREETER_POS, #3+ are not
    for i in range(5):
        point = GeoPoint(35.0 + 0.0001 * i, 135.77)
        state.items[f"blossom#{i}"] = ItemInstance(
            item_instance_id=f"blossom#{i}", kind="blossom", world_point=point
        )
    state.items["lantern#0"] = ItemInstance(
        item_instance_id="lantern#0", kind="lantern", world_point=GeoPoint(35.0005, 135.77)
    )

    tracker = Tracker(history_cap=history_cap)
    for npc in state.npcs.values():
        tracker.register_entity(
            npc.npc_id,
            EntityKind.npc,
            LocationFix(point=npc.location, timestamp_ms=1, consent=True, source=FixSource.simulator),
        )
    for item in state.items.values():
        tracker.register_entity(
            item.item_instance_id,
            EntityKind.item,
            LocationFix(point=item.world_point, timestamp_ms=1, consent=True, source=FixSource.simulator),
        )
    return GameWorld(state=state, tracker=tracker, config=GameConfig())


def talk(world: GameWorld, player_id: str, npc_id: str, choice_index: int, player_fix=None, now_ms: int = T0):
    """Open a dialog and take one choice from the root node."""
    node = world.open_dialog(player_id, npc_id, player_fix, now_ms)
    return world.choose(player_id, npc_id, node.node_id, choice_index)


def start_rebus(world: GameWorld, player_id: str, offer_choice: int, quest_id: str) -> None:
    """Offer + accept one of the riddler's quests for a (joined) player."""
    talk(world, player_id, "riddler", offer_choice)
    world.accept_quest(player_id, quest_id)


def view_fragment(world: GameWorld, player_id: str, frag_choice: int) -> dict:
    effect, _node = talk(world, player_id, "riddler", frag_choice)
    return effect["fragment"]
