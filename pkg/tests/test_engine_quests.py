"""Quest lifecycle, reach-target evaluation, and the command dispatcher."""

from __future__ import annotations

import pytest

from geoquest.errors import (
    AlreadyActive,
    AlreadyCompleted,
    ConsentRequired,
    DuplicatePlayer,
    NotOffered,
    QuestInactive,
    StaleTimestamp,
    UnknownQuest,
)

from .worldkit import GREETER_POS, T0, WALK_TARGET, fix, make_world, talk

AT_GREETER = fix(GREETER_POS.lat_deg, GREETER_POS.lon_deg)


def offered_walk(world):
    world.join_player("p1", "Asa")
    talk(world, "p1", "greeter", 3, AT_GREETER)


class TestJoin:
    def test_join_registers_in_tracker(self):
        world = make_world()
        world.join_player("p1", "Asa")
        assert world.tracker.has_entity("p1")
        assert world.tracker.get_state("p1").last_fix is None

    def test_duplicate_join_rejected(self):
        world = make_world()
        world.join_player("p1", "Asa")
        with pytest.raises(DuplicatePlayer):
            world.join_player("p1", "Asa again")


class TestAcceptQuest:
    def test_lifecycle_is_monotonic(self):
        world = make_world()
        offered_walk(world)
        instance = world.accept_quest("p1", "walk-east")
        assert instance.state.value == "active"
        with pytest.raises(AlreadyActive):
            world.accept_quest("p1", "walk-east")
        world.state.players["p1"].active_quests.clear()
        world.state.players["p1"].completed_quests.add("walk-east")
        with pytest.raises(AlreadyCompleted):
            world.accept_quest("p1", "walk-east")

    def test_never_offered(self):
        world = make_world()
        world.join_player("p1", "Asa")
        with pytest.raises(NotOffered):
            world.accept_quest("p1", "walk-east")
        with pytest.raises(UnknownQuest):
            world.accept_quest("p1", "no-such-quest")


class TestReachTarget:
    def test_completes_on_fix_inside_radius(self):
        world = make_world()
        offered_walk(world)
        world.accept_quest("p1", "walk-east")
        events = world.update_location("p1", fix(35.0, 135.79, ts=T0 + 1000))
        assert events == []
        events = world.update_location(
            "p1", fix(WALK_TARGET.lat_deg, WALK_TARGET.lon_deg, ts=T0 + 2000)
        )
        assert events == [{"quest_id": "walk-east", "state": "completed"}]
        assert "walk-east" in world.state.players["p1"].completed_quests
        # completion fires once; staying there does not re-complete
        events = world.update_location(
            "p1", fix(WALK_TARGET.lat_deg, WALK_TARGET.lon_deg, ts=T0 + 3000)
        )
        assert events == []

    def test_offered_but_not_accepted_does_not_complete(self):
        world = make_world()
        offered_walk(world)
        events = world.update_location(
            "p1", fix(WALK_TARGET.lat_deg, WALK_TARGET.lon_deg, ts=T0 + 1000)
        )
        assert events == []
        assert world.state.players["p1"].active_quests["walk-east"].state.value == "offered"

    def test_tracker_rules_still_apply(self):
        world = make_world()
        world.join_player("p1", "Asa")
        world.update_location("p1", fix(35.0, 135.77, ts=T0))
        with pytest.raises(StaleTimestamp):
            world.update_location("p1", fix(35.0, 135.77, ts=T0 - 1))
        with pytest.raises(ConsentRequired):
            world.update_location("p1", fix(35.0, 135.77, ts=T0 + 1000, consent=False))
        assert len(world.tracker.get_state("p1").history) == 1


class TestCompleteCheck:
    def test_not_active_raises(self):
        world = make_world()
        world.join_player("p1", "Asa")
        world.open_dialog("p1", "greeter", AT_GREETER, T0)
        with pytest.raises(QuestInactive):
            world.choose("p1", "greeter", "hello", 2)

    def test_in_progress_then_completed(self):
        world = make_world()
        world.join_player("p1", "Asa")
        talk(world, "p1", "greeter", 0, AT_GREETER)
        world.accept_quest("p1", "bloom-run")
        effect, _ = talk(world, "p1", "greeter", 2, AT_GREETER)
        assert effect == {
            "effect": "complete_quest_check",
            "quest_id": "bloom-run",
            "status": "in_progress",
            "collected": 0,
            "required": 3,
        }
        for i in range(3):
            world.collect_item("p1", f"blossom#{i}", AT_GREETER, T0)
        effect, _ = talk(world, "p1", "greeter", 2, AT_GREETER)
        assert effect["status"] == "completed"
        assert "bloom-run" in world.state.players["p1"].completed_quests
        effect, _ = talk(world, "p1", "greeter", 2, AT_GREETER)
        assert effect["status"] == "already_completed"


class TestQuestLog:
    def test_log_lists_everything_once(self):
        world = make_world()
        world.join_player("p1", "Asa")
        talk(world, "p1", "greeter", 0, AT_GREETER)
        talk(world, "p1", "greeter", 3, AT_GREETER)
        world.accept_quest("p1", "walk-east")
        world.update_location("p1", fix(WALK_TARGET.lat_deg, WALK_TARGET.lon_deg, ts=T0))
        log = world.quest_log("p1")
        assert [(q["quest_id"], q["state"]) for q in log] == [
            ("bloom-run", "offered"),
            ("walk-east", "completed"),
        ]


class TestCommandDispatcher:
    def test_counter_ticks_only_on_mutation(self):
        world = make_world()
        assert world.state.event_counter == 0
        world.apply({"op": "join_player", "player_id": "p1", "display_name": "Asa", "now_ms": T0})
        world.apply({"op": "join_player", "player_id": "p2", "display_name": "Iru", "now_ms": T0})
        assert world.state.event_counter == 2
        mutated, verdict = world.apply(
            {
                "op": "submit_rebus",
                "quest_id": "pair-riddle",
                "submitting_players": ["p1"],
                "phrase": "whatever",
                "now_ms": T0,
            }
        )
        assert mutated is False
        assert verdict["accepted"] is False
        assert world.state.event_counter == 2

    def test_update_location_command(self):
        world = make_world()
        world.apply({"op": "join_player", "player_id": "p1", "display_name": "Asa", "now_ms": T0})
        mutated, result = world.apply(
            {
                "op": "update_location",
                "player_id": "p1",
                "fix": {"lat": 35.0, "lon": 135.77, "timestamp_ms": T0, "consent": True},
                "now_ms": T0,
            }
        )
        assert mutated is True
        assert result["entity"]["last_fix"]["lat"] == 35.0
        assert result["entity"]["history_len"] == 1
        assert result["events"] == []

    def test_unknown_op_rejected(self):
        world = make_world()
        with pytest.raises(ValueError):
            world.apply({"op": "warp_reality", "now_ms": T0})


class TestStateDocs:
    def test_round_trip_preserves_digest(self):
        world = make_world()
        world.apply({"op": "join_player", "player_id": "p1", "display_name": "Asa", "now_ms": T0})
        world.apply(
            {
                "op": "update_location",
                "player_id": "p1",
                "fix": {"lat": 35.0, "lon": 135.77, "timestamp_ms": T0, "consent": True},
                "now_ms": T0,
            }
        )
        talk(world, "p1", "greeter", 0, AT_GREETER)
        world.accept_quest("p1", "bloom-run")
        world.collect_item("p1", "blossom#0", AT_GREETER, T0)
        before = world.digest()

        fresh = make_world()
        assert fresh.digest() != before
        fresh.restore_doc(world.to_doc())
        assert fresh.digest() == before
        assert fresh.state.players["p1"].active_quests["bloom-run"].collected_count == 1
        assert fresh.state.items["blossom#0"].holder_player_id == "p1"

    def test_digest_changes_with_state(self):
        world = make_world()
        d0 = world.digest()
        world.join_player("p1", "Asa")
        d1 = world.digest()
        assert d0 != d1
        assert d1 == world.digest()
