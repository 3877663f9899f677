"""The deterministic bot loop that drives a scenario to its verdict.

One global manual clock, one event per bot tick, ties broken by bot
order: given the same scenario and seed the command sequence is
bit-reproducible. Each tick a bot advances its walk (if any), reports
its position with its consent flag, then works on the current script
action. Refusals are final (consent will not change mid-run); transient
rejections are retried until the stuck limit trips.
"""

from __future__ import annotations

import heapq
import random
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..clock import ManualClock
from ..gamedef import load_dir, load_world
from ..geo import GeoPoint, haversine_distance, point_at_distance, track_length
from ..journal import SNAPSHOT_EVERY_DEFAULT, Journal
from ..service import GameService
from .client import HttpClient, InProcessClient, Reply
from .scenario import Bot, Scenario

SIM_START_MS = 1_700_000_000_000
STUCK_LIMIT_DEFAULT = 240  # ticks on one action before the run is declared dead

# rejections that another bot's progress can clear; everything else is final
TRANSIENT_REBUS = ("INCOMPLETE_COVERAGE", "QUEST_INACTIVE", "TOO_FEW_PLAYERS")


class ScriptStuck(Exception):
    """A bot retried one action for so long the scenario cannot finish."""

    def __init__(self, player_id: str, action_index: int, action: dict, ticks: int) -> None:
        self.player_id = player_id
        self.action_index = action_index
        self.ticks = ticks
        super().__init__(
            f"bot {player_id!r} stuck on script[{action_index}] "
            f"({action.get('do')}) after {ticks} ticks"
        )


class AssertionFailed(Exception):
    """Raised in strict mode when a scenario assertion does not hold."""

    def __init__(self, player_id: str, action_index: int, detail: str) -> None:
        self.player_id = player_id
        self.action_index = action_index
        super().__init__(f"bot {player_id!r} script[{action_index}]: {detail}")


@dataclass
class SimReport:
    scenario: str
    seed: int
    mode: str
    sim_time_s: float = 0.0
    bots: dict[str, dict] = field(default_factory=dict)
    assertions: list[dict] = field(default_factory=list)
    events: int | None = None
    final_digest: str | None = None
    replay_ok: bool | None = None
    replayed_commands: int | None = None

    @property
    def ok(self) -> bool:
        scripts_done = all(b["script_done"] for b in self.bots.values())
        checks_hold = all(a["ok"] for a in self.assertions)
        return scripts_done and checks_hold and self.replay_ok is not False

    def to_doc(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "mode": self.mode,
            "ok": self.ok,
            "sim_time_s": self.sim_time_s,
            "bots": self.bots,
            "assertions": self.assertions,
            "events": self.events,
            "final_digest": self.final_digest,
            "replay_ok": self.replay_ok,
            "replayed_commands": self.replayed_commands,
        }


@dataclass
class _BotRun:
    bot: Bot
    client: object
    pos: GeoPoint
    walked_m: float = 0.0  # distance along the track
    distance_m: float = 0.0  # sum of per-tick movement steps
    commands: int = 0
    denied: int = 0
    action_index: int = 0
    ticks_on_action: int = 0
    wait_left: int | None = None
    completions: list[dict] = field(default_factory=list)
    failures: list[tuple[int, str]] = field(default_factory=list)

    @property
    def done(self) -> bool:
        return self.action_index >= len(self.bot.script)

    @property
    def action(self) -> dict:
        return self.bot.script[self.action_index]


class _Runner:
    def __init__(self, scenario: Scenario, clock: ManualClock, rng: random.Random,
                 stuck_limit: int, strict: bool) -> None:
        self.scenario = scenario
        self.clock = clock
        self.rng = rng  # reserved for randomized behaviors; current actions use none
        self.stuck_limit = stuck_limit
        self.strict = strict
        self.runs: list[_BotRun] = []

    # -------------------------------------------------------------- helpers

    def _call(self, run: _BotRun, reply: Reply) -> Reply:
        run.commands += 1
        if reply.code == "CONSENT_REQUIRED":
            run.denied += 1
        return reply

    def _fail(self, run: _BotRun, detail: str) -> None:
        run.failures.append((run.action_index, detail))
        if self.strict:
            raise AssertionFailed(run.bot.player_id, run.action_index, detail)

    def _advance(self, run: _BotRun) -> None:
        run.action_index += 1
        run.ticks_on_action = 0
        run.wait_left = None

    def _retry(self, run: _BotRun) -> None:
        run.ticks_on_action += 1
        if run.ticks_on_action >= self.stuck_limit:
            raise ScriptStuck(
                run.bot.player_id, run.action_index, run.action, run.ticks_on_action
            )

    def _record_completions(self, run: _BotRun, quest_ids: list[str], now_ms: int) -> None:
        seen = {c["quest_id"] for c in run.completions}
        for quest_id in quest_ids:
            if quest_id not in seen:
                run.completions.append({"quest_id": quest_id, "at_ms": now_ms})

    def _loc(self, run: _BotRun, now_ms: int) -> dict:
        return {
            "lat": run.pos.lat_deg,
            "lon": run.pos.lon_deg,
            "timestamp_ms": now_ms,
            "consent": run.bot.consent,
        }

    # -------------------------------------------------------------- actions

    def _refused(self, run: _BotRun, reply: Reply) -> bool:
        """Shared handling for a failed refusable action; True ends the action."""
        expected = run.action.get("expect_reason")
        if expected is not None and reply.code == expected:
            self._advance(run)
            return True
        if reply.code == "CONSENT_REQUIRED":
            # refusal is an answer; retrying cannot change it
            self._advance(run)
            return True
        return False

    def _act_walk(self, run: _BotRun, now_ms: int) -> None:
        target = min(float(run.action["m"]), track_length(run.bot.track))
        if run.walked_m >= target - 1e-9:
            self._advance(run)

    def _act_talk(self, run: _BotRun, now_ms: int) -> None:
        action = run.action
        loc = self._loc(run, now_ms)
        reply = self._call(run, run.client.open_dialog(action["npc"], loc))
        if not reply.ok:
            if not self._refused(run, reply):
                self._retry(run)
            return
        node = reply.body["node"]
        choices = action["choices"]
        for position, choice_index in enumerate(choices):
            reply = self._call(
                run, run.client.choose(action["npc"], node["node_id"], choice_index, loc)
            )
            if not reply.ok:
                if not self._refused(run, reply):
                    self._retry(run)
                return
            effect = reply.body.get("effect_result") or {}
            if effect.get("effect") == "complete_quest_check" and effect.get("status") == "completed":
                self._record_completions(run, [effect["quest_id"]], now_ms)
            node = reply.body.get("node")
            if node is None and position < len(choices) - 1:
                self._fail(run, f"dialog with {action['npc']!r} ended before all choices were taken")
                self._advance(run)
                return
        if action.get("expect_reason"):
            self._fail(run, f"expected {action['expect_reason']}, but the talk succeeded")
        self._advance(run)

    def _act_accept(self, run: _BotRun, now_ms: int) -> None:
        action = run.action
        reply = self._call(run, run.client.accept_quest(action["quest"]))
        if not reply.ok:
            if not self._refused(run, reply):
                self._retry(run)
            return
        if action.get("expect_reason"):
            self._fail(run, f"expected {action['expect_reason']}, but the accept succeeded")
        self._advance(run)

    def _act_collect(self, run: _BotRun, now_ms: int) -> None:
        action = run.action
        reply = self._call(
            run,
            run.client.game_map(
                run.pos.lat_deg, run.pos.lon_deg, now_ms, run.bot.consent
            ),
        )
        if not reply.ok:
            if not self._refused(run, reply):
                self._retry(run)
            return
        wanted = [
            e for e in reply.body["entities"]
            if e["kind"] == "item" and e.get("item_kind") == action["kind"]
        ]
        if not wanted:
            self._retry(run)
            return
        nearest = wanted[0]  # entities arrive distance-sorted
        reply = self._call(run, run.client.collect(nearest["entity_id"], self._loc(run, now_ms)))
        if not reply.ok:
            if not self._refused(run, reply):
                self._retry(run)
            return
        if action.get("expect_reason"):
            self._fail(run, f"expected {action['expect_reason']}, but the collect succeeded")
        self._advance(run)

    def _act_submit(self, run: _BotRun, now_ms: int) -> None:
        action = run.action
        reply = self._call(
            run,
            run.client.submit_rebus(action["quest"], action["phrase"], list(action["participants"])),
        )
        if reply.ok:
            if action.get("expect_reason"):
                self._fail(run, f"expected {action['expect_reason']}, but the answer was accepted")
            completed = reply.body.get("completed_players", [])
            for other in self.runs:
                if other.bot.player_id in completed:
                    self._record_completions(other, [action["quest"]], now_ms)
            self._advance(run)
            return
        if self._refused(run, reply):
            return
        if reply.code in TRANSIENT_REBUS:
            self._retry(run)
            return
        self._fail(run, f"rebus answer rejected: {reply.code}")
        self._advance(run)

    def _act_wait(self, run: _BotRun, now_ms: int) -> None:
        if run.wait_left is None:
            run.wait_left = int(run.action["ticks"])
        run.wait_left -= 1
        if run.wait_left <= 0:
            self._advance(run)

    def _act_expect(self, run: _BotRun, now_ms: int) -> None:
        action = run.action
        check = action["check"]
        ok = False
        detail = ""
        if check == "quest_state":
            reply = self._call(run, run.client.quests())
            state = "not_started"
            if reply.ok:
                for entry in reply.body["quests"]:
                    if entry["quest_id"] == action["quest"]:
                        state = entry["state"]
            ok = state == action["state"]
            detail = f"quest {action['quest']!r} is {state!r}, wanted {action['state']!r}"
        elif check == "inventory_count":
            reply = self._call(run, run.client.inventory())
            count = sum(1 for i in reply.body["inventory"] if i["kind"] == action["kind"]) if reply.ok else -1
            ok = count == action["count"]
            detail = f"{count} of kind {action['kind']!r} held, wanted {action['count']}"
        elif check == "denied_at_least":
            ok = run.denied >= action["count"]
            detail = f"{run.denied} refusals observed, wanted at least {action['count']}"
        else:  # server_events
            reply = self._call(run, run.client.health())
            events = reply.body.get("events") if reply.ok else None
            ok = events == action["count"]
            detail = f"server event counter is {events}, wanted {action['count']}"
        self.scenario_assertions.append(
            {
                "bot": run.bot.player_id,
                "index": run.action_index,
                "check": {k: v for k, v in action.items() if k != "do"},
                "ok": ok,
                "detail": detail,
            }
        )
        if not ok:
            self._fail(run, detail)
        self._advance(run)

    # -------------------------------------------------------------- the loop

    def _tick(self, run: _BotRun, now_ms: int) -> None:
        # 1. movement: a walking bot advances one stride along its track
        if not run.done and run.action["do"] == "walk_to_distance":
            target = min(float(run.action["m"]), track_length(run.bot.track))
            stride = run.bot.speed_mps * run.bot.tick_s
            new_walked = min(run.walked_m + stride, target)
            if new_walked > run.walked_m:
                new_pos = point_at_distance(run.bot.track, new_walked)
                run.distance_m += haversine_distance(run.pos, new_pos)
                run.pos = new_pos
                run.walked_m = new_walked

        # 2. the bot reports where it is, carrying its consent flag
        reply = self._call(
            run,
            run.client.push_fix(
                run.pos.lat_deg, run.pos.lon_deg, now_ms, run.bot.consent
            ),
        )
        if reply.ok:
            completed = [e["quest_id"] for e in reply.body.get("events", ())
                         if e.get("state") == "completed"]
            self._record_completions(run, completed, now_ms)

        # 3. one step of the current script action
        if run.done:
            return
        handler = {
            "walk_to_distance": self._act_walk,
            "talk": self._act_talk,
            "accept_quest": self._act_accept,
            "collect_nearest": self._act_collect,
            "submit_rebus": self._act_submit,
            "wait": self._act_wait,
            "expect": self._act_expect,
        }[run.action["do"]]
        handler(run, now_ms)

    def run(self, clients: list[object]) -> SimReport:
        report = SimReport(scenario=self.scenario.name, seed=self.scenario.seed, mode="")
        self.scenario_assertions = report.assertions

        start_ms = self.clock.now_ms()
        for bot, client in zip(self.scenario.bots, clients):
            run = _BotRun(bot=bot, client=client, pos=bot.start)
            reply = self._call(run, client.join())
            if not reply.ok:
                raise ScriptStuck(bot.player_id, -1, {"do": "join"}, 0)
            self.runs.append(run)

        heap: list[tuple[int, int]] = []
        for index, run in enumerate(self.runs):
            if not run.done:
                heapq.heappush(heap, (start_ms + int(round(run.bot.tick_s * 1000)), index))
        last_ms = start_ms
        while heap:
            now_ms, index = heapq.heappop(heap)
            run = self.runs[index]
            self.clock.set_ms(max(now_ms, self.clock.now_ms()))
            last_ms = now_ms
            self._tick(run, now_ms)
            if not run.done:
                heapq.heappush(heap, (now_ms + int(round(run.bot.tick_s * 1000)), index))

        report.sim_time_s = (last_ms - start_ms) / 1000.0
        for run in self.runs:
            report.bots[run.bot.player_id] = {
                "distance_m": round(run.distance_m, 3),
                "commands": run.commands,
                "denied": run.denied,
                "completions": run.completions,
                "script_done": run.done,
                "failures": [{"index": i, "detail": d} for i, d in run.failures],
            }
        for run in self.runs:
            for index, detail in run.failures:
                if not any(a["bot"] == run.bot.player_id and a["index"] == index
                           for a in report.assertions):
                    report.assertions.append(
                        {
                            "bot": run.bot.player_id,
                            "index": index,
                            "check": {"action": run.bot.script[index]["do"]} if index >= 0 else {},
                            "ok": False,
                            "detail": detail,
                        }
                    )
        return report


def run_scenario(
    scenario: Scenario,
    game_dir: str | Path,
    *,
    server: httpx.Client | None = None,
    journal_path: str | Path | None = None,
    snapshot_every: int = SNAPSHOT_EVERY_DEFAULT,
    seed: int | None = None,
    stuck_limit: int = STUCK_LIMIT_DEFAULT,
    strict: bool = False,
) -> SimReport:
    """Run a scenario to completion and report what the bots saw.

    Without `server`, the game runs in-process on a manual clock with a
    journal (a temporary one unless `journal_path` says otherwise), and
    the report includes a replay self-check. With `server` — any
    httpx-compatible client pointed at a live instance — the bots speak
    the wire protocol and the clock is anchored to wall time.
    """
    effective_seed = scenario.seed if seed is None else seed
    rng = random.Random(effective_seed)

    if server is not None:
        clock = ManualClock(start_ms=int(time.time() * 1000))
        runner = _Runner(scenario, clock, rng, stuck_limit, strict)
        clients = [HttpClient(server, b.player_id, b.display_name) for b in scenario.bots]
        report = runner.run(clients)
        report.mode = "http"
        report.seed = effective_seed
        health = clients[0].health()
        if health.ok:
            report.events = health.body.get("events")
            report.final_digest = health.body.get("digest")
        return report

    clock = ManualClock(start_ms=SIM_START_MS)
    with tempfile.TemporaryDirectory(prefix="geoquest-sim-") as tmp:
        path = Path(journal_path) if journal_path is not None else Path(tmp) / "journal.log"
        service = GameService(
            world_factory=lambda: load_world(load_dir(game_dir)),
            journal=Journal(path, snapshot_every=snapshot_every),
            clock=clock,
        )
        try:
            runner = _Runner(scenario, clock, rng, stuck_limit, strict)
            clients = [
                InProcessClient(service, b.player_id, b.display_name) for b in scenario.bots
            ]
            report = runner.run(clients)
            report.mode = "in_process"
            report.seed = effective_seed
            report.events, report.final_digest = service.read(
                lambda w: (w.state.event_counter, w.digest())
            )
            try:
                report.replayed_commands = service.replay_check()
                report.replay_ok = True
            except Exception:
                report.replay_ok = False
            return report
        finally:
            service.close()


def replay_check(scenario: Scenario, game_dir: str | Path, *, seed: int | None = None) -> bool:
    """Two same-seed runs and a journal replay must all agree on the digest."""
    first = run_scenario(scenario, game_dir, seed=seed)
    second = run_scenario(scenario, game_dir, seed=seed)
    return (
        first.replay_ok is True
        and second.replay_ok is True
        and first.final_digest is not None
        and first.final_digest == second.final_digest
    )
