"""Scenario files: scripted bots and what they should observe.

A scenario names a game definition directory, a seed, and a list of bots.
Each bot has a movement range (a track it can walk along, or a fixed
position), a tick cadence, a per-request consent flag, and a script of
actions executed one per tick. JSON is the primary format; an equivalent
XML form is accepted for parity with the game-definition suite.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from importlib.resources import files
from pathlib import Path

from ..geo import GeoPoint, Track, track_length

SPEED_PRESETS = {"walk": 1.4, "cycle": 4.5}

ACTION_KINDS = (
    "walk_to_distance",
    "talk",
    "accept_quest",
    "collect_nearest",
    "submit_rebus",
    "wait",
    "expect",
)
EXPECT_CHECKS = ("quest_state", "inventory_count", "denied_at_least", "server_events")
QUEST_STATES = ("not_started", "offered", "active", "completed")

# actions that issue a refusable request and may declare the refusal expected
REFUSABLE = ("talk", "accept_quest", "collect_nearest", "submit_rebus")


class ScenarioError(ValueError):
    """The scenario file is malformed or internally inconsistent."""


def data_dir() -> Path:
    """The installed package's bundled data directory."""
    return Path(str(files("geoquest").joinpath("data")))


def bundled_game_dir(name: str) -> Path:
    return data_dir() / "games" / name


def bundled_scenario_path(name: str) -> Path:
    return data_dir() / "scenarios" / f"{name}.json"


@dataclass(frozen=True)
class Bot:
    player_id: str
    display_name: str
    speed_mps: float
    tick_s: float
    consent: bool
    track: Track | None
    pos: GeoPoint | None
    script: tuple[dict, ...]

    @property
    def start(self) -> GeoPoint:
        return self.track.points[0] if self.track is not None else self.pos


@dataclass(frozen=True)
class Scenario:
    name: str
    game: str
    seed: int
    bots: tuple[Bot, ...] = field(default=())


def _fail(where: str, message: str) -> ScenarioError:
    return ScenarioError(f"{where}: {message}")


def _validate_action(where: str, action: dict, bot_doc: dict, walk_floor: float) -> float:
    """Check one script action; returns the updated walk distance floor."""
    kind = action.get("do")
    if kind not in ACTION_KINDS:
        raise _fail(where, f"unknown action {kind!r}; one of {', '.join(ACTION_KINDS)}")
    known = {"do", "note", "expect_reason"}
    if "expect_reason" in action:
        if kind not in REFUSABLE:
            raise _fail(where, f"expect_reason is not meaningful on {kind!r}")
        if not isinstance(action["expect_reason"], str) or not action["expect_reason"]:
            raise _fail(where, "expect_reason must be a nonempty string")

    def need(name: str, typ, check=None) -> None:
        known.add(name)
        value = action.get(name)
        if not isinstance(value, typ) or isinstance(value, bool) and typ is not bool:
            raise _fail(where, f"{kind} needs {name!r} of type {typ.__name__}")
        if check is not None and not check(value):
            raise _fail(where, f"{kind} has out-of-range {name!r}: {value!r}")

    if kind == "walk_to_distance":
        need("m", (int, float), lambda v: v >= 0)
        if bot_doc.get("track") is None:
            raise _fail(where, "walk_to_distance needs a bot with a track")
        if action["m"] < walk_floor:
            raise _fail(where, f"walk targets must not decrease ({action['m']} after {walk_floor})")
        walk_floor = float(action["m"])
    elif kind == "talk":
        need("npc", str, lambda v: v != "")
        need("choices", list, lambda v: all(isinstance(c, int) and c >= 0 for c in v))
    elif kind == "accept_quest":
        need("quest", str, lambda v: v != "")
    elif kind == "collect_nearest":
        need("kind", str, lambda v: v != "")
    elif kind == "submit_rebus":
        need("quest", str, lambda v: v != "")
        need("phrase", str)
        need("participants", list, lambda v: v and all(isinstance(p, str) for p in v))
    elif kind == "wait":
        need("ticks", int, lambda v: v > 0)
    else:  # expect
        check = action.get("check")
        known.add("check")
        if check not in EXPECT_CHECKS:
            raise _fail(where, f"unknown check {check!r}; one of {', '.join(EXPECT_CHECKS)}")
        if check == "quest_state":
            need("quest", str, lambda v: v != "")
            need("state", str, lambda v: v in QUEST_STATES)
        elif check == "inventory_count":
            need("kind", str, lambda v: v != "")
            need("count", int, lambda v: v >= 0)
        else:  # denied_at_least / server_events
            need("count", int, lambda v: v >= 0)

    extra = set(action) - known
    if extra:
        raise _fail(where, f"unknown keys on {kind}: {', '.join(sorted(extra))}")
    return walk_floor


def _parse_bot(index: int, doc: dict) -> Bot:
    where = f"bots[{index}]"
    if not isinstance(doc, dict):
        raise _fail(where, "each bot must be an object")
    player_id = doc.get("player_id")
    if not isinstance(player_id, str) or not player_id:
        raise _fail(where, "player_id must be a nonempty string")
    where = f"bots[{index}] ({player_id})"

    speed = doc.get("speed", "walk")
    if isinstance(speed, str):
        if speed not in SPEED_PRESETS:
            raise _fail(where, f"unknown speed preset {speed!r}; one of {', '.join(SPEED_PRESETS)}")
        speed_mps = SPEED_PRESETS[speed]
    elif isinstance(speed, (int, float)) and speed > 0:
        speed_mps = float(speed)
    else:
        raise _fail(where, f"speed must be a positive number or a preset name, got {speed!r}")

    tick_s = doc.get("tick_s", 5.0)
    if not isinstance(tick_s, (int, float)) or tick_s <= 0:
        raise _fail(where, f"tick_s must be positive, got {tick_s!r}")

    consent = doc.get("consent", True)
    if not isinstance(consent, bool):
        raise _fail(where, "consent must be a boolean")

    has_track = "track" in doc
    has_pos = "pos" in doc
    if has_track == has_pos:
        raise _fail(where, "a bot needs exactly one of track or pos")

    def as_point(value, what: str) -> GeoPoint:
        if (not isinstance(value, (list, tuple)) or len(value) != 2
                or not all(isinstance(c, (int, float)) for c in value)):
            raise _fail(where, f"{what} must be a [lat, lon] pair, got {value!r}")
        try:
            return GeoPoint(float(value[0]), float(value[1]))
        except ValueError as exc:
            raise _fail(where, f"{what}: {exc}") from exc

    track = None
    pos = None
    if has_track:
        raw = doc["track"]
        if not isinstance(raw, list) or len(raw) < 2:
            raise _fail(where, "track must be a list of at least two [lat, lon] pairs")
        track = Track.from_points([as_point(p, f"track[{i}]") for i, p in enumerate(raw)])
    else:
        pos = as_point(doc["pos"], "pos")

    script = doc.get("script", [])
    if not isinstance(script, list):
        raise _fail(where, "script must be a list of actions")
    walk_floor = 0.0
    for i, action in enumerate(script):
        if not isinstance(action, dict):
            raise _fail(f"{where} script[{i}]", "each action must be an object")
        walk_floor = _validate_action(f"{where} script[{i}]", action, doc, walk_floor)
    if track is not None and walk_floor > track_length(track) + 1.0:
        raise _fail(where, f"walk target {walk_floor} m exceeds the {track_length(track):.1f} m track")

    return Bot(
        player_id=player_id,
        display_name=str(doc.get("display_name", player_id)),
        speed_mps=speed_mps,
        tick_s=float(tick_s),
        consent=consent,
        track=track,
        pos=pos,
        script=tuple(script),
    )


def from_doc(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario: top level must be an object")
    name = doc.get("name")
    game = doc.get("game")
    if not isinstance(name, str) or not name:
        raise ScenarioError("scenario: name must be a nonempty string")
    if not isinstance(game, str) or not game:
        raise ScenarioError("scenario: game must be a nonempty string")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ScenarioError(f"scenario: seed must be a nonnegative integer, got {seed!r}")
    raw_bots = doc.get("bots")
    if not isinstance(raw_bots, list) or not raw_bots:
        raise ScenarioError("scenario: bots must be a nonempty list")
    bots = tuple(_parse_bot(i, b) for i, b in enumerate(raw_bots))
    seen: set[str] = set()
    for bot in bots:
        if bot.player_id in seen:
            raise ScenarioError(f"scenario: duplicate bot player_id {bot.player_id!r}")
        seen.add(bot.player_id)
    return Scenario(name=name, game=game, seed=seed, bots=bots)


# ----------------------------------------------------------------- XML form

_XML_ACTIONS = {
    "walk-to-distance": "walk_to_distance",
    "talk": "talk",
    "accept-quest": "accept_quest",
    "collect-nearest": "collect_nearest",
    "submit-rebus": "submit_rebus",
    "wait": "wait",
    "expect": "expect",
}


def _xml_action(elem: ET.Element) -> dict:
    kind = _XML_ACTIONS.get(elem.tag)
    if kind is None:
        raise ScenarioError(f"scenario xml: unknown script element <{elem.tag}>")
    a = elem.attrib
    action: dict = {"do": kind}
    if "expect-reason" in a:
        action["expect_reason"] = a["expect-reason"]
    if kind == "walk_to_distance":
        action["m"] = float(a["m"])
    elif kind == "talk":
        action["npc"] = a.get("npc", "")
        action["choices"] = [int(c) for c in a.get("choices", "").split()]
    elif kind == "accept_quest":
        action["quest"] = a.get("quest", "")
    elif kind == "collect_nearest":
        action["kind"] = a.get("kind", "")
    elif kind == "submit_rebus":
        action["quest"] = a.get("quest", "")
        action["phrase"] = a.get("phrase", "")
        action["participants"] = a.get("participants", "").split()
    elif kind == "wait":
        action["ticks"] = int(a["ticks"])
    else:
        action["check"] = a.get("check", "")
        for key in ("quest", "state", "kind"):
            if key in a:
                action[key] = a[key]
        if "count" in a:
            action["count"] = int(a["count"])
    return action


def _xml_bot(elem: ET.Element) -> dict:
    a = elem.attrib
    doc: dict = {
        "player_id": a.get("player-id", ""),
        "consent": a.get("consent", "true") == "true",
    }
    if "display-name" in a:
        doc["display_name"] = a["display-name"]
    if "speed" in a:
        speed = a["speed"]
        doc["speed"] = speed if speed in SPEED_PRESETS else float(speed)
    if "tick-s" in a:
        doc["tick_s"] = float(a["tick-s"])
    for child in elem:
        if child.tag == "track":
            doc["track"] = [
                [float(pt.attrib["lat"]), float(pt.attrib["lon"])] for pt in child
            ]
        elif child.tag == "pos":
            doc["pos"] = [float(child.attrib["lat"]), float(child.attrib["lon"])]
        elif child.tag == "script":
            doc["script"] = [_xml_action(act) for act in child]
        else:
            raise ScenarioError(f"scenario xml: unknown bot element <{child.tag}>")
    return doc


def from_xml(text: str) -> Scenario:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ScenarioError(f"scenario xml: {exc}") from exc
    if root.tag != "scenario":
        raise ScenarioError(f"scenario xml: root element must be <scenario>, found <{root.tag}>")
    doc: dict = {
        "name": root.attrib.get("name", ""),
        "game": root.attrib.get("game", ""),
        "bots": [],
    }
    if "seed" in root.attrib:
        doc["seed"] = int(root.attrib["seed"])
    for child in root:
        if child.tag != "bot":
            raise ScenarioError(f"scenario xml: unknown element <{child.tag}>")
        doc["bots"].append(_xml_bot(child))
    return from_doc(doc)


def load_scenario(path: str | Path) -> Scenario:
    """Load a scenario from a .json or .xml file."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".xml":
        return from_xml(text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path.name}: not valid JSON: {exc}") from exc
    return from_doc(doc)
