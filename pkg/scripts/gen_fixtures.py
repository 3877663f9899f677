#!/usr/bin/env python3
"""Regenerate the bundled game fixtures and simulation scenarios.

The river walk is laid out in local meters, converted to lat/lon, and
iteratively rescaled until the great-circle polyline length is 4 000 m to
within a millimeter; every coordinate is then frozen at 7 decimals (about
1 cm). Flowers sit exactly on the track at 200 m, 600 m, ..., 3 800 m.

Run from the repository root:  python3 scripts/gen_fixtures.py
The output is committed; this script exists so the fixtures are
reproducible, not because they change often.
"""

from __future__ import annotations

import json
import math
import xml.etree.ElementTree as ET
from pathlib import Path

from geoquest.geo import GeoPoint, Track, point_at_distance, track_length

ROOT = Path(__file__).resolve().parent.parent
GAMES = ROOT / "src" / "geoquest" / "data" / "games"
SCENARIOS = ROOT / "src" / "geoquest" / "data" / "scenarios"

M_PER_DEG_LAT = math.pi / 180.0 * 6_371_000.0

# The walk starts near the south end of the river park and heads north,
# meandering a little; x is meters east, y meters north of the start.
RIVER_SHAPE_M = [
    (0.0, 0.0),
    (18.0, 420.0),
    (-14.0, 870.0),
    (24.0, 1300.0),
    (58.0, 1770.0),
    (34.0, 2230.0),
    (-12.0, 2670.0),
    (-44.0, 3110.0),
    (8.0, 3560.0),
    (-2.0, 3995.0),
]
RIVER_ORIGIN = (35.0116, 135.7681)
RIVER_LENGTH_M = 4000.0
FLOWER_DISTANCES_M = [200.0 + 400.0 * i for i in range(10)]

PLAZA = (35.0045, 135.7683)

WALK_SPEED_MPS = 1.4
TICK_S = 5.0


def _shape_to_points(scale: float) -> list[GeoPoint]:
    lat0, lon0 = RIVER_ORIGIN
    points = []
    for x, y in RIVER_SHAPE_M:
        lat = lat0 + (y * scale) / M_PER_DEG_LAT
        lon = lon0 + (x * scale) / (M_PER_DEG_LAT * math.cos(math.radians(lat)))
        points.append(GeoPoint(lat, lon))
    return points


def river_track() -> Track:
    scale = 1.0
    for _ in range(20):
        track = Track.from_points(_shape_to_points(scale))
        length = track_length(track)
        if abs(length - RIVER_LENGTH_M) < 1e-9:
            break
        scale *= RIVER_LENGTH_M / length
    rounded = [
        GeoPoint(round(p.lat_deg, 7), round(p.lon_deg, 7)) for p in _shape_to_points(scale)
    ]
    track = Track.from_points(rounded)
    final = track_length(track)
    assert abs(final - RIVER_LENGTH_M) < 0.05, f"track froze at {final:.4f} m"
    return track


def _round_point(p: GeoPoint) -> GeoPoint:
    return GeoPoint(round(p.lat_deg, 7), round(p.lon_deg, 7))


def _write_xml(path: Path, root: ET.Element) -> None:
    tree = ET.ElementTree(root)
    ET.indent(tree, space="  ")
    path.parent.mkdir(parents=True, exist_ok=True)
    tree.write(path, encoding="unicode", xml_declaration=False)
    path.write_text(path.read_text() + "\n")


def _choice(label: str, effect: str | None = None, quest: str | None = None,
            next_node: str | None = None) -> ET.Element:
    elem = ET.Element("choice", {"label": label})
    if effect is not None:
        elem.set("effect", effect)
        elem.set("quest", quest)
    if next_node is not None:
        elem.set("next", next_node)
    return elem


def _node(node_id: str, text: str, choices: list[ET.Element]) -> ET.Element:
    elem = ET.Element("node", {"id": node_id, "text": text})
    elem.extend(choices)
    return elem


def _npc(npc_id: str, name: str, at: GeoPoint, radius_m: float | None,
         root_node: str, nodes: list[ET.Element]) -> ET.Element:
    attrs = {"id": npc_id, "name": name, "lat": repr(at.lat_deg), "lon": repr(at.lon_deg)}
    if radius_m is not None:
        attrs["radius-m"] = repr(radius_m)
    elem = ET.Element("npc", attrs)
    dialog = ET.SubElement(elem, "dialog", {"root": root_node})
    dialog.extend(nodes)
    return elem


def write_river_game(track: Track) -> None:
    out = GAMES / "river_of_flowers"

    game = ET.Element("game", {"id": "river-of-flowers", "title": "River of Flowers"})
    ET.SubElement(game, "params", {
        "collect-radius-m": "25",
        "npc-radius-m": "100",
        "staleness-s": "60",
        "history-cap": "256",
        "visibility-radius-m": "250",
    })
    _write_xml(out / "game.xml", game)

    south = track.points[0]
    north = track.points[-1]
    npcs = ET.Element("npcs")
    npcs.append(_npc(
        "riverkeeper-south", "Riverkeeper of the South Bank", south, 40.0, "greet",
        [
            _node("greet", "The banks bloom after the rain. Ten flowers stand between here and the north bridge.", [
                _choice("What should I do?", "offer_quest", "river-of-flowers", "task"),
                _choice("Is there a walk without chores?", "offer_quest", "walk-north"),
                _choice("How goes my errand?", "report_quest_status", "river-of-flowers"),
                _choice("Just admiring the river."),
            ]),
            _node("task", "Walk the east bank northward and gather every flower you find. My cousin at the north bridge keeps the tally.", [
                _choice("I am on my way."),
            ]),
        ],
    ))
    npcs.append(_npc(
        "riverkeeper-north", "Riverkeeper of the North Bridge", north, 40.0, "greet",
        [
            _node("greet", "You look footsore. Show me what you gathered.", [
                _choice("Here are the flowers.", "complete_quest_check", "river-of-flowers"),
                _choice("How many do I still need?", "report_quest_status", "river-of-flowers"),
                _choice("Farewell."),
            ]),
        ],
    ))
    _write_xml(out / "npcs.xml", npcs)

    items = ET.Element("items")
    for d in FLOWER_DISTANCES_M:
        p = _round_point(point_at_distance(track, d))
        ET.SubElement(items, "item-placement", {
            "kind": "flower", "lat": repr(p.lat_deg), "lon": repr(p.lon_deg),
        })
    _write_xml(out / "items.xml", items)

    quests = ET.Element("quests")
    ET.SubElement(quests, "quest", {
        "id": "river-of-flowers",
        "title": "The River of Flowers",
        "kind": "collect",
        "item-kind": "flower",
        "required-count": "10",
        "completion-npc": "riverkeeper-north",
    })
    reach = ET.SubElement(quests, "quest", {
        "id": "walk-north",
        "title": "Walk to the North Bridge",
        "kind": "reach",
    })
    ET.SubElement(reach, "target", {
        "lat": repr(north.lat_deg), "lon": repr(north.lon_deg), "radius-m": "50",
    })
    _write_xml(out / "quests.xml", quests)


RIDDLES = [
    ("keeper-of-pairs", "Keeper of Pairs", "pair-riddle", "A Riddle for Two",
     "kamo river", 2,
     [("a heron over water", "img/pair-0.png"), ("a long grassy bank", "img/pair-1.png")]),
    ("keeper-of-trios", "Keeper of Trios", "trio-riddle", "A Riddle for Three",
     "three rivers meet", 2,
     [("the number three", "img/trio-0.png"), ("two streams joining", "img/trio-1.png"),
      ("a confluence stone", "img/trio-2.png")]),
    ("keeper-of-quads", "Keeper of Quads", "quad-riddle", "A Riddle for Four",
     "four bridges north", 2,
     [("the number four", "img/quad-0.png"), ("a stone bridge", "img/quad-1.png"),
      ("another bridge", "img/quad-2.png"), ("a compass needle", "img/quad-3.png")]),
]


def write_rebus_game() -> None:
    out = GAMES / "rebus_riddles"

    game = ET.Element("game", {"id": "rebus-riddles", "title": "Rebus Riddles"})
    ET.SubElement(game, "params", {"visibility-radius-m": "250"})
    _write_xml(out / "game.xml", game)

    plaza = GeoPoint(*PLAZA)
    npcs = ET.Element("npcs")
    for i, (npc_id, name, quest_id, _title, _solution, _minp, fragments) in enumerate(RIDDLES):
        at = _round_point(GeoPoint(plaza.lat_deg, plaza.lon_deg + 0.0002 * i))
        count = len(fragments)
        npcs.append(_npc(
            npc_id, name, at, 0.0, "ask",
            [
                _node("ask", f"One picture, cut into {count} pieces, for {count} pairs of eyes.", [
                    _choice("Give us the riddle.", "offer_quest", quest_id),
                    _choice("Show me my piece.", "give_fragment", quest_id),
                    _choice("Not today."),
                ]),
            ],
        ))
    _write_xml(out / "npcs.xml", npcs)

    _write_xml(out / "items.xml", ET.Element("items"))

    quests = ET.Element("quests")
    for _npc_id, _name, quest_id, title, solution, min_players, fragments in RIDDLES:
        quest = ET.SubElement(quests, "quest", {
            "id": quest_id, "title": title, "kind": "rebus",
            "solution": solution, "min-players": str(min_players),
        })
        for index, (label, image) in enumerate(fragments):
            ET.SubElement(quest, "fragment", {
                "index": str(index), "image": image, "label": label,
            })
    _write_xml(out / "quests.xml", quests)


def _write_json(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n")


def write_river_scenario(track: Track) -> None:
    script = [
        {"do": "talk", "npc": "riverkeeper-south", "choices": [0]},
        {"do": "accept_quest", "quest": "river-of-flowers"},
    ]
    for d in FLOWER_DISTANCES_M:
        script.append({"do": "walk_to_distance", "m": d})
        script.append({"do": "collect_nearest", "kind": "flower"})
    script += [
        {"do": "walk_to_distance", "m": RIVER_LENGTH_M},
        {"do": "talk", "npc": "riverkeeper-north", "choices": [0]},
        {"do": "expect", "check": "quest_state", "quest": "river-of-flowers", "state": "completed"},
        {"do": "expect", "check": "inventory_count", "kind": "flower", "count": 10},
    ]
    _write_json(SCENARIOS / "river_of_flowers.json", {
        "name": "river_of_flowers",
        "game": "river_of_flowers",
        "seed": 0,
        "bots": [{
            "player_id": "walker",
            "display_name": "Walker",
            "speed": "walk",
            "tick_s": TICK_S,
            "consent": True,
            "track": [[p.lat_deg, p.lon_deg] for p in track.points],
            "script": script,
        }],
    })


def write_rebus_scenarios() -> None:
    plaza = [PLAZA[0], PLAZA[1]]

    def bot(player_id: str, script: list[dict]) -> dict:
        return {
            "player_id": player_id,
            "display_name": player_id.capitalize(),
            "speed": "walk",
            "tick_s": TICK_S,
            "consent": True,
            "pos": plaza,
            "script": script,
        }

    _write_json(SCENARIOS / "rebus_pair.json", {
        "name": "rebus_pair",
        "game": "rebus_riddles",
        "seed": 0,
        "bots": [
            bot("aoi", [
                {"do": "talk", "npc": "keeper-of-pairs", "choices": [0]},
                {"do": "accept_quest", "quest": "pair-riddle"},
                {"do": "talk", "npc": "keeper-of-pairs", "choices": [1]},
                {"do": "wait", "ticks": 2},
                {"do": "submit_rebus", "quest": "pair-riddle", "phrase": "Kamo River",
                 "participants": ["aoi", "botan"]},
                {"do": "expect", "check": "quest_state", "quest": "pair-riddle", "state": "completed"},
            ]),
            bot("botan", [
                {"do": "talk", "npc": "keeper-of-pairs", "choices": [0]},
                {"do": "accept_quest", "quest": "pair-riddle"},
                {"do": "talk", "npc": "keeper-of-pairs", "choices": [1]},
                {"do": "wait", "ticks": 3},
                {"do": "expect", "check": "quest_state", "quest": "pair-riddle", "state": "completed"},
            ]),
        ],
    })

    def trio_member(player_id: str) -> dict:
        return bot(player_id, [
            {"do": "talk", "npc": "keeper-of-trios", "choices": [0]},
            {"do": "accept_quest", "quest": "trio-riddle"},
            {"do": "talk", "npc": "keeper-of-trios", "choices": [1]},
            {"do": "wait", "ticks": 4},
            {"do": "expect", "check": "quest_state", "quest": "trio-riddle", "state": "completed"},
        ])

    _write_json(SCENARIOS / "rebus_trio.json", {
        "name": "rebus_trio",
        "game": "rebus_riddles",
        "seed": 0,
        "bots": [
            bot("hana", [
                {"do": "talk", "npc": "keeper-of-trios", "choices": [0]},
                {"do": "accept_quest", "quest": "trio-riddle"},
                {"do": "talk", "npc": "keeper-of-trios", "choices": [1]},
                {"do": "submit_rebus", "quest": "trio-riddle", "phrase": "three rivers meet",
                 "participants": ["hana", "iwao"], "expect_reason": "INCOMPLETE_COVERAGE"},
                {"do": "wait", "ticks": 2},
                {"do": "submit_rebus", "quest": "trio-riddle", "phrase": "Three Rivers Meet!",
                 "participants": ["hana", "iwao", "kei"]},
                {"do": "expect", "check": "quest_state", "quest": "trio-riddle", "state": "completed"},
            ]),
            trio_member("iwao"),
            trio_member("kei"),
        ],
    })


def write_consent_scenario(track: Track) -> None:
    _write_json(SCENARIOS / "consent_denied.json", {
        "name": "consent_denied",
        "game": "river_of_flowers",
        "seed": 0,
        "bots": [{
            "player_id": "refusenik",
            "display_name": "Refusenik",
            "speed": "walk",
            "tick_s": TICK_S,
            "consent": False,
            "track": [[p.lat_deg, p.lon_deg] for p in track.points],
            "script": [
                {"do": "talk", "npc": "riverkeeper-south", "choices": [0],
                 "expect_reason": "CONSENT_REQUIRED"},
                {"do": "walk_to_distance", "m": 140.0},
                {"do": "collect_nearest", "kind": "flower",
                 "expect_reason": "CONSENT_REQUIRED"},
                {"do": "accept_quest", "quest": "river-of-flowers",
                 "expect_reason": "NOT_OFFERED"},
                {"do": "expect", "check": "quest_state", "quest": "river-of-flowers",
                 "state": "not_started"},
                {"do": "expect", "check": "inventory_count", "kind": "flower", "count": 0},
                {"do": "expect", "check": "denied_at_least", "count": 20},
                {"do": "expect", "check": "server_events", "count": 1},
            ],
        }],
    })


def main() -> None:
    track = river_track()
    write_river_game(track)
    write_rebus_game()
    write_river_scenario(track)
    write_rebus_scenarios()
    write_consent_scenario(track)
    print(f"river track: {len(track.points)} vertices, {track_length(track):.3f} m")
    for name in sorted(p.name for p in GAMES.iterdir()):
        print(f"game: {name}")
    for name in sorted(p.name for p in SCENARIOS.iterdir()):
        print(f"scenario: {name}")


if __name__ == "__main__":
    main()
