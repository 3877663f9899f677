"""Strict XML reader for the four-file game definition suite.

The vocabulary is deliberately closed: an unknown element or attribute is
a parse error with its line and column, not something to skip over. Range
and reference problems, on the other hand, are *not* parse errors — they
parse fine and are reported by the validator so that a whole defective
suite can be described in one pass.
"""

from __future__ import annotations

import xml.parsers.expat
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from ..errors import ParseError
from .model import (
    GameDefinition,
    Pos,
    RawChoice,
    RawFragment,
    RawNode,
    RawNpc,
    RawParams,
    RawPlacement,
    RawQuest,
)

SUITE_FILES = ("game.xml", "npcs.xml", "items.xml", "quests.xml")

EFFECTS = ("none", "offer_quest", "give_fragment", "report_quest_status", "complete_quest_check")
QUEST_KINDS = ("reach", "collect", "rebus")


@dataclass
class _Elem:
    tag: str
    attrs: dict[str, str]
    line: int
    col: int
    children: list["_Elem"] = field(default_factory=list)


def _read_tree(text: str, filename: str) -> _Elem:
    """Parse one document into a positioned element tree."""
    parser = xml.parsers.expat.ParserCreate()
    root: list[_Elem] = []
    stack: list[_Elem] = []

    def start(tag: str, attrs: dict[str, str]) -> None:
        elem = _Elem(tag=tag, attrs=attrs, line=parser.CurrentLineNumber,
                     col=parser.CurrentColumnNumber + 1)
        if stack:
            stack[-1].children.append(elem)
        else:
            root.append(elem)
        stack.append(elem)

    def end(tag: str) -> None:
        stack.pop()

    def chardata(data: str) -> None:
        if data.strip():
            raise ParseError(
                f"unexpected text content {data.strip()[:30]!r}",
                file=filename,
                line=parser.CurrentLineNumber,
                col=parser.CurrentColumnNumber + 1,
            )

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chardata
    try:
        parser.Parse(text, True)
    except xml.parsers.expat.ExpatError as exc:
        raise ParseError(
            xml.parsers.expat.errors.messages[exc.code],
            file=filename,
            line=exc.lineno,
            col=exc.offset + 1,
        ) from exc
    if not root:
        raise ParseError("empty document", file=filename, line=1, col=1)
    return root[0]


class _Shape:
    """Attribute/children checking helpers bound to one file."""

    def __init__(self, filename: str) -> None:
        self.filename = filename

    def fail(self, elem: _Elem, message: str) -> ParseError:
        return ParseError(message, file=self.filename, line=elem.line, col=elem.col)

    def pos(self, elem: _Elem) -> Pos:
        return Pos(file=self.filename, line=elem.line)

    def expect_tag(self, elem: _Elem, tag: str) -> None:
        if elem.tag != tag:
            raise self.fail(elem, f"expected <{tag}>, found <{elem.tag}>")

    def attrs(self, elem: _Elem, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> dict[str, str]:
        for name in elem.attrs:
            if name not in required and name not in optional:
                raise self.fail(elem, f"unknown attribute {name!r} on <{elem.tag}>")
        for name in required:
            if name not in elem.attrs:
                raise self.fail(elem, f"<{elem.tag}> requires attribute {name!r}")
            if not elem.attrs[name].strip():
                raise self.fail(elem, f"attribute {name!r} on <{elem.tag}> is empty")
        return elem.attrs

    def children(self, elem: _Elem, allowed: tuple[str, ...]) -> list[_Elem]:
        for child in elem.children:
            if child.tag not in allowed:
                raise self.fail(child, f"unknown element <{child.tag}> inside <{elem.tag}>")
        return elem.children

    def number(self, elem: _Elem, name: str, raw: str) -> float:
        try:
            return float(raw)
        except ValueError:
            raise self.fail(elem, f"attribute {name!r} must be a number, got {raw!r}") from None

    def integer(self, elem: _Elem, name: str, raw: str) -> int:
        try:
            return int(raw)
        except ValueError:
            raise self.fail(elem, f"attribute {name!r} must be an integer, got {raw!r}") from None


def _parse_game(text: str, filename: str) -> tuple[str, str, RawParams]:
    shape = _Shape(filename)
    root = _read_tree(text, filename)
    shape.expect_tag(root, "game")
    attrs = shape.attrs(root, required=("id", "title"))
    params = RawParams()
    kids = shape.children(root, allowed=("params",))
    if len(kids) > 1:
        raise shape.fail(kids[1], "at most one <params> element is allowed")
    if kids:
        p = kids[0]
        shape.children(p, allowed=())
        raw = shape.attrs(
            p,
            required=(),
            optional=(
                "collect-radius-m",
                "npc-radius-m",
                "staleness-s",
                "history-cap",
                "visibility-radius-m",
            ),
        )
        params = RawParams(
            collect_radius_m=shape.number(p, "collect-radius-m", raw["collect-radius-m"])
            if "collect-radius-m" in raw else None,
            npc_radius_m=shape.number(p, "npc-radius-m", raw["npc-radius-m"])
            if "npc-radius-m" in raw else None,
            staleness_s=shape.number(p, "staleness-s", raw["staleness-s"])
            if "staleness-s" in raw else None,
            history_cap=shape.integer(p, "history-cap", raw["history-cap"])
            if "history-cap" in raw else None,
            visibility_radius_m=shape.number(p, "visibility-radius-m", raw["visibility-radius-m"])
            if "visibility-radius-m" in raw else None,
            pos=shape.pos(p),
        )
    return attrs["id"], attrs["title"], params


def _parse_choice(shape: _Shape, elem: _Elem) -> RawChoice:
    attrs = shape.attrs(elem, required=("label",), optional=("effect", "quest", "next"))
    shape.children(elem, allowed=())
    effect = attrs.get("effect", "none")
    if effect not in EFFECTS:
        raise shape.fail(elem, f"unknown effect {effect!r}; one of {', '.join(EFFECTS)}")
    quest = attrs.get("quest")
    if effect != "none" and quest is None:
        raise shape.fail(elem, f"effect {effect!r} requires a quest attribute")
    if effect == "none" and quest is not None:
        raise shape.fail(elem, "quest attribute without an effect")
    return RawChoice(
        label=attrs["label"],
        effect=effect,
        quest=quest,
        next=attrs.get("next"),
        pos=shape.pos(elem),
    )


def _parse_npcs(text: str, filename: str) -> list[RawNpc]:
    shape = _Shape(filename)
    root = _read_tree(text, filename)
    shape.expect_tag(root, "npcs")
    shape.attrs(root, required=())
    npcs = []
    for npc_elem in shape.children(root, allowed=("npc",)):
        attrs = shape.attrs(npc_elem, required=("id", "name", "lat", "lon"), optional=("radius-m",))
        dialogs = shape.children(npc_elem, allowed=("dialog",))
        if len(dialogs) != 1:
            raise shape.fail(npc_elem, f"<npc> requires exactly one <dialog>, found {len(dialogs)}")
        dialog = dialogs[0]
        dialog_attrs = shape.attrs(dialog, required=("root",))
        nodes = []
        for node_elem in shape.children(dialog, allowed=("node",)):
            node_attrs = shape.attrs(node_elem, required=("id", "text"))
            choices = [
                _parse_choice(shape, c)
                for c in shape.children(node_elem, allowed=("choice",))
            ]
            nodes.append(
                RawNode(
                    node_id=node_attrs["id"],
                    text=node_attrs["text"],
                    choices=choices,
                    pos=shape.pos(node_elem),
                )
            )
        npcs.append(
            RawNpc(
                npc_id=attrs["id"],
                name=attrs["name"],
                lat=shape.number(npc_elem, "lat", attrs["lat"]),
                lon=shape.number(npc_elem, "lon", attrs["lon"]),
                radius_m=shape.number(npc_elem, "radius-m", attrs["radius-m"])
                if "radius-m" in attrs else None,
                dialog_root=dialog_attrs["root"],
                nodes=nodes,
                pos=shape.pos(npc_elem),
            )
        )
    return npcs


def _parse_items(text: str, filename: str) -> list[RawPlacement]:
    shape = _Shape(filename)
    root = _read_tree(text, filename)
    shape.expect_tag(root, "items")
    shape.attrs(root, required=())
    placements = []
    for elem in shape.children(root, allowed=("item-placement",)):
        attrs = shape.attrs(elem, required=("kind", "lat", "lon"), optional=("count",))
        shape.children(elem, allowed=())
        placements.append(
            RawPlacement(
                kind=attrs["kind"],
                lat=shape.number(elem, "lat", attrs["lat"]),
                lon=shape.number(elem, "lon", attrs["lon"]),
                count=shape.integer(elem, "count", attrs["count"]) if "count" in attrs else 1,
                pos=shape.pos(elem),
            )
        )
    return placements


def _parse_quest(shape: _Shape, elem: _Elem) -> RawQuest:
    common = ("id", "title", "kind")
    kind = elem.attrs.get("kind", "")
    if kind not in QUEST_KINDS:
        shape.attrs(elem, required=common)  # reports missing attrs first
        raise shape.fail(elem, f"unknown quest kind {kind!r}; one of {', '.join(QUEST_KINDS)}")
    if kind == "reach":
        attrs = shape.attrs(elem, required=common)
        targets = shape.children(elem, allowed=("target",))
        if len(targets) != 1:
            raise shape.fail(elem, f"reach quest requires exactly one <target>, found {len(targets)}")
        t = targets[0]
        t_attrs = shape.attrs(t, required=("lat", "lon", "radius-m"))
        shape.children(t, allowed=())
        return RawQuest(
            quest_id=attrs["id"],
            title=attrs["title"],
            kind=kind,
            pos=shape.pos(elem),
            target_lat=shape.number(t, "lat", t_attrs["lat"]),
            target_lon=shape.number(t, "lon", t_attrs["lon"]),
            target_radius_m=shape.number(t, "radius-m", t_attrs["radius-m"]),
            target_pos=shape.pos(t),
        )
    if kind == "collect":
        attrs = shape.attrs(elem, required=common + ("item-kind", "required-count", "completion-npc"))
        shape.children(elem, allowed=())
        return RawQuest(
            quest_id=attrs["id"],
            title=attrs["title"],
            kind=kind,
            pos=shape.pos(elem),
            item_kind=attrs["item-kind"],
            required_count=shape.integer(elem, "required-count", attrs["required-count"]),
            completion_npc=attrs["completion-npc"],
        )
    # rebus
    attrs = shape.attrs(elem, required=common + ("solution", "min-players"))
    fragments = []
    for f in shape.children(elem, allowed=("fragment",)):
        f_attrs = shape.attrs(f, required=("index", "image", "label"))
        shape.children(f, allowed=())
        fragments.append(
            RawFragment(
                index=shape.integer(f, "index", f_attrs["index"]),
                image=f_attrs["image"],
                label=f_attrs["label"],
                pos=shape.pos(f),
            )
        )
    return RawQuest(
        quest_id=attrs["id"],
        title=attrs["title"],
        kind=kind,
        pos=shape.pos(elem),
        solution=attrs["solution"],
        min_players=shape.integer(elem, "min-players", attrs["min-players"]),
        fragments=fragments,
    )


def _parse_quests(text: str, filename: str) -> list[RawQuest]:
    shape = _Shape(filename)
    root = _read_tree(text, filename)
    shape.expect_tag(root, "quests")
    shape.attrs(root, required=())
    return [_parse_quest(shape, elem) for elem in shape.children(root, allowed=("quest",))]


def parse_suite(sources: Mapping[str, str]) -> GameDefinition:
    """Parse the four files of a suite, given as {filename: text}."""
    missing = [name for name in SUITE_FILES if name not in sources]
    if missing:
        raise ParseError(f"missing suite file(s): {', '.join(missing)}", file=missing[0])
    extra = [name for name in sources if name not in SUITE_FILES]
    if extra:
        raise ParseError(f"unexpected suite file(s): {', '.join(extra)}", file=extra[0])
    game_id, title, params = _parse_game(sources["game.xml"], "game.xml")
    return GameDefinition(
        game_id=game_id,
        title=title,
        params=params,
        npcs=_parse_npcs(sources["npcs.xml"], "npcs.xml"),
        placements=_parse_items(sources["items.xml"], "items.xml"),
        quests=_parse_quests(sources["quests.xml"], "quests.xml"),
    )


def load_dir(path: str | Path) -> GameDefinition:
    """Read a suite from a directory containing the four files."""
    base = Path(path)
    sources = {}
    for name in SUITE_FILES:
        file = base / name
        if not file.is_file():
            raise ParseError("file not found", file=str(file))
        sources[name] = file.read_text(encoding="utf-8")
    return parse_suite(sources)
