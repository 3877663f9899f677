"""A small valid definition suite plus a corpus of seeded defects.

Each mutation is a single text swap that plants exactly one defect with a
known error code; applying several at once gives a suite whose full
defect list is known in advance.
"""

from __future__ import annotations

import random

from geoquest.gamedef import (
    E_BAD_COORD,
    E_BAD_RADIUS,
    E_DANGLING_REF,
    E_DUP_ID,
    E_EMPTY_SOLUTION,
    E_FRAGMENT_GAP,
    E_UNREACHABLE_NODE,
    E_ZERO_COUNT,
)

GAME_XML = """<?xml version="1.0" encoding="UTF-8"?>
<game id="testville" title="Testville">
  <params collect-radius-m="25" npc-radius-m="100" staleness-s="60" history-cap="256" visibility-radius-m="250"/>
</game>
"""

NPCS_XML = """<?xml version="1.0" encoding="UTF-8"?>
<npcs>
  <npc id="warden" name="The Warden" lat="35.0" lon="135.77">
    <dialog root="hi">
      <node id="hi" text="Morning. The moss is thick today.">
        <choice label="What needs doing?" effect="offer_quest" quest="gather-moss" next="brief"/>
        <choice label="Remind me." next="brief"/>
        <choice label="How am I doing?" effect="report_quest_status" quest="gather-moss"/>
        <choice label="Here is my basket." effect="complete_quest_check" quest="gather-moss"/>
        <choice label="Anywhere to walk?" effect="offer_quest" quest="east-gate"/>
        <choice label="Bye."/>
      </node>
      <node id="brief" text="Two clumps of moss, the green kind.">
        <choice label="Will do."/>
      </node>
    </dialog>
  </npc>
  <npc id="sphinx" name="The Sphinx" lat="35.01" lon="135.78" radius-m="0">
    <dialog root="ask">
      <node id="ask" text="A puzzle, split among friends.">
        <choice label="Give me the puzzle." effect="offer_quest" quest="moon-pair"/>
        <choice label="Show me my piece." effect="give_fragment" quest="moon-pair"/>
        <choice label="Bye."/>
      </node>
    </dialog>
  </npc>
</npcs>
"""

ITEMS_XML = """<?xml version="1.0" encoding="UTF-8"?>
<items>
  <item-placement kind="moss" lat="35.0001" lon="135.77" count="3"/>
  <item-placement kind="moss" lat="35.0002" lon="135.7701"/>
  <item-placement kind="torch" lat="35.0" lon="135.7705"/>
</items>
"""

QUESTS_XML = """<?xml version="1.0" encoding="UTF-8"?>
<quests>
  <quest id="gather-moss" title="Moss for the Warden" kind="collect" item-kind="moss" required-count="2" completion-npc="warden"/>
  <quest id="east-gate" title="Walk to the east gate" kind="reach">
    <target lat="35.0" lon="135.80" radius-m="50"/>
  </quest>
  <quest id="moon-pair" title="Two halves of the moon" kind="rebus" solution="Full Moon" min-players="2">
    <fragment index="0" image="img/moon-0.png" label="left half"/>
    <fragment index="1" image="img/moon-1.png" label="right half"/>
  </quest>
</quests>
"""

_DUP_NODE_POINT = '      </node>\n    </dialog>\n  </npc>\n  <npc id="sphinx"'


def base_suite() -> dict[str, str]:
    return {
        "game.xml": GAME_XML,
        "npcs.xml": NPCS_XML,
        "items.xml": ITEMS_XML,
        "quests.xml": QUESTS_XML,
    }


# name -> (file, old text, new text, the one code the defect must produce)
MUTATIONS: dict[str, tuple[str, str, str, str]] = {
    "dangling-quest-ref": (
        "npcs.xml",
        'effect="offer_quest" quest="moon-pair"',
        'effect="offer_quest" quest="moon-pear"',
        E_DANGLING_REF,
    ),
    "dangling-next-ref": (
        "npcs.xml",
        'label="Remind me." next="brief"',
        'label="Remind me." next="briefs"',
        E_DANGLING_REF,
    ),
    "duplicate-quest-id": (
        "quests.xml",
        "</quests>",
        '  <quest id="east-gate" title="The east gate, again" kind="reach">\n'
        '    <target lat="35.0" lon="135.80" radius-m="50"/>\n'
        "  </quest>\n</quests>",
        E_DUP_ID,
    ),
    "duplicate-node-id": (
        "npcs.xml",
        _DUP_NODE_POINT,
        '      </node>\n      <node id="brief" text="Say again: two clumps.">\n'
        '        <choice label="Will do."/>\n      </node>\n'
        '    </dialog>\n  </npc>\n  <npc id="sphinx"',
        E_DUP_ID,
    ),
    "npc-off-the-globe": (
        "npcs.xml",
        'name="The Warden" lat="35.0"',
        'name="The Warden" lat="95.0"',
        E_BAD_COORD,
    ),
    "item-off-the-globe": (
        "items.xml",
        'kind="torch" lat="35.0" lon="135.7705"',
        'kind="torch" lat="35.0" lon="-200.5"',
        E_BAD_COORD,
    ),
    "solution-normalizes-away": (
        "quests.xml",
        'solution="Full Moon"',
        'solution="?!."',
        E_EMPTY_SOLUTION,
    ),
    "zero-required-count": (
        "quests.xml",
        'required-count="2"',
        'required-count="0"',
        E_ZERO_COUNT,
    ),
    "fragment-index-gap": (
        "quests.xml",
        '<fragment index="1"',
        '<fragment index="2"',
        E_FRAGMENT_GAP,
    ),
    "orphan-dialog-node": (
        "npcs.xml",
        _DUP_NODE_POINT,
        '      </node>\n      <node id="lore" text="Nobody ever asks about the lore.">\n'
        '        <choice label="Huh."/>\n      </node>\n'
        '    </dialog>\n  </npc>\n  <npc id="sphinx"',
        E_UNREACHABLE_NODE,
    ),
    "zero-target-radius": (
        "quests.xml",
        'radius-m="50"',
        'radius-m="0"',
        E_BAD_RADIUS,
    ),
    "solo-min-players": (
        "quests.xml",
        'min-players="2"',
        'min-players="1"',
        E_ZERO_COUNT,
    ),
}


def mutate(suite: dict[str, str], name: str) -> dict[str, str]:
    """Apply one named defect; the anchor text must match exactly once."""
    file, old, new, _code = MUTATIONS[name]
    out = dict(suite)
    assert out[file].count(old) == 1, f"anchor for {name} not unique in {file}"
    out[file] = out[file].replace(old, new)
    return out


def combined_defect_suite() -> tuple[dict[str, str], list[str]]:
    """One suite carrying eight independent defects, one per error code."""
    names = [
        # radius first: the duplicated quest block would add a second anchor
        "zero-target-radius",
        "dangling-quest-ref",
        "duplicate-quest-id",
        "npc-off-the-globe",
        "solution-normalizes-away",
        "zero-required-count",
        "fragment-index-gap",
        "orphan-dialog-node",
    ]
    suite = base_suite()
    for name in names:
        suite = mutate(suite, name)
    return suite, sorted(MUTATIONS[name][3] for name in names)


def random_valid_suite(rng: random.Random) -> dict[str, str]:
    """Generate a random suite that must validate clean and instantiate."""
    n_npcs = rng.randint(1, 4)
    quests = []
    quest_lines = []
    for q in range(rng.randint(1, 5)):
        qid = f"quest-{q}"
        kind = rng.choice(["reach", "collect", "rebus"])
        quests.append((qid, kind))
        if kind == "reach":
            quest_lines.append(
                f'  <quest id="{qid}" title="Q{q}" kind="reach">\n'
                f'    <target lat="{rng.uniform(-89, 89):.4f}" lon="{rng.uniform(-179, 179):.4f}" '
                f'radius-m="{rng.uniform(5, 500):.1f}"/>\n  </quest>'
            )
        elif kind == "collect":
            npc_ref = f"npc-{rng.randrange(n_npcs)}"
            quest_lines.append(
                f'  <quest id="{qid}" title="Q{q}" kind="collect" item-kind="stone-{q}" '
                f'required-count="{rng.randint(1, 5)}" completion-npc="{npc_ref}"/>'
            )
        else:
            n_frag = rng.randint(1, 4)
            frags = "\n".join(
                f'    <fragment index="{i}" image="img/{qid}-{i}.png" label="piece {i}"/>'
                for i in range(n_frag)
            )
            quest_lines.append(
                f'  <quest id="{qid}" title="Q{q}" kind="rebus" solution="answer {q}" '
                f'min-players="{rng.randint(2, 4)}">\n{frags}\n  </quest>'
            )

    npc_blocks = []
    for n in range(n_npcs):
        # a chain of nodes, each linking to the next, so all are reachable
        n_nodes = rng.randint(1, 4)
        node_blocks = []
        for i in range(n_nodes):
            choices = []
            if rng.random() < 0.8 and quests:
                qid, kind = rng.choice(quests)
                effect = {
                    "reach": "offer_quest",
                    "collect": rng.choice(["offer_quest", "complete_quest_check", "report_quest_status"]),
                    "rebus": rng.choice(["offer_quest", "give_fragment"]),
                }[kind]
                nxt = f' next="n{i + 1}"' if i + 1 < n_nodes else ""
                choices.append(f'        <choice label="Do it" effect="{effect}" quest="{qid}"{nxt}/>')
            elif i + 1 < n_nodes:
                choices.append(f'        <choice label="Go on" next="n{i + 1}"/>')
            choices.append('        <choice label="Bye"/>')
            node_blocks.append(
                f'      <node id="n{i}" text="Node {i}">\n' + "\n".join(choices) + "\n      </node>"
            )
        npc_blocks.append(
            f'  <npc id="npc-{n}" name="NPC {n}" lat="{rng.uniform(-89, 89):.4f}" '
            f'lon="{rng.uniform(-179, 179):.4f}" radius-m="{rng.choice([0, 50, 100, 250])}">\n'
            f'    <dialog root="n0">\n' + "\n".join(node_blocks) + "\n    </dialog>\n  </npc>"
        )

    placements = "\n".join(
        f'  <item-placement kind="stone-{i}" lat="{rng.uniform(-89, 89):.4f}" '
        f'lon="{rng.uniform(-179, 179):.4f}" count="{rng.randint(1, 3)}"/>'
        for i in range(rng.randint(0, 6))
    )
    return {
        "game.xml": '<game id="random-town" title="Random Town"/>\n',
        "npcs.xml": "<npcs>\n" + "\n".join(npc_blocks) + "\n</npcs>\n",
        "items.xml": "<items>\n" + placements + "\n</items>\n",
        "quests.xml": "<quests>\n" + "\n".join(quest_lines) + "\n</quests>\n",
    }
