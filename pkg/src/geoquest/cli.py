"""Command-line entry points: serve, validate, sim run.

The server command wires a game directory into the HTTP app; everything
stateful (journal, snapshots, sessions) hangs off the flags. The sim
commands are thin wrappers around the simulation harness.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

import click

from .api import SessionStore, create_app
from .errors import ParseError
from .gamedef import load_dir, load_world, validate as validate_definition
from .journal import SNAPSHOT_EVERY_DEFAULT, Journal
from .service import GameService
from .simharness import (
    ScriptStuck,
    bundled_game_dir,
    bundled_scenario_path,
    load_scenario,
    run_scenario,
)


@click.group()
def main() -> None:
    """Location-game server and simulation tools."""


def _parse_listen(listen: str) -> tuple[str, int]:
    host, sep, port = listen.rpartition(":")
    if not sep or not port.isdigit():
        raise click.BadParameter(f"--listen must be host:port, got {listen!r}")
    return host or "127.0.0.1", int(port)


@main.command()
@click.option("--game-dir", required=True, type=click.Path(exists=True, file_okay=False),
              help="directory holding game.xml, npcs.xml, items.xml, quests.xml")
@click.option("--listen", default="127.0.0.1:8000", show_default=True, help="host:port to bind")
@click.option("--journal", "journal_path", type=click.Path(dir_okay=False), default=None,
              help="append-only command journal; omitting it disables persistence")
@click.option("--snapshot-every", default=SNAPSHOT_EVERY_DEFAULT, show_default=True,
              help="journal records between state snapshots")
@click.option("--seed", type=int, default=None,
              help="seed session-token generation (test mode only; tokens become predictable)")
@click.option("--static", "static_dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="serve this directory at / (the web client build)")
def serve(game_dir: str, listen: str, journal_path: str | None, snapshot_every: int,
          seed: int | None, static_dir: str | None) -> None:
    """Run the game server over a game-definition directory."""
    import uvicorn

    host, port = _parse_listen(listen)
    journal = Journal(journal_path, snapshot_every=snapshot_every) if journal_path else None
    try:
        service = GameService(world_factory=lambda: load_world(load_dir(game_dir)), journal=journal)
    except ParseError as exc:
        raise click.ClickException(str(exc)) from exc
    sessions = SessionStore(token_rng=random.Random(seed) if seed is not None else None)
    app = create_app(service, sessions=sessions, static_dir=static_dir)
    if journal is None:
        click.echo("warning: no --journal given; state will not survive a restart", err=True)
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.argument("game_dir", type=click.Path(exists=True, file_okay=False))
def validate(game_dir: str) -> None:
    """Check a game-definition directory; list every defect found."""
    try:
        definition = load_dir(game_dir)
    except ParseError as exc:
        click.echo(str(exc), err=True)
        sys.exit(2)
    errors = validate_definition(definition)
    for error in errors:
        click.echo(str(error))
    if errors:
        click.echo(f"{len(errors)} problem(s) in {game_dir}", err=True)
        sys.exit(1)
    world = load_world(definition)
    click.echo(
        f"ok: {definition.game_id!r} — {len(world.state.npcs)} npcs, "
        f"{len(world.state.items)} items, {len(world.state.quest_specs)} quests"
    )


@main.group()
def sim() -> None:
    """Scripted-bot simulation against a game."""


def _resolve_scenario(name_or_path: str) -> Path:
    path = Path(name_or_path)
    if path.exists():
        return path
    bundled = bundled_scenario_path(name_or_path)
    if bundled.exists():
        return bundled
    raise click.BadParameter(
        f"{name_or_path!r} is neither a file nor a bundled scenario name"
    )


@sim.command("run")
@click.argument("scenario")
@click.option("--game-dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="game directory; defaults to the bundled game the scenario names")
@click.option("--server", default=None, metavar="URL",
              help="drive a live server at this base URL instead of running in-process")
@click.option("--in-process", "in_process", is_flag=True,
              help="run the engine in-process (the default)")
@click.option("--seed", type=int, default=None, help="override the scenario's seed")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None,
              help="write the full report as JSON here")
def sim_run(scenario: str, game_dir: str | None, server: str | None, in_process: bool,
            seed: int | None, report_path: str | None) -> None:
    """Run SCENARIO (a file, or a bundled name like river_of_flowers)."""
    if server is not None and in_process:
        raise click.BadParameter("--server and --in-process are mutually exclusive")
    scn = load_scenario(_resolve_scenario(scenario))
    if game_dir is None:
        bundled = bundled_game_dir(scn.game)
        if not bundled.is_dir():
            raise click.BadParameter(
                f"scenario names game {scn.game!r} which is not bundled; pass --game-dir"
            )
        game_dir = str(bundled)

    try:
        if server is not None:
            import httpx

            with httpx.Client(base_url=server, timeout=30.0) as http:
                report = run_scenario(scn, game_dir, server=http, seed=seed)
        else:
            report = run_scenario(scn, game_dir, seed=seed)
    except ScriptStuck as exc:
        click.echo(f"stuck: {exc}", err=True)
        sys.exit(2)

    doc = report.to_doc()
    if report_path is not None:
        Path(report_path).write_text(json.dumps(doc, indent=2) + "\n")
    for player_id, stats in doc["bots"].items():
        completions = ", ".join(c["quest_id"] for c in stats["completions"]) or "none"
        click.echo(
            f"{player_id}: {stats['distance_m']:.1f} m, {stats['commands']} commands, "
            f"{stats['denied']} refused, completed: {completions}"
        )
    failed = [a for a in doc["assertions"] if not a["ok"]]
    for entry in failed:
        click.echo(f"FAILED [{entry['bot']} #{entry['index']}]: {entry['detail']}", err=True)
    click.echo(
        f"{doc['scenario']}: {'ok' if doc['ok'] else 'FAILED'} "
        f"({doc['sim_time_s']:.0f} simulated seconds, digest {doc['final_digest']})"
    )
    sys.exit(0 if doc["ok"] else 1)


if __name__ == "__main__":
    main()
