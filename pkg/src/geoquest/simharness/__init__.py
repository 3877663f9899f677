"""Deterministic scripted-bot simulation over the game protocol."""

from .client import HttpClient, InProcessClient, Reply
from .runner import (
    SIM_START_MS,
    AssertionFailed,
    ScriptStuck,
    SimReport,
    replay_check,
    run_scenario,
)
from .scenario import (
    Bot,
    Scenario,
    ScenarioError,
    bundled_game_dir,
    bundled_scenario_path,
    data_dir,
    from_doc,
    from_xml,
    load_scenario,
)

__all__ = [
    "AssertionFailed",
    "Bot",
    "HttpClient",
    "InProcessClient",
    "Reply",
    "Scenario",
    "ScenarioError",
    "ScriptStuck",
    "SimReport",
    "SIM_START_MS",
    "bundled_game_dir",
    "bundled_scenario_path",
    "data_dir",
    "from_doc",
    "from_xml",
    "load_scenario",
    "replay_check",
    "run_scenario",
]
