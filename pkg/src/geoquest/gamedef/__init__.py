"""Game definitions: a four-file XML suite, checked before it ever runs."""

from .builder import DefinitionInvalid, build_world, load_world
from .model import (
    ALL_CODES,
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
)
from .parser import SUITE_FILES, load_dir, parse_suite
from .validator import validate

__all__ = [
    "ALL_CODES",
    "DefinitionInvalid",
    "E_BAD_COORD",
    "E_BAD_RADIUS",
    "E_DANGLING_REF",
    "E_DUP_ID",
    "E_EMPTY_SOLUTION",
    "E_FRAGMENT_GAP",
    "E_UNREACHABLE_NODE",
    "E_ZERO_COUNT",
    "GameDefinition",
    "IntegrityError",
    "SUITE_FILES",
    "build_world",
    "load_dir",
    "load_world",
    "parse_suite",
    "validate",
]
