"""Domain errors raised by the tracker, the engine, and the service layer.

Each error carries a stable machine-readable code; the HTTP layer maps
codes to status values, and the simulator matches on them in scripted
expectations.
"""

from __future__ import annotations

from typing import Any


class GameError(Exception):
    code = "GAME_ERROR"

    def __init__(self, message: str = "", **details: Any) -> None:
        super().__init__(message or self.code)
        self.message = message or self.code
        self.details = details


# tracker

class DuplicateEntity(GameError):
    code = "DUPLICATE_ENTITY"


class UnknownEntity(GameError):
    code = "UNKNOWN_ENTITY"


class ConsentRequired(GameError):
    code = "CONSENT_REQUIRED"


class StaleTimestamp(GameError):
    code = "STALE_TIMESTAMP"


# engine

class DuplicatePlayer(GameError):
    code = "DUPLICATE_PLAYER"


class UnknownPlayer(GameError):
    code = "UNKNOWN_PLAYER"


class UnknownNpc(GameError):
    code = "UNKNOWN_NPC"


class UnknownQuest(GameError):
    code = "UNKNOWN_QUEST"


class UnknownItem(GameError):
    code = "UNKNOWN_ITEM"


class OutOfRange(GameError):
    code = "OUT_OF_RANGE"


class StaleFix(GameError):
    code = "STALE_FIX"


class WrongNode(GameError):
    code = "WRONG_NODE"


class BadChoice(GameError):
    code = "BAD_CHOICE"


class NoFragmentsLeft(GameError):
    code = "NO_FRAGMENTS_LEFT"


class QuestAlreadyCompleted(GameError):
    code = "QUEST_ALREADY_COMPLETED"


class NotOffered(GameError):
    code = "NOT_OFFERED"


class AlreadyActive(GameError):
    code = "ALREADY_ACTIVE"


class AlreadyCompleted(GameError):
    code = "ALREADY_COMPLETED"


class NotInWorld(GameError):
    code = "NOT_IN_WORLD"


class NotHeld(GameError):
    code = "NOT_HELD"


class QuestInactive(GameError):
    code = "QUEST_INACTIVE"


# game definition files

class ParseError(GameError):
    """The XML could not even be read as a game definition.

    Distinct from integrity errors: a file that parses but describes a
    broken game is reported by the validator, not raised here.
    """

    code = "PARSE_ERROR"

    def __init__(self, message: str, file: str = "?", line: int = 0, col: int = 0) -> None:
        super().__init__(f"{file}:{line}:{col}: {message}")
        self.file = file
        self.line = line
        self.col = col


# http layer

class MalformedRequest(GameError):
    code = "MALFORMED"


class NotInGroup(GameError):
    code = "NOT_IN_GROUP"


# service / persistence

class StorageFailure(GameError):
    code = "STORAGE_FAILURE"


class JournalGap(GameError):
    code = "JOURNAL_GAP"


class DigestMismatch(GameError):
    code = "DIGEST_MISMATCH"


class BadSession(GameError):
    code = "BAD_SESSION"
