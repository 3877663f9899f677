"""Canonical phrase comparison for puzzle answers."""

from __future__ import annotations

import unicodedata


def normalize_phrase(s: str) -> str:
    """Canonicalize text for answer matching.

    NFC-normalize, lowercase, drop punctuation outright (no space inserted,
    so "RE-BUS" becomes "rebus"), collapse whitespace runs to single spaces,
    and trim.
    """
    s = unicodedata.normalize("NFC", s).lower()
    s = "".join(c for c in s if not unicodedata.category(c).startswith("P"))
    return " ".join(s.split())
