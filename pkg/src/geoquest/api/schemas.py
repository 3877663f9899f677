"""Request and response bodies for the HTTP interface."""

from __future__ import annotations

from pydantic import BaseModel, Field

PLAYER_ID_PATTERN = r"^[A-Za-z0-9_.\-]{1,64}$"


class LocationIn(BaseModel):
    """A location report. consent is explicit on every single report."""

    lat: float
    lon: float
    timestamp_ms: int
    consent: bool

    def as_doc(self) -> dict:
        return {
            "lat": self.lat,
            "lon": self.lon,
            "timestamp_ms": self.timestamp_ms,
            "consent": self.consent,
        }


class PointIn(BaseModel):
    lat: float
    lon: float


class SessionIn(BaseModel):
    player_id: str = Field(pattern=PLAYER_ID_PATTERN)
    display_name: str = Field(min_length=1, max_length=128)


class SessionOut(BaseModel):
    token: str
    player_id: str
    display_name: str


class TrackUpdateIn(BaseModel):
    location: LocationIn


class ChooseIn(BaseModel):
    node: str = Field(min_length=1)
    choice: int
    location: LocationIn | None = None


class CollectIn(BaseModel):
    location: LocationIn


class DropIn(BaseModel):
    location: LocationIn
    at: PointIn


class GiveIn(BaseModel):
    to: str = Field(pattern=PLAYER_ID_PATTERN)


class RebusAnswerIn(BaseModel):
    phrase: str
    participants: list[str] = Field(max_length=64)
