"""Geodesy primitives shared by the tracker, the game engine, and the simulator.

Distances are great-circle distances on a sphere of radius 6 371 000 m,
which is plenty at quest scale (tens of km). Interpolation along tracks is
linear in coordinate space; the error against the true geodesic is
negligible for segments well under 100 km.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

EARTH_RADIUS_M = 6_371_000.0


@dataclass(frozen=True)
class GeoPoint:
    """A WGS84 coordinate in decimal degrees.

    Latitude must lie in [-90, 90]. Longitude must lie in [-180, 180];
    +180 is stored as -180 so the stored range is [-180, 180).
    """

    lat_deg: float
    lon_deg: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lat_deg) and math.isfinite(self.lon_deg)):
            raise ValueError("coordinates must be finite")
        if not -90.0 <= self.lat_deg <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat_deg}")
        if not -180.0 <= self.lon_deg <= 180.0:
            raise ValueError(f"longitude out of range: {self.lon_deg}")
        if self.lon_deg == 180.0:
            object.__setattr__(self, "lon_deg", -180.0)


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance between two points, in meters.

    The deltas are taken through abs() so the formula evaluates on
    bit-identical inputs in either argument order, making the result
    exactly symmetric.
    """
    phi1 = math.radians(a.lat_deg)
    phi2 = math.radians(b.lat_deg)
    d_phi = abs(math.radians(b.lat_deg - a.lat_deg))
    d_lam = abs(math.radians(b.lon_deg - a.lon_deg))
    h = math.sin(d_phi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(d_lam / 2.0) ** 2
    return EARTH_RADIUS_M * 2.0 * math.atan2(math.sqrt(h), math.sqrt(1.0 - h))


def within_radius(center: GeoPoint, p: GeoPoint, radius_m: float) -> bool:
    """Whether p lies inside the closed ball of radius_m around center."""
    if radius_m < 0:
        raise ValueError("radius must be nonnegative")
    return haversine_distance(center, p) <= radius_m


@dataclass(frozen=True)
class Track:
    """An ordered polyline of at least two points with cumulative lengths.

    cumulative_m[i] is the great-circle length in meters of the polyline up
    to vertex i; it starts at 0 and is nondecreasing (consecutive duplicate
    points contribute zero-length segments).
    """

    points: tuple[GeoPoint, ...]
    cumulative_m: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise ValueError("a track needs at least two points")
        if not self.cumulative_m:
            cum = [0.0]
            for prev, nxt in zip(self.points, self.points[1:]):
                cum.append(cum[-1] + haversine_distance(prev, nxt))
            object.__setattr__(self, "cumulative_m", tuple(cum))
        if len(self.cumulative_m) != len(self.points):
            raise ValueError("cumulative_m length must match points")
        if self.cumulative_m[0] != 0.0:
            raise ValueError("cumulative_m must start at 0")
        if any(b < a for a, b in zip(self.cumulative_m, self.cumulative_m[1:])):
            raise ValueError("cumulative_m must be nondecreasing")

    @classmethod
    def from_points(cls, points: list[GeoPoint] | tuple[GeoPoint, ...]) -> "Track":
        return cls(points=tuple(points))


def track_length(t: Track) -> float:
    """Total polyline length in meters."""
    return t.cumulative_m[-1]


def point_at_distance(t: Track, d: float) -> GeoPoint:
    """The point at cumulative distance d along the track.

    Linear interpolation in lat/lon inside the containing segment; d = 0
    gives the first vertex and d = track_length(t) the last.
    """
    total = track_length(t)
    if not 0.0 <= d <= total:
        raise ValueError(f"distance {d} outside [0, {total}]")
    if d == 0.0:
        return t.points[0]
    if d == total:
        return t.points[-1]
    i = bisect_right(t.cumulative_m, d) - 1
    seg_len = t.cumulative_m[i + 1] - t.cumulative_m[i]
    frac = (d - t.cumulative_m[i]) / seg_len
    a, b = t.points[i], t.points[i + 1]
    return GeoPoint(
        lat_deg=a.lat_deg + frac * (b.lat_deg - a.lat_deg),
        lon_deg=a.lon_deg + frac * (b.lon_deg - a.lon_deg),
    )
