from __future__ import annotations

import math
import random

import pytest

from geoquest.geo import (
    EARTH_RADIUS_M,
    GeoPoint,
    Track,
    haversine_distance,
    point_at_distance,
    track_length,
    within_radius,
)

from .oracles import great_circle_vector_m

# Frozen before the main build from the vector oracle in oracles.py.
ONE_DEG_MERIDIAN_M = 111_194.92664455874
KYOTO_PAIR_M = 2_801.802299120848


def random_point(rng: random.Random) -> GeoPoint:
    return GeoPoint(rng.uniform(-90.0, 90.0), rng.uniform(-180.0, 179.999))


class TestGeoPoint:
    def test_valid_construction(self):
        p = GeoPoint(35.0301, 135.7717)
        assert p.lat_deg == 35.0301

    @pytest.mark.parametrize("lat,lon", [(91, 0), (-90.01, 0), (0, 181), (0, -180.5)])
    def test_out_of_range_rejected(self, lat, lon):
        with pytest.raises(ValueError):
            GeoPoint(lat, lon)

    @pytest.mark.parametrize("lat,lon", [(float("nan"), 0), (0, float("inf"))])
    def test_nonfinite_rejected(self, lat, lon):
        with pytest.raises(ValueError):
            GeoPoint(lat, lon)

    def test_lon_180_normalized(self):
        assert GeoPoint(0, 180.0).lon_deg == -180.0


class TestHaversine:
    def test_identical_points(self):
        p = GeoPoint(35.0, 135.7)
        assert haversine_distance(p, p) == 0.0

    def test_one_degree_meridian(self):
        d = haversine_distance(GeoPoint(0, 0), GeoPoint(1, 0))
        assert d == pytest.approx(EARTH_RADIUS_M * math.pi / 180, abs=0.01)
        assert d == pytest.approx(ONE_DEG_MERIDIAN_M, abs=0.01)

    def test_kyoto_pair_matches_oracle(self):
        d = haversine_distance(GeoPoint(35.0301, 135.7717), GeoPoint(35.0050, 135.7690))
        assert d == pytest.approx(KYOTO_PAIR_M, rel=1e-6)

    def test_matches_vector_oracle_on_random_pairs(self):
        rng = random.Random(2024)
        for _ in range(2000):
            a, b = random_point(rng), random_point(rng)
            want = great_circle_vector_m(a.lat_deg, a.lon_deg, b.lat_deg, b.lon_deg)
            got = haversine_distance(a, b)
            assert got == pytest.approx(want, rel=1e-6, abs=1e-6)

    def test_symmetry_bit_exact(self):
        rng = random.Random(99)
        for _ in range(2000):
            a, b = random_point(rng), random_point(rng)
            assert haversine_distance(a, b) == haversine_distance(b, a)

    def test_identity_on_random_points(self):
        rng = random.Random(5)
        for _ in range(500):
            a = random_point(rng)
            assert haversine_distance(a, a) == 0.0

    def test_triangle_inequality(self):
        rng = random.Random(321)
        for _ in range(2000):
            a, b, c = random_point(rng), random_point(rng), random_point(rng)
            assert haversine_distance(a, c) <= (
                haversine_distance(a, b) + haversine_distance(b, c) + 1e-6
            )


class TestWithinRadius:
    def test_zero_radius_at_center(self):
        p = GeoPoint(10, 20)
        assert within_radius(p, p, 0.0) is True

    def test_boundary_is_closed(self):
        a, b = GeoPoint(0, 0), GeoPoint(1, 0)
        assert within_radius(a, b, 111_194.0) is False
        assert within_radius(a, b, 111_195.0) is True

    def test_negative_radius_rejected(self):
        with pytest.raises(ValueError):
            within_radius(GeoPoint(0, 0), GeoPoint(0, 0), -1.0)


class TestTrack:
    def test_two_identical_points_zero_length(self):
        t = Track.from_points([GeoPoint(5, 5), GeoPoint(5, 5)])
        assert track_length(t) == 0.0

    def test_single_segment_length(self):
        t = Track.from_points([GeoPoint(0, 0), GeoPoint(1, 0)])
        assert track_length(t) == pytest.approx(ONE_DEG_MERIDIAN_M, abs=0.01)

    def test_cumulative_invariants(self):
        t = Track.from_points([GeoPoint(0, 0), GeoPoint(0.5, 0), GeoPoint(0.5, 0), GeoPoint(1, 0)])
        assert t.cumulative_m[0] == 0.0
        assert list(t.cumulative_m) == sorted(t.cumulative_m)
        assert t.cumulative_m[1] == t.cumulative_m[2]  # duplicate point, zero segment

    def test_too_few_points_rejected(self):
        with pytest.raises(ValueError):
            Track.from_points([GeoPoint(0, 0)])


class TestPointAtDistance:
    def test_endpoints(self):
        t = Track.from_points([GeoPoint(0, 0), GeoPoint(1, 0)])
        assert point_at_distance(t, 0.0) == t.points[0]
        assert point_at_distance(t, track_length(t)) == t.points[-1]

    def test_midpoint_of_meridian_segment(self):
        t = Track.from_points([GeoPoint(0, 0), GeoPoint(1, 0)])
        p = point_at_distance(t, 55_597.46)
        assert p.lat_deg == pytest.approx(0.5, abs=1e-6)
        assert p.lon_deg == pytest.approx(0.0, abs=1e-6)

    def test_out_of_range_rejected(self):
        t = Track.from_points([GeoPoint(0, 0), GeoPoint(1, 0)])
        with pytest.raises(ValueError):
            point_at_distance(t, -0.1)
        with pytest.raises(ValueError):
            point_at_distance(t, track_length(t) + 0.1)

    def test_skips_zero_length_segments(self):
        t = Track.from_points([GeoPoint(0, 0), GeoPoint(0.5, 0), GeoPoint(0.5, 0), GeoPoint(1, 0)])
        p = point_at_distance(t, t.cumulative_m[1])
        assert p.lat_deg == pytest.approx(0.5, abs=1e-9)

    def test_monotone_interpolation(self):
        rng = random.Random(77)
        pts = [GeoPoint(35.0 + i * 0.01 + rng.uniform(0, 0.002), 135.7 + rng.uniform(-0.01, 0.01)) for i in range(8)]
        t = Track.from_points(pts)
        total = track_length(t)
        for _ in range(200):
            d1, d2 = sorted((rng.uniform(0, total), rng.uniform(0, total)))
            if d2 - d1 < 1.0:
                continue
            # walk the track from d1 to d2 through every intermediate vertex
            p = point_at_distance(t, d1)
            walked = 0.0
            for i, cum in enumerate(t.cumulative_m):
                if d1 < cum < d2:
                    walked += haversine_distance(p, t.points[i])
                    p = t.points[i]
            walked += haversine_distance(p, point_at_distance(t, d2))
            assert walked == pytest.approx(d2 - d1, rel=1e-3)
