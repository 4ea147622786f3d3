import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leosat.coverage import (
    WalkerConfig,
    constellation_positions,
    coverage_counts,
    coverage_map,
    generate_walker,
    grid_points,
    max_covered_latitude,
    satellites_in_view,
)
from leosat.geometry import GeodeticPosition, elevation_arrays
from leosat.orbit import circular_orbit

R = 6.371e6
MASK = math.radians(10.0)


def test_walker_validation():
    for args in ((0, 1, 0, 1.0, 6e5), (10, 3, 0, 1.0, 6e5), (12, 3, 3, 1.0, 6e5),
                 (12, 3, 0, 4.0, 6e5), (12, 3, 0, 1.0, 0.0)):
        with pytest.raises(ValueError):
            WalkerConfig(*args)


def test_walker_plane_layout():
    cfg = WalkerConfig(24, 6, 1, math.radians(53.0), 600e3)
    els = generate_walker(cfg)
    assert len(els) == 24 and cfg.sats_per_plane == 4
    raans = sorted({round(e.raan, 9) for e in els})
    assert len(raans) == 6
    assert np.allclose(np.diff(raans), 2 * math.pi / 6)
    # in-plane spacing and inter-plane phase offset 2 pi F / T
    first, second, next_plane = els[0], els[1], els[4]
    assert second.mean_anomaly_epoch - first.mean_anomaly_epoch == pytest.approx(2 * math.pi / 4)
    assert next_plane.mean_anomaly_epoch - first.mean_anomaly_epoch == pytest.approx(2 * math.pi / 24)


def test_empty_constellation_zero():
    grid = coverage_map([], lat_step=10.0)
    assert grid.counts.sum() == 0
    assert grid.covered_fraction() == 0.0
    assert constellation_positions([], 0.0).shape == (0, 3)


def test_single_zenith_satellite():
    pos = np.array([[R + 600e3, 0.0, 0.0]])
    assert satellites_in_view(GeodeticPosition(0.0, 0.0), pos, MASK) == 1
    assert satellites_in_view(GeodeticPosition(0.0, math.pi), pos, MASK) == 0
    assert satellites_in_view(GeodeticPosition(0.0, 0.0), pos, math.pi / 2) == 1


@settings(max_examples=50, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-math.pi, math.pi), st.floats(0.0, 1.2))
def test_counts_match_elevation(lat, lon, mask):
    els = generate_walker(WalkerConfig(60, 6, 1, math.radians(60.0), 800e3))
    sats = constellation_positions(els, 0.0)
    ue = GeodeticPosition(lat, lon).ecef()
    expect = int(np.sum(elevation_arrays(sats, ue) >= mask))
    assert satellites_in_view(ue, sats, mask) == expect


def test_grid_shape_and_axes():
    pts, shape = grid_points(10.0, 20.0)
    assert shape == (19, 18)
    grid = coverage_map([], lat_step=10.0, lon_step=20.0)
    assert grid.lats[0] == -90.0 and grid.lats[-1] == 90.0
    assert grid.lons[0] == -180.0 and grid.lons[-1] == 160.0


def test_longitude_rotation_symmetry():
    cfg = WalkerConfig(40, 8, 1, math.radians(53.0), 600e3)
    els = generate_walker(cfg)
    base = coverage_map(els, lat_step=2.0).counts
    shift = 10.0
    rotated = [circular_orbit(600e3, e.inclination, e.raan + math.radians(shift), e.mean_anomaly_epoch)
               for e in els]
    moved = coverage_map(rotated, lat_step=2.0).counts
    assert np.array_equal(np.roll(base, int(shift / 2.0), axis=1), moved)


def test_double_counting_identity():
    a = generate_walker(WalkerConfig(20, 4, 1, math.radians(53.0), 600e3))
    b = generate_walker(WalkerConfig(18, 3, 1, math.radians(70.0), 1000e3))
    ca = coverage_map(a, lat_step=3.0).counts
    cb = coverage_map(b, lat_step=3.0).counts
    assert np.array_equal(coverage_map(a + b, lat_step=3.0).counts, ca + cb)


def test_latitude_bound():
    incl, alt = math.radians(53.0), 600e3
    els = generate_walker(WalkerConfig(600, 24, 1, incl, alt))
    grid = coverage_map(els, lat_step=1.0, min_elevation=MASK)
    limit = math.degrees(max_covered_latitude(incl, alt, MASK))
    assert np.all(grid.counts[np.abs(grid.lats) > limit + 1e-9] == 0)
    assert max_covered_latitude(math.radians(90.0), alt, MASK) == pytest.approx(math.pi / 2)
    assert max_covered_latitude(math.pi - incl, alt, MASK) == pytest.approx(
        max_covered_latitude(incl, alt, MASK))


def test_mask_monotonicity():
    els = generate_walker(WalkerConfig(48, 8, 1, math.radians(52.0), 1440e3))
    sats = constellation_positions(els, 100.0)
    prev = None
    for mask_deg in (0, 10, 25, 40, 60):
        c = coverage_counts(sats, 5.0, 5.0, math.radians(mask_deg))
        if prev is not None:
            assert np.all(c <= prev)
        prev = c


def test_thread_count_does_not_change_result():
    els = generate_walker(WalkerConfig(66, 6, 2, math.radians(86.4), 780e3))
    a = coverage_map(els, lat_step=1.0, threads=1).counts
    b = coverage_map(els, lat_step=1.0, threads=4).counts
    assert np.array_equal(a, b)


def test_covered_fraction_weighting():
    grid = coverage_map([], lat_step=10.0)
    ones = type(grid)(10.0, 10.0, MASK, np.ones_like(grid.counts), 0.0)
    assert ones.covered_fraction() == 1.0
    half = np.zeros_like(grid.counts)
    half[grid.lats >= 0] = 1
    g = type(grid)(10.0, 10.0, MASK, half, 0.0)
    assert 0.5 < g.covered_fraction() < 0.6
    assert g.covered_fraction(min_count=2) == 0.0
    s = g.summary()
    assert s["max_count"] == 1 and s["min_count"] == 0
