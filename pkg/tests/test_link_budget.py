import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leosat.geometry import AccessGeometry
from leosat.link_budget import (
    BOLTZMANN_DBW,
    PROFILES,
    AntennaModel,
    SatelliteRadioProfile,
    beam_diameter_at_nadir,
    beamwidth_from_aperture,
    downlink_c_n0,
    format_profile,
    fspl,
    gain_from_aperture,
    parse_profile,
    profile_from_aperture,
    shannon_capacity,
)


def _geom(distance, freq=2e9):
    return AccessGeometry(distance, 1.0, 0.0, 0.0, 0.0, distance / 3e8, 0.0, 0.0, 0.0, freq)


def test_fspl_reference_value():
    assert fspl(1.0, 2.4e9) == pytest.approx(40.05, abs=0.01)
    assert fspl(600e3, 2e9) == pytest.approx(154.03, abs=0.01)


@settings(max_examples=50, deadline=None)
@given(st.floats(1.0, 1e7), st.floats(1e8, 5e10))
def test_fspl_distance_doubling(d, f):
    assert fspl(2 * d, f) - fspl(d, f) == pytest.approx(20 * math.log10(2), abs=1e-9)
    assert fspl(2 * d, f) - fspl(d, f) == pytest.approx(6.02, abs=0.005)


def test_fspl_validation():
    with pytest.raises(ValueError):
        fspl(1000.0, 0.0)
    with pytest.raises(ValueError):
        fspl(1e-4, 2e9)


def test_gain_formula_and_handheld_aperture():
    ant = AntennaModel(2.0, 0.6, 2e9)
    x = math.pi * 2.0 * 2e9 / 2.99792458e8
    assert gain_from_aperture(ant) == pytest.approx(10 * math.log10(0.6 * x * x))
    assert gain_from_aperture(ant) == pytest.approx(30.0, abs=0.5)
    assert beamwidth_from_aperture(ant) == pytest.approx(4.4, abs=0.05)
    iot = AntennaModel(0.4)
    assert beamwidth_from_aperture(iot) == pytest.approx(22.1, abs=0.05)


def test_gain_grows_20db_per_decade():
    g1 = gain_from_aperture(AntennaModel(0.5))
    g2 = gain_from_aperture(AntennaModel(5.0))
    assert g2 - g1 == pytest.approx(20.0)


def test_antenna_validation():
    for kwargs in (dict(aperture_diameter=0.0), dict(aperture_diameter=1.0, efficiency=0.0),
                   dict(aperture_diameter=1.0, efficiency=1.5), dict(aperture_diameter=1.0, carrier_freq=-1)):
        with pytest.raises(ValueError):
            AntennaModel(**kwargs)


def test_builtin_profiles_consistent():
    for p in PROFILES.values():
        assert abs(beam_diameter_at_nadir(p.altitude, p.beamwidth_3db) - p.beam_diameter_nadir) <= 1e3
    assert PROFILES["leo600-handheld"].beam_diameter_nadir == 46e3
    assert PROFILES["leo600-iot"].beam_diameter_nadir == 234e3


def test_profile_inconsistent_beam_rejected():
    with pytest.raises(ValueError):
        SatelliteRadioProfile("x", 30.0, 0.0, 30.0, 4.4, 600e3, 60e3)
    with pytest.raises(ValueError):
        SatelliteRadioProfile("x", float("nan"), 0.0, 30.0, 4.4, 600e3, 46e3)


def test_profile_from_aperture_matches_builtin():
    p = profile_from_aperture("hh", 2.0, 34.0, 1.1)
    ref = PROFILES["leo600-handheld"]
    assert p.beamwidth_3db == pytest.approx(ref.beamwidth_3db, abs=0.05)
    assert p.beam_diameter_nadir == pytest.approx(ref.beam_diameter_nadir, abs=1e3)


def test_profile_round_trip():
    for p in PROFILES.values():
        assert parse_profile(format_profile(p)) == p


def test_parse_profile_errors():
    with pytest.raises(ValueError):
        parse_profile("label = a\nbogus = 1\n")
    with pytest.raises(ValueError):
        parse_profile("label = a\neirp_density = 1\n")
    text = format_profile(PROFILES["leo600-iot"]) + "# comment only\n\n"
    assert parse_profile(text) == PROFILES["leo600-iot"]


def test_iot_vs_handheld_same_geometry():
    g = _geom(800e3)
    iot = downlink_c_n0(PROFILES["leo600-iot"], g)
    hh = downlink_c_n0(PROFILES["leo600-handheld"], g)
    assert hh.c_n0 - iot.c_n0 == pytest.approx(5.7, abs=1e-9)


def test_zero_loss_identity():
    p = PROFILES["leo600-handheld"]
    r = downlink_c_n0(p, None, ue_gt=0.0, path_loss=0.0)
    assert r.c_n0 == pytest.approx(p.eirp_density - BOLTZMANN_DBW)
    assert r.snr is None and r.capacity_estimate is None


def test_extra_losses_subtract():
    p = PROFILES["leo600-iot"]
    g = _geom(1000e3)
    assert downlink_c_n0(p, g, extra_losses=3.0).c_n0 == pytest.approx(downlink_c_n0(p, g).c_n0 - 3.0)


def test_handheld_zenith_budget():
    r = downlink_c_n0(PROFILES["leo600-handheld"], _geom(600e3), bandwidth=15e6)
    assert r.fspl == pytest.approx(154.03, abs=0.01)
    assert r.c_n0 == pytest.approx(88.73, abs=0.01)
    assert r.snr == pytest.approx(r.c_n0 - 10 * math.log10(15e6))
    assert r.capacity_estimate == pytest.approx(shannon_capacity(15e6, r.snr))


def test_capacity_monotone_in_distance():
    p = PROFILES["leo600-handheld"]
    caps = [downlink_c_n0(p, _geom(d), bandwidth=10e6).capacity_estimate for d in (600e3, 1000e3, 2000e3, 2800e3)]
    assert all(b < a for a, b in zip(caps, caps[1:]))


def test_c_n0_requires_geometry_or_loss():
    with pytest.raises(ValueError):
        downlink_c_n0(PROFILES["leo600-iot"], None)
    with pytest.raises(ValueError):
        downlink_c_n0(PROFILES["leo600-iot"], _geom(1e6), bandwidth=0.0)
