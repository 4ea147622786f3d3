import json
import math

import pytest

from leosat.config import (
    DEFAULTS,
    ConfigError,
    build_constellation,
    build_positions,
    build_profile,
    load_config,
    resolve,
    validate,
)
from leosat.link_budget import PROFILES, format_profile
from leosat.orbit import OrbitalElements, circular_orbit, kepler_to_state
from leosat.presets import CONSTELLATIONS, PRESET_NAMES, constellation_preset
from leosat.records import format_element_records, parse_records


def test_element_records_round_trip():
    els = {"a1": circular_orbit(600e3, 0.9, 0.1, 0.2), "b2": OrbitalElements(7.1e6, 0.01, 1.0, 2.0, 3.0, 4.0, 5.0)}
    assert parse_records(format_element_records(els)) == els


def test_pv_records_convert():
    el = circular_orbit(700e3, 1.1, 0.3, 0.4, epoch=10.0)
    s = kepler_to_state(el, 10.0)
    line = "s1 " + " ".join(repr(float(x)) for x in (*s.position, *s.velocity, 10.0))
    got = parse_records(line, "pv")["s1"]
    assert got.epoch == 10.0
    assert got.semi_major_axis == pytest.approx(el.semi_major_axis, rel=1e-9)


@pytest.mark.parametrize(
    "text, match",
    [
        ("x 7e6 0 1 0 0 0\n", "expected 8 fields"),
        ("x 7e6 0 1 0 0 0 0\nx 7e6 0 1 0 0 0 0\n", "duplicate"),
        ("x 7e6 0 1 0 zero 0 0\n", "line 1"),
        ("# c\n\nx 5e6 0 1 0 0 0 0\n", "line 3"),
    ],
)
def test_record_errors(text, match):
    with pytest.raises(ValueError, match=match):
        parse_records(text)
    with pytest.raises(ValueError):
        parse_records("", "tle")


def test_presets():
    assert set(CONSTELLATIONS) <= set(PRESET_NAMES)
    iridium = constellation_preset("iridium-gen1")
    assert iridium.total_satellites == 66 == len(iridium.elements())
    for p in CONSTELLATIONS.values():
        assert p.total_satellites == len(p.elements())
    with pytest.raises(KeyError):
        constellation_preset("nope")


def test_defaults_resolve():
    cfg = resolve({})
    assert cfg["orbit"]["altitude_m"] == DEFAULTS["orbit"]["altitude_m"]
    assert cfg["mobility"]["cho_threshold"] == 2.0
    assert cfg["coverage"]["lon_step_deg"] == cfg["coverage"]["lat_step_deg"]
    els, ids = build_constellation(cfg)
    assert len(els) == 1 and ids == ["0"]
    assert build_profile(cfg) is PROFILES["leo600-handheld"]


@pytest.mark.parametrize(
    "raw",
    [
        {"bogus": 1},
        {"ues": []},
        {"orbit": {"altitude_m": -5}},
        {"ues": [{"lat_deg": 95, "lon_deg": 0}]},
        {"mobility": {"mode": "sleepy"}},
        {"radio": {"profile": "no-such-profile"}},
        [],
    ],
)
def test_schema_rejects(raw):
    with pytest.raises(ConfigError):
        validate(raw)


def test_semantic_errors(tmp_path):
    with pytest.raises(ConfigError):
        resolve({"constellation": {"preset": "kuiper", "walker": [
            {"total": 6, "planes": 2, "inclination_deg": 50, "altitude_m": 6e5}]}})
    with pytest.raises(ConfigError):
        resolve({"mobility": {"step_s": 0.1, "refine_s": 0.5}})
    bad = resolve({"constellation": {"walker": [{"total": 7, "planes": 2, "inclination_deg": 50, "altitude_m": 6e5}]}})
    with pytest.raises(ConfigError):
        build_constellation(bad)
    missing = resolve({"constellation": {"records_file": "nope.txt"}}, tmp_path)
    with pytest.raises(ConfigError):
        build_constellation(missing)


def test_records_file_and_profile_file(tmp_path):
    els = {"7": circular_orbit(600e3, 1.0), "9": circular_orbit(600e3, 1.0, 1.0)}
    (tmp_path / "sats.txt").write_text(format_element_records(els))
    (tmp_path / "radio.txt").write_text(format_profile(PROFILES["leo600-iot"]))
    cfg = resolve({"constellation": {"records_file": "sats.txt"}, "radio": {"profile_file": "radio.txt"}}, tmp_path)
    got, ids = build_constellation(cfg)
    assert ids == ["7", "9"] and got == list(els.values())
    assert build_profile(cfg) == PROFILES["leo600-iot"]
    # the resolved config stays valid input
    validate(cfg)


def test_load_config_errors(tmp_path):
    assert load_config(None) == {}
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(p)


def test_scenarios_validate():
    from pathlib import Path
    root = Path(__file__).resolve().parent.parent / "scenarios"
    files = sorted(root.glob("*.json"))
    assert files
    for f in files:
        cfg = resolve(load_config(f), f.parent)
        assert build_constellation(cfg)[0]
        assert build_positions(cfg["ues"])


def test_positions_in_degrees():
    (p,) = build_positions([{"lat_deg": 45.0, "lon_deg": -90.0}])
    assert p.lat == pytest.approx(math.pi / 4) and p.lon == pytest.approx(-math.pi / 2)
    assert json.loads(json.dumps(resolve({})))  # serializable
