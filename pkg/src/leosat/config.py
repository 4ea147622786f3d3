"""Scenario configuration: JSON schema, defaults and resolution.

A scenario file is one JSON object. Every section is optional; missing
values fall back to ``DEFAULTS``. Unknown keys anywhere are rejected.
"""
from __future__ import annotations

import copy
import json
import math
from pathlib import Path
from typing import Any

import jsonschema

from .coverage import WalkerConfig, generate_walker
from .geometry import GeodeticPosition
from .link_budget import PROFILES, SatelliteRadioProfile, parse_profile
from .orbit import OrbitalElements, circular_orbit
from .presets import CONSTELLATIONS, RADIO_PROFILES
from .records import parse_records


class ConfigError(Exception):
    """Schema or semantic problem with a scenario configuration."""


_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}
_ELEV = {"type": "number", "minimum": -90, "maximum": 90}


def _obj(props: dict, required: tuple = ()) -> dict:
    out = {"type": "object", "properties": props, "additionalProperties": False}
    if required:
        out["required"] = list(required)
    return out


_POSITION = _obj(
    {
        "lat_deg": {"type": "number", "minimum": -90, "maximum": 90},
        "lon_deg": {"type": "number", "minimum": -360, "maximum": 360},
        "alt_m": {"type": "number", "minimum": -500},
    },
    ("lat_deg", "lon_deg"),
)

_WALKER = _obj(
    {
        "total": {"type": "integer", "minimum": 1},
        "planes": {"type": "integer", "minimum": 1},
        "phasing": {"type": "integer", "minimum": 0},
        "inclination_deg": {"type": "number", "minimum": 0, "maximum": 180},
        "altitude_m": _POS,
    },
    ("total", "planes", "inclination_deg", "altitude_m"),
)

_CUSTOM_PROFILE = _obj(
    {
        "label": {"type": "string"},
        "eirp_density": _NUM,
        "gt": _NUM,
        "tx_rx_max_gain": _NUM,
        "beamwidth_3db": _POS,
        "altitude": _POS,
        "beam_diameter_nadir": _POS,
        "aperture_diameter": _POS,
    },
    ("label", "eirp_density", "gt", "tx_rx_max_gain", "beamwidth_3db", "altitude", "beam_diameter_nadir"),
)

SCHEMA: dict[str, Any] = _obj(
    {
        "orbit": _obj(
            {
                "altitude_m": _POS,
                "inclination_deg": {"type": "number", "minimum": 0, "maximum": 180},
                "raan_deg": _NUM,
                "arg_latitude_deg": _NUM,
            }
        ),
        "constellation": _obj(
            {
                "preset": {"type": "string", "enum": sorted(CONSTELLATIONS)},
                "walker": {"type": "array", "items": _WALKER, "minItems": 1},
                "records_file": {"type": "string"},
                "records_format": {"type": "string", "enum": ["elements", "pv"]},
            }
        ),
        "ues": {"type": "array", "items": _POSITION, "minItems": 1},
        "gateways": {"type": "array", "items": _POSITION},
        "carrier": _obj({"dl_hz": _POS, "ul_hz": _POS}),
        "radio": _obj(
            {
                "profile": {"oneOf": [{"type": "string", "enum": sorted(RADIO_PROFILES)}, _CUSTOM_PROFILE]},
                "profile_file": {"type": "string"},
                "ue_gt_db": _NUM,
                "extra_losses_db": _NONNEG,
                "bandwidth_hz": _POS,
                "elevation_deg": _ELEV,
            }
        ),
        "propagate": _obj(
            {
                "duration_s": _NONNEG,
                "step_s": _POS,
                "model": {"type": "string", "enum": ["two_body", "j2"]},
                "integrator_step_s": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            }
        ),
        "access": _obj(
            {
                "start_s": _NUM,
                "duration_s": _POS,
                "min_elevation_deg": _ELEV,
                "sample_step_s": {"type": "number", "exclusiveMinimum": 0, "maximum": 10},
                "series_step_s": _POS,
            }
        ),
        "doppler": _obj(
            {
                "inclinations_deg": {
                    "type": "array",
                    "items": {"type": "number", "minimum": 0, "maximum": 180},
                    "minItems": 1,
                },
                "sample_step_s": _POS,
            }
        ),
        "precomp": _obj(
            {
                "ages_s": {"type": "array", "items": _NONNEG, "minItems": 1},
                "grid_deg": _POS,
                "min_elevation_deg": _ELEV,
                "integrator_step_s": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "cyclic_prefix_us": _POS,
                "ul_freq_tolerance_ppm": _POS,
            }
        ),
        "mobility": _obj(
            {
                "mode": {"type": "string", "enum": ["idle", "connected"]},
                "start_s": _NUM,
                "duration_s": _NONNEG,
                "cell_kind": {"type": "string", "enum": ["earth_moving", "quasi_earth_fixed"]},
                "beam_diameter_m": _POS,
                "elevation_mask_deg": _ELEV,
                "tracking_area": {"type": "string", "enum": ["earth_fixed", "satellite_attached"]},
                "tracking_area_size_deg": _POS,
                "cho_condition": {
                    "type": "string",
                    "enum": ["elevation_threshold", "time_window", "location_distance"],
                },
                "cho_threshold": _NUM,
                "step_s": _POS,
                "refine_s": _POS,
            }
        ),
        "coverage": _obj(
            {
                "t_s": _NUM,
                "lat_step_deg": _POS,
                "lon_step_deg": _POS,
                "min_elevation_deg": _ELEV,
            }
        ),
    }
)

DEFAULTS: dict[str, Any] = {
    "orbit": {"altitude_m": 600e3, "inclination_deg": 53.0, "raan_deg": 0.0, "arg_latitude_deg": 0.0},
    "ues": [{"lat_deg": 0.0, "lon_deg": 0.0, "alt_m": 0.0}],
    "gateways": [],
    "carrier": {"dl_hz": 2e9, "ul_hz": 2e9},
    "radio": {
        "profile": "leo600-handheld",
        "ue_gt_db": -31.6,
        "extra_losses_db": 0.0,
        "bandwidth_hz": 15e6,
        "elevation_deg": 90.0,
    },
    "propagate": {"duration_s": 5792.0, "step_s": 60.0, "model": "two_body", "integrator_step_s": 1.0},
    "access": {
        "start_s": 0.0,
        "duration_s": 86400.0,
        "min_elevation_deg": 10.0,
        "sample_step_s": 5.0,
        "series_step_s": 1.0,
    },
    "doppler": {"inclinations_deg": [float(x) for x in range(0, 181, 10)], "sample_step_s": 0.5},
    "precomp": {
        "ages_s": [0.0, 10.0, 20.0, 30.0, 60.0, 90.0, 120.0, 180.0, 240.0, 300.0],
        "grid_deg": 1.0,
        "min_elevation_deg": 5.0,
        "integrator_step_s": 1.0,
        "cyclic_prefix_us": 4.7,
        "ul_freq_tolerance_ppm": 0.1,
    },
    "mobility": {
        "mode": "idle",
        "start_s": 0.0,
        "duration_s": 3600.0,
        "cell_kind": "earth_moving",
        "elevation_mask_deg": 30.0,
        "tracking_area": "earth_fixed",
        "tracking_area_size_deg": 5.0,
        "cho_condition": "time_window",
        "step_s": 0.1,
        "refine_s": 0.01,
    },
    "coverage": {"t_s": 0.0, "lat_step_deg": 1.0, "min_elevation_deg": 10.0},
}

# default CHO thresholds per condition, in config units (deg, s, m)
CHO_DEFAULT_THRESHOLD = {"elevation_threshold": 60.0, "time_window": 2.0, "location_distance": 20e3}


def validate(raw: Any) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        msgs = []
        for err in errors:
            where = "/".join(str(p) for p in err.absolute_path) or "<root>"
            msgs.append(f"{where}: {err.message}")
        raise ConfigError("schema error: " + "; ".join(msgs))


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in over.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(path: str | Path | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    validate(raw)
    return raw


def resolve(raw: dict, base_dir: str | Path = ".") -> dict:
    """Validated config merged over the defaults (JSON-serializable)."""
    validate(raw)
    cfg = _merge(DEFAULTS, raw)
    cons = cfg.get("constellation")
    if cons is not None:
        sources = [k for k in ("preset", "walker", "records_file") if k in cons]
        if len(sources) != 1:
            raise ConfigError("constellation needs exactly one of preset, walker or records_file")
        if "records_file" in cons:
            cons["records_file"] = str((Path(base_dir) / cons["records_file"]).resolve())
            cons.setdefault("records_format", "elements")
        elif "records_format" in cons:
            raise ConfigError("records_format only applies to records_file")
        for shell in cons.get("walker", []):
            shell.setdefault("phasing", 0)
    radio = cfg["radio"]
    if "profile_file" in radio:
        if "profile" in raw.get("radio", {}):
            raise ConfigError("radio: give either profile or profile_file, not both")
        radio["profile_file"] = str((Path(base_dir) / radio["profile_file"]).resolve())
        radio.pop("profile")
    mob = cfg["mobility"]
    mob.setdefault("cho_threshold", CHO_DEFAULT_THRESHOLD[mob["cho_condition"]])
    if not mob["refine_s"] <= mob["step_s"]:
        raise ConfigError("mobility: refine_s must not exceed step_s")
    cov = cfg["coverage"]
    cov.setdefault("lon_step_deg", cov["lat_step_deg"])
    return cfg


# --- builders from a resolved config -----------------------------------------

def build_constellation(cfg: dict) -> tuple[list[OrbitalElements], list[str]]:
    """Elements and satellite ids; a single circular orbit when no
    constellation section is given."""
    cons = cfg.get("constellation")
    if cons is None:
        orb = cfg["orbit"]
        el = circular_orbit(
            orb["altitude_m"], math.radians(orb["inclination_deg"]),
            math.radians(orb["raan_deg"]), math.radians(orb["arg_latitude_deg"]),
        )
        return [el], ["0"]
    if "preset" in cons:
        elements = CONSTELLATIONS[cons["preset"]].elements()
    elif "walker" in cons:
        elements = []
        for shell in cons["walker"]:
            try:
                wc = WalkerConfig(
                    shell["total"], shell["planes"], shell["phasing"],
                    math.radians(shell["inclination_deg"]), shell["altitude_m"],
                )
            except ValueError as exc:
                raise ConfigError(f"constellation/walker: {exc}") from None
            elements.extend(generate_walker(wc))
    else:
        try:
            text = Path(cons["records_file"]).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read records file: {exc}") from None
        try:
            recs = parse_records(text, cons["records_format"])
        except ValueError as exc:
            raise ConfigError(f"records file: {exc}") from None
        if not recs:
            raise ConfigError("records file holds no satellites")
        return list(recs.values()), list(recs)
    return elements, [str(i) for i in range(len(elements))]


def build_positions(items: list[dict]) -> list[GeodeticPosition]:
    return [GeodeticPosition.from_degrees(p["lat_deg"], p["lon_deg"], p.get("alt_m", 0.0)) for p in items]


def build_profile(cfg: dict) -> SatelliteRadioProfile:
    radio = cfg["radio"]
    try:
        if "profile_file" in radio:
            return parse_profile(Path(radio["profile_file"]).read_text())
        prof = radio["profile"]
        if isinstance(prof, str):
            return PROFILES[prof]
        return SatelliteRadioProfile(**prof)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"radio profile: {exc}") from None
