"""Plain-text ephemeris records and CSV writers for time series.

Element records:  ``id a_m e i_rad raan_rad argp_rad M0_rad epoch_s``
PV records:       ``id px py pz vx vy vz epoch_s`` (inertial, SI units)

Both forms have eight fields, so the caller states which one a file uses.
Blank lines and ``#`` comments are ignored.
"""
from __future__ import annotations

import csv
import math
from typing import Iterable, Mapping

import numpy as np

from .orbit import EARTH, Frame, OrbitalElements, PhysicalConstants, StateVector, state_to_elements

RECORD_FORMATS = ("elements", "pv")


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_records(
    text: str, fmt: str = "elements", constants: PhysicalConstants = EARTH
) -> dict[str, OrbitalElements]:
    """Parse satellite records into elements keyed by id (file order kept)."""
    if fmt not in RECORD_FORMATS:
        raise ValueError(f"record format must be one of {RECORD_FORMATS}, got {fmt!r}")
    out: dict[str, OrbitalElements] = {}
    for lineno, line in _lines(text):
        fields = line.split()
        if len(fields) != 8:
            raise ValueError(f"line {lineno}: expected 8 fields, got {len(fields)}")
        sat_id = fields[0]
        if sat_id in out:
            raise ValueError(f"line {lineno}: duplicate satellite id {sat_id!r}")
        try:
            values = [float(x) for x in fields[1:]]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        try:
            if fmt == "elements":
                a, e, i, raan, argp, m0, epoch = values
                out[sat_id] = OrbitalElements(a, e, i, raan, argp, m0, epoch)
            else:
                state = StateVector(values[0:3], values[3:6], Frame.INERTIAL, values[6])
                out[sat_id] = state_to_elements(state, constants)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return out


def format_element_records(elements: Mapping[str, OrbitalElements]) -> str:
    lines = []
    for sat_id, el in elements.items():
        vals = (el.semi_major_axis, el.eccentricity, el.inclination, el.raan,
                el.arg_perigee, el.mean_anomaly_epoch, el.epoch)
        lines.append(" ".join([str(sat_id)] + [repr(float(v)) for v in vals]))
    return "\n".join(lines) + "\n"


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _g(x: float) -> str:
    return f"{x:.12g}"


ACCESS_COLUMNS = ("t_s", "range_m", "elev_deg", "delay_s", "doppler_hz",
                  "delay_drift_s_per_s", "doppler_drift_hz_per_s")


def write_access_csv(path, series: Mapping[str, np.ndarray]) -> None:
    """``series`` as returned by ``geometry.access_time_series``."""
    cols = zip(series["t"], series["slant_range"], np.degrees(series["elevation"]),
               series["one_way_delay"], series["doppler"], series["delay_drift"],
               series["doppler_drift"])
    _write_rows(path, ACCESS_COLUMNS, ([_g(v) for v in row] for row in cols))


def write_precomp_csv(path, samples, reports) -> None:
    rows = (
        [_g(s.age), _g(s.delay_error * 1e6), _g(s.doppler_error), int(r.timing_pass), int(r.freq_pass)]
        for s, r in zip(samples, reports)
    )
    _write_rows(path, ("age_s", "delay_error_us", "doppler_error_hz", "cp_pass", "freq_pass"), rows)


def write_coverage_csv(path, grid) -> None:
    lats, lons = grid.lats, grid.lons
    rows = (
        [_g(lat), _g(lon), int(grid.counts[i, j])]
        for i, lat in enumerate(lats) for j, lon in enumerate(lons)
    )
    _write_rows(path, ("lat_deg", "lon_deg", "count"), rows)


def write_key_values(path, values: Mapping[str, object]) -> None:
    """Two-row CSV: header of keys, one row of values."""
    keys = list(values)
    _write_rows(path, keys, [[_fmt(values[k]) for k in keys]])


def write_table(path, header: Iterable[str], rows: Iterable[Iterable[object]]) -> None:
    _write_rows(path, list(header), ([_fmt(v) for v in row] for row in rows))


def _fmt(v):
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return _g(float(v)) if math.isfinite(v) else str(float(v))
    return v
