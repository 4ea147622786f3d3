"""Command-line front end.

Every subcommand reads an optional JSON scenario, applies flag overrides,
computes its results, then writes CSV files plus ``manifest.json`` into
``--out``. Files are staged in a scratch directory and moved into place
only after the whole computation succeeded.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import shutil
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    ConfigError,
    build_constellation,
    build_positions,
    build_profile,
    load_config,
    resolve,
)
from .coverage import coverage_map
from .geometry import (
    access_arrays,
    access_time_series,
    earth_fixed_pv,
    find_passes,
    max_doppler_ratio,
    overhead_doppler_sweep,
    slant_range_at_elevation,
    worst_case_path_drift,
)
from .link_budget import (
    AntennaModel,
    beam_diameter_at_nadir,
    beamwidth_from_aperture,
    downlink_c_n0,
    fspl,
    gain_from_aperture,
)
from .mobility import (
    CellPattern,
    ChoCondition,
    StepConfig,
    TrackingAreaConfig,
    simulate_connected_cho,
    simulate_idle,
    write_event_log,
    write_summary,
)
from .orbit import (
    EphemerisRecord,
    inertial_to_earth_fixed,
    kepler_pv,
    kepler_to_state,
    propagate_j2_series,
)
from .precomp import ComplianceThresholds, check_compliance, prediction_error_curve, ue_grid
from .presets import CONSTELLATIONS, RADIO_PROFILES
from .records import (
    write_access_csv,
    write_coverage_csv,
    write_key_values,
    write_precomp_csv,
    write_table,
)

SUBCOMMANDS = ("propagate", "access", "doppler", "linkbudget", "precomp-error", "mobility", "coverage")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON scenario file")
    p.add_argument("--out", default="out", help="output directory (default: ./out)")
    p.add_argument("--preset", help="constellation or radio-profile preset name")
    p.add_argument("--seed", type=int, default=0, help="reserved; all paths are deterministic")
    p.add_argument("--threads", type=int, default=1, help="worker threads for grid work")
    p.add_argument("--alt", type=float, help="single-orbit altitude override (m)")
    p.add_argument("--freq", type=float, help="carrier frequency override for DL and UL (Hz)")
    p.add_argument("--profile", help="radio profile preset name or key=value profile file")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(prog="leosat", description="LEO direct-access link and mobility scenarios")
    parser.add_argument("--version", action="version", version=f"leosat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "propagate": "inertial ephemeris time series",
        "access": "pass prediction and per-pass geometry CSV",
        "doppler": "Doppler and drift extremes over zenith passes",
        "linkbudget": "radio profile chain, C/N0 and capacity",
        "precomp-error": "pre-compensation error versus ephemeris age",
        "mobility": "idle/connected mobility event logs",
        "coverage": "satellites-in-view map",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], description=helps[name])
    return parser


def apply_overrides(raw: dict, args) -> dict:
    raw = json.loads(json.dumps(raw))
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    if args.preset is not None:
        if args.preset in CONSTELLATIONS:
            raw["constellation"] = {"preset": args.preset}
        elif args.preset in RADIO_PROFILES:
            raw.setdefault("radio", {}).pop("profile_file", None)
            raw["radio"]["profile"] = args.preset
        else:
            names = ", ".join(list(CONSTELLATIONS) + list(RADIO_PROFILES))
            raise ConfigError(f"unknown preset {args.preset!r}; choose from {names}")
    if args.profile is not None:
        radio = raw.setdefault("radio", {})
        if args.profile in RADIO_PROFILES:
            radio.pop("profile_file", None)
            radio["profile"] = args.profile
        else:
            radio.pop("profile", None)
            radio["profile_file"] = str(Path(args.profile).resolve())
    if args.alt is not None:
        raw.setdefault("orbit", {})["altitude_m"] = args.alt
    if args.freq is not None:
        raw["carrier"] = {**raw.get("carrier", {}), "dl_hz": args.freq, "ul_hz": args.freq}
    return raw


# --- subcommands -------------------------------------------------------------
# Each returns a list of human-readable summary lines; files go into ``out``.

def _g(x: float) -> str:
    return f"{x:.12g}"


def run_propagate(cfg, out: Path, threads: int) -> list[str]:
    elements, ids = build_constellation(cfg)
    p = cfg["propagate"]
    n = int(math.floor(p["duration_s"] / p["step_s"] + 1e-9))
    offsets = p["step_s"] * np.arange(n + 1)
    rows = []
    for sat_id, el in zip(ids, elements):
        times = el.epoch + offsets
        if p["model"] == "two_body":
            pos, vel = kepler_pv(el, times)
            pos, vel = pos[:, 0], vel[:, 0]
        else:
            states = propagate_j2_series(kepler_to_state(el, el.epoch), offsets, p["integrator_step_s"])
            pos = np.array([s.position for s in states])
            vel = np.array([s.velocity for s in states])
        for t, r, v in zip(times, pos, vel):
            rows.append([_g(t), sat_id, *(_g(x) for x in r), *(_g(x) for x in v)])
    write_table(out / "ephemeris.csv",
                ["t_s", "sat_id", "x_m", "y_m", "z_m", "vx_m_s", "vy_m_s", "vz_m_s"], rows)
    first = elements[0]
    speed = float(np.linalg.norm(kepler_to_state(first, first.epoch).velocity))
    return [
        f"satellites={len(elements)} samples_per_satellite={n + 1} model={p['model']}",
        f"sat {ids[0]}: period_s={first.period():.1f} speed_m_s={speed:.1f} altitude_m={first.altitude:.0f}",
    ]


def run_access(cfg, out: Path, threads: int) -> list[str]:
    elements, ids = build_constellation(cfg)
    ues = build_positions(cfg["ues"])
    gateways = build_positions(cfg["gateways"])
    a = cfg["access"]
    carrier = cfg["carrier"]["dl_hz"]
    window = (a["start_s"], a["start_s"] + a["duration_s"])
    mask = math.radians(a["min_elevation_deg"])
    pass_rows = []
    lines = []
    for u, ue in enumerate(ues):
        for sat_id, el in zip(ids, elements):
            passes = find_passes(el, ue, mask, window, sample_step=a["sample_step_s"])
            for k, pw in enumerate(passes):
                pass_rows.append([u, sat_id, k, _g(pw.aos), _g(pw.los), _g(pw.duration),
                                  _g(math.degrees(pw.max_elevation)), _g(pw.max_elevation_time)])
                n = max(1, int(math.ceil(pw.duration / a["series_step_s"])))
                times = np.linspace(pw.aos, pw.los, n + 1)
                series = access_time_series(el, ue, times, carrier)
                write_access_csv(out / f"access_ue{u}_sat{sat_id}_pass{k}.csv", series)
                for g, gw in enumerate(gateways):
                    pos, vel = earth_fixed_pv(el, times)
                    feeder = access_arrays(pos[:, 0], vel[:, 0], gw.ecef(), carrier)
                    write_table(
                        out / f"path_ue{u}_gw{g}_sat{sat_id}_pass{k}.csv",
                        ["t_s", "path_delay_s", "path_delay_drift_s_per_s", "gateway_elev_deg"],
                        [
                            [_g(t), _g(d1 + d2), _g(r1 + r2), _g(math.degrees(e))]
                            for t, d1, d2, r1, r2, e in zip(
                                times, series["one_way_delay"], feeder["one_way_delay"],
                                series["delay_drift"], feeder["delay_drift"], feeder["elevation"],
                            )
                        ],
                    )
        n_ue = sum(1 for r in pass_rows if r[0] == u)
        lines.append(f"ue {u}: {n_ue} passes above {a['min_elevation_deg']:g} deg")
    write_table(out / "passes.csv",
                ["ue", "sat_id", "pass", "aos_s", "los_s", "duration_s", "max_elev_deg", "max_elev_time_s"],
                pass_rows)
    return lines


def run_doppler(cfg, out: Path, threads: int) -> list[str]:
    alt = cfg["orbit"]["altitude_m"]
    carrier = cfg["carrier"]["dl_hz"]
    d = cfg["doppler"]
    sweep = overhead_doppler_sweep(alt, carrier, [math.radians(x) for x in d["inclinations_deg"]],
                                   sample_step=d["sample_step_s"])
    write_table(
        out / "doppler.csv",
        ["inclination_deg", "max_doppler_hz", "max_doppler_ppm", "max_doppler_drift_hz_per_s"],
        [[_g(math.degrees(x.inclination)), _g(x.max_doppler), _g(x.max_doppler_ppm), _g(x.max_drift)]
         for x in sweep],
    )
    worst_fd = max(sweep, key=lambda x: x.max_doppler)
    worst_drift = max(sweep, key=lambda x: x.max_drift)
    orb = cfg["orbit"]
    el, _ = build_constellation({"orbit": orb})
    state = inertial_to_earth_fixed(kepler_to_state(el[0], 0.0))
    path = worst_case_path_drift(state)
    summary = {
        "altitude_m": alt,
        "carrier_hz": carrier,
        "max_doppler_hz": worst_fd.max_doppler,
        "max_doppler_ppm": worst_fd.max_doppler_ppm,
        "max_doppler_inclination_deg": math.degrees(worst_fd.inclination),
        "closed_form_ppm": max_doppler_ratio(alt) * 1e6,
        "max_doppler_drift_hz_per_s": worst_drift.max_drift,
        "max_drift_inclination_deg": math.degrees(worst_drift.inclination),
        "max_path_delay_drift_us_per_s": abs(path.drift) * 1e6,
        "path_drift_inclination_deg": orb["inclination_deg"],
    }
    write_key_values(out / "doppler_summary.csv", summary)
    return [
        f"max |Doppler| = {worst_fd.max_doppler / 1e3:.2f} kHz ({worst_fd.max_doppler_ppm:.2f} ppm) "
        f"at inclination {math.degrees(worst_fd.inclination):g} deg",
        f"closed-form bound = {summary['closed_form_ppm']:.2f} ppm",
        f"max Doppler drift = {worst_drift.max_drift:.1f} Hz/s "
        f"at inclination {math.degrees(worst_drift.inclination):g} deg",
        f"worst-case UE+gateway path delay drift = {summary['max_path_delay_drift_us_per_s']:.1f} us/s",
    ]


def run_linkbudget(cfg, out: Path, threads: int) -> list[str]:
    profile = build_profile(cfg)
    radio = cfg["radio"]
    carrier = cfg["carrier"]["dl_hz"]
    rows = [
        ("label", profile.label, ""),
        ("eirp_density", profile.eirp_density, "dBW/MHz"),
        ("gt", profile.gt, "dB/K"),
        ("tx_rx_max_gain", profile.tx_rx_max_gain, "dBi"),
        ("beamwidth_3db", profile.beamwidth_3db, "deg"),
        ("altitude", profile.altitude / 1e3, "km"),
        ("beam_diameter_nadir", profile.beam_diameter_nadir / 1e3, "km"),
    ]
    if profile.aperture_diameter is not None:
        ant = AntennaModel(profile.aperture_diameter, carrier_freq=carrier)
        bw = beamwidth_from_aperture(ant)
        rows += [
            ("aperture_diameter", profile.aperture_diameter, "m"),
            ("derived_gain", gain_from_aperture(ant), "dBi"),
            ("derived_beamwidth", bw, "deg"),
            ("derived_beam_diameter", beam_diameter_at_nadir(profile.altitude, bw) / 1e3, "km"),
        ]
    elev = math.radians(radio["elevation_deg"])
    if elev < 0:
        raise ValueError("link budget elevation must be >= 0 deg")
    dist = slant_range_at_elevation(profile.altitude, elev)
    res = downlink_c_n0(profile, None, ue_gt=radio["ue_gt_db"], extra_losses=radio["extra_losses_db"],
                        bandwidth=radio["bandwidth_hz"], path_loss=fspl(dist, carrier))
    rows += [
        ("elevation", radio["elevation_deg"], "deg"),
        ("slant_range", dist / 1e3, "km"),
        ("fspl", res.fspl, "dB"),
        ("ue_gt", radio["ue_gt_db"], "dB/K"),
        ("extra_losses", radio["extra_losses_db"], "dB"),
        ("c_n0", res.c_n0, "dBHz"),
        ("bandwidth", radio["bandwidth_hz"] / 1e6, "MHz"),
        ("snr", res.snr, "dB"),
        ("capacity_estimate", res.capacity_estimate / 1e6, "Mbps"),
    ]
    write_table(out / "linkbudget.csv", ["quantity", "value", "unit"], rows)
    lines = []
    for name, value, unit in rows:
        text = value if isinstance(value, str) else f"{value:.2f}"
        lines.append(f"{name:<22} {text} {unit}".rstrip())
    return lines


def run_precomp(cfg, out: Path, threads: int) -> list[str]:
    orb = cfg["orbit"]
    el, _ = build_constellation({"orbit": orb})
    eph = EphemerisRecord.from_state(kepler_to_state(el[0], 0.0))
    p = cfg["precomp"]
    carrier = cfg["carrier"]["ul_hz"]
    samples = prediction_error_curve(
        eph, ue_grid(p["grid_deg"]), p["ages_s"], carrier,
        min_elevation=math.radians(p["min_elevation_deg"]), step=p["integrator_step_s"],
    )
    thr = ComplianceThresholds(cyclic_prefix=p["cyclic_prefix_us"] * 1e-6,
                               ul_freq_tolerance_ppm=p["ul_freq_tolerance_ppm"])
    reports = [check_compliance(s, thr, carrier) for s in samples]
    write_precomp_csv(out / "precomp.csv", samples, reports)
    return [
        f"age {s.age:6.1f} s: delay error {s.delay_error * 1e6:.4f} us, Doppler error "
        f"{s.doppler_error:.2f} Hz, cp_pass={int(r.timing_pass)} freq_pass={int(r.freq_pass)}"
        for s, r in zip(samples, reports)
    ]


def run_mobility(cfg, out: Path, threads: int) -> list[str]:
    elements, ids = build_constellation(cfg)
    ues = build_positions(cfg["ues"])
    m = cfg["mobility"]
    beam = m.get("beam_diameter_m") or build_profile(cfg).beam_diameter_nadir
    int_ids = None
    if all(s.isdigit() for s in ids):
        int_ids = [int(s) for s in ids]
    steps = StepConfig(step=m["step_s"], refine=m["refine_s"], coarse=max(10.0, m["step_s"]))
    lines = []
    for u, ue in enumerate(ues):
        pattern = CellPattern(m["cell_kind"], beam, elevation_mask=math.radians(m["elevation_mask_deg"]),
                              anchor=ue if m["cell_kind"] == "quasi_earth_fixed" else None)
        if m["mode"] == "idle":
            ta = TrackingAreaConfig(m["tracking_area"], m["tracking_area_size_deg"])
            res = simulate_idle(ue, elements, ta, m["duration_s"], pattern, start=m["start_s"],
                                ids=int_ids, steps=steps)
        else:
            thr = m["cho_threshold"]
            if m["cho_condition"] == "elevation_threshold":
                thr = math.radians(thr)
            res = simulate_connected_cho(ue, elements, ChoCondition(m["cho_condition"], thr),
                                         m["duration_s"], pattern, start=m["start_s"], ids=int_ids,
                                         steps=steps)
        if int_ids is None:
            res.events[:] = [
                type(ev)(ev.time, ev.kind,
                         None if ev.from_cell is None else ids[ev.from_cell],
                         None if ev.to_cell is None else ids[ev.to_cell])
                for ev in res.events
            ]
        write_event_log(out / f"mobility_ue{u}_events.csv", res.events)
        write_summary(out / f"mobility_ue{u}_summary.csv", res.counters)
        c = res.counters
        lines.append(
            f"ue {u}: reselections={c.reselections} taus={c.taus} cho_prepared={c.cho_prepared} "
            f"cho_executed={c.cho_executed} failures={c.failures} coverage_gap_s={c.coverage_gap_s:.3f}"
        )
    return lines


def run_coverage(cfg, out: Path, threads: int) -> list[str]:
    elements, _ = build_constellation(cfg)
    c = cfg["coverage"]
    grid = coverage_map(elements, c["t_s"], c["lat_step_deg"], c["lon_step_deg"],
                        math.radians(c["min_elevation_deg"]), threads=threads)
    write_coverage_csv(out / "coverage.csv", grid)
    summary = grid.summary()
    summary["covered_fraction_60"] = grid.covered_fraction(60.0)
    write_key_values(out / "coverage_summary.csv", summary)
    return [f"{k}={_g(v)}" for k, v in summary.items()]


RUNNERS = {
    "propagate": run_propagate,
    "access": run_access,
    "doppler": run_doppler,
    "linkbudget": run_linkbudget,
    "precomp-error": run_precomp,
    "mobility": run_mobility,
    "coverage": run_coverage,
}


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        base_dir = Path(args.config).resolve().parent if args.config else Path.cwd()
        raw = apply_overrides(load_config(args.config), args)
        cfg = resolve(raw, base_dir)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"config error: cannot prepare output directory: {exc}", file=sys.stderr)
        return 1

    stage = Path(tempfile.mkdtemp(prefix=".stage-", dir=out))
    try:
        lines = RUNNERS[args.command](cfg, stage, args.threads)
        manifest = {
            "tool": "leosat",
            "version": __version__,
            "command": args.command,
            "seed": args.seed,
            "threads": args.threads,
            "config": cfg,
            "outputs": sorted(p.name for p in stage.iterdir()) + ["manifest.json"],
        }
        (stage / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        for p in sorted(stage.iterdir()):
            os.replace(p, out / p.name)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # numerical or geometric failure during the run
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    finally:
        shutil.rmtree(stage, ignore_errors=True)
    for line in lines:
        print(line)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
