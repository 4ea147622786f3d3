"""UE-side timing advance / frequency pre-compensation from broadcast
ephemeris, and the growth of prediction error with ephemeris age.

The prediction model is two-body propagation of the broadcast state; the
truth model is the J2-perturbed numerical propagation of the same state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import GeodeticPosition, access_arrays, compute_access
from .orbit import (
    EARTH,
    EphemerisRecord,
    PhysicalConstants,
    StateVector,
    inertial_to_earth_fixed,
    propagate_j2_series,
    propagate_two_body,
)


class OutOfCoverage(Exception):
    """The satellite is below the UE's horizon at the requested time."""


@dataclass(frozen=True)
class ComplianceThresholds:
    cyclic_prefix: float = 4.7e-6
    ul_freq_tolerance_ppm: float = 0.1
    ue_oscillator_error_ppm: float = 10.0

    def __post_init__(self):
        if min(self.cyclic_prefix, self.ul_freq_tolerance_ppm, self.ue_oscillator_error_ppm) <= 0:
            raise ValueError("compliance thresholds must be positive")

    def freq_tolerance(self, carrier: float) -> float:
        return self.ul_freq_tolerance_ppm * 1e-6 * carrier


@dataclass(frozen=True)
class UePrecompState:
    timing_advance: float
    freq_adjustment: float
    ephemeris_age: float
    basis: EphemerisRecord


@dataclass(frozen=True)
class PredictionErrorSample:
    age: float
    delay_error: float
    doppler_error: float

    def __post_init__(self):
        if self.age < 0 or self.delay_error < 0 or self.doppler_error < 0:
            raise ValueError("prediction error sample fields must be non-negative")


@dataclass(frozen=True)
class ComplianceReport:
    timing_pass: bool
    freq_pass: bool
    timing_margin: float      # s, cyclic prefix minus delay error
    freq_margin: float        # Hz, tolerance minus Doppler error
    freq_tolerance: float     # Hz

    @property
    def passed(self) -> bool:
        return self.timing_pass and self.freq_pass


def predict_state(eph: EphemerisRecord, t: float, constants: PhysicalConstants = EARTH) -> StateVector:
    """Earth-fixed two-body prediction of the ephemeris at time ``t``."""
    if t < eph.reference_epoch:
        raise ValueError("cannot predict before the ephemeris reference epoch")
    inertial = propagate_two_body(eph.state, t - eph.reference_epoch, constants)
    return inertial_to_earth_fixed(inertial, constants=constants)


def compute_precomp(
    eph: EphemerisRecord,
    ue: GeodeticPosition,
    t: float,
    carrier_ul: float,
    constants: PhysicalConstants = EARTH,
) -> UePrecompState:
    """Timing advance (service-link round trip) and uplink frequency
    adjustment the UE applies at time ``t``.

    Raises OutOfCoverage when the predicted satellite is below 0 deg.
    """
    sat = predict_state(eph, t, constants)
    geo = compute_access(sat, ue, carrier_ul, constants)
    if geo.elevation < 0:
        raise OutOfCoverage(
            f"satellite at {math.degrees(geo.elevation):.2f} deg elevation at t={t}"
        )
    return UePrecompState(
        timing_advance=2.0 * geo.one_way_delay,
        freq_adjustment=-geo.doppler,
        ephemeris_age=t - eph.reference_epoch,
        basis=eph,
    )


def ue_grid(resolution_deg: float = 1.0) -> np.ndarray:
    """Global lat/lon grid of ground points, shape (P, 3), spherical Earth."""
    lats = np.radians(np.arange(-90.0, 90.0 + 1e-9, resolution_deg))
    lons = np.radians(np.arange(-180.0, 180.0, resolution_deg))
    la, lo = np.meshgrid(lats, lons, indexing="ij")
    r = EARTH.earth_radius
    return np.stack(
        [r * np.cos(la) * np.cos(lo), r * np.cos(la) * np.sin(lo), r * np.sin(la)], axis=-1
    ).reshape(-1, 3)


def _ue_positions(ue, constants) -> np.ndarray:
    if isinstance(ue, GeodeticPosition):
        return ue.ecef(constants)[None, :]
    if isinstance(ue, np.ndarray):
        return ue.reshape(-1, 3)
    return np.stack([u.ecef(constants) for u in ue])


def prediction_error_curve(
    eph: EphemerisRecord,
    ue: GeodeticPosition | Sequence[GeodeticPosition] | np.ndarray,
    ages: Sequence[float],
    carrier: float,
    min_elevation: float = math.radians(5.0),
    step: float = 1.0,
    constants: PhysicalConstants = EARTH,
) -> list[PredictionErrorSample]:
    """Line-of-sight delay and Doppler error of the two-body prediction
    against the J2 truth, for each ephemeris age.

    ``ue`` may be a single position, a list, or an (P, 3) array of
    Earth-fixed points (see :func:`ue_grid`). With several UEs the worst case
    over the UEs that see the true satellite above ``min_elevation`` at that
    age is reported (0 if none does). A single UE is always evaluated.
    """
    ages = [float(a) for a in ages]
    if any(a < 0 for a in ages):
        raise ValueError("ephemeris ages must be non-negative")
    ue_pos = _ue_positions(ue, constants)
    single = ue_pos.shape[0] == 1
    order = sorted(range(len(ages)), key=ages.__getitem__)
    truth_states = propagate_j2_series(eph.state, [ages[i] for i in order], step, constants)
    truth_by_index = dict(zip(order, truth_states))
    c = constants.light_speed
    samples = []
    for i, age in enumerate(ages):
        truth = inertial_to_earth_fixed(truth_by_index[i], constants=constants)
        pred = predict_state(eph, eph.reference_epoch + age, constants)
        at = access_arrays(truth.position, truth.velocity, ue_pos, carrier, constants)
        ap = access_arrays(pred.position, pred.velocity, ue_pos, carrier, constants)
        mask = np.ones(ue_pos.shape[0], bool) if single else at["elevation"] >= min_elevation
        if not mask.any():
            samples.append(PredictionErrorSample(age, 0.0, 0.0))
            continue
        d_err = np.abs(at["slant_range"] - ap["slant_range"])[mask] / c
        f_err = (carrier / c) * np.abs(at["range_rate"] - ap["range_rate"])[mask]
        samples.append(PredictionErrorSample(age, float(d_err.max()), float(f_err.max())))
    return samples


def position_error(eph: EphemerisRecord, age: float, step: float = 1.0,
                   constants: PhysicalConstants = EARTH) -> float:
    """|r_truth - r_pred| after ``age`` seconds (m)."""
    truth = propagate_j2_series(eph.state, [age], step, constants)[0]
    pred = propagate_two_body(eph.state, age, constants)
    return float(np.linalg.norm(truth.position - pred.position))


def check_compliance(
    sample: PredictionErrorSample,
    thresholds: ComplianceThresholds = ComplianceThresholds(),
    carrier: float = 2e9,
) -> ComplianceReport:
    tol = thresholds.freq_tolerance(carrier)
    return ComplianceReport(
        timing_pass=sample.delay_error < thresholds.cyclic_prefix,
        freq_pass=sample.doppler_error < tol,
        timing_margin=thresholds.cyclic_prefix - sample.delay_error,
        freq_margin=tol - sample.doppler_error,
        freq_tolerance=tol,
    )


def downlink_frequency_error(
    doppler: float, carrier: float, thresholds: ComplianceThresholds = ComplianceThresholds()
) -> float:
    """Worst-case downlink frequency error a UE sees before synchronization:
    Doppler plus the initial oscillator offset (Hz)."""
    return abs(doppler) + thresholds.ue_oscillator_error_ppm * 1e-6 * carrier


def residual_uplink_misalignment(
    ue_a: GeodeticPosition,
    ue_b: GeodeticPosition,
    sat: StateVector,
    carrier: float,
    with_precomp: bool,
    predicted: StateVector | None = None,
    constants: PhysicalConstants = EARTH,
) -> tuple[float, float]:
    """Frequency (Hz) and timing (s) offset between two UEs' uplink signals
    arriving at the satellite.

    Without pre-compensation both UEs transmit on their downlink references,
    so arrival offsets are the differences of Doppler and round-trip delay.
    With pre-compensation each UE removes the Doppler and delay computed from
    ``predicted`` (the true ``sat`` state when omitted, i.e. perfect
    ephemeris), leaving only the prediction mismatch.
    """
    true_a = compute_access(sat, ue_a, carrier, constants)
    true_b = compute_access(sat, ue_b, carrier, constants)
    for geo in (true_a, true_b):
        if geo.elevation < 0:
            raise OutOfCoverage("both UEs must see the satellite")

    def arrival(true, ue):
        freq = true.doppler
        timing = 2.0 * true.one_way_delay
        if with_precomp:
            est = compute_access(predicted or sat, ue, carrier, constants)
            freq -= est.doppler
            timing -= 2.0 * est.one_way_delay
        return freq, timing

    fa, ta = arrival(true_a, ue_a)
    fb, tb = arrival(true_b, ue_b)
    return fa - fb, ta - tb
