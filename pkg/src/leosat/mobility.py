"""Idle- and connected-mode mobility over moving satellite cells.

Every satellite carries one cell. An Earth-moving cell is the disk of
``beam_diameter`` around the sub-satellite point; a quasi-Earth-fixed cell
serves its ground anchor while the satellite is above ``elevation_mask``.
A UE is covered by a cell when it lies inside that disk (great-circle
distance) or, for quasi-Earth-fixed cells, while the mask is met.

The event loop steps at a fixed interval (default 100 ms) and refines
every state change by bisection (default 10 ms). Runs are deterministic:
identical inputs give identical event logs.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .geometry import GeodeticPosition, cap_half_angle, earth_fixed_pv, find_passes
from .orbit import (
    EARTH,
    EphemerisRecord,
    OrbitalElements,
    PhysicalConstants,
    earth_fixed_to_geodetic,
    element_table,
    state_to_elements,
)


class NoCoverage(Exception):
    """The UE is not inside the requested cell."""


class CellKind(str, Enum):
    EARTH_MOVING = "earth_moving"
    QUASI_EARTH_FIXED = "quasi_earth_fixed"


class TrackingAreaKind(str, Enum):
    EARTH_FIXED = "earth_fixed"
    SATELLITE_ATTACHED = "satellite_attached"


class ChoKind(str, Enum):
    ELEVATION_THRESHOLD = "elevation_threshold"
    TIME_WINDOW = "time_window"
    LOCATION_DISTANCE = "location_distance"


class EventKind(str, Enum):
    RESELECTION = "reselection"
    TRACKING_AREA_UPDATE = "tracking_area_update"
    CHO_PREPARED = "cho_prepared"
    CHO_EXECUTED = "cho_executed"
    RADIO_LINK_FAILURE = "radio_link_failure"
    OUT_OF_COVERAGE = "out_of_coverage"


@dataclass(frozen=True)
class CellPattern:
    kind: CellKind
    beam_diameter: float
    source_satellite: int | None = None
    elevation_mask: float = math.radians(30.0)
    anchor: GeodeticPosition | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", CellKind(self.kind))
        if not self.beam_diameter > 0:
            raise ValueError("beam diameter must be positive")

    def footprint_center(
        self, elements: OrbitalElements, t: float, constants: PhysicalConstants = EARTH
    ) -> GeodeticPosition:
        """Sub-satellite point (Earth-moving) or the fixed anchor."""
        if self.kind is CellKind.QUASI_EARTH_FIXED:
            if self.anchor is None:
                raise ValueError("quasi-Earth-fixed pattern needs an anchor")
            return self.anchor
        pos, _ = earth_fixed_pv(elements, [t], constants)
        lat, lon, _ = earth_fixed_to_geodetic(pos[0, 0], constants)
        return GeodeticPosition(float(lat), float(lon), 0.0)


@dataclass(frozen=True)
class TrackingAreaConfig:
    kind: TrackingAreaKind
    cell_size: float = 5.0   # deg, Earth-fixed grid resolution

    def __post_init__(self):
        object.__setattr__(self, "kind", TrackingAreaKind(self.kind))
        if not self.cell_size > 0:
            raise ValueError("tracking area grid size must be positive")


@dataclass(frozen=True)
class ChoCondition:
    """Conditional handover trigger.

    ``threshold`` is an elevation in radians, a guard time in seconds before
    the predicted end of service, or a UE-to-footprint-centre distance in
    metres, depending on ``kind``.
    """

    kind: ChoKind
    threshold: float

    def __post_init__(self):
        object.__setattr__(self, "kind", ChoKind(self.kind))
        if not math.isfinite(self.threshold):
            raise ValueError("CHO threshold must be finite")


@dataclass(frozen=True)
class MobilityEvent:
    time: float
    kind: EventKind
    from_cell: int | None
    to_cell: int | None


@dataclass
class MobilityCounters:
    reselections: int = 0
    taus: int = 0
    cho_prepared: int = 0
    cho_executed: int = 0
    failures: int = 0
    coverage_gap_s: float = 0.0


@dataclass
class MobilityResult:
    events: list[MobilityEvent] = field(default_factory=list)
    counters: MobilityCounters = field(default_factory=MobilityCounters)
    # (start, end, cell id) serving intervals
    timeline: list[tuple[float, float, int]] = field(default_factory=list)

    def count(self, kind: EventKind) -> int:
        return sum(1 for ev in self.events if ev.kind is kind)


@dataclass(frozen=True)
class StepConfig:
    step: float = 0.1
    refine: float = 0.01
    coarse: float = 10.0

    def __post_init__(self):
        if not 0 < self.refine <= self.step <= self.coarse:
            raise ValueError("need 0 < refine <= step <= coarse")


class _Scene:
    """Cell geometry for one UE against a whole constellation."""

    def __init__(self, constellation, ids, ue, pattern, constants):
        if len(constellation) == 0:
            raise ValueError("empty constellation")
        self.table = element_table(list(constellation))
        n = self.table.shape[1]
        self.ids = np.arange(n) if ids is None else np.asarray(list(ids))
        if len(self.ids) != n or len(set(self.ids.tolist())) != n:
            raise ValueError("satellite ids must be unique, one per satellite")
        # candidate order = ascending id so argmax ties resolve to the lowest id
        self.order = np.argsort(self.ids, kind="stable")
        self.ue = ue
        self.ue_pos = ue.ecef(constants)
        self.up = self.ue_pos / np.linalg.norm(self.ue_pos)
        self.pattern = pattern
        self.constants = constants
        alt = self.table[0] - constants.earth_radius
        if pattern.kind is CellKind.EARTH_MOVING:
            self.rho = np.full(n, pattern.beam_diameter / (2 * constants.earth_radius))
        else:
            self.rho = np.array([cap_half_angle(h, pattern.elevation_mask, constants) for h in alt])
            if pattern.anchor is not None:
                gap = _central_angle(self.up, pattern.anchor.ecef(constants))
                if gap * constants.earth_radius > pattern.beam_diameter / 2:
                    # UE outside the anchored footprint: never served
                    self.rho = np.full(n, -1.0)
        n_motion = np.sqrt(constants.mu / self.table[0] ** 3)
        self.rate = n_motion + constants.earth_rotation_rate

    def evaluate(self, idx, times):
        """Elevation and UE-to-sub-point central angle, both (T, C)."""
        idx = np.asarray(idx, dtype=int)
        times = np.atleast_1d(np.asarray(times, float))
        if idx.size == 0:
            empty = np.zeros((len(times), 0))
            return empty, empty
        pos, _ = earth_fixed_pv(self.table[:, idx], times, self.constants)
        r = np.linalg.norm(pos, axis=-1)
        cos_ang = np.clip(pos @ self.up / r, -1.0, 1.0)
        angle = np.arccos(cos_ang)
        rel = pos - self.ue_pos
        d = np.linalg.norm(rel, axis=-1)
        elev = np.arcsin(np.clip(rel @ self.up / d, -1.0, 1.0))
        return elev, angle

    def covers(self, idx, elev, angle):
        idx = np.asarray(idx, dtype=int)
        if self.pattern.kind is CellKind.EARTH_MOVING:
            return angle <= self.rho[idx] + 1e-9
        return (elev >= self.pattern.elevation_mask - 1e-12) & (self.rho[idx] >= 0)

    def candidates(self, t0, t1):
        """Satellites that can cover the UE at some time in [t0, t1]."""
        allidx = self.order
        _, angle = self.evaluate(allidx, [t0])
        reach = self.rho[allidx] + self.rate[allidx] * (t1 - t0) * 1.05 + 1e-6
        return allidx[angle[0] <= reach]

    def best(self, idx, elev, angle, exclude=None):
        """Serving choice per row: highest elevation among covering cells."""
        cov = self.covers(idx, elev, angle)
        if exclude is not None:
            cov = cov & (np.asarray(idx) != exclude)
        if cov.shape[1] == 0:
            return np.full(cov.shape[0], -1)
        masked = np.where(cov, elev, -np.inf)
        col = np.argmax(masked, axis=1)
        return np.where(cov.any(axis=1), np.asarray(idx)[col], -1)

    def best_at(self, t, exclude=None, idx=None):
        if idx is None:
            idx = self.candidates(t, t)
        elev, angle = self.evaluate(idx, [t])
        return int(self.best(idx, elev, angle, exclude)[0])

    def covers_at(self, sat, t):
        elev, angle = self.evaluate([sat], [t])
        return bool(self.covers([sat], elev, angle)[0, 0])

    def elevation_at(self, sat, t):
        return float(self.evaluate([sat], [t])[0][0, 0])

    def center_distance_at(self, sat, t):
        if self.pattern.kind is CellKind.QUASI_EARTH_FIXED and self.pattern.anchor is not None:
            return _central_angle(self.up, self.pattern.anchor.ecef(self.constants)) * self.constants.earth_radius
        return float(self.evaluate([sat], [t])[1][0, 0]) * self.constants.earth_radius

    def predict_loss(self, sat, t, limit, scan=0.5, tol=0.01, direction=1):
        """First time after ``t`` (before it, for ``direction=-1``) at which
        ``sat`` stops covering the UE; ``inf`` if it still covers at ``limit``."""
        lo = t
        while (limit - lo) * direction > 0:
            times = lo + direction * scan * np.arange(1, 1201)
            elev, angle = self.evaluate([sat], times)
            cov = self.covers([sat], elev, angle)[:, 0]
            off = np.nonzero(~cov)[0]
            if off.size:
                k = off[0]
                a = lo if k == 0 else times[k - 1]
                if direction > 0:
                    return _bisect(lambda x: not self.covers_at(sat, x), a, times[k], tol)
                # mirror the search so the bisection runs forward in time
                return -_bisect(lambda x: not self.covers_at(sat, -x), -a, -times[k], tol)
            lo = times[-1]
        return math.inf * direction


def _central_angle(u, pos):
    v = pos / np.linalg.norm(pos)
    return float(np.arccos(np.clip(u @ v, -1.0, 1.0)))


def _bisect(pred, lo, hi, tol):
    """First time in (lo, hi] where ``pred`` becomes true (to within tol)."""
    if pred(lo):
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _step_times(start, duration, cfg):
    n = int(round(duration / cfg.step))
    per_chunk = max(1, int(round(cfg.coarse / cfg.step)))
    for k0 in range(1, n + 1, per_chunk):
        k1 = min(n, k0 + per_chunk - 1)
        yield start + cfg.step * np.arange(k0, k1 + 1)


def _cell_id(scene, sat):
    return None if sat < 0 else int(scene.ids[sat])


def _serving_satellite(scene, pattern, t0):
    if pattern.source_satellite is not None:
        where = np.nonzero(scene.ids == pattern.source_satellite)[0]
        if where.size == 0:
            raise ValueError(f"unknown satellite id {pattern.source_satellite}")
        sat = int(where[0])
        if not scene.covers_at(sat, t0):
            raise NoCoverage(f"satellite {pattern.source_satellite} does not cover the UE at t={t0}")
        return sat
    sat = scene.best_at(t0)
    if sat < 0:
        raise NoCoverage(f"no cell covers the UE at t={t0}")
    return sat


def _scan_step(pattern):
    # coarse scan must not jump over a whole small-cell crossing
    return min(0.5, pattern.beam_diameter / 2e5)


def serving_interval(
    ue: GeodeticPosition,
    pattern: CellPattern,
    constellation: Sequence[OrbitalElements],
    t0: float = 0.0,
    ids: Sequence[int] | None = None,
    constants: PhysicalConstants = EARTH,
    limit: float = 6 * 3600.0,
    tol: float = 1e-3,
) -> tuple[float, float]:
    """Start and end of the contiguous interval, containing ``t0``, in
    which the cell (chosen as in :func:`dwell_time`) covers the UE."""
    scene = _Scene(constellation, ids, ue, pattern, constants)
    sat = _serving_satellite(scene, pattern, t0)
    scan = _scan_step(pattern)
    begin = scene.predict_loss(sat, t0, t0 - limit, scan=scan, tol=tol, direction=-1)
    end = scene.predict_loss(sat, t0, t0 + limit, scan=scan, tol=tol)
    return float(begin), float(end)


def dwell_time(
    ue: GeodeticPosition,
    pattern: CellPattern,
    constellation: Sequence[OrbitalElements],
    t0: float = 0.0,
    ids: Sequence[int] | None = None,
    constants: PhysicalConstants = EARTH,
    limit: float = 6 * 3600.0,
    tol: float = 1e-3,
) -> float:
    """Remaining time the UE stays in its cell from ``t0``.

    The cell is ``pattern.source_satellite`` when set, otherwise the cell a
    UE would select at ``t0``. Raises NoCoverage when that cell does not
    cover the UE at ``t0``.
    """
    scene = _Scene(constellation, ids, ue, pattern, constants)
    sat = _serving_satellite(scene, pattern, t0)
    return float(scene.predict_loss(sat, t0, t0 + limit, scan=_scan_step(pattern), tol=tol) - t0)


def _area_of(ta_config, ue, scene, sat):
    if sat < 0:
        return None
    if ta_config.kind is TrackingAreaKind.SATELLITE_ATTACHED:
        return ("cell", int(scene.ids[sat]))
    size = ta_config.cell_size
    lat, lon = math.degrees(ue.lat), math.degrees(ue.lon)
    return ("grid", int(math.floor((lat + 90.0) / size)), int(math.floor(((lon + 180.0) % 360.0) / size)))


def simulate_idle(
    ue: GeodeticPosition,
    constellation: Sequence[OrbitalElements],
    ta_config: TrackingAreaConfig,
    duration: float,
    pattern: CellPattern,
    start: float = 0.0,
    ids: Sequence[int] | None = None,
    steps: StepConfig = StepConfig(),
    constants: PhysicalConstants = EARTH,
) -> MobilityResult:
    """Idle-mode camping, reselection and tracking-area updates.

    The UE camps on the covering cell with the highest elevation (lowest
    satellite id on ties) and registers that cell's tracking area at the
    start; the initial camping/registration is not logged as an event.
    """
    if duration < 0:
        raise ValueError("duration must be non-negative")
    result = MobilityResult()
    if duration == 0:
        return result
    scene = _Scene(constellation, ids, ue, pattern, constants)
    counters = result.counters
    events = result.events
    end = start + duration

    current = scene.best_at(start)
    registered = {_area_of(ta_config, ue, scene, current)} if current >= 0 else set()
    since = start
    gap_start = None if current >= 0 else start

    def change(t, new):
        nonlocal current, since, gap_start, registered
        old = current
        if old >= 0:
            result.timeline.append((since, t, _cell_id(scene, old)))
        if new < 0:
            events.append(MobilityEvent(t, EventKind.OUT_OF_COVERAGE, _cell_id(scene, old), None))
            gap_start = t
        else:
            events.append(MobilityEvent(t, EventKind.RESELECTION, _cell_id(scene, old), _cell_id(scene, new)))
            counters.reselections += 1
            if gap_start is not None:
                counters.coverage_gap_s += t - gap_start
                gap_start = None
            area = _area_of(ta_config, ue, scene, new)
            if area not in registered:
                if registered:
                    events.append(
                        MobilityEvent(t, EventKind.TRACKING_AREA_UPDATE, _cell_id(scene, old), _cell_id(scene, new))
                    )
                    counters.taus += 1
                registered = {area}
        current = new
        since = t

    prev_t = start
    for times in _step_times(start, duration, steps):
        idx = scene.candidates(prev_t, times[-1])
        elev, angle = scene.evaluate(idx, times)
        best = scene.best(idx, elev, angle)
        for k in np.nonzero(best != current)[0] if best.size else []:
            if best[k] == current:
                continue
            lo = prev_t if k == 0 else float(times[k - 1])
            # refine on the sub-step grid in one vectorised evaluation
            n_sub = max(1, int(math.ceil((float(times[k]) - lo) / steps.refine - 1e-9)))
            sub_t = np.minimum(lo + steps.refine * np.arange(1, n_sub + 1), float(times[k]))
            sub_best = scene.best(idx, *scene.evaluate(idx, sub_t))
            for j in range(n_sub):
                if sub_best[j] != current:
                    change(float(sub_t[j]), int(sub_best[j]))
            if current != best[k]:
                change(float(times[k]), int(best[k]))
        prev_t = float(times[-1])

    if current >= 0:
        result.timeline.append((since, end, _cell_id(scene, current)))
    elif gap_start is not None:
        counters.coverage_gap_s += end - gap_start
    return result


def simulate_connected_cho(
    ue: GeodeticPosition,
    constellation: Sequence[OrbitalElements],
    condition: ChoCondition,
    duration: float,
    pattern: CellPattern,
    start: float = 0.0,
    ids: Sequence[int] | None = None,
    steps: StepConfig = StepConfig(),
    constants: PhysicalConstants = EARTH,
) -> MobilityResult:
    """Connected-mode conditional handover.

    On every serving interval the network predicts from ephemeris when the
    serving cell stops covering the UE and prepares the cell that will be
    best just after that instant. The UE executes the stored command at the
    first time the condition holds while the target covers it. Losing the
    serving cell first is a radio link failure, followed by re-establishment
    on the best cell.
    """
    if duration < 0:
        raise ValueError("duration must be non-negative")
    result = MobilityResult()
    if duration == 0:
        return result
    scene = _Scene(constellation, ids, ue, pattern, constants)
    counters = result.counters
    events = result.events
    end = start + duration
    tol = steps.refine

    serving = scene.best_at(start)
    if serving < 0:
        raise NoCoverage("UE must be in coverage at the start of a connected-mode run")
    since = start
    target = -1
    loss_pred = math.inf
    gap_start = None

    def prepare(t):
        nonlocal target, loss_pred
        target = -1
        loss_pred = scene.predict_loss(serving, t, end + 600.0, scan=_scan_step(pattern), tol=tol)
        if not math.isfinite(loss_pred):
            return
        candidate = scene.best_at(loss_pred + tol, exclude=serving)
        if candidate >= 0:
            target = candidate
            events.append(MobilityEvent(t, EventKind.CHO_PREPARED, _cell_id(scene, serving), _cell_id(scene, target)))
            counters.cho_prepared += 1

    def condition_holds(t):
        if condition.kind is ChoKind.ELEVATION_THRESHOLD:
            return scene.elevation_at(target, t) >= condition.threshold
        if condition.kind is ChoKind.TIME_WINDOW:
            return t >= loss_pred - condition.threshold
        return scene.center_distance_at(serving, t) >= condition.threshold

    def exec_ready(t):
        return target >= 0 and condition_holds(t) and scene.covers_at(target, t)

    def attach(t, new, kind):
        nonlocal serving, since, gap_start
        if serving >= 0:
            result.timeline.append((since, t, _cell_id(scene, serving)))
        old = serving
        events.append(MobilityEvent(t, kind, _cell_id(scene, old), _cell_id(scene, new)))
        if kind is EventKind.CHO_EXECUTED:
            counters.cho_executed += 1
        else:
            counters.reselections += 1
        if gap_start is not None:
            counters.coverage_gap_s += t - gap_start
            gap_start = None
        serving = new
        since = t
        prepare(t)

    prepare(start)
    prev_t = start
    radius = constants.earth_radius
    for times in _step_times(start, duration, steps):
        idx = scene.candidates(prev_t, float(times[-1]))
        elev, angle = scene.evaluate(idx, times)
        cov = scene.covers(idx, elev, angle)
        col = {int(sat): c for c, sat in enumerate(idx)}

        def quiet(k, t_k):
            # nothing can happen in (t_{k-1}, t_k]: checked on the chunk arrays
            if serving < 0:
                return not cov[k].any()
            s_c = col.get(serving)
            if s_c is None or not cov[k, s_c]:
                return False
            t_c = col.get(target)
            if t_c is None or not cov[k, t_c]:
                return True
            if condition.kind is ChoKind.ELEVATION_THRESHOLD:
                return elev[k, t_c] < condition.threshold
            if condition.kind is ChoKind.TIME_WINDOW:
                return t_k < loss_pred - condition.threshold
            return not condition_holds(t_k) if pattern.kind is CellKind.QUASI_EARTH_FIXED else (
                angle[k, s_c] * radius < condition.threshold
            )

        for k, t_k in enumerate(times):
            t_k = float(t_k)
            lo = prev_t
            if quiet(k, t_k):
                prev_t = t_k
                continue
            for _ in range(16):
                if serving >= 0:
                    t_exec = _bisect(exec_ready, lo, t_k, tol) if exec_ready(t_k) else math.inf
                    lost = not scene.covers_at(serving, t_k)
                    t_loss = _bisect(lambda x: not scene.covers_at(serving, x), lo, t_k, tol) if lost else math.inf
                    if t_exec <= t_loss and math.isfinite(t_exec):
                        attach(t_exec, target, EventKind.CHO_EXECUTED)
                        lo = t_exec
                        continue
                    if math.isfinite(t_loss):
                        old = serving
                        result.timeline.append((since, t_loss, _cell_id(scene, old)))
                        events.append(MobilityEvent(
                            t_loss, EventKind.RADIO_LINK_FAILURE, _cell_id(scene, old), _cell_id(scene, target)
                        ))
                        counters.failures += 1
                        new = scene.best_at(t_loss)
                        serving = -1
                        if new >= 0:
                            # re-establishment on the best cell
                            events.append(MobilityEvent(
                                t_loss, EventKind.RESELECTION, _cell_id(scene, old), _cell_id(scene, new)
                            ))
                            counters.reselections += 1
                            serving, since = new, t_loss
                            prepare(t_loss)
                        else:
                            events.append(MobilityEvent(t_loss, EventKind.OUT_OF_COVERAGE, _cell_id(scene, old), None))
                            gap_start = t_loss
                            target = -1
                        lo = t_loss
                        continue
                    break
                else:
                    if scene.best_at(t_k) < 0:
                        break
                    t_back = _bisect(lambda x: scene.best_at(x) >= 0, lo, t_k, tol)
                    new = scene.best_at(t_back)
                    attach(t_back, new, EventKind.RESELECTION)
                    lo = t_back
            prev_t = t_k

    if serving >= 0:
        result.timeline.append((since, end, _cell_id(scene, serving)))
    elif gap_start is not None:
        counters.coverage_gap_s += end - gap_start
    # zero-length bookkeeping intervals from failure/re-establishment pairs
    result.timeline = [iv for iv in result.timeline if iv[1] > iv[0]]
    return result


@dataclass(frozen=True)
class MeasurementOccasion:
    sat_id: int
    time: float
    trigger: str   # "entry", "max" or "exit"


def measurement_schedule(
    eph_list: Sequence[EphemerisRecord] | dict[int, EphemerisRecord],
    ue: GeodeticPosition,
    horizon: float,
    trigger_elevation: float = math.radians(10.0),
    start: float | None = None,
    triggers: Sequence[str] = ("entry", "max", "exit"),
    sample_step: float = 5.0,
    constants: PhysicalConstants = EARTH,
) -> list[MeasurementOccasion]:
    """Ephemeris-predicted measurement instants within ``horizon``.

    For every predicted pass above ``trigger_elevation`` the schedule holds
    the entry, peak and exit times. A pass already in progress at ``start``
    is measured at ``start``.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    items = eph_list.items() if isinstance(eph_list, dict) else enumerate(eph_list)
    items = list(items)
    if start is None:
        start = max((eph.reference_epoch for _, eph in items), default=0.0)
    out = []
    for sat_id, eph in items:
        elements = state_to_elements(eph.state, constants)
        passes = find_passes(
            elements, ue, trigger_elevation, (start, start + horizon),
            sample_step=min(sample_step, horizon), constants=constants,
        )
        for p in passes:
            stamp = {"entry": p.aos, "max": p.max_elevation_time, "exit": p.los}
            for name in triggers:
                out.append(MeasurementOccasion(sat_id, stamp[name], name))
    out.sort(key=lambda m: (m.time, m.sat_id, m.trigger))
    return out


def _fmt_cell(cell):
    return "-" if cell is None else str(cell)


def write_event_log(path, events: Sequence[MobilityEvent]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t_s", "event", "from_cell", "to_cell"])
        for ev in events:
            writer.writerow([f"{ev.time:.3f}", ev.kind.value, _fmt_cell(ev.from_cell), _fmt_cell(ev.to_cell)])


def write_summary(path, counters: MobilityCounters) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["reselections", "taus", "cho_prepared", "cho_executed", "failures", "coverage_gap_s"])
        writer.writerow([
            counters.reselections, counters.taus, counters.cho_prepared,
            counters.cho_executed, counters.failures, f"{counters.coverage_gap_s:.3f}",
        ])
