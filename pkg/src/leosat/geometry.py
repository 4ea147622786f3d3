"""Satellite-UE geometry and radio kinematics.

Sign convention: an approaching satellite has a negative range rate and a
positive Doppler shift, ``doppler = -(f / c) * range_rate``. Ground points
are stationary in the Earth-fixed frame, so relative motion is the
satellite's Earth-fixed velocity (which already contains the omega x r term).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .orbit import (
    EARTH,
    Frame,
    OrbitalElements,
    PhysicalConstants,
    StateVector,
    circular_orbit,
    earth_fixed_to_geodetic,
    geodetic_to_earth_fixed,
    inertial_to_earth_fixed_arrays,
    kepler_pv,
)

LEO_MIN_ALTITUDE = 350e3
LEO_MAX_ALTITUDE = 2000e3


@dataclass(frozen=True)
class GeodeticPosition:
    lat: float
    lon: float
    alt: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.lat, self.lon, self.alt)):
            raise ValueError("geodetic coordinates must be finite")
        if abs(self.lat) > math.pi / 2:
            raise ValueError(f"latitude {self.lat} rad outside [-pi/2, pi/2]")
        if self.alt < -500.0:
            raise ValueError(f"altitude {self.alt} m below -500 m")

    @classmethod
    def from_degrees(cls, lat_deg: float, lon_deg: float, alt: float = 0.0) -> "GeodeticPosition":
        return cls(math.radians(lat_deg), math.radians(lon_deg), alt)

    def ecef(self, constants: PhysicalConstants = EARTH) -> np.ndarray:
        return geodetic_to_earth_fixed(self.lat, self.lon, self.alt, constants)


@dataclass(frozen=True)
class AccessGeometry:
    slant_range: float
    elevation: float
    azimuth: float
    range_rate: float
    range_accel: float
    one_way_delay: float
    delay_drift: float
    doppler: float
    doppler_drift: float
    carrier_freq: float


@dataclass(frozen=True)
class PassWindow:
    aos: float
    los: float
    max_elevation: float
    max_elevation_time: float

    @property
    def duration(self) -> float:
        return self.los - self.aos


def earth_fixed_acceleration(pos, vel, constants: PhysicalConstants = EARTH):
    """Two-body acceleration seen in the rotating frame (gravity, Coriolis,
    centrifugal). Consistent with Kepler trajectories rotated to Earth-fixed."""
    w = constants.earth_rotation_rate
    r = np.linalg.norm(pos, axis=-1, keepdims=True)
    acc = -constants.mu * pos / r**3
    extra = np.stack(
        [
            2 * w * vel[..., 1] + w * w * pos[..., 0],
            -2 * w * vel[..., 0] + w * w * pos[..., 1],
            np.zeros_like(pos[..., 2]),
        ],
        axis=-1,
    )
    return acc + extra


def _local_axes(ue_pos):
    """Unit up/east/north vectors at spherical-Earth ground points."""
    up = ue_pos / np.linalg.norm(ue_pos, axis=-1, keepdims=True)
    lon = np.arctan2(ue_pos[..., 1], ue_pos[..., 0])
    lat = np.arcsin(np.clip(up[..., 2], -1, 1))
    east = np.stack([-np.sin(lon), np.cos(lon), np.zeros_like(lon)], axis=-1)
    north = np.stack(
        [-np.sin(lat) * np.cos(lon), -np.sin(lat) * np.sin(lon), np.cos(lat)], axis=-1
    )
    return up, east, north


def elevation_arrays(sat_pos, ue_pos):
    """Elevation (rad) of Earth-fixed satellite positions seen from ground points."""
    rel = sat_pos - ue_pos
    d = np.linalg.norm(rel, axis=-1)
    up = ue_pos / np.linalg.norm(ue_pos, axis=-1, keepdims=True)
    return np.arcsin(np.clip(np.sum(rel * up, axis=-1) / d, -1.0, 1.0))


def access_arrays(sat_pos, sat_vel, ue_pos, carrier_freq, constants: PhysicalConstants = EARTH):
    """Vectorized geometry for Earth-fixed satellite states and ground points.

    All array arguments broadcast against each other on their leading axes.
    Returns a dict of arrays keyed like the AccessGeometry fields.
    """
    sat_pos = np.asarray(sat_pos, dtype=float)
    sat_vel = np.asarray(sat_vel, dtype=float)
    ue_pos = np.asarray(ue_pos, dtype=float)
    c = constants.light_speed
    rel = sat_pos - ue_pos
    d = np.linalg.norm(rel, axis=-1)
    if np.any(d == 0):
        raise ValueError("zero slant range")
    los = rel / d[..., None]
    rdot = np.sum(los * sat_vel, axis=-1)
    v2 = np.sum(sat_vel * sat_vel, axis=-1)
    acc = earth_fixed_acceleration(sat_pos, sat_vel, constants)
    # full second derivative of |r|: projected acceleration + transverse term
    rddot = np.sum(los * acc, axis=-1) + (v2 - rdot**2) / d
    up, east, north = _local_axes(ue_pos)
    elev = np.arcsin(np.clip(np.sum(los * up, axis=-1), -1.0, 1.0))
    az = np.mod(np.arctan2(np.sum(los * east, axis=-1), np.sum(los * north, axis=-1)), 2 * np.pi)
    # mod of a tiny negative angle rounds up to exactly 2 pi
    az = np.where(az >= 2 * np.pi, 0.0, az)
    k = carrier_freq / c
    return {
        "slant_range": d,
        "elevation": elev,
        "azimuth": az,
        "range_rate": rdot,
        "range_accel": rddot,
        "one_way_delay": d / c,
        "delay_drift": rdot / c,
        "doppler": -k * rdot,
        "doppler_drift": -k * rddot,
    }


def compute_access(
    sat: StateVector,
    ue: GeodeticPosition,
    carrier_freq: float,
    constants: PhysicalConstants = EARTH,
) -> AccessGeometry:
    """Instantaneous range, elevation, delay and Doppler (with drifts).

    A satellite below the horizon is allowed; the elevation is then negative.
    """
    if sat.frame is not Frame.EARTH_FIXED:
        raise ValueError("compute_access expects an earth-fixed satellite state")
    if sat.radius <= constants.earth_radius:
        raise ValueError("satellite is below the Earth surface")
    if not carrier_freq > 0:
        raise ValueError(f"carrier frequency must be positive, got {carrier_freq}")
    out = access_arrays(sat.position, sat.velocity, ue.ecef(constants), carrier_freq, constants)
    return AccessGeometry(carrier_freq=float(carrier_freq), **{k: float(v) for k, v in out.items()})


def max_doppler_ratio(altitude: float, constants: PhysicalConstants = EARTH) -> float:
    """Closed-form bound on |Doppler| / carrier for a circular LEO orbit.

    ``(v / c) * R / (R + h)``: the line-of-sight component of the orbital
    velocity seen from the horizon of a non-rotating Earth. Multiply by 1e6
    for ppm.
    """
    if not LEO_MIN_ALTITUDE <= altitude <= LEO_MAX_ALTITUDE:
        raise ValueError(
            f"altitude {altitude:.0f} m outside the LEO band "
            f"[{LEO_MIN_ALTITUDE:.0f}, {LEO_MAX_ALTITUDE:.0f}] m"
        )
    r = constants.earth_radius + altitude
    v = math.sqrt(constants.mu / r)
    return v / constants.light_speed * constants.earth_radius / r


def earth_fixed_pv(elements, times, constants: PhysicalConstants = EARTH):
    """Two-body Earth-fixed (T, N, 3) positions and velocities."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    pos, vel = kepler_pv(elements, times, constants)
    return inertial_to_earth_fixed_arrays(pos, vel, times, constants)


def _elevation_at(elements, ue_pos, times, constants):
    pos, _ = earth_fixed_pv(elements, times, constants)
    return elevation_arrays(pos[:, 0, :], ue_pos)


def _bisect(f, lo, hi, tol):
    """Shrink [lo, hi] with f(lo) False and f(hi) True until narrower than tol."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def find_passes(
    elements: OrbitalElements,
    ue: GeodeticPosition,
    min_elevation: float,
    window: tuple[float, float],
    sample_step: float = 5.0,
    constants: PhysicalConstants = EARTH,
    tol: float = 1e-3,
) -> list[PassWindow]:
    """All maximal intervals in ``window`` with elevation >= ``min_elevation``.

    The elevation is sampled every ``sample_step`` seconds, crossings are
    refined by bisection to ``tol`` and local maxima that stay below the mask
    between samples are re-checked so short passes are not missed. Passes
    in progress at the window edges are clipped to the window.
    """
    t0, t1 = map(float, window)
    if not t1 > t0:
        raise ValueError(f"empty window [{t0}, {t1}]")
    if not 0 < sample_step <= 10.0:
        raise ValueError(f"sample_step must be in (0, 10] s, got {sample_step}")
    if sample_step > t1 - t0:
        raise ValueError("sample_step is coarser than the window")
    ue_pos = ue.ecef(constants)

    def elev(t):
        return float(_elevation_at(elements, ue_pos, [t], constants)[0])

    def inside(t):
        return elev(t) >= min_elevation

    n = int(math.ceil((t1 - t0) / sample_step))
    times = np.minimum(t0 + sample_step * np.arange(n + 1), t1)
    el = _elevation_at(elements, ue_pos, times, constants)
    vis = el >= min_elevation

    def refine_max(a, b):
        res = minimize_scalar(lambda t: -elev(t), bounds=(a, b), method="bounded",
                              options={"xatol": tol})
        tm = float(res.x)
        # the bounded search never evaluates the endpoints
        cands = [(elev(x), x) for x in (a, tm, b)]
        best = max(cands)
        return best[1], best[0]

    intervals = []
    start = t0 if vis[0] else None
    for k in range(1, len(times)):
        if vis[k] and not vis[k - 1]:
            _, hi = _bisect(inside, times[k - 1], times[k], tol)
            start = hi
        elif vis[k - 1] and not vis[k]:
            lo, _ = _bisect(lambda t: not inside(t), times[k - 1], times[k], tol)
            intervals.append((start, lo))
            start = None
    if start is not None:
        intervals.append((start, t1))

    # grazing passes that peak between samples without a visible sample
    for k in range(1, len(times) - 1):
        if not vis[k] and el[k] > el[k - 1] and el[k] >= el[k + 1] and el[k] > -math.pi / 4:
            tm, em = refine_max(times[k - 1], times[k + 1])
            if em >= min_elevation:
                _, aos = _bisect(inside, times[k - 1], tm, tol)
                los, _ = _bisect(lambda t: not inside(t), tm, times[k + 1], tol)
                intervals.append((aos, los))

    passes = []
    for aos, los in sorted(intervals):
        if not los > aos:
            continue
        tm, em = refine_max(aos, los)
        passes.append(PassWindow(float(aos), float(los), float(em), float(tm)))
    return passes


def combined_path_delay(
    sat: StateVector,
    ue: GeodeticPosition,
    gateway: GeodeticPosition,
    carrier: float,
    constants: PhysicalConstants = EARTH,
) -> tuple[float, float]:
    """One-way UE-satellite-gateway delay and its drift (transparent payload)."""
    service = compute_access(sat, ue, carrier, constants)
    feeder = compute_access(sat, gateway, carrier, constants)
    c = constants.light_speed
    delay = (service.slant_range + feeder.slant_range) / c
    drift = (service.range_rate + feeder.range_rate) / c
    return delay, drift


def cap_half_angle(altitude: float, min_elevation: float, constants: PhysicalConstants = EARTH) -> float:
    """Earth-central angle of the ground region seeing a satellite above
    ``min_elevation``: ``arccos(R cos(eps) / (R + h)) - eps``."""
    r = constants.earth_radius + altitude
    return math.acos(constants.earth_radius * math.cos(min_elevation) / r) - min_elevation


def ground_points_around(center_pos, central_angles, azimuths, constants: PhysicalConstants = EARTH):
    """Ground points at the given central angles/azimuths from the sub-point
    of ``center_pos``; returns an (len(angles) * len(azimuths), 3) array."""
    up = center_pos / np.linalg.norm(center_pos)
    ref = np.array([0.0, 0.0, 1.0]) if abs(up[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(ref, up)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(up, e1)
    lam = np.asarray(central_angles, dtype=float)[:, None]
    az = np.asarray(azimuths, dtype=float)[None, :]
    dirs = (
        np.cos(lam)[..., None] * up
        + np.sin(lam)[..., None] * (np.cos(az)[..., None] * e1 + np.sin(az)[..., None] * e2)
    )
    return constants.earth_radius * dirs.reshape(-1, 3)


@dataclass(frozen=True)
class PathDriftExtreme:
    drift: float          # s/s, signed
    ue_pos: np.ndarray
    gateway_pos: np.ndarray
    points_scanned: int


def worst_case_path_drift(
    sat: StateVector,
    min_elevation: float = 0.0,
    ring_step: float = math.radians(0.25),
    azimuth_step: float = math.radians(0.5),
    constants: PhysicalConstants = EARTH,
) -> PathDriftExtreme:
    """Largest |combined-path delay drift| over ground-point pairs that both
    see ``sat`` above ``min_elevation``.

    The scan covers rings around the sub-satellite point out to the
    visibility edge. For pairs the maximum of ``rdot_a + rdot_b`` is attained
    at the per-point extreme, so the pair search reduces to picking the
    largest positive or negative range rate twice.
    """
    if sat.frame is not Frame.EARTH_FIXED:
        raise ValueError("expected an earth-fixed satellite state")
    altitude = sat.radius - constants.earth_radius
    edge = cap_half_angle(altitude, min_elevation, constants)
    rings = np.append(np.arange(0.0, edge, ring_step), edge * (1 - 1e-12))
    azimuths = np.arange(0.0, 2 * math.pi, azimuth_step)
    pts = ground_points_around(sat.position, rings, azimuths, constants)
    out = access_arrays(sat.position, sat.velocity, pts, 1.0, constants)
    ok = out["elevation"] >= min_elevation - 1e-9
    rdot = np.where(ok, out["range_rate"], np.nan)
    order = np.argsort(np.where(ok, rdot, 0.0))
    # two distinct points: largest pair of approaching or of receding links
    low, high = order[:2], order[-2:]
    if abs(rdot[low].sum()) >= abs(rdot[high].sum()):
        a, b = low
    else:
        a, b = high
    drift = (rdot[a] + rdot[b]) / constants.light_speed
    return PathDriftExtreme(float(drift), pts[a], pts[b], int(ok.sum()))


def access_time_series(
    elements: OrbitalElements,
    ue: GeodeticPosition,
    times,
    carrier_freq: float,
    constants: PhysicalConstants = EARTH,
) -> dict[str, np.ndarray]:
    """Geometry arrays along a two-body trajectory at the given times."""
    times = np.asarray(times, dtype=float)
    pos, vel = earth_fixed_pv(elements, times, constants)
    out = access_arrays(pos[:, 0], vel[:, 0], ue.ecef(constants), carrier_freq, constants)
    out["t"] = times
    return out


@dataclass(frozen=True)
class DopplerExtremes:
    inclination: float        # rad
    max_doppler: float        # Hz, largest |f_D| while above the horizon
    max_doppler_time: float
    max_drift: float          # Hz/s, largest |d f_D / dt|
    max_drift_time: float
    carrier_freq: float

    @property
    def max_doppler_ppm(self) -> float:
        return self.max_doppler / self.carrier_freq * 1e6


def pass_doppler_extremes(
    elements: OrbitalElements,
    ue: GeodeticPosition,
    window: PassWindow,
    carrier_freq: float,
    sample_step: float = 0.5,
    constants: PhysicalConstants = EARTH,
) -> tuple[float, float, float, float]:
    """(max |Doppler|, time, max |Doppler drift|, time) over one pass.

    Dense sampling locates each extreme; a bounded scalar search around the
    best sample then polishes it. The pass edges are always included.
    """
    ue_pos = ue.ecef(constants)
    n = max(2, int(math.ceil(window.duration / sample_step)) + 1)
    times = np.linspace(window.aos, window.los, n)

    def series(t):
        pos, vel = earth_fixed_pv(elements, np.atleast_1d(t), constants)
        return access_arrays(pos[:, 0], vel[:, 0], ue_pos, carrier_freq, constants)

    arr = series(times)
    out = []
    for key in ("doppler", "doppler_drift"):
        k = int(np.argmax(np.abs(arr[key])))
        best_t, best_v = float(times[k]), float(abs(arr[key][k]))
        a, b = float(times[max(k - 1, 0)]), float(times[min(k + 1, n - 1)])
        if b > a:
            res = minimize_scalar(lambda t: -abs(float(series(t)[key][0])), bounds=(a, b),
                                  method="bounded", options={"xatol": 1e-6})
            if -res.fun > best_v:
                best_t, best_v = float(res.x), float(-res.fun)
        out += [best_v, best_t]
    return out[0], out[1], out[2], out[3]


def overhead_pass(
    altitude: float, inclination: float, constants: PhysicalConstants = EARTH
) -> tuple[OrbitalElements, GeodeticPosition, PassWindow]:
    """Circular orbit crossing the equator at t=0 over a UE placed at that
    sub-satellite point, and the zenith pass (0 deg mask) it produces."""
    elements = circular_orbit(altitude, inclination, constants=constants)
    pos, _ = earth_fixed_pv(elements, [0.0], constants)
    lat, lon, _ = earth_fixed_to_geodetic(pos[0, 0], constants)
    ue = GeodeticPosition(float(lat), float(lon), 0.0)
    half = elements.period(constants) / 4
    passes = find_passes(elements, ue, 0.0, (-half, half), sample_step=2.0, constants=constants)
    window = next(p for p in passes if p.aos <= 0.0 <= p.los)
    return elements, ue, window


def overhead_doppler_sweep(
    altitude: float,
    carrier_freq: float,
    inclinations,
    sample_step: float = 0.5,
    constants: PhysicalConstants = EARTH,
) -> list[DopplerExtremes]:
    """Doppler and drift extremes of zenith passes for each inclination."""
    out = []
    for incl in inclinations:
        elements, ue, window = overhead_pass(altitude, float(incl), constants)
        fd, t_fd, drift, t_drift = pass_doppler_extremes(
            elements, ue, window, carrier_freq, sample_step, constants
        )
        out.append(DopplerExtremes(float(incl), fd, t_fd, drift, t_drift, float(carrier_freq)))
    return out


def slant_range_at_elevation(altitude: float, elevation: float, constants: PhysicalConstants = EARTH) -> float:
    """UE-to-satellite distance for a satellite at ``altitude`` seen at ``elevation``."""
    if not altitude > 0:
        raise ValueError(f"altitude must be positive, got {altitude}")
    if not 0 <= elevation <= math.pi / 2:
        raise ValueError("elevation must be in [0, pi/2]")
    r_e = constants.earth_radius
    r = r_e + altitude
    s = math.sin(elevation)
    return math.sqrt(r * r - (r_e * math.cos(elevation)) ** 2) - r_e * s
