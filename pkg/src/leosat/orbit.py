"""Orbit representation, two-body and J2 propagation, frame transforms.

Geometry uses a spherical Earth; J2 only enters as an orbit perturbation
in :func:`propagate_j2`. The Earth-fixed frame rotates uniformly about the
inertial z axis with angle ``earth_rotation_rate * t`` (zero at t = 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhysicalConstants:
    mu: float = 3.986004418e14             # m^3/s^2
    earth_radius: float = 6.371e6          # m, spherical model
    j2: float = 1.08263e-3
    light_speed: float = 2.99792458e8      # m/s
    earth_rotation_rate: float = 7.2921159e-5  # rad/s

    def __post_init__(self):
        for name in ("mu", "earth_radius", "j2", "light_speed", "earth_rotation_rate"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and positive, got {value!r}")


EARTH = PhysicalConstants()


class Frame(str, Enum):
    INERTIAL = "inertial"
    EARTH_FIXED = "earth_fixed"


def _check_finite(**values):
    for name, value in values.items():
        if not np.all(np.isfinite(value)):
            raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class OrbitalElements:
    """Classical Keplerian elements at ``epoch`` (SI units, radians).

    Angles are normalized to [0, 2*pi) on construction.
    """

    semi_major_axis: float
    eccentricity: float
    inclination: float
    raan: float
    arg_perigee: float
    mean_anomaly_epoch: float
    epoch: float = 0.0
    earth_radius: float = field(default=EARTH.earth_radius, repr=False, compare=False)

    def __post_init__(self):
        _check_finite(
            semi_major_axis=self.semi_major_axis,
            eccentricity=self.eccentricity,
            inclination=self.inclination,
            raan=self.raan,
            arg_perigee=self.arg_perigee,
            mean_anomaly_epoch=self.mean_anomaly_epoch,
            epoch=self.epoch,
        )
        if not 0.0 <= self.eccentricity < 1.0:
            raise ValueError(f"eccentricity must be in [0, 1), got {self.eccentricity}")
        if self.semi_major_axis <= self.earth_radius:
            raise ValueError(
                f"semi_major_axis {self.semi_major_axis} m is inside the Earth"
            )
        if not 0.0 <= self.inclination <= math.pi:
            raise ValueError(f"inclination must be in [0, pi], got {self.inclination}")
        for name in ("raan", "arg_perigee", "mean_anomaly_epoch"):
            object.__setattr__(self, name, float(getattr(self, name)) % TWO_PI)

    def mean_motion(self, constants: PhysicalConstants = EARTH) -> float:
        return math.sqrt(constants.mu / self.semi_major_axis**3)

    def period(self, constants: PhysicalConstants = EARTH) -> float:
        return TWO_PI / self.mean_motion(constants)

    @property
    def altitude(self) -> float:
        """Mean altitude above the spherical Earth (exact for circular orbits)."""
        return self.semi_major_axis - self.earth_radius


@dataclass(frozen=True)
class StateVector:
    position: np.ndarray
    velocity: np.ndarray
    frame: Frame
    time: float

    def __post_init__(self):
        pos = np.array(self.position, dtype=float).reshape(3)
        vel = np.array(self.velocity, dtype=float).reshape(3)
        _check_finite(position=pos, velocity=vel, time=self.time)
        pos.flags.writeable = False
        vel.flags.writeable = False
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "velocity", vel)
        object.__setattr__(self, "frame", Frame(self.frame))
        object.__setattr__(self, "time", float(self.time))

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.position))

    @property
    def speed(self) -> float:
        return float(np.linalg.norm(self.velocity))


@dataclass(frozen=True)
class EphemerisRecord:
    """Broadcast ephemeris: an inertial state tagged with its reference epoch."""

    state: StateVector
    reference_epoch: float

    def __post_init__(self):
        if self.state.frame is not Frame.INERTIAL:
            raise ValueError("ephemeris state must be in the inertial frame")
        if self.state.time != self.reference_epoch:
            raise ValueError(
                f"state time {self.state.time} differs from reference epoch {self.reference_epoch}"
            )

    @classmethod
    def from_state(cls, state: StateVector) -> "EphemerisRecord":
        return cls(state=state, reference_epoch=state.time)


# --- Kepler's equation -----------------------------------------------------

def solve_kepler(mean_anomaly, eccentricity, tol: float = 1e-14, max_iter: int = 60):
    """Solve ``E - e*sin(E) = M`` for the eccentric anomaly by Newton's method.

    Works elementwise on arrays. Returns E with the same branch as M (no
    wrapping), so callers can keep continuity across revolutions.
    """
    M = np.asarray(mean_anomaly, dtype=float)
    e = np.asarray(eccentricity, dtype=float)
    if np.any((e < 0) | (e >= 1)):
        raise ValueError("eccentricity must be in [0, 1)")
    # reduce to [-pi, pi) for a well-conditioned start, then restore the offset
    offset = TWO_PI * np.floor((M + math.pi) / TWO_PI)
    m = M - offset
    E = np.where(e < 0.8, m + e * np.sin(m), np.where(m >= 0, math.pi, -math.pi) * np.ones_like(m))
    for _ in range(max_iter):
        f = E - e * np.sin(E) - m
        step = f / (1.0 - e * np.cos(E))
        E = E - step
        if np.all(np.abs(step) < tol):
            break
    else:
        raise RuntimeError("Kepler solver did not converge")
    E = E + offset
    if E.ndim == 0:
        return float(E)
    return E


def element_table(elements) -> np.ndarray:
    """(7, N) array of (a, e, i, raan, argp, M0, epoch) columns."""
    return _elements_arrays(elements)


def _elements_arrays(elements):
    """Stack a sequence of OrbitalElements into broadcastable column arrays."""
    if isinstance(elements, np.ndarray):
        return elements
    if isinstance(elements, OrbitalElements):
        elements = [elements]
    cols = np.array(
        [
            (
                el.semi_major_axis,
                el.eccentricity,
                el.inclination,
                el.raan,
                el.arg_perigee,
                el.mean_anomaly_epoch,
                el.epoch,
            )
            for el in elements
        ],
        dtype=float,
    ).reshape(-1, 7)
    return cols.T


def kepler_pv(elements, times, constants: PhysicalConstants = EARTH):
    """Vectorized two-body positions/velocities in the inertial frame.

    ``elements`` is one OrbitalElements, a sequence of N, or a (7, N)
    :func:`element_table`; ``times`` has shape (T,). Returns ``(pos, vel)`` each of shape (T, N, 3).
    """
    a, e, inc, raan, argp, m0, epoch = _elements_arrays(elements)
    t = np.atleast_1d(np.asarray(times, dtype=float))[:, None]
    n = np.sqrt(constants.mu / a**3)
    M = m0 + n * (t - epoch)
    E = np.asarray(solve_kepler(M, np.broadcast_to(e, M.shape)))
    cosE, sinE = np.cos(E), np.sin(E)
    sq = np.sqrt(1.0 - e**2)
    # perifocal coordinates from the eccentric anomaly
    xp = a * (cosE - e)
    yp = a * sq * sinE
    rdot = n * a / (1.0 - e * cosE)
    vxp = -rdot * sinE
    vyp = rdot * sq * cosE

    cO, sO = np.cos(raan), np.sin(raan)
    co, so = np.cos(argp), np.sin(argp)
    ci, si = np.cos(inc), np.sin(inc)
    p = np.stack([cO * co - sO * so * ci, sO * co + cO * so * ci, so * si], axis=-1)
    q = np.stack([-cO * so - sO * co * ci, -sO * so + cO * co * ci, co * si], axis=-1)
    pos = xp[..., None] * p + yp[..., None] * q
    vel = vxp[..., None] * p + vyp[..., None] * q
    return pos, vel


def kepler_to_state(
    elements: OrbitalElements, t: float, constants: PhysicalConstants = EARTH
) -> StateVector:
    """Two-body inertial state of ``elements`` at time ``t``."""
    _check_finite(t=t)
    if t < elements.epoch - elements.period(constants):
        raise ValueError("backward propagation limited to one orbital period")
    pos, vel = kepler_pv(elements, [t], constants)
    return StateVector(pos[0, 0], vel[0, 0], Frame.INERTIAL, t)


def state_to_elements(
    state: StateVector, constants: PhysicalConstants = EARTH
) -> OrbitalElements:
    """Osculating Keplerian elements of an inertial state.

    For circular orbits the argument of perigee is set to zero and the mean
    anomaly carries the argument of latitude; for equatorial orbits the
    RAAN is set to zero and longitudes are measured from the x axis.
    """
    if state.frame is not Frame.INERTIAL:
        raise ValueError("state_to_elements requires an inertial state")
    mu = constants.mu
    r = np.asarray(state.position)
    v = np.asarray(state.velocity)
    rn = np.linalg.norm(r)
    vn2 = float(v @ v)
    h = np.cross(r, v)
    hn = np.linalg.norm(h)
    if hn == 0:
        raise ValueError("degenerate (rectilinear) state")
    energy = 0.5 * vn2 - mu / rn
    if energy >= 0:
        raise ValueError("state is not on a bound orbit")
    a = float(-mu / (2.0 * energy))
    e_vec = np.cross(v, h) / mu - r / rn
    e = float(np.linalg.norm(e_vec))
    inc = math.acos(max(-1.0, min(1.0, h[2] / hn)))
    node = np.array([-h[1], h[0], 0.0])
    nn = np.linalg.norm(node)
    eps = 1e-11
    equatorial = nn < eps * hn
    circular = e < eps
    if equatorial:
        raan = 0.0
        node_dir = np.array([1.0, 0.0, 0.0])
    else:
        raan = math.atan2(node[1], node[0])
        node_dir = node / nn
    h_hat = h / hn
    # in-plane angle of a vector measured from node_dir toward h x node_dir
    ref2 = np.cross(h_hat, node_dir)

    def in_plane_angle(vec):
        return math.atan2(float(vec @ ref2), float(vec @ node_dir))

    if circular:
        argp = 0.0
        u = in_plane_angle(r)
        E = u
        e = 0.0
    else:
        argp = in_plane_angle(e_vec)
        e_hat = e_vec / e
        p_hat = np.cross(h_hat, e_hat)
        nu = math.atan2(float(r @ p_hat), float(r @ e_hat))
        E = 2.0 * math.atan2(math.sqrt(1 - e) * math.sin(nu / 2), math.sqrt(1 + e) * math.cos(nu / 2))
    M = E - e * math.sin(E)
    return OrbitalElements(a, e, inc, raan, argp, M, state.time, earth_radius=constants.earth_radius)


def propagate_two_body(
    state: StateVector, dt: float, constants: PhysicalConstants = EARTH
) -> StateVector:
    """Analytic two-body propagation of an inertial state by ``dt`` seconds."""
    elements = state_to_elements(state, constants)
    return kepler_to_state(elements, state.time + dt, constants)


# --- numerical propagation ---------------------------------------------------

def j2_acceleration(pos, constants: PhysicalConstants = EARTH, j2: float | None = None):
    """Two-body plus J2 zonal acceleration; ``pos`` has shape (..., 3)."""
    j2 = constants.j2 if j2 is None else j2
    r2 = np.sum(pos * pos, axis=-1, keepdims=True)
    r = np.sqrt(r2)
    acc = -constants.mu * pos / (r2 * r)
    if j2:
        z2_r2 = pos[..., 2:3] ** 2 / r2
        k = -1.5 * j2 * constants.mu * constants.earth_radius**2 / (r2 * r2 * r)
        factor = np.concatenate([1 - 5 * z2_r2, 1 - 5 * z2_r2, 3 - 5 * z2_r2], axis=-1)
        acc = acc + k * pos * factor
    return acc


def _rk4(pos, vel, dt, n_steps, accel):
    h = dt / n_steps
    for _ in range(n_steps):
        a1 = accel(pos)
        k1r, k1v = vel, a1
        k2r, k2v = vel + 0.5 * h * k1v, accel(pos + 0.5 * h * k1r)
        k3r, k3v = vel + 0.5 * h * k2v, accel(pos + 0.5 * h * k2r)
        k4r, k4v = vel + h * k3v, accel(pos + h * k3r)
        pos = pos + (h / 6.0) * (k1r + 2 * k2r + 2 * k3r + k4r)
        vel = vel + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
    return pos, vel


def propagate_j2(
    initial: StateVector,
    dt: float,
    step: float = 1.0,
    constants: PhysicalConstants = EARTH,
    j2: float | None = None,
) -> StateVector:
    """Integrate two-body + J2 motion with fixed-step RK4.

    The step actually used is ``dt / ceil(dt / step)`` so the final time is
    hit exactly. Pass ``j2=0`` to integrate pure two-body motion.
    """
    if initial.frame is not Frame.INERTIAL:
        raise ValueError("propagate_j2 requires an inertial state")
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    if step > 1.0:
        raise ValueError(f"step must be <= 1 s, got {step}")
    if dt < 0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    if initial.radius <= constants.earth_radius:
        raise ValueError("initial state is inside the Earth")
    n_steps = max(1, math.ceil(dt / step - 1e-12)) if dt > 0 else 0
    pos = np.array(initial.position)
    vel = np.array(initial.velocity)
    if n_steps:
        pos, vel = _rk4(pos, vel, dt, n_steps, lambda p: j2_acceleration(p, constants, j2))
    return StateVector(pos, vel, Frame.INERTIAL, initial.time + dt)


def propagate_j2_series(
    initial: StateVector,
    offsets,
    step: float = 1.0,
    constants: PhysicalConstants = EARTH,
    j2: float | None = None,
) -> list[StateVector]:
    """Propagate once through a sorted list of non-negative time offsets."""
    offsets = [float(x) for x in offsets]
    if any(b < a for a, b in zip(offsets, offsets[1:])):
        raise ValueError("offsets must be sorted")
    out = []
    current = initial
    for off in offsets:
        current = propagate_j2(current, initial.time + off - current.time, step, constants, j2)
        out.append(current)
    return out


# --- frames ----------------------------------------------------------------

def _rot_z(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def inertial_to_earth_fixed_arrays(pos, vel, times, constants: PhysicalConstants = EARTH):
    """Rotate (T, N, 3) inertial arrays sampled at ``times`` (T,) to Earth-fixed."""
    w = constants.earth_rotation_rate
    theta = w * np.asarray(times, dtype=float).reshape(-1, *([1] * (pos.ndim - 1)))
    c, s = np.cos(theta), np.sin(theta)
    x, y, z = pos[..., 0], pos[..., 1], pos[..., 2]
    xe = c[..., 0] * x + s[..., 0] * y
    ye = -s[..., 0] * x + c[..., 0] * y
    pos_ef = np.stack([xe, ye, z], axis=-1)
    # v_ef = R(-theta) (v - w x r)
    vx = vel[..., 0] + w * y
    vy = vel[..., 1] - w * x
    vxe = c[..., 0] * vx + s[..., 0] * vy
    vye = -s[..., 0] * vx + c[..., 0] * vy
    vel_ef = np.stack([vxe, vye, vel[..., 2]], axis=-1)
    return pos_ef, vel_ef


def inertial_to_earth_fixed(
    state: StateVector, t: float | None = None, constants: PhysicalConstants = EARTH
) -> StateVector:
    if state.frame is not Frame.INERTIAL:
        raise ValueError(f"expected an inertial state, got {state.frame.value}")
    t = state.time if t is None else t
    w = np.array([0.0, 0.0, constants.earth_rotation_rate])
    rot = _rot_z(-constants.earth_rotation_rate * t)
    pos = rot @ state.position
    vel = rot @ (state.velocity - np.cross(w, state.position))
    return StateVector(pos, vel, Frame.EARTH_FIXED, t)


def earth_fixed_to_inertial(
    state: StateVector, t: float | None = None, constants: PhysicalConstants = EARTH
) -> StateVector:
    if state.frame is not Frame.EARTH_FIXED:
        raise ValueError(f"expected an earth-fixed state, got {state.frame.value}")
    t = state.time if t is None else t
    w = np.array([0.0, 0.0, constants.earth_rotation_rate])
    rot = _rot_z(constants.earth_rotation_rate * t)
    pos = rot @ state.position
    vel = rot @ state.velocity + np.cross(w, pos)
    return StateVector(pos, vel, Frame.INERTIAL, t)


def geodetic_to_earth_fixed(
    lat: float, lon: float, alt: float = 0.0, constants: PhysicalConstants = EARTH
) -> np.ndarray:
    """Spherical-Earth position of a ground point (radians, metres)."""
    lat_arr = np.asarray(lat, dtype=float)
    if np.any(np.abs(lat_arr) > math.pi / 2 + 1e-15) or not np.all(np.isfinite(lat_arr)):
        raise ValueError(f"latitude out of range [-pi/2, pi/2]: {lat!r}")
    r = constants.earth_radius + np.asarray(alt, dtype=float)
    cl = np.cos(lat_arr)
    return np.stack(
        [r * cl * np.cos(lon), r * cl * np.sin(lon), r * np.sin(lat_arr) * np.ones_like(cl)],
        axis=-1,
    )


def earth_fixed_to_geodetic(pos, constants: PhysicalConstants = EARTH):
    """Inverse of :func:`geodetic_to_earth_fixed`; returns (lat, lon, alt)."""
    pos = np.asarray(pos, dtype=float)
    r = np.linalg.norm(pos, axis=-1)
    lat = np.arcsin(np.clip(pos[..., 2] / r, -1.0, 1.0))
    lon = np.arctan2(pos[..., 1], pos[..., 0])
    return lat, lon, r - constants.earth_radius


def circular_orbit(
    altitude: float,
    inclination: float,
    raan: float = 0.0,
    arg_latitude: float = 0.0,
    epoch: float = 0.0,
    constants: PhysicalConstants = EARTH,
) -> OrbitalElements:
    """Convenience constructor: circular orbit with the satellite at
    argument of latitude ``arg_latitude`` at ``epoch``."""
    return OrbitalElements(
        constants.earth_radius + altitude,
        0.0,
        inclination,
        raan,
        0.0,
        arg_latitude,
        epoch,
        earth_radius=constants.earth_radius,
    )
