"""Walker-delta constellations and satellites-in-view maps."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import GeodeticPosition, cap_half_angle, earth_fixed_pv
from .orbit import EARTH, OrbitalElements, PhysicalConstants, circular_orbit


@dataclass(frozen=True)
class WalkerConfig:
    total_satellites: int
    planes: int
    phasing_factor: int
    inclination: float   # rad
    altitude: float      # m

    def __post_init__(self):
        if self.total_satellites <= 0 or self.planes <= 0:
            raise ValueError("satellite and plane counts must be positive")
        if self.total_satellites % self.planes:
            raise ValueError(
                f"{self.planes} planes do not divide {self.total_satellites} satellites"
            )
        if not 0 <= self.phasing_factor < self.planes:
            raise ValueError(f"phasing factor must be in [0, {self.planes})")
        if not 0 <= self.inclination <= math.pi:
            raise ValueError("inclination must be in [0, pi]")
        if not self.altitude > 0:
            raise ValueError("altitude must be positive")

    @property
    def sats_per_plane(self) -> int:
        return self.total_satellites // self.planes


def generate_walker(
    config: WalkerConfig, epoch: float = 0.0, constants: PhysicalConstants = EARTH
) -> list[OrbitalElements]:
    """Circular Walker-delta i:T/P/F elements, plane-major order."""
    t, p, f = config.total_satellites, config.planes, config.phasing_factor
    s = config.sats_per_plane
    out = []
    for plane in range(p):
        raan = 2 * math.pi * plane / p
        for k in range(s):
            u = 2 * math.pi * k / s + 2 * math.pi * f * plane / t
            out.append(
                circular_orbit(config.altitude, config.inclination, raan, u, epoch, constants)
            )
    return out


def satellites_in_view(
    grid_point: GeodeticPosition | np.ndarray,
    sat_positions: np.ndarray,
    min_elevation: float,
    constants: PhysicalConstants = EARTH,
) -> int:
    """Number of Earth-fixed satellite positions (N, 3) at or above the mask."""
    pts = grid_point.ecef(constants) if isinstance(grid_point, GeodeticPosition) else grid_point
    return int(_count_in_view(np.asarray(pts, float).reshape(1, 3), sat_positions, min_elevation)[0])


def _visible_matrix(points, sats, min_elevation):
    """Boolean (P, N) matrix: satellite n at/above the mask from point p."""
    if len(sats) == 0:
        return np.zeros((len(points), 0), bool)
    r = np.linalg.norm(points, axis=1)
    up = points / r[:, None]
    proj = up @ sats.T                      # |s| cos(angle) per pair
    s2 = np.sum(sats * sats, axis=1)
    d2 = s2[None, :] + r[:, None] ** 2 - 2 * r[:, None] * proj
    height = proj - r[:, None]              # los . up, times range
    sin_mask = math.sin(min_elevation)
    # elevation >= mask  <=>  height >= sin(mask) * range
    if sin_mask >= 0:
        return (height >= 0) & (height * height >= sin_mask * sin_mask * d2)
    return (height >= 0) | (height * height <= sin_mask * sin_mask * d2)


def _count_in_view(points, sats, min_elevation):
    return _visible_matrix(points, sats, min_elevation).sum(axis=1)


@dataclass(frozen=True)
class CoverageGrid:
    lat_step: float          # deg
    lon_step: float          # deg
    min_elevation: float     # rad
    counts: np.ndarray       # (n_lat, n_lon) int
    timestamp: float

    @property
    def lats(self) -> np.ndarray:
        return np.arange(self.counts.shape[0]) * self.lat_step - 90.0

    @property
    def lons(self) -> np.ndarray:
        return np.arange(self.counts.shape[1]) * self.lon_step - 180.0

    def covered_fraction(self, lat_limit: float = 90.0, min_count: int = 1) -> float:
        """cos(lat)-weighted fraction of grid points with >= ``min_count``
        satellites in view, restricted to |lat| <= ``lat_limit`` degrees."""
        lats = self.lats
        sel = np.abs(lats) <= lat_limit + 1e-9
        w = np.cos(np.radians(lats[sel]))
        covered = (self.counts[sel] >= min_count).mean(axis=1)
        return float(np.sum(w * covered) / np.sum(w))

    def summary(self) -> dict[str, float]:
        return {
            "timestamp_s": self.timestamp,
            "min_count": int(self.counts.min()),
            "mean_count": float(self.counts.mean()),
            "max_count": int(self.counts.max()),
            "covered_fraction": self.covered_fraction(),
        }


def grid_points(lat_step: float, lon_step: float, constants: PhysicalConstants = EARTH):
    lats = np.radians(np.arange(-90.0, 90.0 + 1e-9, lat_step))
    lons = np.radians(np.arange(-180.0, 180.0 - 1e-9, lon_step))
    la, lo = np.meshgrid(lats, lons, indexing="ij")
    r = constants.earth_radius
    pts = np.stack(
        [r * np.cos(la) * np.cos(lo), r * np.cos(la) * np.sin(lo), r * np.sin(la)], axis=-1
    )
    return pts, (len(lats), len(lons))


def coverage_counts(
    sat_positions: np.ndarray,
    lat_step: float = 1.0,
    lon_step: float = 1.0,
    min_elevation: float = math.radians(10.0),
    threads: int = 1,
    constants: PhysicalConstants = EARTH,
) -> np.ndarray:
    pts, shape = grid_points(lat_step, lon_step, constants)
    flat = pts.reshape(-1, 3)
    sats = np.asarray(sat_positions, float).reshape(-1, 3)
    chunks = np.array_split(np.arange(len(flat)), max(1, len(flat) // 4096))

    def work(idx):
        return _count_in_view(flat[idx], sats, min_elevation)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(idx) for idx in chunks]
    return np.concatenate(parts).astype(np.int64).reshape(shape)


def constellation_positions(
    elements: Sequence[OrbitalElements], t: float, constants: PhysicalConstants = EARTH
) -> np.ndarray:
    if not elements:
        return np.zeros((0, 3))
    pos, _ = earth_fixed_pv(elements, [t], constants)
    return pos[0]


def coverage_map(
    config: WalkerConfig | Sequence[OrbitalElements],
    t: float = 0.0,
    lat_step: float = 1.0,
    lon_step: float | None = None,
    min_elevation: float = math.radians(10.0),
    threads: int = 1,
    constants: PhysicalConstants = EARTH,
) -> CoverageGrid:
    """Satellites-in-view snapshot on a lat/lon grid at time ``t``."""
    elements = generate_walker(config, constants=constants) if isinstance(config, WalkerConfig) else list(config)
    lon_step = lat_step if lon_step is None else lon_step
    sats = constellation_positions(elements, t, constants)
    counts = coverage_counts(sats, lat_step, lon_step, min_elevation, threads, constants)
    return CoverageGrid(lat_step, lon_step, min_elevation, counts, float(t))


def max_covered_latitude(inclination: float, altitude: float, min_elevation: float,
                         constants: PhysicalConstants = EARTH) -> float:
    """Highest latitude (rad) any satellite of the given inclination can cover."""
    incl = min(inclination, math.pi - inclination)
    return min(math.pi / 2, incl + cap_half_angle(altitude, min_elevation, constants))
