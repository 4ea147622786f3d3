"""Antenna gain/beamwidth from aperture, free-space loss and downlink C/N0.

Includes the two S-band satellite columns used as built-in radio profiles
(``leo600-iot`` and ``leo600-handheld``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .geometry import AccessGeometry
from .orbit import EARTH

BOLTZMANN_DBW = -228.6          # 10*log10(k), dBW/K/Hz
BEAMWIDTH_CONSTANT_DEG = 58.9   # uniform circular aperture, theta = 58.9 * lambda / D
DEFAULT_EFFICIENCY = 0.6
# handheld UE: 0 dBi antenna, 7 dB noise figure, 290 K antenna temperature
DEFAULT_UE_GT = -31.6


@dataclass(frozen=True)
class AntennaModel:
    aperture_diameter: float
    efficiency: float = DEFAULT_EFFICIENCY
    carrier_freq: float = 2e9

    def __post_init__(self):
        if not self.aperture_diameter > 0:
            raise ValueError(f"aperture diameter must be positive, got {self.aperture_diameter}")
        if not self.carrier_freq > 0:
            raise ValueError(f"carrier frequency must be positive, got {self.carrier_freq}")
        if not 0 < self.efficiency <= 1:
            raise ValueError(f"efficiency must be in (0, 1], got {self.efficiency}")

    @property
    def wavelength(self) -> float:
        return EARTH.light_speed / self.carrier_freq


def gain_from_aperture(antenna: AntennaModel) -> float:
    """Peak gain in dBi, ``10 log10(eta (pi D f / c)^2)``."""
    x = math.pi * antenna.aperture_diameter / antenna.wavelength
    return 10.0 * math.log10(antenna.efficiency * x * x)


def beamwidth_from_aperture(antenna: AntennaModel) -> float:
    """3 dB beamwidth in degrees."""
    return BEAMWIDTH_CONSTANT_DEG * antenna.wavelength / antenna.aperture_diameter


def beam_diameter_at_nadir(altitude: float, beamwidth_3db: float) -> float:
    """Nadir footprint diameter (m) of a beam of ``beamwidth_3db`` degrees."""
    if not altitude > 0:
        raise ValueError(f"altitude must be positive, got {altitude}")
    if not 0 < beamwidth_3db < 180:
        raise ValueError(f"beamwidth must be in (0, 180) degrees, got {beamwidth_3db}")
    return 2.0 * altitude * math.tan(math.radians(beamwidth_3db) / 2.0)


def fspl(distance: float, freq: float) -> float:
    """Free-space path loss in dB."""
    if not freq > 0:
        raise ValueError(f"frequency must be positive, got {freq}")
    wavelength = EARTH.light_speed / freq
    if distance < wavelength / (4 * math.pi):
        raise ValueError(f"distance {distance} m is inside the near field")
    return 20.0 * math.log10(4 * math.pi * distance * freq / EARTH.light_speed)


@dataclass(frozen=True)
class SatelliteRadioProfile:
    label: str
    eirp_density: float          # dBW/MHz
    gt: float                    # dB/K
    tx_rx_max_gain: float        # dBi
    beamwidth_3db: float         # deg
    altitude: float              # m
    beam_diameter_nadir: float   # m
    aperture_diameter: float | None = None   # m, informational

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, float) and not math.isfinite(value):
                raise ValueError(f"{f.name} must be finite")
        expected = beam_diameter_at_nadir(self.altitude, self.beamwidth_3db)
        if abs(expected - self.beam_diameter_nadir) > 1e3:
            raise ValueError(
                f"beam diameter {self.beam_diameter_nadir:.0f} m inconsistent with "
                f"beamwidth {self.beamwidth_3db} deg at {self.altitude:.0f} m "
                f"(expected {expected:.0f} m)"
            )


PROFILES = {
    "leo600-iot": SatelliteRadioProfile(
        label="leo600-iot",
        eirp_density=28.3,
        gt=-12.8,
        tx_rx_max_gain=16.2,
        beamwidth_3db=22.1,
        altitude=600e3,
        beam_diameter_nadir=234e3,
        aperture_diameter=0.4,
    ),
    "leo600-handheld": SatelliteRadioProfile(
        label="leo600-handheld",
        eirp_density=34.0,
        gt=1.1,
        tx_rx_max_gain=30.0,
        beamwidth_3db=4.4,
        altitude=600e3,
        beam_diameter_nadir=46e3,
        aperture_diameter=2.0,
    ),
}


def profile_from_aperture(
    label: str,
    aperture_diameter: float,
    eirp_density: float,
    gt: float,
    altitude: float = 600e3,
    carrier_freq: float = 2e9,
    efficiency: float = DEFAULT_EFFICIENCY,
) -> SatelliteRadioProfile:
    """Derive gain, beamwidth and nadir beam size from an aperture diameter."""
    antenna = AntennaModel(aperture_diameter, efficiency, carrier_freq)
    bw = beamwidth_from_aperture(antenna)
    return SatelliteRadioProfile(
        label=label,
        eirp_density=eirp_density,
        gt=gt,
        tx_rx_max_gain=gain_from_aperture(antenna),
        beamwidth_3db=bw,
        altitude=altitude,
        beam_diameter_nadir=beam_diameter_at_nadir(altitude, bw),
        aperture_diameter=aperture_diameter,
    )


def parse_profile(text: str) -> SatelliteRadioProfile:
    """Read a ``key = value`` profile file (``#`` starts a comment)."""
    known = {f.name: f for f in fields(SatelliteRadioProfile)}
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in known:
            raise ValueError(f"line {lineno}: unrecognised profile entry {raw!r}")
        values[key] = value.strip() if key == "label" else float(value)
    missing = [n for n, f in known.items() if n not in values and f.default is not None]
    if missing:
        raise ValueError(f"profile missing fields: {', '.join(missing)}")
    return SatelliteRadioProfile(**values)


def format_profile(profile: SatelliteRadioProfile) -> str:
    lines = []
    for f in fields(profile):
        value = getattr(profile, f.name)
        if value is not None:
            lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class LinkResult:
    fspl: float
    c_n0: float
    snr: float | None = None
    capacity_estimate: float | None = None
    bandwidth: float | None = None


def shannon_capacity(bandwidth: float, snr_db: float) -> float:
    return bandwidth * math.log2(1.0 + 10.0 ** (snr_db / 10.0))


def downlink_c_n0(
    profile: SatelliteRadioProfile,
    geometry: AccessGeometry | None,
    ue_gt: float = DEFAULT_UE_GT,
    extra_losses: float = 0.0,
    bandwidth: float | None = None,
    path_loss: float | None = None,
) -> LinkResult:
    """Downlink carrier-to-noise density and, given a bandwidth, SNR and
    Shannon capacity.

    The EIRP density is spread over the occupied bandwidth, so the carrier
    EIRP is ``eirp_density + 10 log10(bandwidth / 1 MHz)``; without a
    bandwidth the 1 MHz reference carrier is used. ``path_loss`` overrides
    the free-space loss computed from ``geometry``.
    """
    if path_loss is None:
        if geometry is None:
            raise ValueError("either geometry or path_loss is required")
        path_loss = fspl(geometry.slant_range, geometry.carrier_freq)
    eirp = profile.eirp_density
    if bandwidth is not None:
        if not bandwidth > 0:
            raise ValueError(f"bandwidth must be positive, got {bandwidth}")
        eirp += 10.0 * math.log10(bandwidth / 1e6)
    c_n0 = eirp - path_loss - extra_losses + ue_gt - BOLTZMANN_DBW
    if bandwidth is None:
        return LinkResult(fspl=path_loss, c_n0=c_n0)
    snr = c_n0 - 10.0 * math.log10(bandwidth)
    return LinkResult(
        fspl=path_loss,
        c_n0=c_n0,
        snr=snr,
        capacity_estimate=shannon_capacity(bandwidth, snr),
        bandwidth=bandwidth,
    )
