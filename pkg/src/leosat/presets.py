"""Bundled constellation and radio-profile presets.

Constellation rows carry the satellite count, altitude(s) and indicative
carrier frequencies of well-known LEO systems. Plane counts, phasing and
inclinations are not part of those public figures; the values below are
representative choices for Walker-delta reconstructions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .coverage import WalkerConfig, generate_walker
from .link_budget import PROFILES
from .orbit import EARTH, OrbitalElements, PhysicalConstants


@dataclass(frozen=True)
class ConstellationPreset:
    name: str
    shells: tuple[WalkerConfig, ...]
    dl_freq: float        # Hz
    ul_freq: float        # Hz
    terminal: str

    @property
    def total_satellites(self) -> int:
        return sum(s.total_satellites for s in self.shells)

    def elements(self, epoch: float = 0.0, constants: PhysicalConstants = EARTH) -> list[OrbitalElements]:
        out = []
        for shell in self.shells:
            out.extend(generate_walker(shell, epoch, constants))
        return out


def _walker(total, planes, phasing, incl_deg, alt_km):
    return WalkerConfig(total, planes, phasing, math.radians(incl_deg), alt_km * 1e3)


CONSTELLATIONS = {
    p.name: p
    for p in (
        ConstellationPreset("iridium-gen1", (_walker(66, 6, 2, 86.4, 780),), 1.6e9, 1.6e9, "specific handset"),
        ConstellationPreset("globalstar", (_walker(48, 8, 1, 52.0, 1440),), 2.4e9, 1.6e9, "specific handset"),
        ConstellationPreset("ast", (_walker(240, 16, 1, 53.0, 720),), 2.0e9, 2.0e9, "commercial handset"),
        ConstellationPreset("oneweb", (_walker(650, 26, 1, 87.9, 1200),), 12e9, 14e9, "VSAT, ESIM"),
        ConstellationPreset("starlink-gen1", (_walker(1584, 72, 1, 53.0, 550),), 12e9, 14e9, "VSAT, ESIM"),
        ConstellationPreset(
            "telesat",
            (_walker(78, 6, 1, 99.0, 1015), _walker(220, 20, 1, 37.4, 1325)),
            20e9, 29e9, "VSAT, ESIM",
        ),
        ConstellationPreset("kuiper", (_walker(3200, 80, 1, 51.9, 600),), 20e9, 29e9, "VSAT, ESIM"),
    )
}

RADIO_PROFILES = PROFILES

PRESET_NAMES = tuple(CONSTELLATIONS) + tuple(RADIO_PROFILES)


def constellation_preset(name: str) -> ConstellationPreset:
    try:
        return CONSTELLATIONS[name]
    except KeyError:
        raise KeyError(
            f"unknown constellation preset {name!r}; choose from {', '.join(CONSTELLATIONS)}"
        ) from None
