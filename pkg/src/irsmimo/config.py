"""System-level configuration and unit helpers.

All quantities are SI: meters, watts, radians. Power-like inputs given in
dBm are converted once, at the edge, never inside the numerics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ConfigError


def dbm_to_watts(value_dbm: float) -> float:
    """Convert a dBm figure to watts: x dBm -> 10^((x-30)/10) W."""
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


def watts_to_dbm(value_watts: float) -> float:
    if value_watts <= 0.0:
        raise ConfigError("power must be positive to express in dBm")
    return 30.0 + 10.0 * math.log10(value_watts)


@dataclass(frozen=True)
class SystemConfig:
    """Immutable description of one point-to-point link scenario.

    Defaults reproduce the reference scenario used throughout the test
    suite: an 8-antenna transmitter at the origin and a 4-antenna receiver
    85 m away, both with half-wavelength spacing at 2 GHz (0.15 m), noise
    power -80 dBm, transmit budget 30 dBm, and 2400 reflecting elements
    across up to 4 surfaces mounted at 5 m height.
    """

    tx_antennas: int = 8
    rx_antennas: int = 4
    wavelength: float = 0.15
    tx_spacing: float = 0.075
    rx_spacing: float = 0.075
    irs_spacing: float = 0.075
    tx_position: tuple[float, float] = (0.0, 0.0)
    rx_position: tuple[float, float] = (85.0, 0.0)
    irs_height: float = 5.0
    noise_power: float = 1e-11
    power_budget: float = 1.0
    element_budget: int = 2400
    num_surfaces: int = 4
    pathloss_ref_gain: float = field(default=-1.0)

    def __post_init__(self):
        if self.tx_antennas < 1 or self.rx_antennas < 1:
            raise ConfigError("antenna counts must be >= 1")
        for name in ("wavelength", "tx_spacing", "rx_spacing", "irs_spacing"):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"{name} must be positive")
        if self.irs_height < 0.0:
            raise ConfigError("irs_height must be non-negative")
        if self.noise_power <= 0.0:
            raise ConfigError("noise_power must be positive")
        if self.power_budget <= 0.0:
            raise ConfigError("power_budget must be positive")
        if int(self.element_budget) != self.element_budget or self.element_budget < 0:
            raise ConfigError("element_budget must be a non-negative integer")
        if self.num_surfaces < 1:
            raise ConfigError("num_surfaces must be >= 1")
        if self.num_surfaces > min(self.tx_antennas, self.rx_antennas):
            raise ConfigError(
                "num_surfaces must not exceed min(tx_antennas, rx_antennas); "
                f"got {self.num_surfaces} > "
                f"{min(self.tx_antennas, self.rx_antennas)}"
            )
        if len(self.tx_position) != 2 or len(self.rx_position) != 2:
            raise ConfigError("terminal positions are 2D ground coordinates")
        # Free-space reference gain at 1 m, (wavelength / 4 pi)^2, unless the
        # caller pinned a different value.
        if self.pathloss_ref_gain == -1.0:
            object.__setattr__(
                self, "pathloss_ref_gain", (self.wavelength / (4.0 * math.pi)) ** 2
            )
        elif self.pathloss_ref_gain <= 0.0:
            raise ConfigError("pathloss_ref_gain must be positive")

    def with_updates(self, **kwargs) -> "SystemConfig":
        """Return a copy with the given fields replaced (re-validated)."""
        return replace(self, **kwargs)


def default_config(**overrides) -> SystemConfig:
    """Reference scenario with optional field overrides."""
    return SystemConfig(**overrides)
