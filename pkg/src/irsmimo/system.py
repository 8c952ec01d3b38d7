"""End-to-end assembly: placement -> aligned panels -> composite channel.

Convenience layer that wires the geometry, per-surface panels with
rate-optimal phase profiles, and the stacked channel into single calls,
so experiments only deal with a placement and an element split.
"""

from __future__ import annotations

import numpy as np

from .beamforming import IrsPanel, aligned_panel, panel_shape
from .channel import (
    CompositeChannel,
    build_link_channels,
    compose_effective_channel,
    panel_wave_args,
    upa_response,
)
from .config import SystemConfig
from .errors import ConfigError
from .placement import PlacementResult, link_cnr


def configured_panels(placement: PlacementResult, elements, config: SystemConfig) -> list[IrsPanel]:
    """Build one phase-aligned panel per placed surface.

    ``elements`` gives the per-surface element counts; each panel gets a
    near-square grid and the phase profile that points its incoming beam
    at the transmitter and its outgoing beam at the receiver, which makes
    the coupling magnitude exactly the element count.
    """
    counts = [int(v) for v in elements]
    if len(counts) != len(placement.surfaces):
        raise ConfigError("element list length must match the number of surfaces")
    panels = []
    for surface, count in zip(placement.surfaces, counts):
        if count == 0:
            panels.append(IrsPanel(element_count=0, panel_rows=0, panel_cols=0))
            continue
        rows, cols = panel_shape(count)
        arg_in_v, arg_in_h = panel_wave_args(surface.position, config.tx_position, config)
        arg_out_v, arg_out_h = panel_wave_args(surface.position, config.rx_position, config)
        steer_in = upa_response(rows, cols, arg_in_v, arg_in_h)
        steer_out = upa_response(rows, cols, arg_out_v, arg_out_h)
        panels.append(aligned_panel(count, steer_in, steer_out))
    return panels


def effective_channel(placement: PlacementResult, elements, config: SystemConfig) -> CompositeChannel:
    """Composite stacked channel for a placement and an element split."""
    panels = configured_panels(placement, elements, config)
    links = build_link_channels(placement, panels, config)
    return compose_effective_channel(links, panels)


def analytic_singular_values(placement: PlacementResult, elements, config: SystemConfig) -> np.ndarray:
    """Closed-form singular values under perfect per-surface alignment.

    With aligned phases the coupling magnitude equals the element count,
    so stream k contributes sqrt(Nt*Nr) * |rho_k| * M_k.
    """
    counts = np.asarray([int(v) for v in elements], dtype=float)
    if counts.size != len(placement.surfaces):
        raise ConfigError("element list length must match the number of surfaces")
    gains = np.array([abs(s.cascade_gain) for s in placement.surfaces])
    scale = np.sqrt(config.tx_antennas * config.rx_antennas)
    return scale * gains * counts


__all__ = [
    "analytic_singular_values",
    "configured_panels",
    "effective_channel",
    "link_cnr",
]
