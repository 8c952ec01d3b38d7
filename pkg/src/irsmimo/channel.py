"""Line-of-sight channel construction.

Every per-hop channel here is rank one: a steering vector on each side
scaled by a complex free-space gain. Steering vectors are parameterized
directly by their phase arguments (radians of phase progression between
adjacent elements), which keeps all inverse-trig branch ambiguity out of
the array code. The geometry-to-phase mapping lives in one place
(`terminal_phase`, `panel_wave_args`) so placement labels and rebuilt
channels always agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .errors import ConfigError


def ula_response(n: int, phase_step: float) -> np.ndarray:
    """Uniform linear array response [1, e^{jX}, ..., e^{jX(n-1)}]."""
    if n < 1:
        raise ConfigError("array size must be >= 1")
    return np.exp(1j * phase_step * np.arange(n))


def upa_response(rows: int, cols: int, phase_v: float, phase_h: float) -> np.ndarray:
    """Uniform planar array response, Kronecker of the two axis responses.

    Row (vertical) axis varies slowest: entry (r, c) maps to index
    r * cols + c and carries phase r * phase_v + c * phase_h.
    """
    return np.kron(ula_response(rows, phase_v), ula_response(cols, phase_h))


def path_gain(distance: float, config: SystemConfig) -> complex:
    """Free-space line-of-sight amplitude sqrt(g0)/d with phase -2*pi*d/lambda."""
    if distance <= 0.0:
        raise ConfigError("path distance must be positive")
    amplitude = math.sqrt(config.pathloss_ref_gain) / distance
    phase = -2.0 * math.pi * distance / config.wavelength
    return amplitude * complex(math.cos(phase), math.sin(phase))


def terminal_phase(terminal_xy, surface_xy, spacing: float, wavelength: float) -> float:
    """ULA phase argument seen at a ground terminal toward a surface.

    Azimuth is taken from the plan view (heights do not enter): the phase
    argument is 2*pi*spacing*sin(azimuth)/wavelength where sin(azimuth) is
    the y-component of the planar unit direction from terminal to surface.
    Both terminals use the same orientation, so a surface north of the
    baseline has a positive phase argument at either end.
    """
    dx = surface_xy[0] - terminal_xy[0]
    dy = surface_xy[1] - terminal_xy[1]
    dist = math.hypot(dx, dy)
    if dist <= 0.0:
        raise ConfigError("surface coincides with a terminal in plan view")
    return 2.0 * math.pi * spacing * (dy / dist) / wavelength


def panel_wave_args(surface_xy, endpoint_xy, config: SystemConfig) -> tuple[float, float]:
    """Vertical/horizontal phase arguments at a surface toward a terminal.

    Surfaces hang at ``irs_height`` with a fixed orientation: element rows
    are stacked vertically (z axis), columns run along the x axis. For the
    3D unit direction e from the surface to the ground terminal the phase
    arguments are the direction cosines scaled by the element spacing:
    vertical 2*pi*d_s*e_z/lambda and horizontal 2*pi*d_s*e_x/lambda.
    """
    dx = endpoint_xy[0] - surface_xy[0]
    dy = endpoint_xy[1] - surface_xy[1]
    dz = -config.irs_height
    dist = math.sqrt(dx * dx + dy * dy + dz * dz)
    if dist <= 0.0:
        raise ConfigError("surface coincides with a terminal")
    scale = 2.0 * math.pi * config.irs_spacing / config.wavelength
    return scale * (dz / dist), scale * (dx / dist)


@dataclass(frozen=True)
class LinkChannel:
    """One rank-one hop: ``matrix`` = complex_gain * steer_a steer_b^H.

    ``angles`` records the phase arguments used to build it, as
    (terminal_array_arg, panel_vertical_arg, panel_horizontal_arg).
    """

    matrix: np.ndarray
    complex_gain: complex
    angles: tuple[float, float, float]


@dataclass(frozen=True)
class CompositeChannel:
    """End-to-end channel with its closed-form factorization.

    ``matrix`` equals a_r_matrix @ diag(sigma_diag) @ a_t_matrix^H. The
    factor columns are unit-norm steering directions; sigma_diag holds the
    per-surface singular values sqrt(Nt*Nr)*|gain*coupling|.
    """

    matrix: np.ndarray
    a_t_matrix: np.ndarray
    a_r_matrix: np.ndarray
    sigma_diag: np.ndarray


def _surface_distances(surface, config: SystemConfig) -> tuple[float, float]:
    h = config.irs_height
    tx = config.tx_position
    rx = config.rx_position
    x, y = surface.position
    d_t = math.sqrt((x - tx[0]) ** 2 + (y - tx[1]) ** 2 + h * h)
    d_r = math.sqrt((x - rx[0]) ** 2 + (y - rx[1]) ** 2 + h * h)
    return d_t, d_r


def build_link_channels(placement, panels, config: SystemConfig):
    """Construct the two rank-one hop channels for every placed surface.

    Returns a list of (incoming, outgoing) LinkChannel pairs, one per
    surface: incoming is the transmitter-to-surface hop with shape
    (M_k, Nt), outgoing the surface-to-receiver hop with shape (Nr, M_k).
    """
    if len(panels) != len(placement.surfaces):
        raise ConfigError("panel list length must match the placement")
    links = []
    for surface, panel in zip(placement.surfaces, panels):
        if panel.element_count < 1:
            raise ConfigError("cannot build a hop channel for a zero-element panel")
        d_t, d_r = _surface_distances(surface, config)
        gain_in = path_gain(d_t, config)
        gain_out = path_gain(d_r, config)

        v_in, h_in = panel_wave_args(surface.position, config.tx_position, config)
        v_out, h_out = panel_wave_args(surface.position, config.rx_position, config)
        steer_in = upa_response(panel.panel_rows, panel.panel_cols, v_in, h_in)
        steer_out = upa_response(panel.panel_rows, panel.panel_cols, v_out, h_out)
        steer_tx = ula_response(config.tx_antennas, surface.aod_phase)
        steer_rx = ula_response(config.rx_antennas, surface.aoa_phase)

        incoming = LinkChannel(
            matrix=gain_in * np.outer(steer_in, steer_tx.conj()),
            complex_gain=gain_in,
            angles=(surface.aod_phase, v_in, h_in),
        )
        outgoing = LinkChannel(
            matrix=gain_out * np.outer(steer_rx, steer_out.conj()),
            complex_gain=gain_out,
            angles=(surface.aoa_phase, v_out, h_out),
        )
        links.append((incoming, outgoing))
    return links


def compose_effective_channel(links, panels) -> CompositeChannel:
    """Cascade hop channels through the configured panels.

    H = sum_k outgoing_k diag(e^{j phases_k}) incoming_k, returned together
    with the steering factorization A_r diag(sigma) A_t^H. The per-surface
    phase rotation e^{-j w_k}, w_k = arg(gain_k * coupling_k), is folded
    into the A_t columns so the factorization reproduces H exactly.
    """
    if len(links) != len(panels):
        raise ConfigError("links and panels must have matching lengths")
    if not links:
        raise ConfigError("at least one surface is required")
    n_t = links[0][0].matrix.shape[1]
    n_r = links[0][1].matrix.shape[0]
    k = len(links)

    h = np.zeros((n_r, n_t), dtype=complex)
    a_t = np.zeros((n_t, k), dtype=complex)
    a_r = np.zeros((n_r, k), dtype=complex)
    sigma = np.zeros(k)
    for idx, ((incoming, outgoing), panel) in enumerate(zip(links, panels)):
        if incoming.matrix.shape[1] != n_t or outgoing.matrix.shape[0] != n_r:
            raise ConfigError("inconsistent antenna counts across links")
        gain_in = incoming.complex_gain
        gain_out = outgoing.complex_gain
        # Rank-one hops: recover steering vectors from the first row/column
        # (entry 0 of any steering vector is 1 by construction).
        steer_in = incoming.matrix[:, 0] / gain_in
        steer_tx = (incoming.matrix[0, :] / (gain_in * steer_in[0])).conj()
        steer_rx = outgoing.matrix[:, 0] / gain_out
        steer_out = (outgoing.matrix[0, :] / (gain_out * steer_rx[0])).conj()

        profile = np.exp(1j * np.asarray(panel.phases, dtype=float))
        coupling = np.sum(steer_out.conj() * profile * steer_in)
        cascade = gain_in * gain_out * coupling
        h += cascade * np.outer(steer_rx, steer_tx.conj())

        rotation = np.exp(-1j * np.angle(cascade)) if cascade != 0 else 1.0
        a_t[:, idx] = rotation * steer_tx / math.sqrt(n_t)
        a_r[:, idx] = steer_rx / math.sqrt(n_r)
        sigma[idx] = math.sqrt(n_t * n_r) * abs(cascade)
    return CompositeChannel(matrix=h, a_t_matrix=a_t, a_r_matrix=a_r, sigma_diag=sigma)
