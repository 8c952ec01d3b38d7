"""Surface placement on orthogonal angle grids.

Candidate surface sites are the plan-view intersections of departure rays
from the transmitter with arrival rays at the receiver, where each ray
realizes one entry of the DFT phase grid of the corresponding array. A
greedy sweep then keeps the strongest candidates while discarding every
candidate that shares a departure or arrival angle with a kept one, so the
surviving steering vectors stay mutually orthogonal by construction.

Ray conventions: both arrays lie in the ground plane with broadsides
facing each other along the x axis (transmitter toward +x, receiver
toward -x). A phase argument X maps to sin(azimuth) = X * lambda /
(2 pi spacing); the ray leaves the terminal with planar direction
(cos(az), sin(az)) at the transmitter and (-cos(az), sin(az)) at the
receiver, so positive phase arguments point north of the baseline and
negative ones south. |sin| = 1 degenerates to a ray along the array axis
(a vertical line in plan view), which intersects ordinary rays at finite
points and is kept. The doubly-broadside pair (0, 0) leaves the position
along the baseline undetermined; it is resolved to the baseline midpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import path_gain, terminal_phase
from .config import SystemConfig
from .errors import ConfigError, PlacementError

_MIN_RAY_DISTANCE = 1e-9
_PARALLEL_TOL = 1e-12


def dft_angle_grids(config: SystemConfig) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal phase-argument grids {2 pi i / N - pi, i = 1..N} per array."""

    def grid(n: int) -> np.ndarray:
        return np.array([2.0 * math.pi * i / n - math.pi for i in range(1, n + 1)])

    return grid(config.tx_antennas), grid(config.rx_antennas)


def position_from_angles(aod_phase: float, aoa_phase: float, config: SystemConfig):
    """Plan-view surface position realizing both phase arguments, if any.

    Returns (position, planar_dist_tx, planar_dist_rx) or None when the
    sin values leave [-1, 1], the rays are parallel, or they fail to meet
    at a strictly positive distance from both terminals.
    """
    lam = config.wavelength
    sin_t = aod_phase * lam / (2.0 * math.pi * config.tx_spacing)
    sin_r = aoa_phase * lam / (2.0 * math.pi * config.rx_spacing)
    if abs(sin_t) > 1.0 or abs(sin_r) > 1.0:
        return None

    ax, ay = config.tx_position
    bx, by = config.rx_position
    if sin_t == 0.0 and sin_r == 0.0:
        # Both rays run along the baseline; any point between the terminals
        # is angle-consistent. Take the midpoint.
        if abs(ay - by) > _MIN_RAY_DISTANCE or bx <= ax:
            return None
        half = 0.5 * math.hypot(bx - ax, by - ay)
        return (0.5 * (ax + bx), 0.5 * (ay + by)), half, half

    d1 = (math.sqrt(max(0.0, 1.0 - sin_t * sin_t)), sin_t)
    d2 = (-math.sqrt(max(0.0, 1.0 - sin_r * sin_r)), sin_r)
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(cross) < _PARALLEL_TOL:
        return None
    rx_vec = (bx - ax, by - ay)
    t = (rx_vec[0] * d2[1] - rx_vec[1] * d2[0]) / cross
    u = (rx_vec[0] * d1[1] - rx_vec[1] * d1[0]) / cross
    if t < _MIN_RAY_DISTANCE or u < _MIN_RAY_DISTANCE:
        return None
    position = (ax + t * d1[0], ay + t * d1[1])
    return position, t, u


@dataclass(frozen=True)
class CandidateEntry:
    """One feasible surface site with its cascaded amplitude gain.

    Distances are 3D (mounting height included); ``gain`` is the product
    of the two hop amplitudes, ref_gain / (dist_tx * dist_rx).
    """

    aod_phase: float
    aoa_phase: float
    gain: float
    position: tuple[float, float]
    dist_tx: float
    dist_rx: float


@dataclass(frozen=True)
class PlacedSurface:
    aod_phase: float
    aoa_phase: float
    position: tuple[float, float]
    cascade_gain: complex
    dist_tx: float
    dist_rx: float


@dataclass(frozen=True)
class PlacementResult:
    """Greedy selection outcome; ``surfaces`` are in pick order and
    ``selection_order`` holds their indices in the candidate list."""

    surfaces: tuple[PlacedSurface, ...]
    selection_order: tuple[int, ...]


def enumerate_candidates(config: SystemConfig) -> list[CandidateEntry]:
    """All realizable (departure, arrival) grid pairs with their gains."""
    grid_t, grid_r = dft_angle_grids(config)
    height = config.irs_height
    entries = []
    for aod in grid_t:
        for aoa in grid_r:
            hit = position_from_angles(float(aod), float(aoa), config)
            if hit is None:
                continue
            position, planar_t, planar_r = hit
            dist_tx = math.hypot(planar_t, height)
            dist_rx = math.hypot(planar_r, height)
            entries.append(
                CandidateEntry(
                    aod_phase=float(aod),
                    aoa_phase=float(aoa),
                    gain=config.pathloss_ref_gain / (dist_tx * dist_rx),
                    position=position,
                    dist_tx=dist_tx,
                    dist_rx=dist_rx,
                )
            )
    return entries


def greedy_select(candidates, k: int, config: SystemConfig) -> PlacementResult:
    """Pick k candidates by descending gain with angle-conflict removal.

    After each pick every remaining candidate sharing its departure or
    arrival phase is dropped, which enforces pairwise-distinct grid angles
    on both sides. Ties in gain resolve to the lowest candidate index.
    """
    if k < 1:
        raise ConfigError("must select at least one surface")
    if k > min(config.tx_antennas, config.rx_antennas):
        raise ConfigError(
            "cannot place more surfaces than min(tx_antennas, rx_antennas)"
        )
    pool = list(range(len(candidates)))
    picks = []
    for step in range(k):
        if not pool:
            raise PlacementError(
                f"candidate pool exhausted at iteration {step + 1} of {k}"
            )
        best = max(pool, key=lambda i: (candidates[i].gain, -i))
        picks.append(best)
        chosen = candidates[best]
        pool = [
            i
            for i in pool
            if candidates[i].aod_phase != chosen.aod_phase
            and candidates[i].aoa_phase != chosen.aoa_phase
        ]
    surfaces = []
    for i in picks:
        entry = candidates[i]
        gain_in = path_gain(entry.dist_tx, config)
        gain_out = path_gain(entry.dist_rx, config)
        surfaces.append(
            PlacedSurface(
                aod_phase=entry.aod_phase,
                aoa_phase=entry.aoa_phase,
                position=entry.position,
                cascade_gain=gain_in * gain_out,
                dist_tx=entry.dist_tx,
                dist_rx=entry.dist_rx,
            )
        )
    return PlacementResult(surfaces=tuple(surfaces), selection_order=tuple(picks))


def place_surfaces(config: SystemConfig, k: int | None = None) -> PlacementResult:
    """Enumerate candidates and greedily select ``k`` surfaces."""
    count = config.num_surfaces if k is None else k
    return greedy_select(enumerate_candidates(config), count, config)


def link_cnr(placement: PlacementResult, config: SystemConfig) -> np.ndarray:
    """Per-surface cascaded gain-to-noise ratios |g_k|^2 / noise."""
    gains = np.array([abs(s.cascade_gain) for s in placement.surfaces])
    return gains**2 / config.noise_power


def surface_phase_labels(placement: PlacementResult, config: SystemConfig):
    """Recompute each surface's phase arguments from its plan position.

    Provided for consistency checks: the values must match the stored grid
    labels to floating-point accuracy.
    """
    out = []
    for surface in placement.surfaces:
        aod = terminal_phase(
            config.tx_position, surface.position, config.tx_spacing, config.wavelength
        )
        aoa = terminal_phase(
            config.rx_position, surface.position, config.rx_spacing, config.wavelength
        )
        out.append((aod, aoa))
    return out
