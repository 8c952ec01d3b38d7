"""Per-surface passive phase profiles.

A surface with M unit-modulus elements contributes the scalar coupling
factor f = steer_out^H diag(e^{j phases}) steer_in to its cascade. With
every element phase set to cancel its own cascaded phase the terms add
coherently and |f| reaches its ceiling M exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class IrsPanel:
    """Reflecting panel: element grid shape plus one phase per element.

    ``phases`` are radians in [0, 2 pi), stored row-major to match
    `upa_response`. A zero-element panel carries an empty profile.
    """

    element_count: int
    panel_rows: int
    panel_cols: int
    phases: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        if self.element_count < 0:
            raise ConfigError("element_count must be non-negative")
        if self.element_count == 0:
            if len(self.phases) != 0:
                raise ConfigError("zero-element panel must have an empty profile")
            return
        if self.panel_rows * self.panel_cols != self.element_count:
            raise ConfigError("panel grid shape must multiply to element_count")
        if len(self.phases) != self.element_count:
            raise ConfigError("need exactly one phase per element")
        profile = np.asarray(self.phases, dtype=float)
        if np.any(profile < 0.0) or np.any(profile >= _TWO_PI):
            raise ConfigError("element phases must lie in [0, 2*pi)")


def panel_shape(count: int) -> tuple[int, int]:
    """Near-square factorization: rows = largest divisor <= sqrt(count)."""
    if count < 0:
        raise ConfigError("element count must be non-negative")
    if count == 0:
        return 0, 0
    rows = 1
    for d in range(1, int(math.isqrt(count)) + 1):
        if count % d == 0:
            rows = d
    return rows, count // rows


def coupling_factor(panel: IrsPanel, steer_in: np.ndarray, steer_out: np.ndarray) -> complex:
    """f = steer_out^H diag(e^{j phases}) steer_in for one panel."""
    if len(steer_in) != panel.element_count or len(steer_out) != panel.element_count:
        raise ConfigError("steering vector lengths must match the panel")
    if panel.element_count == 0:
        return 0j
    profile = np.exp(1j * np.asarray(panel.phases, dtype=float))
    return complex(np.sum(np.conj(steer_out) * profile * steer_in))


def optimal_phases(steer_in: np.ndarray, steer_out: np.ndarray) -> np.ndarray:
    """Element phases that align every cascaded term to zero phase.

    Each element sees the cascaded per-element phase
    arg(conj(steer_out_m) * steer_in_m); negating it makes every summand
    in the coupling factor equal to 1, so |f| = M.
    """
    steer_in = np.asarray(steer_in)
    steer_out = np.asarray(steer_out)
    if steer_in.shape != steer_out.shape:
        raise ConfigError("steering vectors must have equal length")
    phases = np.mod(np.angle(steer_out * np.conj(steer_in)), _TWO_PI)
    # np.mod of a tiny negative angle can round up to 2*pi itself
    phases[phases >= _TWO_PI] = 0.0
    return phases


def aligned_panel(count: int, steer_in: np.ndarray, steer_out: np.ndarray) -> IrsPanel:
    """Panel of ``count`` elements with the coherent phase profile."""
    rows, cols = panel_shape(count)
    if count == 0:
        return IrsPanel(0, 0, 0, np.zeros(0))
    return IrsPanel(count, rows, cols, optimal_phases(steer_in, steer_out))
