"""Rate/rank diagnostics for composite channels.

Helpers that post-process an allocation or a channel spectrum: the
entropy-based effective rank, the closed-form single-vs-double surface
comparison, and empirical rate-scaling slopes against log2 of a budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .allocation import equal_allocation, sca_optimize
from .config import SystemConfig
from .errors import ConfigError


def effective_rank(singular_values) -> float:
    """exp of the Shannon entropy of the normalized singular amplitudes.

    Weights are sqrt(sigma_k) normalized to sum 1; returns a value in
    [1, K]. Zero entries carry zero weight; an all-zero spectrum has no
    defined rank.
    """
    sv = np.asarray(singular_values, dtype=float)
    if sv.size == 0:
        raise ConfigError("need at least one singular value")
    if np.any(sv < 0):
        raise ConfigError("singular values must be non-negative")
    amps = np.sqrt(sv)
    total = amps.sum()
    if total == 0.0:
        raise ConfigError("all singular values are zero")
    w = amps / total
    w = w[w > 0]
    return float(math.exp(-np.sum(w * np.log(w))))


@dataclass(frozen=True)
class ThresholdDecision:
    """Closed-form comparison of one full surface against a split pair."""

    single_rate: float
    double_rate: float
    double_preferred: bool
    quality_product: float


def double_irs_threshold(link_cnr: float, power: float, elements: int) -> ThresholdDecision:
    """Compare one surface holding everything against an even two-way split.

    With quality chi, budget P on a single M-element surface the rate is
    log2(1 + chi*P*M^2); splitting into two equal surfaces (half power,
    half elements each) doubles the streams but divides each term by 8.
    The split wins exactly when chi*P*M^2 >= 48.
    """
    if link_cnr < 0 or power <= 0 or elements <= 0:
        raise ConfigError("threshold inputs must be positive (quality may be zero)")
    q = link_cnr * power * float(elements) ** 2
    single = math.log2(1.0 + q)
    double = 2.0 * math.log2(1.0 + q / 8.0)
    return ThresholdDecision(
        single_rate=single,
        double_rate=double,
        double_preferred=double >= single,
        quality_product=q,
    )


@dataclass(frozen=True)
class ScalingReport:
    """Fitted rate-vs-log2(budget) slope next to the asymptotic one."""

    variable: str
    sample_values: tuple[float, ...]
    se_values: tuple[float, ...]
    fitted_slope: float
    theoretical_slope: float


def scaling_slope(link_cnr, config: SystemConfig, variable: str, values,
                  strategy: str = "equal") -> ScalingReport:
    """Fit the high-budget rate slope in bits per doubling of a budget.

    ``variable`` selects which budget is swept ("elements" or "power");
    every sample re-runs the chosen allocation strategy. Doubling the
    element budget asymptotically buys 2K bits, doubling power K bits.
    """
    cnr = np.asarray(link_cnr, dtype=float)
    k = cnr.size
    vals = [float(v) for v in values]
    if len(vals) < 2:
        raise ConfigError("need at least two sample values to fit a slope")
    if any(v <= 0 for v in vals) or any(b <= a for a, b in zip(vals, vals[1:])):
        raise ConfigError("sample values must be positive and strictly increasing")
    if variable not in ("elements", "power"):
        raise ConfigError("variable must be 'elements' or 'power'")
    if strategy not in ("equal", "sca"):
        raise ConfigError("strategy must be 'equal' or 'sca'")

    ses = []
    for v in vals:
        if variable == "elements":
            if v != int(v):
                raise ConfigError("element budgets must be integers")
            cfg = config.with_updates(element_budget=int(v))
        else:
            cfg = config.with_updates(power_budget=v)
        sol = equal_allocation(cnr, cfg) if strategy == "equal" else sca_optimize(cnr, cfg)
        ses.append(sol.se)

    log_vals = np.log2(vals)
    slope = float(np.polyfit(log_vals, ses, 1)[0])
    theoretical = 2.0 * k if variable == "elements" else float(k)
    return ScalingReport(
        variable=variable,
        sample_values=tuple(vals),
        se_values=tuple(ses),
        fitted_slope=slope,
        theoretical_slope=theoretical,
    )
