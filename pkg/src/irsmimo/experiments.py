"""Experiment orchestration: config files, sweeps, CSV output.

A sweep run is described by a small YAML document. Top-level keys are the
scenario parameters (short aliases K/P/M/N_t/N_r/H or the long
SystemConfig field names), plus four experiment keys:

    sweep:        {variable: elements|power, values: [...]}
    strategies:   subset of [single_irs, multi_equal, multi_sca]
    surfaces:     list of K values to compare (default: [K])
    output:       CSV path (optional), seed: integer (optional)

Power-like values (P, noise, power sweep values) accept either plain
watts or strings such as "30 dBm", converted at parse time. The runner
emits one row per (sweep value, strategy, K); the single-surface baseline
always uses one surface, so it appears once per sweep value no matter
which K values are compared. Failures are captured per row in an error
column instead of aborting the sweep.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass

import numpy as np
import yaml

from .allocation import equal_allocation, sca_optimize, spectral_efficiency
from .analysis import effective_rank
from .config import SystemConfig, dbm_to_watts, default_config
from .errors import ConfigError, OracleSizeError, PlacementError, SolverError
from .placement import link_cnr, place_surfaces
from .system import analytic_singular_values

SWEEP_COLUMNS = (
    "sweep_value",
    "strategy",
    "K",
    "se_bits",
    "erank",
    "elements_list",
    "powers_list",
    "sca_iters",
    "wall_ms",
    "error",
)

STRATEGIES = ("single_irs", "multi_equal", "multi_sca")

_SCENARIO_ALIASES = {
    "K": "num_surfaces",
    "num_surfaces": "num_surfaces",
    "P": "power_budget",
    "power_budget": "power_budget",
    "M": "element_budget",
    "element_budget": "element_budget",
    "N_t": "tx_antennas",
    "tx_antennas": "tx_antennas",
    "N_r": "rx_antennas",
    "rx_antennas": "rx_antennas",
    "H": "irs_height",
    "irs_height": "irs_height",
    "wavelength": "wavelength",
    "lambda": "wavelength",
    "noise": "noise_power",
    "sigma2": "noise_power",
    "noise_power": "noise_power",
    "tx_position": "tx_position",
    "rx_position": "rx_position",
    "d_t": "tx_spacing",
    "tx_spacing": "tx_spacing",
    "d_r": "rx_spacing",
    "rx_spacing": "rx_spacing",
    "d_s": "irs_spacing",
    "irs_spacing": "irs_spacing",
    "pathloss_ref_gain": "pathloss_ref_gain",
}

_POWER_FIELDS = {"power_budget", "noise_power"}

_SWEEP_VARIABLES = {
    "elements": "element_budget",
    "M": "element_budget",
    "element_budget": "element_budget",
    "power": "power_budget",
    "P": "power_budget",
    "power_budget": "power_budget",
}


def _parse_power(value, field: str) -> float:
    """Plain numbers are watts; strings must be '<number> dBm'."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        if text.lower().endswith("dbm"):
            try:
                return dbm_to_watts(float(text[:-3].strip()))
            except ValueError:
                raise ConfigError(f"{field}: cannot parse dBm value {value!r}") from None
        raise ConfigError(f"{field}: unsupported unit in {value!r} (use watts or dBm)")
    raise ConfigError(f"{field}: expected a number or a dBm string, got {value!r}")


@dataclass(frozen=True)
class ExperimentSpec:
    """Validated description of one sweep run."""

    scenario: SystemConfig
    sweep_variable: str
    sweep_values: tuple[float, ...]
    strategies: tuple[str, ...]
    surfaces: tuple[int, ...]
    output_path: str | None = None
    seed: int = 0


def parse_config(text) -> ExperimentSpec:
    """Parse a YAML document (or an equivalent dict) into an ExperimentSpec.

    Unknown keys are rejected by name; defaults fill every omitted
    scenario field, so the empty document is a valid spec.
    """
    if isinstance(text, dict):
        doc = dict(text)
    else:
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"malformed config document: {exc}") from exc
        if doc is None:
            doc = {}
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a key-value mapping")

    overrides = {}
    sweep_doc = doc.pop("sweep", None)
    strategies_doc = doc.pop("strategies", None)
    surfaces_doc = doc.pop("surfaces", None)
    output_path = doc.pop("output", None)
    if output_path is None:
        output_path = doc.pop("output_path", None)
    else:
        doc.pop("output_path", None)
    seed = doc.pop("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed: expected an integer")

    for key, value in doc.items():
        field = _SCENARIO_ALIASES.get(key)
        if field is None:
            raise ConfigError(f"unknown config key: {key!r}")
        if field in overrides:
            raise ConfigError(f"{key!r} duplicates another alias for {field}")
        if field in _POWER_FIELDS:
            overrides[field] = _parse_power(value, key)
        elif field in ("tx_position", "rx_position"):
            if not isinstance(value, (list, tuple)) or len(value) != 2:
                raise ConfigError(f"{key}: expected a 2-element [x, y] position")
            overrides[field] = (float(value[0]), float(value[1]))
        elif field in ("tx_antennas", "rx_antennas", "num_surfaces", "element_budget"):
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"{key}: expected an integer")
            overrides[field] = value
        else:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"{key}: expected a number")
            overrides[field] = float(value)

    try:
        scenario = default_config(**overrides)
    except ConfigError as exc:
        raise ConfigError(str(exc)) from exc

    if sweep_doc is None:
        variable = "element_budget"
        values = [float(scenario.element_budget)]
    else:
        if not isinstance(sweep_doc, dict):
            raise ConfigError("sweep: expected a mapping with variable and values")
        sweep_doc = dict(sweep_doc)
        raw_var = sweep_doc.pop("variable", None)
        raw_values = sweep_doc.pop("values", None)
        if sweep_doc:
            extra = sorted(sweep_doc)[0]
            raise ConfigError(f"unknown sweep key: {extra!r}")
        if raw_var not in _SWEEP_VARIABLES:
            raise ConfigError(f"sweep.variable: expected elements or power, got {raw_var!r}")
        variable = _SWEEP_VARIABLES[raw_var]
        if not isinstance(raw_values, (list, tuple)) or not raw_values:
            raise ConfigError("sweep.values: expected a nonempty list")
        values = []
        for v in raw_values:
            if variable == "power_budget":
                values.append(_parse_power(v, "sweep.values"))
            else:
                if isinstance(v, bool) or not isinstance(v, (int, float)) or v != int(v):
                    raise ConfigError(f"sweep.values: element budgets must be integers, got {v!r}")
                values.append(float(int(v)))
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError("sweep.values: values must be strictly increasing")
    if any(v <= 0 for v in values):
        raise ConfigError("sweep.values: values must be positive")

    if strategies_doc is None:
        strategies = list(STRATEGIES)
    else:
        if not isinstance(strategies_doc, (list, tuple)) or not strategies_doc:
            raise ConfigError("strategies: expected a nonempty list")
        strategies = []
        for name in strategies_doc:
            if name not in STRATEGIES:
                raise ConfigError(f"strategies: unknown strategy {name!r}")
            if name not in strategies:
                strategies.append(name)

    max_k = min(scenario.tx_antennas, scenario.rx_antennas)
    if surfaces_doc is None:
        surface_counts = [scenario.num_surfaces]
    else:
        if not isinstance(surfaces_doc, (list, tuple)) or not surfaces_doc:
            raise ConfigError("surfaces: expected a nonempty list of K values")
        surface_counts = []
        for v in surfaces_doc:
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(f"surfaces: expected positive integers, got {v!r}")
            if v > max_k:
                raise ConfigError(f"surfaces: K={v} exceeds min(N_t, N_r)={max_k}")
            if v not in surface_counts:
                surface_counts.append(v)

    if output_path is not None and not isinstance(output_path, str):
        raise ConfigError("output: expected a file path string")

    return ExperimentSpec(
        scenario=scenario,
        sweep_variable=variable,
        sweep_values=tuple(values),
        strategies=tuple(strategies),
        surfaces=tuple(surface_counts),
        output_path=output_path,
        seed=seed,
    )


def _strategy_rows(spec: ExperimentSpec):
    """(strategy, K) combinations; the single-surface baseline runs once."""
    combos = []
    for strategy in spec.strategies:
        if strategy == "single_irs":
            combos.append((strategy, 1))
        else:
            combos.extend((strategy, k) for k in spec.surfaces)
    return combos


def _run_cell(config: SystemConfig, strategy: str, k: int):
    """One placement + allocation for a single table cell."""
    cfg = config.with_updates(num_surfaces=k)
    placement = place_surfaces(cfg)
    cnr = link_cnr(placement, cfg)
    if strategy == "single_irs":
        elements = (cfg.element_budget,)
        powers = (cfg.power_budget,)
        se = spectral_efficiency(elements, powers, cnr)
        iters = 0
    elif strategy == "multi_equal":
        sol = equal_allocation(cnr, cfg)
        elements, powers, se, iters = sol.elements, sol.powers, sol.se, sol.iterations
    elif strategy == "multi_sca":
        sol = sca_optimize(cnr, cfg)
        elements, powers, se, iters = sol.elements, sol.powers, sol.se, sol.iterations
    else:
        raise ConfigError(f"unknown strategy {strategy!r}")
    sv = analytic_singular_values(placement, elements, cfg)
    erank = effective_rank(sv)
    return se, erank, elements, powers, iters


def run_sweep(spec: ExperimentSpec, *, collect_timings: bool = False) -> list[dict]:
    """Run the full sweep; one row dict per (value, strategy, K) cell.

    Wall-clock times are only recorded when asked for, so that default
    output files are byte-identical across runs.
    """
    rows = []
    combos = _strategy_rows(spec)
    for value in spec.sweep_values:
        if spec.sweep_variable == "element_budget":
            cfg = spec.scenario.with_updates(element_budget=int(value))
        else:
            cfg = spec.scenario.with_updates(power_budget=value)
        for strategy, k in combos:
            row = {name: None for name in SWEEP_COLUMNS}
            row["sweep_value"] = value
            row["strategy"] = strategy
            row["K"] = k
            row["error"] = ""
            started = time.perf_counter()
            try:
                se, erank, elements, powers, iters = _run_cell(cfg, strategy, k)
            except (ConfigError, PlacementError, SolverError, OracleSizeError) as exc:
                row["error"] = str(exc)
            else:
                row["se_bits"] = se
                row["erank"] = erank
                row["elements_list"] = tuple(int(m) for m in elements)
                row["powers_list"] = tuple(float(p) for p in powers)
                row["sca_iters"] = iters
                if collect_timings:
                    row["wall_ms"] = (time.perf_counter() - started) * 1e3
            rows.append(row)
    return rows


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (tuple, list)):
        return ";".join(_format_cell(v) for v in value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def emit_csv(table, path) -> None:
    """Write sweep rows as CSV: fixed header, 12 significant digits."""
    if not table:
        raise ConfigError("refusing to write an empty table")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in table:
            writer.writerow([_format_cell(row.get(name)) for name in SWEEP_COLUMNS])


def read_csv(path) -> list[dict]:
    """Read back an emitted sweep file into row dicts (strings preserved)."""
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        return [dict(r) for r in reader]
