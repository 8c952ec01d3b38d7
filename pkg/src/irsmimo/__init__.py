"""Multi-surface MIMO synthesis and optimization toolkit.

Builds line-of-sight channels through passive reflecting surfaces from
plain geometry, places the surfaces on orthogonal array directions,
aligns their phase profiles in closed form, and splits the element and
power budgets across surfaces to maximize the spatial-multiplexing rate.
"""

from .allocation import (
    AllocationSolution,
    ScaState,
    SubproblemSolution,
    brute_force_oracle,
    convex_subproblem,
    equal_allocation,
    round_elements,
    sca_optimize,
    spectral_efficiency,
    water_filling,
)
from .analysis import (
    ScalingReport,
    ThresholdDecision,
    double_irs_threshold,
    effective_rank,
    scaling_slope,
)
from .beamforming import (
    IrsPanel,
    aligned_panel,
    coupling_factor,
    optimal_phases,
    panel_shape,
)
from .channel import (
    CompositeChannel,
    LinkChannel,
    build_link_channels,
    compose_effective_channel,
    panel_wave_args,
    path_gain,
    terminal_phase,
    ula_response,
    upa_response,
)
from .config import SystemConfig, dbm_to_watts, default_config, watts_to_dbm
from .errors import ConfigError, IrsError, OracleSizeError, PlacementError, SolverError
from .experiments import (
    ExperimentSpec,
    emit_csv,
    parse_config,
    read_csv,
    run_sweep,
)
from .placement import (
    CandidateEntry,
    PlacedSurface,
    PlacementResult,
    dft_angle_grids,
    enumerate_candidates,
    greedy_select,
    link_cnr,
    place_surfaces,
    position_from_angles,
)
from .plots import render_sweep_figures
from .system import analytic_singular_values, configured_panels, effective_channel

__version__ = "0.1.0"

__all__ = [
    "AllocationSolution",
    "CandidateEntry",
    "CompositeChannel",
    "ConfigError",
    "ExperimentSpec",
    "IrsError",
    "IrsPanel",
    "LinkChannel",
    "OracleSizeError",
    "PlacedSurface",
    "PlacementError",
    "PlacementResult",
    "ScaState",
    "ScalingReport",
    "SolverError",
    "SubproblemSolution",
    "SystemConfig",
    "ThresholdDecision",
    "aligned_panel",
    "analytic_singular_values",
    "brute_force_oracle",
    "build_link_channels",
    "compose_effective_channel",
    "configured_panels",
    "convex_subproblem",
    "coupling_factor",
    "dbm_to_watts",
    "default_config",
    "dft_angle_grids",
    "double_irs_threshold",
    "effective_channel",
    "effective_rank",
    "emit_csv",
    "enumerate_candidates",
    "equal_allocation",
    "greedy_select",
    "link_cnr",
    "optimal_phases",
    "panel_shape",
    "panel_wave_args",
    "parse_config",
    "path_gain",
    "place_surfaces",
    "position_from_angles",
    "read_csv",
    "render_sweep_figures",
    "round_elements",
    "run_sweep",
    "sca_optimize",
    "scaling_slope",
    "spectral_efficiency",
    "terminal_phase",
    "ula_response",
    "upa_response",
    "water_filling",
    "watts_to_dbm",
]
