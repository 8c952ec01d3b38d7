import math

import numpy as np
import pytest

from irsmimo import (
    AllocationSolution,
    ScaState,
    brute_force_oracle,
    convex_subproblem,
    default_config,
    equal_allocation,
    round_elements,
    sca_optimize,
    spectral_efficiency,
    water_filling,
)
from irsmimo.errors import ConfigError, OracleSizeError
from oracles import exhaustive_split, rate_bits, subproblem_grid_search, waterfill_bisection


# ---------------------------------------------------------------- rate (8)


def test_rate_single_unit_stream():
    assert spectral_efficiency((1,), (1.0,), (1.0,)) == pytest.approx(1.0, abs=1e-15)


def test_rate_threshold_operating_point():
    # quality * power * elements^2 = 48 on one surface
    chi = 48.0 / (1.0 * 100.0**2)
    assert spectral_efficiency((100,), (1.0,), (chi,)) == pytest.approx(
        math.log2(49.0), abs=1e-12
    )


def test_rate_even_two_way_split_matches_closed_form():
    chi = 48.0 / (1.0 * 100.0**2)
    two_way = spectral_efficiency((50, 50), (0.5, 0.5), (chi, chi))
    assert two_way == pytest.approx(2.0 * math.log2(1.0 + 48.0 / 8.0), abs=1e-12)
    assert two_way == pytest.approx(math.log2(49.0), abs=1e-12)


def test_rate_agrees_with_plain_python():
    rng = np.random.default_rng(8)
    for _ in range(30):
        k = int(rng.integers(1, 6))
        m = rng.integers(0, 50, size=k)
        p = rng.uniform(0.0, 2.0, size=k)
        chi = rng.uniform(0.0, 1e-2, size=k)
        assert spectral_efficiency(m, p, chi) == pytest.approx(
            rate_bits(m, p, chi), rel=1e-12, abs=1e-12
        )


def test_rate_input_validation():
    with pytest.raises(ConfigError):
        spectral_efficiency((1, 2), (1.0,), (1.0, 1.0))
    with pytest.raises(ConfigError):
        spectral_efficiency((1,), (-0.5,), (1.0,))


# ------------------------------------------------------------ water-filling


def test_waterfill_equal_gains_split_evenly():
    for c in (0.3, 1.0, 42.0):
        powers, _ = water_filling((c, c), 1.0)
        np.testing.assert_allclose(powers, [0.5, 0.5], atol=1e-12)


def test_waterfill_dead_channel_gets_nothing():
    powers, _ = water_filling((1.0, 0.0), 1.0)
    np.testing.assert_allclose(powers, [1.0, 0.0], atol=1e-12)


def test_waterfill_two_level_literal():
    powers, level = water_filling((2.0, 1.0), 1.0)
    np.testing.assert_allclose(powers, [0.75, 0.25], atol=1e-12)
    assert level == pytest.approx(1.25, abs=1e-12)


def test_waterfill_budget_is_spent():
    rng = np.random.default_rng(9)
    for _ in range(50):
        k = int(rng.integers(1, 8))
        gains = rng.uniform(0.0, 5.0, size=k)
        if not np.any(gains > 0):
            gains[0] = 1.0
        budget = float(rng.uniform(0.1, 10.0))
        powers, _ = water_filling(gains, budget)
        assert powers.sum() == pytest.approx(budget, abs=1e-10)
        assert np.all(powers >= 0.0)


def test_waterfill_kkt_structure():
    rng = np.random.default_rng(10)
    for _ in range(50):
        k = int(rng.integers(2, 8))
        gains = rng.uniform(1e-3, 5.0, size=k)
        budget = float(rng.uniform(0.1, 4.0))
        powers, level = water_filling(gains, budget)
        for p, g in zip(powers, gains):
            if p > 0.0:
                assert p + 1.0 / g == pytest.approx(level, abs=1e-9)
            else:
                assert 1.0 / g >= level - 1e-12


def test_waterfill_matches_bisection_oracle():
    rng = np.random.default_rng(11)
    for _ in range(30):
        k = int(rng.integers(1, 7))
        gains = rng.uniform(1e-4, 10.0, size=k)
        budget = float(rng.uniform(0.05, 8.0))
        powers, _ = water_filling(gains, budget)
        reference, _ = waterfill_bisection(gains, budget)
        np.testing.assert_allclose(powers, reference, atol=1e-7)


def test_waterfill_never_beaten_by_random_splits():
    rng = np.random.default_rng(12)
    gains = np.array([0.2, 3.0, 1.1, 0.6])
    budget = 2.0
    powers, _ = water_filling(gains, budget)
    best = rate_bits(np.ones(4), powers, gains)  # m=1: plain log2(1 + p*g)
    for _ in range(300):
        raw = rng.uniform(0.0, 1.0, size=4)
        alt = budget * raw / raw.sum()
        assert rate_bits(np.ones(4), alt, gains) <= best + 1e-9


def test_waterfill_scaling_grows_active_set():
    rng = np.random.default_rng(13)
    for _ in range(40):
        k = int(rng.integers(2, 7))
        gains = rng.uniform(1e-3, 2.0, size=k)
        budget = float(rng.uniform(0.05, 1.0))
        base, _ = water_filling(gains, budget)
        for c in (1.0, 2.0, 10.0):
            scaled, _ = water_filling(c * gains, budget)
            active_before = set(np.flatnonzero(base > 0.0))
            active_after = set(np.flatnonzero(scaled > 0.0))
            assert active_before <= active_after


def test_waterfill_rejects_degenerate_inputs():
    with pytest.raises(ConfigError):
        water_filling((0.0, 0.0), 1.0)
    with pytest.raises(ConfigError):
        water_filling((1.0,), 0.0)
    with pytest.raises(ConfigError):
        water_filling((-1.0, 2.0), 1.0)


# ----------------------------------------------------------------- rounding


def test_round_exact_split_unchanged():
    np.testing.assert_array_equal(
        round_elements((600.0, 600.0, 600.0, 600.0), 2400), [600, 600, 600, 600]
    )


def test_round_largest_remainder():
    # remainders 0.6, 0.7, 0.7 carry two leftover units to the 0.7 pair
    np.testing.assert_array_equal(round_elements((10.6, 9.7, 9.7), 30), [10, 10, 10])
    np.testing.assert_array_equal(round_elements((10.6, 9.2, 9.8), 30), [11, 9, 10])


def test_round_zero_budget():
    np.testing.assert_array_equal(round_elements((0.2, 0.2), 0), [0, 0])


def test_round_never_grows_by_more_than_one():
    rng = np.random.default_rng(14)
    for _ in range(200):
        k = int(rng.integers(1, 7))
        budget = int(rng.integers(0, 60))
        raw = rng.uniform(0.0, 1.0, size=k)
        frac = budget * raw / max(raw.sum(), 1.0)
        rounded = round_elements(frac, budget)
        assert rounded.sum() <= budget
        assert np.all(rounded >= np.floor(frac).astype(int))
        assert np.all(rounded <= np.floor(frac).astype(int) + 1)


def test_round_tie_prefers_lowest_index():
    np.testing.assert_array_equal(round_elements((1.5, 1.5), 3), [2, 1])


def test_round_rejects_impossible_floor():
    with pytest.raises(ConfigError):
        round_elements((5.5, 5.5), 2)
    with pytest.raises(ConfigError):
        round_elements((-1.0, 2.0), 4)


# -------------------------------------------------------------- equal split


def test_equal_allocation_reference_scenario():
    cfg = default_config()
    sol = equal_allocation(np.full(4, 1e-4), cfg)
    assert sol.elements == (600, 600, 600, 600)
    assert sol.powers == (0.25, 0.25, 0.25, 0.25)
    assert sol.se == pytest.approx(rate_bits(sol.elements, sol.powers, [1e-4] * 4), rel=1e-12)


def test_equal_allocation_single_surface():
    cfg = default_config(num_surfaces=1)
    sol = equal_allocation(np.array([2e-4]), cfg)
    assert sol.elements == (2400,)
    assert sol.powers == (1.0,)


def test_equal_allocation_uneven_split():
    cfg = default_config(element_budget=10, num_surfaces=3)
    sol = equal_allocation(np.full(3, 1e-3), cfg)
    assert sol.elements == (4, 3, 3)
    assert sum(sol.elements) == 10


# ------------------------------------------------------- convex subproblem


def _feasibility_report(sol, chi, config, state):
    p_slack = config.power_budget - float(np.sum(sol.powers))
    m_slack = config.element_budget - float(np.sum(sol.elements))
    assert p_slack >= -1e-9
    assert m_slack >= -1e-9
    assert np.all(sol.powers > 0.0)
    assert np.all(sol.elements > 0.0)
    # substituted variables sit on their defining constraints
    np.testing.assert_allclose(np.exp(sol.log_powers), sol.powers, rtol=1e-9)
    lin_gain = 2.0 * sol.elements * state.ref_elements - state.ref_elements**2
    assert np.all(np.exp(sol.log_gains) <= lin_gain + 1e-9)
    want_sinr = (
        np.asarray(chi)
        * np.exp(state.ref_log_power + state.ref_log_gain)
        * (1.0 + sol.log_powers + sol.log_gains - state.ref_log_power - state.ref_log_gain)
    )
    np.testing.assert_allclose(sol.sinr_lb, want_sinr, atol=1e-9)
    assert sol.objective == pytest.approx(float(np.sum(np.log2(1.0 + sol.sinr_lb))), abs=1e-12)
    assert sol.duality_gap <= 1e-8


def test_subproblem_single_stream_takes_everything():
    cfg = default_config(element_budget=100, num_surfaces=1, power_budget=1.0)
    chi = np.array([5e-4])
    state = ScaState.from_iterate([1.0], [100.0])
    sol = convex_subproblem(chi, cfg, state)
    _feasibility_report(sol, chi, cfg, state)
    assert sol.powers[0] >= 0.999 * cfg.power_budget
    assert sol.elements[0] >= 0.999 * cfg.element_budget
    assert sol.sinr_lb[0] <= chi[0] * cfg.power_budget * cfg.element_budget**2 + 1e-9


def test_subproblem_symmetry():
    cfg = default_config(element_budget=200, num_surfaces=2, power_budget=2.0)
    chi = np.array([1e-3, 1e-3])
    state = ScaState.from_iterate([1.0, 1.0], [100.0, 100.0])
    sol = convex_subproblem(chi, cfg, state)
    _feasibility_report(sol, chi, cfg, state)
    assert abs(sol.powers[0] - sol.powers[1]) <= 1e-6 * cfg.power_budget
    assert abs(sol.elements[0] - sol.elements[1]) <= 1e-6 * cfg.element_budget


def test_subproblem_matches_grid_search():
    cfg = default_config(element_budget=200, num_surfaces=2, power_budget=2.0)
    chi = np.array([3e-3, 8e-4])
    state = ScaState.from_iterate([1.0, 1.0], [100.0, 100.0])
    sol = convex_subproblem(chi, cfg, state)
    _feasibility_report(sol, chi, cfg, state)
    reference = subproblem_grid_search(
        chi,
        cfg.power_budget,
        cfg.element_budget,
        state.ref_log_power,
        state.ref_log_gain,
        state.ref_elements,
    )
    assert sol.objective == pytest.approx(reference, abs=1e-4)
    assert sol.objective >= reference - 1e-6  # grid points are feasible


def test_subproblem_is_rate_minorant():
    # the linearized objective never exceeds the true rate at its optimum
    rng = np.random.default_rng(15)
    for _ in range(10):
        k = int(rng.integers(1, 5))
        cfg = default_config(
            element_budget=int(rng.integers(k * 4, 120)),
            num_surfaces=k,
            power_budget=float(rng.uniform(0.2, 3.0)),
        )
        chi = rng.uniform(1e-5, 5e-3, size=k)
        m0 = np.full(k, cfg.element_budget / k)
        p0 = np.full(k, cfg.power_budget / k)
        state = ScaState.from_iterate(p0, m0)
        sol = convex_subproblem(chi, cfg, state)
        _feasibility_report(sol, chi, cfg, state)
        true_rate = spectral_efficiency(sol.elements, sol.powers, chi)
        assert sol.objective <= true_rate + 1e-9


def test_subproblem_rejects_bad_inputs():
    cfg = default_config(element_budget=100, num_surfaces=2)
    state = ScaState.from_iterate([0.5, 0.5], [50.0, 50.0])
    with pytest.raises(ConfigError):
        convex_subproblem(np.array([-1e-3, 1e-3]), cfg, state)
    with pytest.raises(ConfigError):
        convex_subproblem(np.array([0.0, 0.0]), cfg, state)
    with pytest.raises(ConfigError):
        convex_subproblem(np.array([1e-3]), cfg, state)  # length mismatch
    bad_state = ScaState(
        ref_log_power=np.zeros(2), ref_log_gain=np.zeros(2), ref_elements=np.array([1.0, 0.0])
    )
    with pytest.raises(ConfigError):
        convex_subproblem(np.array([1e-3, 1e-3]), cfg, bad_state)


def test_state_from_iterate_clamps():
    state = ScaState.from_iterate([0.0, 1.0], [0.0, 25.0])
    assert state.ref_elements[0] == pytest.approx(1e-9)
    assert state.ref_log_power[0] == pytest.approx(math.log(1e-9))
    assert state.ref_log_gain[1] == pytest.approx(2.0 * math.log(25.0))


# ------------------------------------------------------------ the optimizer


def test_sca_single_surface_closed_form():
    cfg = default_config(element_budget=300, num_surfaces=1)
    chi = np.array([2e-4])
    sol = sca_optimize(chi, cfg)
    assert sol.elements == (300,)
    assert sol.powers == (1.0,)
    assert sol.se == pytest.approx(math.log2(1.0 + 2e-4 * 300.0**2), rel=1e-12)


def test_sca_equal_quality_high_snr_splits_evenly():
    cfg = default_config(element_budget=400, num_surfaces=2)
    chi = np.full(2, 5e-2)  # chi * P * M^2 = 8000, far above the split threshold
    sol = sca_optimize(chi, cfg)
    assert sol.elements == (200, 200)
    np.testing.assert_allclose(sol.powers, [0.5, 0.5], atol=1e-9)


def test_sca_low_snr_concentrates():
    # far below the threshold the whole budget belongs on one surface
    cfg = default_config(element_budget=20, num_surfaces=2)
    chi = np.full(2, 1e-4)
    sol = sca_optimize(chi, cfg)
    assert sorted(sol.elements) == [0, 20]
    oracle = brute_force_oracle(chi, cfg)
    assert sol.se == pytest.approx(oracle.se, rel=1e-9)


def test_sca_matches_oracle_on_three_streams():
    cfg = default_config(element_budget=30, num_surfaces=3)
    chi = np.array([2e-3, 9e-4, 4e-4])
    sol = sca_optimize(chi, cfg)
    oracle = brute_force_oracle(chi, cfg)
    assert sol.se >= oracle.se * (1.0 - 1e-2)
    assert sol.trace[-1] >= oracle.se - 1e-6  # relaxation dominates the integer optimum


def test_sca_solution_invariants():
    rng = np.random.default_rng(16)
    for _ in range(12):
        k = int(rng.integers(2, 5))
        cfg = default_config(
            element_budget=int(rng.integers(3 * k, 80)),
            num_surfaces=k,
            power_budget=float(rng.uniform(0.5, 2.0)),
        )
        chi = 10.0 ** rng.uniform(-6.0, -2.0, size=k)
        sol = sca_optimize(chi, cfg)
        assert sum(sol.elements) <= cfg.element_budget
        assert sum(sol.powers) <= cfg.power_budget + 1e-9
        assert sol.se == pytest.approx(rate_bits(sol.elements, sol.powers, chi), abs=1e-12)
        diffs = np.diff(sol.trace)
        assert np.all(diffs >= 0.0)  # exact monotone refinement
        equal = equal_allocation(chi, cfg)
        assert sol.trace[-1] >= equal.se - 1e-9
        assert sol.iterations == len(sol.trace) - 1
        assert len(sol.relaxed_elements) == k
        assert all(v >= 0.0 for v in sol.relaxed_elements)
        # inactive surfaces sit at the solver's 1e-9 iterate floor, so the
        # relaxed sum can exceed the budget by up to k of those clamps
        assert sum(sol.relaxed_elements) <= cfg.element_budget + k * 1e-8


def test_sca_accepts_warm_start():
    cfg = default_config(element_budget=40, num_surfaces=2)
    chi = np.array([1.5e-3, 1e-3])
    base = sca_optimize(chi, cfg)
    warm = sca_optimize(chi, cfg, init=base)
    assert warm.se >= base.se - 1e-9


def test_sca_zero_element_budget():
    cfg = default_config(element_budget=0, num_surfaces=2)
    sol = sca_optimize(np.array([1e-3, 1e-3]), cfg)
    assert sol.elements == (0, 0)
    assert sol.se == 0.0


def test_sca_rejects_degenerate_quality():
    cfg = default_config(element_budget=10, num_surfaces=2)
    with pytest.raises(ConfigError):
        sca_optimize(np.zeros(2), cfg)
    with pytest.raises(ConfigError):
        sca_optimize(np.array([1e-3, -1e-3]), cfg)


# ------------------------------------------------------------------- oracle


def test_oracle_single_surface():
    cfg = default_config(element_budget=25, num_surfaces=1)
    sol = brute_force_oracle(np.array([1e-3]), cfg)
    assert sol.elements == (25,)
    assert sol.powers == (1.0,)


def test_oracle_high_snr_even_split():
    cfg = default_config(element_budget=20, num_surfaces=2)
    sol = brute_force_oracle(np.full(2, 0.5), cfg)
    assert sol.elements == (10, 10)


def test_oracle_dead_channel():
    cfg = default_config(element_budget=20, num_surfaces=2)
    sol = brute_force_oracle(np.array([1e-3, 0.0]), cfg)
    assert sol.elements == (20, 0)
    assert sol.powers == (1.0, 0.0)


def test_oracle_matches_independent_enumeration():
    cfg = default_config(element_budget=12, num_surfaces=3, power_budget=0.8)
    chi = np.array([4e-3, 2.5e-3, 1e-3])
    sol = brute_force_oracle(chi, cfg)
    best_rate, best_split, _ = exhaustive_split(chi, 12, 0.8)
    assert sol.se == pytest.approx(best_rate, rel=1e-9)
    assert sol.elements == best_split


def test_oracle_size_guard():
    cfg = default_config(element_budget=10000, num_surfaces=3)
    with pytest.raises(OracleSizeError):
        brute_force_oracle(np.full(3, 1e-4), cfg)


def test_allocation_solution_is_frozen():
    assert AllocationSolution.__dataclass_params__.frozen
