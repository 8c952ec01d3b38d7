"""Joint power and element allocation across surfaces.

The achievable rate sum_k log2(1 + p_k * cnr_k * m_k^2) is concave in the
powers but not jointly in (p, m). The optimizer follows a successive
convex refinement: substitute p_k = e^{x_k}, m_k^2 bounded through
e^{y_k} <= 2 m_k mref_k - mref_k^2, and linearize the coupled exponential
around the current point, which yields a convex subproblem that is exact
at the expansion point and a global under-estimator elsewhere. Each
subproblem is solved with a small log-barrier interior-point method
(Newton steps with backtracking), and the outer loop re-expands until the
objective stalls.

Two facts keep the subproblem tiny. At its optimum x_k = ln p_k and
e^{y_k} hits its bound, so both can be eliminated analytically and the
barrier only has to move the 2K physical variables (p, m). The returned
solution still carries the full (p, m, l, x, y) tuple with every
constraint tight or slack as the full formulation requires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .config import SystemConfig
from .errors import ConfigError, OracleSizeError, SolverError

LN2 = math.log(2.0)
ITERATE_CLAMP = 1e-9  # floor applied to powers/elements when re-expanding


def spectral_efficiency(elements, powers, link_cnr) -> float:
    """sum_k log2(1 + p_k * cnr_k * m_k^2); elements may be fractional."""
    m = np.asarray(elements, dtype=float)
    p = np.asarray(powers, dtype=float)
    cnr = np.asarray(link_cnr, dtype=float)
    if not (m.shape == p.shape == cnr.shape):
        raise ConfigError("elements, powers and link_cnr must have equal length")
    if np.any(m < 0) or np.any(p < 0) or np.any(cnr < 0):
        raise ConfigError("allocation inputs must be non-negative")
    return float(np.sum(np.log2(1.0 + p * cnr * m * m)))


def water_filling(gains, budget: float) -> tuple[np.ndarray, float]:
    """Exact water-filling: p_k = max(level - 1/gain_k, 0), sum p = budget.

    ``gains`` are the per-stream effective power gains (cnr_k * m_k^2).
    Returns (powers, water_level). Streams with zero gain get nothing.
    """
    g = np.asarray(gains, dtype=float)
    if budget <= 0.0:
        raise ConfigError("power budget must be positive")
    if np.any(g < 0):
        raise ConfigError("gains must be non-negative")
    positive = np.flatnonzero(g > 0)
    if positive.size == 0:
        raise ConfigError("water-filling needs at least one positive gain")
    inv = np.sort(1.0 / g[positive])
    # Largest active set whose common level clears its worst inverse gain.
    level = 0.0
    csum = 0.0
    for j in range(inv.size):
        csum += inv[j]
        candidate = (budget + csum) / (j + 1)
        if candidate > inv[j]:
            level = candidate
        else:
            break
    powers = np.zeros_like(g)
    powers[positive] = np.maximum(level - 1.0 / g[positive], 0.0)
    return powers, float(level)


def round_elements(fractional, budget: int) -> np.ndarray:
    """Largest-remainder rounding of a fractional split, sum <= budget.

    Each entry keeps its floor; the leftover units (the rounded sum of the
    fractional parts, capped by the remaining budget) go to the largest
    remainders, lowest index first on ties. No entry grows by more than 1.
    """
    frac = np.asarray(fractional, dtype=float)
    if int(budget) != budget or budget < 0:
        raise ConfigError("element budget must be a non-negative integer")
    if np.any(frac < -1e-12):
        raise ConfigError("fractional elements must be non-negative")
    frac = np.maximum(frac, 0.0)
    base = np.floor(frac).astype(int)
    if base.sum() > budget:
        raise ConfigError("fractional split exceeds the element budget")
    remainder = frac - base
    extras = int(math.floor(remainder.sum() + 0.5))
    extras = min(extras, int(budget) - int(base.sum()))
    order = sorted(range(len(frac)), key=lambda i: (-remainder[i], i))
    for i in order[: max(extras, 0)]:
        base[i] += 1
    return base


@dataclass(frozen=True)
class AllocationSolution:
    """Final integer allocation plus the relaxed trajectory that led there.

    ``trace`` holds the relaxed objective after each outer refinement
    (index 0 is the starting point), so trace[-1] is the relaxed optimum
    before rounding. ``se`` re-evaluates the rate at the rounded elements
    with re-optimized powers.
    """

    elements: tuple[int, ...]
    powers: tuple[float, ...]
    se: float
    trace: tuple[float, ...]
    relaxed_elements: tuple[float, ...]

    @property
    def iterations(self) -> int:
        return len(self.trace) - 1


def equal_allocation(link_cnr, config: SystemConfig) -> AllocationSolution:
    """Uniform benchmark: budget/K power and budget/K elements per surface."""
    cnr = np.asarray(link_cnr, dtype=float)
    k = cnr.size
    if k == 0:
        raise ConfigError("need at least one surface")
    quota = config.element_budget / k
    elements = round_elements(np.full(k, quota), config.element_budget)
    powers = np.full(k, config.power_budget / k)
    se = spectral_efficiency(elements, powers, cnr)
    return AllocationSolution(
        elements=tuple(int(v) for v in elements),
        powers=tuple(float(v) for v in powers),
        se=se,
        trace=(se,),
        relaxed_elements=tuple(float(quota) for _ in range(k)),
    )


@dataclass(frozen=True)
class ScaState:
    """Expansion point of one convex refinement step.

    ref_log_power = ln p, ref_log_gain = ln m^2, ref_elements = m, all
    taken at the current (clamped) iterate.
    """

    ref_log_power: np.ndarray
    ref_log_gain: np.ndarray
    ref_elements: np.ndarray

    @staticmethod
    def from_iterate(powers, elements) -> "ScaState":
        p = np.maximum(np.asarray(powers, dtype=float), ITERATE_CLAMP)
        m = np.maximum(np.asarray(elements, dtype=float), ITERATE_CLAMP)
        return ScaState(
            ref_log_power=np.log(p),
            ref_log_gain=2.0 * np.log(m),
            ref_elements=m,
        )


@dataclass(frozen=True)
class SubproblemSolution:
    """Optimal point of one convex subproblem, in original variables.

    sinr_lb is the linearized-rate auxiliary (the per-stream SINR lower
    bound l_k); log_powers and log_gains are the substituted variables
    with their defining constraints tight.
    """

    powers: np.ndarray
    elements: np.ndarray
    sinr_lb: np.ndarray
    log_powers: np.ndarray
    log_gains: np.ndarray
    objective: float
    duality_gap: float
    kkt_residual: float
    newton_iters: int


def _validate_state(cnr, state: ScaState):
    k = cnr.size
    for name in ("ref_log_power", "ref_log_gain", "ref_elements"):
        arr = getattr(state, name)
        if arr.shape != (k,):
            raise ConfigError(f"state field {name} must have length {k}")
        if not np.all(np.isfinite(arr)):
            raise ConfigError(f"state field {name} must be finite")
    if np.any(state.ref_elements <= 0):
        raise ConfigError("reference elements must be positive")


def _barrier_solve(coef, offset, mh, w0, v0, t0, newton_tol=1e-12, gap_tol=1e-8):
    """Maximize F over the scaled budget region via a log-barrier path.

    F(w, v) = sum ln(1 + coef*(offset + ln w + ln(2 v mh - mh^2))) / ln 2
    subject to sum w <= 1, sum v <= 1, w > 0 and 2 v mh - mh^2 > 0. Every
    inequality enters the barrier — including the positivity walls, which
    would otherwise be approached arbitrarily closely by streams whose
    coefficient underflows (the objective is indifferent there and the
    Hessian degenerates). Each stage centers
        phi = -F - (ln sw + ln sv + sum ln w + sum ln q) / t,
    i.e. the barrier weight divided out so values stay O(F) and the
    decrement test is not drowned by round-off at large t. The duality
    gap after the final stage is (2 + 2n)/t. Returns
    (w, v, gap, kkt, iters).
    """
    n = coef.size
    m_ineq = 2 + 2 * n
    one_w = np.zeros(2 * n)
    one_w[:n] = 1.0
    one_v = np.zeros(2 * n)
    one_v[n:] = 1.0

    def eval_point(z):
        w, v = z[:n], z[n:]
        if np.any(w <= 0.0):
            return None
        q = 2.0 * v * mh - mh * mh
        if np.any(q <= 0.0):
            return None
        sw = 1.0 - w.sum()
        sv = 1.0 - v.sum()
        if sw <= 0.0 or sv <= 0.0:
            return None
        lvals = coef * (offset + np.log(w) + np.log(q))
        u = 1.0 + lvals
        if np.any(u <= 1e-14):
            return None
        return w, v, q, sw, sv, u

    def phi(parts, t):
        w, v, q, sw, sv, u = parts
        walls = math.log(sw) + math.log(sv) + np.sum(np.log(w)) + np.sum(np.log(q))
        return -np.sum(np.log(u)) / LN2 - walls / t

    z = np.concatenate([w0, v0])
    parts = eval_point(z)
    if parts is None:
        raise SolverError(
            "subproblem start is infeasible for the current expansion point",
            last_iterate={"w": w0, "v": v0},
        )

    total_newton = 0
    t = t0
    grad = None
    while True:
        for _ in range(100):
            w, v, q, sw, sv, u = parts
            gF_w = coef / (w * u * LN2)
            gF_v = 2.0 * coef * mh / (q * u * LN2)
            grad = np.concatenate([
                -gF_w - 1.0 / (t * w) + 1.0 / (t * sw),
                -gF_v - 2.0 * mh / (t * q) + 1.0 / (t * sv),
            ])

            upc = u + coef
            h_ww = coef * upc / (w * w * u * u * LN2) + 1.0 / (t * w * w)
            h_vv = (4.0 * coef * mh * mh * upc / (q * q * u * u * LN2)
                    + 4.0 * mh * mh / (t * q * q))
            h_wv = 2.0 * coef * coef * mh / (w * q * u * u * LN2)
            hess = np.zeros((2 * n, 2 * n))
            idx = np.arange(n)
            hess[idx, idx] = h_ww
            hess[idx + n, idx + n] = h_vv
            hess[idx, idx + n] = h_wv
            hess[idx + n, idx] = h_wv
            hess += np.outer(one_w, one_w) / (t * sw * sw)
            hess += np.outer(one_v, one_v) / (t * sv * sv)

            try:
                step = np.linalg.solve(hess, -grad)
            except np.linalg.LinAlgError as exc:
                raise SolverError(
                    "singular Newton system in the barrier solver",
                    last_iterate={"w": w, "v": v},
                ) from exc
            decrement = float(-grad @ step)
            total_newton += 1
            if decrement / 2.0 <= newton_tol:
                break
            val = phi(parts, t)
            alpha = 1.0
            slope = float(grad @ step)
            while alpha > 1e-13:
                trial = z + alpha * step
                trial_parts = eval_point(trial)
                if trial_parts is not None and phi(trial_parts, t) <= val + 0.25 * alpha * slope:
                    z = trial
                    parts = trial_parts
                    break
                alpha *= 0.5
            else:
                raise SolverError(
                    "line search failed in the barrier solver",
                    last_iterate={"w": parts[0], "v": parts[1]},
                    residuals={"newton_decrement": decrement},
                )
        else:
            raise SolverError(
                "Newton centering did not converge",
                last_iterate={"w": parts[0], "v": parts[1]},
            )
        if m_ineq / t <= gap_tol:
            break
        t *= 30.0

    w, v, q, sw, sv, u = parts
    kkt = float(np.max(np.abs(grad)))
    return w, v, m_ineq / t, kkt, total_newton


def convex_subproblem(link_cnr, config: SystemConfig, state: ScaState, *, warm=False) -> SubproblemSolution:
    """Solve one convex refinement step around ``state``.

    Zero-quality streams stay in the program with a zero objective
    coefficient; the barrier walls keep their variables interior and they
    end up holding a vanishing share of both budgets.
    """
    cnr = np.asarray(link_cnr, dtype=float)
    if np.any(cnr < 0):
        raise ConfigError("link qualities must be non-negative")
    if not np.any(cnr > 0):
        raise ConfigError("all link qualities are zero")
    _validate_state(cnr, state)
    k = cnr.size

    budget_p = config.power_budget
    budget_m = float(config.element_budget)
    coef = cnr * np.exp(state.ref_log_power + state.ref_log_gain)
    offset = (1.0 - state.ref_log_power - state.ref_log_gain
              + math.log(budget_p) + 2.0 * math.log(budget_m))
    mh = state.ref_elements / budget_m

    # Start near the expansion point but pulled toward a uniform interior
    # split, so re-solves that expand around a budget-tight iterate do not
    # begin on the constraint boundary (where centering stalls).
    w0 = np.exp(state.ref_log_power) / budget_p
    if w0.sum() >= 0.999:
        w0 = 0.999 * w0 / w0.sum()
    w0 = 0.9 * w0 + 0.1 * (0.5 / k)
    v0 = mh.copy()
    if v0.sum() >= 0.999:
        v0 = 0.999 * v0 / v0.sum()
    v0 = 0.9 * v0 + 0.1 * (0.5 / k)

    t0 = 1e4 if warm else 10.0
    w, v, gap, kkt, iters = _barrier_solve(coef, offset, mh, w0, v0, t0)

    p_out = budget_p * w
    m_out = budget_m * v
    x = np.log(p_out)
    gain_arg = 2.0 * m_out * state.ref_elements - state.ref_elements**2
    y = np.log(np.maximum(gain_arg, 1e-300))
    sinr = coef * (1.0 + x + y - state.ref_log_power - state.ref_log_gain)
    objective = float(np.sum(np.log2(1.0 + sinr)))
    return SubproblemSolution(
        powers=p_out,
        elements=m_out,
        sinr_lb=sinr,
        log_powers=x,
        log_gains=y,
        objective=objective,
        duality_gap=gap,
        kkt_residual=kkt,
        newton_iters=iters,
    )


def _sca_run(cnr_full, cnr_masked, config, p, m, rel_tol, max_outer):
    trace = [spectral_efficiency(m, p, cnr_full)]
    for outer in range(max_outer):
        state = ScaState.from_iterate(p, m)
        sol = convex_subproblem(cnr_masked, config, state, warm=outer > 0)
        se = spectral_efficiency(sol.elements, sol.powers, cnr_full)
        # Exact solves cannot decrease the true objective; a drop bounded
        # by the barrier gap means the refinement is exhausted.
        if se < trace[-1]:
            break
        p, m = sol.powers, sol.elements
        trace.append(se)
        if trace[-1] - trace[-2] <= rel_tol * max(1.0, abs(trace[-1])):
            break
    return p, m, trace


def _support_upper_bound(cnr, support, config) -> float:
    q = cnr[list(support)] * config.power_budget * float(config.element_budget) ** 2
    return float(np.sum(np.log2(1.0 + q)))


def sca_optimize(link_cnr, config: SystemConfig, init: AllocationSolution | None = None, *,
                 rel_tol=1e-6, max_outer=100, multi_start=True) -> AllocationSolution:
    """Optimize the joint split of power and elements across surfaces.

    Runs the convex-refinement loop from a uniform split, and (by default)
    re-runs it restricted to promising activity subsets, since at low SNR
    concentrating the whole budget on few surfaces can beat any spread
    stationary point. Support restarts are pruned with the closed-form
    bound sum log2(1 + cnr*P*M^2) over the subset. The best relaxed result
    is rounded to integers and the powers re-water-filled.
    """
    cnr = np.asarray(link_cnr, dtype=float)
    k = cnr.size
    if k == 0:
        raise ConfigError("need at least one surface")
    if np.any(cnr < 0):
        raise ConfigError("link qualities must be non-negative")
    if not np.any(cnr > 0):
        raise ConfigError("all link qualities are zero")
    budget_m = config.element_budget
    if budget_m == 0:
        zeros = (0,) * k
        return AllocationSolution(zeros, (0.0,) * k, 0.0, (0.0,), (0.0,) * k)

    positive = [int(i) for i in np.flatnonzero(cnr > 0)]
    full_mask = np.where(cnr > 0, cnr, 0.0)

    def start_for(support):
        p0 = np.full(k, ITERATE_CLAMP)
        m0 = np.full(k, ITERATE_CLAMP)
        share = len(support)
        p0[list(support)] = config.power_budget / share
        m0[list(support)] = budget_m / share
        masked = np.where(np.isin(np.arange(k), list(support)), full_mask, 0.0)
        return p0, m0, masked

    runs = []
    p0, m0, masked = start_for(positive)
    p, m, trace = _sca_run(cnr, masked, config, p0, m0, rel_tol, max_outer)
    runs.append((p, m, trace))
    best = 0

    if init is not None:
        p0 = np.maximum(np.asarray(init.powers, dtype=float), ITERATE_CLAMP)
        m0 = np.maximum(np.asarray(init.relaxed_elements, dtype=float), ITERATE_CLAMP)
        p, m, trace = _sca_run(cnr, full_mask, config, p0, m0, rel_tol, max_outer)
        runs.append((p, m, trace))

    if multi_start and len(positive) > 1:
        if len(positive) <= 6:
            supports = [
                s
                for size in range(1, len(positive))
                for s in combinations(positive, size)
            ]
        else:
            supports = [(i,) for i in positive]
        supports.sort(key=lambda s: (-_support_upper_bound(cnr, s, config), s))
        for support in supports:
            best_se = max(r[2][-1] for r in runs)
            if _support_upper_bound(cnr, support, config) <= best_se + 1e-12:
                continue
            p0, m0, masked = start_for(list(support))
            try:
                p, m, trace = _sca_run(cnr, masked, config, p0, m0, rel_tol, max_outer)
            except SolverError:
                continue
            runs.append((p, m, trace))

    for i, run in enumerate(runs):
        if run[2][-1] > runs[best][2][-1] + 1e-12:
            best = i
    p, m, trace = runs[best]

    elements = round_elements(m, budget_m)
    gains = cnr * elements.astype(float) ** 2
    if np.any(gains > 0):
        powers, _ = water_filling(gains, config.power_budget)
    else:
        powers = np.zeros(k)
    se = spectral_efficiency(elements, powers, cnr)
    return AllocationSolution(
        elements=tuple(int(v) for v in elements),
        powers=tuple(float(v) for v in powers),
        se=se,
        trace=tuple(float(v) for v in trace),
        relaxed_elements=tuple(float(v) for v in m),
    )


def brute_force_oracle(link_cnr, config: SystemConfig) -> AllocationSolution:
    """Exhaustive integer benchmark: every split of the element budget.

    Each split gets water-filled powers; splits with a slack budget are
    dominated and skipped (adding an element never reduces the rate). The
    enumeration is guarded: C(M+K-1, K-1) must not exceed 10^7.
    """
    cnr = np.asarray(link_cnr, dtype=float)
    k = cnr.size
    if k == 0:
        raise ConfigError("need at least one surface")
    if not np.any(cnr > 0):
        raise ConfigError("all link qualities are zero")
    budget_m = int(config.element_budget)
    count = math.comb(budget_m + k - 1, k - 1)
    if count > 10**7:
        raise OracleSizeError(
            f"enumeration of {count} splits exceeds the 1e7 guard"
        )

    best_se = -1.0
    best_split = None
    best_powers = None
    split = [0] * k

    def recurse(idx, remaining):
        nonlocal best_se, best_split, best_powers
        if idx == k - 1:
            split[idx] = remaining
            gains = cnr * np.array(split, dtype=float) ** 2
            if np.any(gains > 0):
                powers, _ = water_filling(gains, config.power_budget)
                se = spectral_efficiency(split, powers, cnr)
            else:
                powers = np.zeros(k)
                se = 0.0
            if se > best_se:
                best_se = se
                best_split = tuple(split)
                best_powers = powers.copy()
            return
        for take in range(remaining + 1):
            split[idx] = take
            recurse(idx + 1, remaining - take)

    recurse(0, budget_m)
    return AllocationSolution(
        elements=tuple(int(v) for v in best_split),
        powers=tuple(float(v) for v in best_powers),
        se=float(best_se),
        trace=(float(best_se),),
        relaxed_elements=tuple(float(v) for v in best_split),
    )
