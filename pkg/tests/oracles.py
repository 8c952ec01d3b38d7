"""Independent reference implementations used to cross-check the library.

Everything here is deliberately written with different algorithms than the
package (bisection instead of active-set sorting, itertools enumeration
instead of recursion, dense grid search instead of Newton steps) so that a
shared bug cannot hide behind shared code.
"""

import itertools
import math

import numpy as np


def waterfill_bisection(eta, budget, iters=200):
    """Water level by bisection on the budget equation Σ max(u - 1/η, 0) = P."""
    eta = np.asarray(eta, dtype=float)
    inv = np.where(eta > 0.0, 1.0 / np.where(eta > 0.0, eta, 1.0), np.inf)
    lo = float(np.min(inv[np.isfinite(inv)]))
    hi = lo + budget + 1.0
    while np.sum(np.maximum(hi - inv, 0.0)) < budget:
        hi *= 2.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.sum(np.maximum(mid - inv, 0.0)) < budget:
            lo = mid
        else:
            hi = mid
    level = 0.5 * (lo + hi)
    return np.maximum(level - inv, 0.0), level


def rate_bits(elements, powers, chi):
    """Plain-Python sum of per-stream log2 rates."""
    total = 0.0
    for m, p, c in zip(elements, powers, chi):
        total += math.log2(1.0 + float(p) * float(c) * float(m) ** 2)
    return total


def entropy_effective_rank(singulars):
    """exp(Shannon entropy) of the normalized sqrt-singular-value weights."""
    vals = [math.sqrt(s) for s in singulars if s > 0.0]
    total = sum(vals)
    ent = 0.0
    for v in vals:
        w = v / total
        ent -= w * math.log(w)
    return math.exp(ent)


def exhaustive_split(chi, budget_elements, budget_power):
    """Globally optimal integer split by full enumeration (small sizes only).

    Returns (best_rate, best_elements, best_powers); powers come from the
    bisection water-filler above, so the whole pipeline is library-free.
    """
    chi = np.asarray(chi, dtype=float)
    k = chi.size
    best = (-1.0, None, None)
    for split in itertools.product(range(budget_elements + 1), repeat=k):
        if sum(split) > budget_elements:
            continue
        gains = chi * np.asarray(split, dtype=float) ** 2
        if not np.any(gains > 0.0):
            continue
        powers, _ = waterfill_bisection(gains, budget_power)
        rate = rate_bits(split, powers, chi)
        if rate > best[0]:
            best = (rate, split, tuple(powers))
    return best


def subproblem_grid_search(chi, power_budget, element_budget, x_hat, y_hat, m_hat,
                           n=1201, refinements=2):
    """Dense 2-D grid search for the K=2 linearized subproblem.

    Variables are the budget fractions (a, b) given to stream 1; both budget
    constraints are taken as tight (the objective is strictly increasing in
    each stream's share, so the optimum uses the full budgets).
    """
    chi = np.asarray(chi, dtype=float)
    m_hat = np.asarray(m_hat, dtype=float)
    coef = chi * np.exp(np.asarray(x_hat) + np.asarray(y_hat))
    base = 1.0 - np.asarray(x_hat) - np.asarray(y_hat)

    def objective(a, b):
        # a, b broadcastable arrays of stream-1 power / element fractions
        total = np.zeros(np.broadcast(a, b).shape)
        for k, (wk, vk) in enumerate(((a, b), (1.0 - a, 1.0 - b))):
            p = power_budget * wk
            q = 2.0 * element_budget * vk * m_hat[k] - m_hat[k] ** 2
            good = (p > 0.0) & (q > 0.0)
            arg = np.where(good, base[k] + np.log(np.where(good, p, 1.0))
                           + np.log(np.where(good, q, 1.0)), -np.inf)
            inner = 1.0 + coef[k] * arg
            term = np.where(inner > 0.0, np.log2(np.where(inner > 0.0, inner, 1.0)),
                            -np.inf)
            total = total + term
        return total

    lo_a, hi_a = 1e-6, 1.0 - 1e-6
    lo_b = m_hat[0] / (2.0 * element_budget) + 1e-9
    hi_b = 1.0 - m_hat[1] / (2.0 * element_budget) - 1e-9
    best = -np.inf
    for _ in range(refinements + 1):
        a = np.linspace(lo_a, hi_a, n)
        b = np.linspace(lo_b, hi_b, n)
        grid = objective(a[:, None], b[None, :])
        idx = np.unravel_index(np.argmax(grid), grid.shape)
        best = max(best, float(grid[idx]))
        # shrink the window around the current argmax
        da, db = (hi_a - lo_a) / (n - 1), (hi_b - lo_b) / (n - 1)
        lo_a, hi_a = max(lo_a, a[idx[0]] - 2 * da), min(hi_a, a[idx[0]] + 2 * da)
        lo_b, hi_b = max(lo_b, b[idx[1]] - 2 * db), min(hi_b, b[idx[1]] + 2 * db)
    return best


def best_pair_equal_split(candidates, element_budget, power_budget, noise_power):
    """Exhaustive K=2 placement: best equal-split rate over all admissible
    candidate pairs (distinct departure and arrival angles)."""
    best = -1.0
    half_m = element_budget // 2
    half_p = power_budget / 2.0
    for i, j in itertools.combinations(range(len(candidates)), 2):
        ci, cj = candidates[i], candidates[j]
        if ci.aod_phase == cj.aod_phase or ci.aoa_phase == cj.aoa_phase:
            continue
        chi = [ci.gain**2 / noise_power, cj.gain**2 / noise_power]
        rate = rate_bits((half_m, element_budget - half_m), (half_p, half_p), chi)
        best = max(best, rate)
    return best
