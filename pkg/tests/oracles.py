"""Independent brute-force oracles used across the test suite.

These re-derive expected values from first principles (direct products,
exhaustive enumeration, dense scans over the membership predicate) so the
production code paths are checked against a second route.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from robustci.binomial import (
    RobustCIConfig,
    boundary_left,
    boundary_right,
    epsilon_grid,
    phi_minus,
    phi_plus,
)
from robustci.dist import SampleSet
from robustci.poisson import (
    _epsilon_grid as pois_epsilon_grid,
    lambda_max_hat,
    phi_minus_pois,
    phi_plus_pois,
)


def binom_pmf_product(m: int, p: float, k: int) -> float:
    """Binomial pmf by direct product accumulation (no logs)."""
    coef = 1.0
    for i in range(k):
        coef *= (m - i) / (i + 1)
    return coef * p ** k * (1.0 - p) ** (m - k)


def binom_scan_accepted(s: SampleSet, cfg: RobustCIConfig, step: float):
    """Dense-scan membership in the discretized test-inversion set.

    Evaluates the monotonized, discretized tests directly from the scalar
    test functions on the proportion grid plus the closed-form boundary
    branches, over S_m united with a step-grid on [0, 1].
    """
    m, n = cfg.m, cfg.n
    eps = epsilon_grid(cfg) if cfg.eps_max > 0 else np.array([0.0])
    n_eps = eps.size

    phi_up = np.array([[phi_plus(s, j / m, e, cfg) for e in eps]
                       for j in range(m + 1)])
    phi_lo = np.array([[phi_minus(s, j / m, e, cfg) for e in eps]
                       for j in range(m + 1)])
    # any accepted grid point at/below j (upper tests, q = 1 excluded)
    up_any = np.logical_or.accumulate(phi_up[:m] == 0, axis=0)
    # any accepted grid point at/above j >= 1 (lower tests, q = 0 excluded)
    lo_any = np.logical_or.accumulate((phi_lo[1:] == 0)[::-1], axis=0)[::-1]

    scan = np.unique(np.concatenate([
        np.arange(0.0, 1.0 + step / 2.0, step), np.arange(m + 1) / m]))
    mp = m * scan
    log6 = 6.0 * math.log(24.0 / cfg.alpha) / n
    frac_hi = s.frac_le(m - 1)   # used by the upper boundary branch
    frac_lo = s.frac_ge(1)       # used by the lower boundary branch

    accepted = np.ones((scan.size, n_eps), dtype=bool)

    grid_up = mp <= m - 1 + 1e-9
    jmax = np.minimum(np.ceil(mp[grid_up] - 1e-9).astype(int), m - 1)
    accepted[grid_up] &= up_any[jmax, :]
    bnd = ~grid_up
    tau_up = 0.5 * (1.0 - scan[bnd] ** m) - 3.0 * math.log(24.0 / cfg.alpha) / n
    phi_self = frac_hi < tau_up
    accepted[bnd] &= (~phi_self[:, None]) | up_any[m - 1, :][None, :]

    grid_lo = mp >= 1 - 1e-9
    jmin = np.maximum(np.floor(mp[grid_lo] + 1e-9).astype(int), 1)
    accepted[grid_lo] &= lo_any[jmin - 1, :]
    bnd = ~grid_lo
    tau_lo = 0.5 * (1.0 - (1.0 - scan[bnd]) ** m) - 3.0 * math.log(24.0 / cfg.alpha) / n
    phi_self = frac_lo < tau_lo
    accepted[bnd] &= (~phi_self[:, None]) | lo_any[0, :][None, :]

    ok = accepted.all(axis=1)
    return scan, ok


def pois_scan_accepted(s: SampleSet, alpha: float, eps_max: float, step: float):
    """Dense-scan membership for the Poisson test-inversion set."""
    n = s.n
    lam_max = lambda_max_hat(s)
    eps = pois_epsilon_grid(n, alpha, eps_max)
    n_eps = eps.size

    phi_up = np.array([[phi_plus_pois(s, mu, e, alpha) for e in eps]
                       for mu in range(lam_max + 1)])
    phi_lo = np.array([[phi_minus_pois(s, mu, e, alpha) for e in eps]
                       for mu in range(lam_max + 1)])
    up_any = np.logical_or.accumulate(phi_up == 0, axis=0)
    lo_any = np.logical_or.accumulate((phi_lo[1:] == 0)[::-1], axis=0)[::-1]

    scan = np.unique(np.concatenate([
        np.arange(0.0, lam_max + step / 2.0, step),
        np.arange(lam_max + 1, dtype=float)]))
    accepted = np.ones((scan.size, n_eps), dtype=bool)

    below_top = scan < lam_max
    top = np.ceil(scan[below_top] - 1e-9).astype(int)
    accepted[below_top] &= up_any[top, :]
    # psi-hat-plus is defined as 0 at the cap itself: nothing to do there.

    cell = scan < 1.0
    tau = 0.5 * (1.0 - np.exp(-scan[cell])) - 3.0 * math.log(24.0 / alpha) / n
    phi_self = s.frac_ge(1) < tau
    accepted[cell] &= (~phi_self[:, None]) | lo_any[0, :][None, :]
    mid = ~cell
    lo_idx = np.maximum(np.floor(scan[mid] + 1e-9).astype(int), 1)
    accepted[mid] &= lo_any[lo_idx - 1, :]

    ok = accepted.all(axis=1)
    return scan, ok


def u_norm_double_loop(b: np.ndarray, nodes) -> float:
    """Subset seminorm by explicit double-loop enumeration."""
    nodes = list(nodes)
    best = 0.0
    for size in range(len(nodes) + 1):
        for sub in combinations(nodes, size):
            total = 0.0
            for i in sub:
                for j in sub:
                    if i != j:
                        total += b[i, j]
            best = max(best, abs(total))
    return best


def check_scan_brackets(ci, scan, ok, step):
    """Assert the algorithm endpoints bracket the scanned accepted set."""
    assert ok.any(), "scan found an empty accepted set"
    lo = float(scan[ok][0])
    hi = float(scan[ok][-1])
    assert -1e-12 <= lo - ci.lower <= step + 1e-9, (ci, lo, hi)
    assert -1e-12 <= ci.upper - hi <= step + 1e-9, (ci, lo, hi)
    return lo, hi
