"""Adaptive confidence interval for a Poisson rate with unknown
contamination level.

Same test-inversion construction as the binomial interval, with the
proportion grid replaced by the integers up to a data-driven search cap
(an upper order statistic plus one) and a single closed-form boundary
cell on [0, 1).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import stats

from .common import (
    INTEGER_SNAP_TOL,
    ConfidenceInterval,
    SearchSizeWarning,
    SmallnessConditionWarning,
    ceil_int,
    floor_int,
)
from .binomial import BOUNDARY_SHRINK, log_inv_a
from .dist import SampleSet

# Hard cap on the integer search grid when the data-driven cap explodes.
GRID_HARD_LIMIT = 10 ** 6


class PoisTestQuantities(NamedTuple):
    """Threshold t (count units), separation r (rate units), level tau."""

    t: float
    r: float
    tau: float


def _check_lam_eps(lam: float, eps: float):
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must be in [0, 1], got {eps}")


def _pois_cdf_clipped(param: float, thr: float) -> float:
    k = floor_int(thr)
    if k < 0:
        return 0.0
    if not math.isfinite(param):
        return 0.0
    return float(stats.poisson.cdf(k, max(param, 0.0)))


def _pois_sf_clipped(param: float, thr: float) -> float:
    k = ceil_int(thr)
    if k <= 0:
        return 1.0
    param = max(param, 0.0)
    return float(stats.poisson.sf(k - 1, param))


def upper_quantities_pois(lam: float, eps: float, n: int, alpha: float) -> PoisTestQuantities:
    """(t, r, tau) for the test against larger rates."""
    _check_lam_eps(lam, eps)
    l1a = log_inv_a(eps, n, alpha)
    dev = min(lam / 2.0, 0.125 * math.sqrt(lam * l1a))
    t = lam - dev
    if lam == 0.0:
        r = 0.5
    elif dev > 0.0:
        r = lam / (4.0 * dev)
    else:
        r = math.inf
    tau = 1.1 * _pois_cdf_clipped(lam + r, t)
    return PoisTestQuantities(t, r, tau)


def lower_quantities_pois(lam: float, eps: float, n: int, alpha: float) -> PoisTestQuantities:
    """(t, r, tau) for the test against smaller rates."""
    _check_lam_eps(lam, eps)
    if lam < 1.0:
        t = 1.0
        r = BOUNDARY_SHRINK * lam
        tau = 0.5 * (1.0 - math.exp(-lam)) - 3.0 * math.log(24.0 / alpha) / n
        return PoisTestQuantities(t, r, tau)
    l1a = log_inv_a(eps, n, alpha)
    dev = min(lam / 2.0, 0.125 * math.sqrt(lam * l1a))
    t = lam + dev
    r = lam / (4.0 * dev) if dev > 0.0 else math.inf
    tau = 1.1 * _pois_sf_clipped(lam - r, t)
    return PoisTestQuantities(t, r, tau)


def phi_plus_pois(s: SampleSet, lam: float, eps: float, alpha: float) -> int:
    tq = upper_quantities_pois(lam, eps, s.n, alpha)
    return int(s.frac_le(tq.t) < tq.tau)


def phi_minus_pois(s: SampleSet, lam: float, eps: float, alpha: float) -> int:
    tq = lower_quantities_pois(lam, eps, s.n, alpha)
    return int(s.frac_ge(tq.t) < tq.tau)


def lambda_max_hat(s: SampleSet) -> int:
    """Search cap X_(ceil(3n/4)) + 1 (1-based order statistics)."""
    k = (3 * s.n + 3) // 4
    return int(s.sorted_values[k - 1]) + 1


def psi_hat_plus_pois(s: SampleSet, lam: float, eps: float, alpha: float,
                      lam_max: int | None = None) -> int:
    """Monotonized integer-grid variant of phi_plus_pois."""
    if lam_max is None:
        lam_max = lambda_max_hat(s)
    if lam > lam_max:
        raise ValueError(f"lambda {lam} above search cap {lam_max}")
    if lam == lam_max:
        return 0
    top = ceil_int(lam)
    return min(phi_plus_pois(s, mu, eps, alpha) for mu in range(top + 1))


def psi_hat_minus_pois(s: SampleSet, lam: float, eps: float, alpha: float,
                       lam_max: int | None = None) -> int:
    """Monotonized integer-grid variant of phi_minus_pois."""
    if lam_max is None:
        lam_max = lambda_max_hat(s)
    if lam > lam_max:
        raise ValueError(f"lambda {lam} above search cap {lam_max}")
    if lam < 1.0:
        grid = min(phi_minus_pois(s, mu, eps, alpha) for mu in range(1, lam_max + 1))
        return min(phi_minus_pois(s, lam, eps, alpha), grid)
    lo = floor_int(lam)
    return min(phi_minus_pois(s, mu, eps, alpha) for mu in range(lo, lam_max + 1))


def rate_ell_pois(lam: float, eps: float, n: int) -> float:
    """Reference length curve for the Poisson rate."""
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must be in [0, 1], got {eps}")
    inv_log_n = 1.0 / math.sqrt(math.log(n)) if n > 1 else math.inf
    if eps == 0.0:
        inv_log_e = 0.0
    elif eps >= 1.0:
        inv_log_e = math.inf
    else:
        inv_log_e = 1.0 / math.sqrt(math.log(1.0 / eps))
    root = math.sqrt(lam)
    first = root * (inv_log_n + inv_log_e) + 1.0 if root > 0.0 else 1.0
    return min(first, lam) + 1.0 / n + eps


def _epsilon_grid(n: int, alpha: float, eps_max: float) -> np.ndarray:
    if eps_max <= 0.0:
        return np.array([0.0])
    base = math.log(24.0 / alpha) / n
    values = [eps_max]
    if n * eps_max >= math.log(24.0 / alpha):
        kmax = math.floor(math.log2(n * eps_max / math.log(24.0 / alpha)))
        values.extend(v for k in range(kmax + 1) if (v := base * 2 ** k) <= eps_max)
    return np.unique(values)


class PoissonTestTables:
    """Test thresholds/levels on the integer rate grid, extended on demand."""

    def __init__(self, n: int, alpha: float, eps_max: float):
        self.n = n
        self.alpha = alpha
        self.eps = _epsilon_grid(n, alpha, eps_max)
        self.l1a = np.array([log_inv_a(e, n, alpha) for e in self.eps])
        self.rows = 0
        k = self.eps.size
        self.up_cut = np.zeros((0, k), dtype=np.int64)
        self.up_tau = np.zeros((0, k))
        self.lo_cut = np.zeros((0, k), dtype=np.int64)
        self.lo_tau = np.zeros((0, k))

    def extend(self, max_mu: int):
        """Make sure rows 0..max_mu exist."""
        if max_mu < self.rows:
            return
        mu = np.arange(self.rows, max_mu + 1, dtype=float)[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            dev = np.minimum(mu / 2.0, 0.125 * np.sqrt(mu * self.l1a[None, :]))
            rbar = mu / (4.0 * dev)
        rbar[np.isnan(rbar)] = 0.5          # mu = 0 row

        up_cut = np.floor(mu - dev + INTEGER_SNAP_TOL).astype(np.int64)
        up_param = mu + rbar
        finite = np.isfinite(up_param)
        up_tau = np.where(
            finite,
            1.1 * stats.poisson.cdf(up_cut, np.where(finite, up_param, 1.0)),
            0.0,
        )

        lo_cut = np.ceil(mu + dev - INTEGER_SNAP_TOL).astype(np.int64)
        lo_param = np.maximum(mu - rbar, 0.0)
        lo_tau = np.where(
            np.isfinite(rbar),
            1.1 * stats.poisson.sf(lo_cut - 1, lo_param),
            0.0,
        )

        self.up_cut = np.vstack([self.up_cut, up_cut])
        self.up_tau = np.vstack([self.up_tau, up_tau])
        self.lo_cut = np.vstack([self.lo_cut, lo_cut])
        self.lo_tau = np.vstack([self.lo_tau, lo_tau])
        self.rows = max_mu + 1


class RobustPoissonCI:
    """Reusable interval constructor for i.i.d. contaminated count data."""

    def __init__(self, n: int, alpha: float, eps_max: float,
                 warn_threshold: float = 0.1, grid_cap: int = GRID_HARD_LIMIT):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {alpha}")
        if not 0.0 <= eps_max <= 1.0:
            raise ValueError(f"eps_max must be in [0, 1], got {eps_max}")
        check = math.log(2.0 / alpha) / n + eps_max
        if check > warn_threshold:
            warnings.warn(
                SmallnessConditionWarning(
                    f"log(2/alpha)/n + eps_max = {check:.4g} exceeds "
                    f"{warn_threshold}; coverage theory assumes it small",
                    check, warn_threshold),
                stacklevel=2)
        self.n = n
        self.alpha = alpha
        self.eps_max = eps_max
        self.grid_cap = grid_cap
        self.tables = PoissonTestTables(n, alpha, eps_max)

    def interval(self, s: SampleSet) -> ConfidenceInterval:
        if s.n != self.n:
            raise ValueError(f"sample has n={s.n}, config says n={self.n}")
        lam_max = lambda_max_hat(s)
        if lam_max > self.grid_cap:
            warnings.warn(
                SearchSizeWarning(
                    f"search cap {lam_max} exceeds grid limit {self.grid_cap}; "
                    f"truncating"),
                stacklevel=2)
            lam_max = self.grid_cap
        t = self.tables
        t.extend(lam_max)
        xs = s.sorted_values
        n = s.n

        frac_le = np.searchsorted(xs, t.up_cut[: lam_max + 1], side="right") / n
        accept_up = frac_le >= t.up_tau[: lam_max + 1]
        acc_below = np.logical_or.accumulate(accept_up, axis=0)
        # condition at integer k (k = 0..lam_max-1) looks at rates <= k + 1
        cond_left = acc_below[1: lam_max + 1, :].all(axis=1)
        if cond_left.any():
            left = float(np.argmax(cond_left))
        else:
            left = float(lam_max)

        frac_ge = (n - np.searchsorted(xs, t.lo_cut[1: lam_max + 1], side="left")) / n
        accept_lo = frac_ge >= t.lo_tau[1: lam_max + 1]
        # acc_above[i] = some accepted rate in [i + 1, lam_max]
        acc_above = np.logical_or.accumulate(accept_lo[::-1], axis=0)[::-1]
        k_arr = np.maximum(np.arange(1, lam_max + 1) - 1, 1)
        cond_right = acc_above[k_arr - 1, :].all(axis=1)
        if cond_right.any():
            right = float(1 + int(np.where(cond_right)[0][-1]))
        else:
            inner = min(2.0 * s.frac_ge(1) + 6.0 * math.log(24.0 / self.alpha) / n,
                        1.0 - 1.0 / math.e)
            right = -math.log(1.0 - inner)

        return ConfidenceInterval(left, right, self.alpha, "poisson-robust")


def robust_ci_pois(s: SampleSet, alpha: float, eps_max: float,
                   warn_threshold: float = 0.1,
                   grid_cap: int = GRID_HARD_LIMIT) -> ConfidenceInterval:
    """Adaptive robust confidence interval for the Poisson rate."""
    return RobustPoissonCI(s.n, alpha, eps_max, warn_threshold, grid_cap).interval(s)
