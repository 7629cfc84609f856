"""Adaptive confidence interval for a binomial proportion with unknown
contamination level.

The interval inverts a two-parameter family of robust tests indexed by a
candidate proportion and a contamination level.  Each test compares the
empirical mass below a data-independent threshold against a level computed
from the binomial CDF; monotonizing the tests over the proportion makes the
accepted set an interval, and discretizing over the grid {0, 1/m, ..., 1}
plus two closed-form boundary cells makes the endpoints computable exactly.
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
    SmallnessConditionWarning,
    ceil_int,
    floor_int,
)
from .dist import SampleSet, dkw_halfwidth

# (1 - 1/(6e)), the shrink factor of the separation in the boundary cells.
BOUNDARY_SHRINK = 1.0 - 1.0 / (6.0 * math.e)


class TestQuantities(NamedTuple):
    """Threshold t, separation r, and level tau for one (p, eps) test."""

    t: float
    r: float
    tau: float


@dataclass(frozen=True)
class RobustCIConfig:
    """Problem configuration: m trials per draw, level alpha, contamination
    cap eps_max, sample size n."""

    m: int
    alpha: float
    eps_max: float
    n: int
    warn_threshold: float = 0.1

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0.0 <= self.eps_max <= 1.0:
            raise ValueError(f"eps_max must be in [0, 1], got {self.eps_max}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")


def log_inv_a(eps: float, n: int, alpha: float) -> float:
    """log(1/A) for A = eps + sqrt(log(24/alpha)/(2n)), floored at 0.

    A >= 1 can only happen far outside the smallness regime; the floor keeps
    downstream square roots defined (and the resulting tests never reject).
    """
    a = eps + math.sqrt(math.log(24.0 / alpha) / (2.0 * n))
    if a >= 1.0:
        return 0.0
    return -math.log(a)


def _check_p_eps(p: float, eps: float, cfg: RobustCIConfig):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if not 0.0 <= eps <= max(cfg.eps_max, 0.0):
        raise ValueError(f"eps must be in [0, eps_max], got {eps}")


def upper_quantities(p: float, eps: float, cfg: RobustCIConfig) -> TestQuantities:
    """(t, r, tau) for the test against larger alternatives."""
    _check_p_eps(p, eps, cfg)
    m = cfg.m
    if m * p <= m - 1 + INTEGER_SNAP_TOL:
        l1a = log_inv_a(eps, cfg.n, cfg.alpha)
        x = p * (1.0 - p)
        dev = min(x / 2.0, 0.125 * math.sqrt(x * l1a / m))
        t = p - dev
        if p == 0.0:
            r = 1.0 / (2.0 * m)
        elif dev > 0.0:
            r = x / (4.0 * m * dev)
        else:
            r = math.inf
        tau = 1.1 * _binom_cdf_clipped(m, p + r, m * t)
        return TestQuantities(t, r, tau)
    t = 1.0 - 1.0 / m
    r = BOUNDARY_SHRINK * (1.0 - p)
    tau = 0.5 * (1.0 - p ** m) - 3.0 * math.log(24.0 / cfg.alpha) / cfg.n
    return TestQuantities(t, r, tau)


def lower_quantities(p: float, eps: float, cfg: RobustCIConfig) -> TestQuantities:
    """(t, r, tau) for the test against smaller alternatives (the exact
    mirror of the upper quantities at 1 - p)."""
    up = upper_quantities(1.0 - p, eps, cfg)
    return TestQuantities(1.0 - up.t, up.r, up.tau)


def _binom_cdf_clipped(m: int, param: float, thr: float) -> float:
    """Binomial CDF at a real threshold, with the success probability
    clipped into [0, 1] (it can stray outside it when the smallness
    condition fails; clipping errs on the conservative side)."""
    k = floor_int(thr)
    if k < 0:
        return 0.0
    if k >= m:
        return 1.0
    param = min(max(param, 0.0), 1.0)
    return float(stats.binom.cdf(k, m, param))


def rbar_closed_form(p: float, eps: float, cfg: RobustCIConfig) -> float:
    """Closed form of the upper separation on [0, 1 - 1/m]:
    max(1/(2m), 2 sqrt(p(1-p) / (m log(1/A))))."""
    _check_p_eps(p, eps, cfg)
    m = cfg.m
    if m * p > m - 1 + INTEGER_SNAP_TOL:
        raise ValueError(f"closed form only valid on [0, 1-1/m], got p={p}")
    l1a = log_inv_a(eps, cfg.n, cfg.alpha)
    x = p * (1.0 - p)
    if x == 0.0:
        return 1.0 / (2.0 * m)
    if l1a == 0.0:
        return math.inf
    return max(1.0 / (2.0 * m), 2.0 * math.sqrt(x / (m * l1a)))


def phi_plus(s: SampleSet, q: float, eps: float, cfg: RobustCIConfig) -> int:
    """1 iff the empirical mass at or below m*t(q, eps) falls below tau."""
    tq = upper_quantities(q, eps, cfg)
    return int(s.frac_le(cfg.m * tq.t) < tq.tau)


def phi_minus(s: SampleSet, q: float, eps: float, cfg: RobustCIConfig) -> int:
    """1 iff the empirical mass at or above m*t(q, eps) falls below tau."""
    tq = lower_quantities(q, eps, cfg)
    return int(s.frac_ge(cfg.m * tq.t) < tq.tau)


def psi_hat_plus(s: SampleSet, p: float, eps: float, cfg: RobustCIConfig) -> int:
    """Monotonized, grid-discretized variant of phi_plus (nonincreasing in p)."""
    m = cfg.m
    mp = m * p
    if mp <= m - 1 + INTEGER_SNAP_TOL:
        jmax = min(ceil_int(mp), m - 1)
        return min(phi_plus(s, j / m, eps, cfg) for j in range(jmax + 1))
    grid_min = min(phi_plus(s, j / m, eps, cfg) for j in range(m))
    return min(phi_plus(s, p, eps, cfg), grid_min)


def psi_hat_minus(s: SampleSet, p: float, eps: float, cfg: RobustCIConfig) -> int:
    """Monotonized, grid-discretized variant of phi_minus (nondecreasing in p)."""
    m = cfg.m
    mp = m * p
    if mp >= 1 - INTEGER_SNAP_TOL:
        jmin = max(floor_int(mp), 1)
        return min(phi_minus(s, j / m, eps, cfg) for j in range(jmin, m + 1))
    grid_min = min(phi_minus(s, j / m, eps, cfg) for j in range(1, m + 1))
    return min(phi_minus(s, p, eps, cfg), grid_min)


def epsilon_grid(cfg: RobustCIConfig) -> np.ndarray:
    """Geometric contamination grid {2^k log(24/a)/n} capped by eps_max."""
    if cfg.eps_max <= 0.0:
        raise ValueError(f"eps_max must be > 0, got {cfg.eps_max}")
    base = math.log(24.0 / cfg.alpha) / cfg.n
    values = [cfg.eps_max]
    if cfg.n * cfg.eps_max >= math.log(24.0 / cfg.alpha):
        kmax = math.floor(math.log2(cfg.n * cfg.eps_max / math.log(24.0 / cfg.alpha)))
        values.extend(v for k in range(kmax + 1) if (v := base * 2 ** k) <= cfg.eps_max)
    return np.unique(values)


def boundary_left(s: SampleSet, cfg: RobustCIConfig) -> float:
    """Closed-form left endpoint for the cell (1 - 1/m, 1]."""
    inner = min(2.0 * s.frac_le(cfg.m - 1) + 6.0 * math.log(24.0 / cfg.alpha) / cfg.n, 1.0)
    return max((1.0 - inner) ** (1.0 / cfg.m), 1.0 - 1.0 / cfg.m)


def boundary_right(s: SampleSet, cfg: RobustCIConfig) -> float:
    """Closed-form right endpoint for the cell [0, 1/m)."""
    inner = min(2.0 * s.frac_ge(1) + 6.0 * math.log(24.0 / cfg.alpha) / cfg.n, 1.0)
    return min(1.0 - (1.0 - inner) ** (1.0 / cfg.m), 1.0 / cfg.m)


def rate_ell(p: float, eps: float, cfg: RobustCIConfig) -> float:
    """Reference length curve; the 1/sqrt(log(1/eps)) term is 0 at eps = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must be in [0, 1], got {eps}")
    m, n = cfg.m, cfg.n
    inv_log_n = 1.0 / math.sqrt(math.log(n)) if n > 1 else math.inf
    if eps == 0.0:
        inv_log_e = 0.0
    elif eps >= 1.0:
        inv_log_e = math.inf
    else:
        inv_log_e = 1.0 / math.sqrt(math.log(1.0 / eps))
    root = math.sqrt(p * (1.0 - p) / m)
    first = root * (inv_log_n + inv_log_e) + 1.0 / m if root > 0.0 else 1.0 / m
    return min(first, p, 1.0 - p) + (1.0 / m) * (1.0 / n + eps)


class BinomialTestTables:
    """Data-independent test thresholds and levels on the proportion grid,
    precomputed so that many samples can be processed cheaply."""

    def __init__(self, cfg: RobustCIConfig):
        self.cfg = cfg
        m, n, alpha = cfg.m, cfg.n, cfg.alpha
        if cfg.eps_max > 0.0:
            self.eps = epsilon_grid(cfg)
        else:
            self.eps = np.array([0.0])
        n_eps = self.eps.size

        l1a = np.array([log_inv_a(e, n, alpha) for e in self.eps])
        p = np.arange(m + 1) / m
        x = p * (1.0 - p)
        with np.errstate(divide="ignore", invalid="ignore"):
            dev = np.minimum(x[:, None] / 2.0,
                             0.125 * np.sqrt(np.outer(x, l1a) / m))
            rbar = x[:, None] / (4.0 * m * dev)
        rbar[0, :] = 1.0 / (2.0 * m)
        rbar[np.isnan(rbar)] = math.inf
        tbar = p[:, None] - dev

        kcut = np.floor(m * tbar + INTEGER_SNAP_TOL).astype(np.int64)
        param = np.clip(p[:, None] + rbar, 0.0, 1.0)
        tau = 1.1 * stats.binom.cdf(kcut, m, param)
        # Row m lies in the boundary cell (1 - 1/m, 1]: threshold m - 1 and
        # a level that does not involve the binomial CDF.
        kcut[m, :] = m - 1
        tau[m, :] = 0.5 * (1.0 - 1.0) - 3.0 * math.log(24.0 / alpha) / n

        # phi+ at grid index j: reject iff frac{X <= up_cut[j]} < up_tau[j].
        self.up_cut = kcut
        self.up_tau = tau
        # phi- at grid index j mirrors the upper test at index m - j:
        # reject iff frac{X >= lo_cut[j]} < lo_tau[j].
        self.lo_cut = m - kcut[::-1, :]
        self.lo_tau = tau[::-1, :]

    def endpoints(self, s: SampleSet) -> tuple[float, float]:
        """Left and right endpoints of the accepted set for one sample."""
        cfg = self.cfg
        m, n = cfg.m, s.n
        xs = s.sorted_values

        frac_le = np.searchsorted(xs, self.up_cut, side="right") / n
        accept_up = frac_le >= self.up_tau
        # any accepted grid point at or below index j, per eps
        acc_below = np.logical_or.accumulate(accept_up[: m], axis=0)
        k_idx = np.minimum(np.arange(m) + 1, m - 1)
        cond_left = acc_below[k_idx, :].all(axis=1)

        if cond_left.any():
            p_left = int(np.argmax(cond_left)) / m
        else:
            p_left = boundary_left(s, cfg)

        frac_ge = (n - np.searchsorted(xs, self.lo_cut, side="left")) / n
        accept_lo = frac_ge >= self.lo_tau
        acc_above = np.logical_or.accumulate(accept_lo[m: 0: -1], axis=0)[::-1]
        k_idx = np.maximum(np.arange(1, m + 1) - 1, 1)
        cond_right = acc_above[k_idx - 1, :].all(axis=1)

        if cond_right.any():
            p_right = (1 + int(np.where(cond_right)[0][-1])) / m
        else:
            p_right = boundary_right(s, cfg)

        return p_left, p_right


class RobustBinomialCI:
    """Reusable interval constructor; precomputes the test tables once."""

    def __init__(self, cfg: RobustCIConfig):
        check = math.log(2.0 / cfg.alpha) / cfg.n + cfg.eps_max
        if check > cfg.warn_threshold:
            warnings.warn(
                SmallnessConditionWarning(
                    f"log(2/alpha)/n + eps_max = {check:.4g} exceeds "
                    f"{cfg.warn_threshold}; coverage theory assumes it small",
                    check, cfg.warn_threshold),
                stacklevel=2)
        self.cfg = cfg
        self.tables = BinomialTestTables(cfg)

    def interval(self, s: SampleSet) -> ConfidenceInterval:
        if s.n != self.cfg.n:
            raise ValueError(f"sample has n={s.n}, config says n={self.cfg.n}")
        left, right = self.tables.endpoints(s)
        return ConfidenceInterval(left, right, self.cfg.alpha, "binom-robust")


def robust_ci(s: SampleSet, cfg: RobustCIConfig) -> ConfidenceInterval:
    """Adaptive robust confidence interval for the binomial proportion.

    Returns an interval with lower > upper (the empty sentinel) when every
    candidate proportion is rejected.
    """
    return RobustBinomialCI(cfg).interval(s)
