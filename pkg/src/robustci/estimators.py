"""Robust point estimators and the simpler confidence intervals.

The adaptive estimator picks between two boundary estimators (driven by the
frequencies of the extreme values 0 and m) and a minimum-Kolmogorov-distance
fit for the middle of the parameter range.  The interval helpers invert
error bounds of the form |p_hat - q| <= a sqrt(q(1-q)) + b by solving the
two boundary quadratics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .common import ConfidenceInterval
from .dist import SampleSet

GOLDEN_TOL = 1e-9
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class EstimatorConfig:
    """m trials per draw plus the frozen constants of the procedures."""

    m: int
    alpha: float = 0.05
    # exp(-1.5 c_sel) must stay above plausible contamination levels, or
    # mass planted at 0/m can hijack the boundary branches.
    c_sel: float = 1.5
    c_ci: float = 5.0
    grid_resolution: float = 1e-3

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.c_sel <= 0 or self.c_ci <= 0:
            raise ValueError("selection and interval constants must be > 0")
        if self.grid_resolution <= 0:
            raise ValueError("grid_resolution must be > 0")


def trimmed_mean(s: SampleSet, m: int) -> float:
    """(1/(mn)) sum X_i 1{0 <= X_i <= m}; values above m are dropped."""
    vals = s.values
    return float(vals[vals <= m].sum()) / (m * s.n)


def p_hat_s(s: SampleSet, m: int) -> float:
    """1 - (zero frequency)^(1/m); targets small p."""
    f0 = np.count_nonzero(s.values == 0) / s.n
    return 1.0 - f0 ** (1.0 / m)


def p_hat_l(s: SampleSet, m: int) -> float:
    """(frequency of the value m)^(1/m); targets large p."""
    fm = np.count_nonzero(s.values == m) / s.n
    return fm ** (1.0 / m)


def kolmogorov_objective(s: SampleSet, m: int, p: np.ndarray | float) -> np.ndarray | float:
    """sup_t |F_n(t) - P(Binomial(m, p) <= t)|.

    Both CDFs are step functions on the integers, so the sup is attained on
    t in {0, ..., m - 1}.
    """
    t = np.arange(m)
    emp = np.searchsorted(s.sorted_values, t, side="right") / s.n
    p_arr = np.atleast_1d(np.asarray(p, dtype=float))
    model = stats.binom.cdf(t[None, :], m, p_arr[:, None])
    out = np.abs(emp[None, :] - model).max(axis=1)
    return out if np.ndim(p) else float(out[0])


def p_hat_g(s: SampleSet, m: int, cfg: EstimatorConfig | None = None) -> float:
    """Minimizer of the Kolmogorov distance to the binomial family.

    Coarse grid search followed by golden-section refinement on the best
    bracket; ties break toward smaller p.
    """
    if cfg is None:
        cfg = EstimatorConfig(m)
    steps = max(int(round(1.0 / cfg.grid_resolution)), 1)
    grid = np.linspace(0.0, 1.0, steps + 1)
    obj = kolmogorov_objective(s, m, grid)
    i = int(np.argmin(obj))
    best_p, best_val = float(grid[i]), float(obj[i])

    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, steps)])
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc = float(kolmogorov_objective(s, m, c))
    fd = float(kolmogorov_objective(s, m, d))
    while b - a > GOLDEN_TOL:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = float(kolmogorov_objective(s, m, c))
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = float(kolmogorov_objective(s, m, d))
    refined_p = a
    refined_val = float(kolmogorov_objective(s, m, refined_p))

    if refined_val < best_val or (refined_val == best_val and refined_p < best_p):
        return refined_p
    return best_p


def adaptive_estimator(s: SampleSet, cfg: EstimatorConfig) -> float:
    """Select among the boundary estimators and the minimum-distance fit by
    comparing the extreme-value frequencies against exp(-1.5 c_sel)."""
    m = cfg.m
    thr = math.exp(-1.5 * cfg.c_sel)
    f0 = np.count_nonzero(s.values == 0) / s.n
    fm = np.count_nonzero(s.values == m) / s.n
    if f0 >= thr and fm < thr:
        return p_hat_s(s, m)
    if f0 < thr and fm >= thr:
        return p_hat_l(s, m)
    return p_hat_g(s, m, cfg)


def bernoulli_ci(s: SampleSet, alpha: float, c: float = 4.0) -> ConfidenceInterval:
    """One-sided-bounds interval for Bernoulli data, valid for any
    contamination below 1/2: [1 - C(freq0 + 1/n), C(freq1 + 1/n)]."""
    if np.any(s.values > 1):
        raise ValueError("bernoulli_ci expects 0/1 observations")
    n = s.n
    f1 = np.count_nonzero(s.values == 1) / n
    f0 = 1.0 - f1
    lower = max(1.0 - c * (f0 + 1.0 / n), 0.0)
    upper = min(c * (f1 + 1.0 / n), 1.0)
    return ConfidenceInterval(lower, upper, alpha, "bernoulli")


def _upper_crossing(center: float, a: float, b: float) -> float:
    """Largest q in [0, 1] with q - center <= a sqrt(q(1-q)) + b."""
    if center + b >= 1.0:
        return 1.0
    qa = 1.0 + a * a
    qb = 2.0 * (center + b) + a * a
    qc = (center + b) ** 2
    disc = max(qb * qb - 4.0 * qa * qc, 0.0)
    return min((qb + math.sqrt(disc)) / (2.0 * qa), 1.0)


def solve_absdev_interval(center: float, a: float, b: float) -> tuple[float, float]:
    """The set {q in [0,1]: |center - q| <= a sqrt(q(1-q)) + b} as a closed
    interval (it always contains center, so it is nonempty)."""
    if not 0.0 <= center <= 1.0:
        raise ValueError(f"center must be in [0, 1], got {center}")
    if a < 0.0 or b < 0.0:
        raise ValueError("coefficients must be nonnegative")
    upper = _upper_crossing(center, a, b)
    lower = 1.0 - _upper_crossing(1.0 - center, a, b)
    return lower, upper


def known_eps_ci(p_hat: float, m: int, n: int, eps: float, alpha: float,
                 c: float = 5.0) -> ConfidenceInterval:
    """Wilson-type interval from the estimation error bound at a known
    contamination level."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must be in [0, 1], got {eps}")
    a = (1.0 / math.sqrt(m)) * (1.0 / math.sqrt(n) + eps)
    b = (1.0 / m) * (1.0 / n + eps)
    lower, upper = solve_absdev_interval(p_hat, c * a, c * b)
    return ConfidenceInterval(lower, upper, alpha, "binom-known-eps")
