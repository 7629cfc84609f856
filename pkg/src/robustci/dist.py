"""Distribution kernels: binomial and Poisson pmf/cdf, empirical CDF,
concentration-bound evaluators, and total variation on finite supports.

All probability mass functions are evaluated in log space (log-gamma
accumulation) with exact branches at the degenerate parameter values, so
tails stay accurate for small p and large m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.special import gammaln

from .common import ceil_int, floor_int

# Tolerance for a FinitePmf to be considered normalized.
NORMALIZATION_TOL = 1e-12
# Poisson supports are truncated at the smallest K with tail mass below this.
POISSON_TAIL_TOL = 1e-14
# Two pmfs within this of each other pointwise are treated as equal by TV.
POINTWISE_EQ_TOL = 1e-12


@dataclass(frozen=True)
class FinitePmf:
    """A probability mass function on consecutive integers.

    ``probs[k]`` is the mass at ``support_min + k``.
    """

    support_min: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probs must be a nonempty 1-d array")
        if np.any(probs < 0):
            raise ValueError(f"negative pmf entry: min={probs.min():.3e}")
        total = probs.sum()
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"pmf sums to {total!r}, not 1")

    @property
    def support_max(self) -> int:
        return self.support_min + self.probs.size - 1

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.support_min, self.support_max + 1)

    def mass_at(self, k: int) -> float:
        if self.support_min <= k <= self.support_max:
            return float(self.probs[k - self.support_min])
        return 0.0


@dataclass(frozen=True)
class SampleSet:
    """Immutable vector of nonnegative integer observations."""

    values: np.ndarray
    sorted_values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("need at least one observation")
        if not np.issubdtype(values.dtype, np.integer):
            as_int = values.astype(np.int64)
            if np.any(as_int != values):
                raise ValueError("observations must be integers")
            values = as_int
        if np.any(values < 0):
            raise ValueError("observations must be nonnegative")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        srt = np.sort(values)
        srt.setflags(write=False)
        object.__setattr__(self, "sorted_values", srt)

    @property
    def n(self) -> int:
        return self.values.size

    def count_le(self, t: float) -> int:
        """#{X_i <= t} for a real threshold (integer-snapped)."""
        return int(np.searchsorted(self.sorted_values, floor_int(t), side="right"))

    def count_ge(self, t: float) -> int:
        """#{X_i >= t} for a real threshold (integer-snapped)."""
        return self.n - int(np.searchsorted(self.sorted_values, ceil_int(t), side="left"))

    def frac_le(self, t: float) -> float:
        return self.count_le(t) / self.n

    def frac_ge(self, t: float) -> float:
        return self.count_ge(t) / self.n


def empirical_cdf(s: SampleSet, t: float) -> float:
    """F_n(t) = (1/n) #{X_i <= t}."""
    return s.frac_le(t)


def _check_p(p: float):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")


def binom_pmf(m: int, p: float, k: int) -> float:
    """P(Binomial(m, p) = k), computed via log-gamma accumulation."""
    _check_p(p)
    if not 0 <= k <= m:
        raise ValueError(f"k must be in [0, {m}], got {k}")
    if p == 0.0:
        return 1.0 if k == 0 else 0.0
    if p == 1.0:
        return 1.0 if k == m else 0.0
    log_coef = gammaln(m + 1) - gammaln(k + 1) - gammaln(m - k + 1)
    return float(math.exp(log_coef + k * math.log(p) + (m - k) * math.log1p(-p)))


def binom_pmf_array(m: int, p: float) -> np.ndarray:
    """The full Binomial(m, p) pmf on {0, ..., m}."""
    _check_p(p)
    k = np.arange(m + 1)
    if p == 0.0 or p == 1.0:
        out = np.zeros(m + 1)
        out[0 if p == 0.0 else m] = 1.0
        return out
    log_coef = gammaln(m + 1) - gammaln(k + 1) - gammaln(m - k + 1)
    return np.exp(log_coef + k * np.log(p) + (m - k) * np.log1p(-p))


def binomial_finite_pmf(m: int, p: float) -> FinitePmf:
    return FinitePmf(0, binom_pmf_array(m, p))


def binom_cdf(m: int, p: float, t: float) -> float:
    """P(Binomial(m, p) <= t) with floor semantics for real t."""
    _check_p(p)
    k = floor_int(t)
    if k < 0:
        return 0.0
    if k >= m:
        return 1.0
    return float(stats.binom.cdf(k, m, p))


def binom_sf(m: int, p: float, t: float) -> float:
    """P(Binomial(m, p) >= t) with ceiling semantics for real t."""
    _check_p(p)
    k = ceil_int(t)
    if k <= 0:
        return 1.0
    if k > m:
        return 0.0
    return float(stats.binom.sf(k - 1, m, p))


def _check_lam(lam: float):
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")


def pois_pmf(lam: float, k: int) -> float:
    """P(Poisson(lam) = k)."""
    _check_lam(lam)
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if lam == 0.0:
        return 1.0 if k == 0 else 0.0
    return float(math.exp(-lam + k * math.log(lam) - gammaln(k + 1)))


def pois_cdf(lam: float, t: float) -> float:
    """P(Poisson(lam) <= t) with floor semantics."""
    _check_lam(lam)
    k = floor_int(t)
    if k < 0:
        return 0.0
    return float(stats.poisson.cdf(k, lam))


def pois_sf(lam: float, t: float) -> float:
    """P(Poisson(lam) >= t) with ceiling semantics."""
    _check_lam(lam)
    k = ceil_int(t)
    if k <= 0:
        return 1.0
    return float(stats.poisson.sf(k - 1, lam))


def poisson_support_cut(lam: float, tail_tol: float = POISSON_TAIL_TOL) -> int:
    """Smallest K with P(Poisson(lam) > K) < tail_tol."""
    _check_lam(lam)
    if lam == 0.0:
        return 0
    k = int(lam + 10.0 * math.sqrt(lam) + 20.0)
    while stats.poisson.sf(k, lam) >= tail_tol:
        k = 2 * k + 10
    return k


def poisson_finite_pmf(lam: float, support_max: int | None = None,
                       tail_tol: float = POISSON_TAIL_TOL) -> FinitePmf:
    """Poisson(lam) truncated to {0, ..., K} and renormalized.

    K defaults to the smallest cut with tail mass below ``tail_tol``.
    """
    _check_lam(lam)
    if support_max is None:
        support_max = poisson_support_cut(lam, tail_tol)
    k = np.arange(support_max + 1)
    if lam == 0.0:
        probs = np.zeros(support_max + 1)
        probs[0] = 1.0
    else:
        probs = np.exp(-lam + k * np.log(lam) - gammaln(k + 1))
        probs = probs / probs.sum()
    return FinitePmf(0, probs)


def dkw_halfwidth(n: int, alpha: float) -> float:
    """DKW band half-width sqrt(log(2/alpha) / (2n))."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


def bernstein_dev(n: int, p: float, alpha: float, c: float) -> float:
    """Bernstein deviation threshold n*p*(1-p)/C + C*log(2/alpha), C >= 4/3."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_p(p)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if c < 4.0 / 3.0:
        raise ValueError(f"slack constant must be >= 4/3, got {c}")
    return n * p * (1.0 - p) / c + c * math.log(2.0 / alpha)


def align_pmfs(a: FinitePmf, b: FinitePmf) -> tuple[np.ndarray, np.ndarray]:
    """Pad two pmfs onto a common integer support."""
    lo = min(a.support_min, b.support_min)
    hi = max(a.support_max, b.support_max)
    size = hi - lo + 1
    pa = np.zeros(size)
    pb = np.zeros(size)
    pa[a.support_min - lo: a.support_min - lo + a.probs.size] = a.probs
    pb[b.support_min - lo: b.support_min - lo + b.probs.size] = b.probs
    return pa, pb


def tv_distance(a: FinitePmf, b: FinitePmf) -> float:
    """Total variation distance (1/2) sum_k |a_k - b_k|."""
    pa, pb = align_pmfs(a, b)
    diff = np.abs(pa - pb)
    if diff.max(initial=0.0) <= POINTWISE_EQ_TOL:
        return 0.0
    return float(0.5 * diff.sum())
