"""Least-favorable contamination constructions.

Each construction solves a mixture identity of the form
(1 - eps) * clean + eps * q = target for the contamination pmf q; it is
feasible exactly when the resulting entries are nonnegative.  Feasible
constructions make two different parameter values produce identical (or
nearly identical) data distributions, which is what caps how short any
valid confidence interval can be.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .common import ceil_int
from .dist import (
    FinitePmf,
    align_pmfs,
    binom_pmf_array,
    binom_sf,
    poisson_support_cut,
)

# Entries may dip this far below zero before a construction is infeasible.
FEASIBILITY_TOL = 1e-12
# Clamping tiny negative entries must not move the total mass more than this.
RENORM_DRIFT_TOL = 1e-10


@dataclass(frozen=True)
class ContaminatedMixture:
    """(1 - eps) * clean + eps * q on the aligned support."""

    clean: FinitePmf
    eps: float
    q: FinitePmf

    def __post_init__(self):
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError(f"eps must be in [0, 1], got {self.eps}")

    def mixture_pmf(self) -> FinitePmf:
        pc, pq = align_pmfs(self.clean, self.q)
        lo = min(self.clean.support_min, self.q.support_min)
        return FinitePmf(lo, (1.0 - self.eps) * pc + self.eps * pq)


@dataclass(frozen=True)
class ConstructionResult:
    """Outcome of an adversarial pmf construction.

    ``pmf`` is None when infeasible; ``min_entry``/``min_index`` identify
    the most negative raw entry (the infeasibility witness).
    """

    feasible: bool
    pmf: FinitePmf | None
    min_entry: float
    min_index: int
    reason: str = ""
    t_n: float | None = None


def _finalize(raw: np.ndarray, support_min: int = 0,
              t_n: float | None = None) -> ConstructionResult:
    idx = int(np.argmin(raw))
    worst = float(raw[idx])
    if worst < -FEASIBILITY_TOL:
        return ConstructionResult(False, None, worst, support_min + idx,
                                  reason="negative pmf entry", t_n=t_n)
    clipped = np.clip(raw, 0.0, None)
    total = clipped.sum()
    if abs(total - 1.0) > RENORM_DRIFT_TOL:
        raise ValueError(
            f"construction mass {total!r} drifts from 1 beyond "
            f"{RENORM_DRIFT_TOL}; support truncation too aggressive")
    return ConstructionResult(True, FinitePmf(support_min, clipped / total),
                              worst, support_min + idx, t_n=t_n)


def q1_exact_match(p: float, r: float, eps: float, m: int) -> ConstructionResult:
    """Contamination q1 with (1-eps) Binomial(m,p) + eps q1 = Binomial(m,p+r)."""
    if eps <= 0.0 or eps > 1.0:
        raise ValueError(f"eps must be in (0, 1], got {eps}")
    if r < 0.0 or p < 0.0 or p + r > 1.0:
        raise ValueError(f"need 0 <= p <= p + r <= 1, got p={p}, r={r}")
    raw = (binom_pmf_array(m, p + r) - (1.0 - eps) * binom_pmf_array(m, p)) / eps
    return _finalize(raw)


def q0_exact_match(p: float, r: float, eps_max: float, m: int) -> ConstructionResult:
    """Contamination q0 with (1-e) Binomial(m,p-r) + e q0 = Binomial(m,p),
    e = eps_max."""
    if eps_max <= 0.0 or eps_max > 1.0:
        raise ValueError(f"eps_max must be in (0, 1], got {eps_max}")
    if r < 0.0 or p - r < 0.0 or p > 1.0:
        raise ValueError(f"need 0 <= p - r <= p <= 1, got p={p}, r={r}")
    raw = (binom_pmf_array(m, p) - (1.0 - eps_max) * binom_pmf_array(m, p - r)) / eps_max
    return _finalize(raw)


def q0_truncated(p: float, r: float, eps_max: float, m: int, n: int,
                 alpha: float) -> ConstructionResult:
    """Tail-restricted q0 making the mixture at p - r nearly match
    Binomial(m, p): the per-sample TV distance is
    (1 - eps_max) P(Binomial(m, p-r) < m t_n) <= alpha/n when the
    construction's preconditions hold."""
    if eps_max <= 0.0 or eps_max > 1.0:
        raise ValueError(f"eps_max must be in (0, 1], got {eps_max}")
    if r < 0.0 or p - r < 0.0 or p > 1.0:
        raise ValueError(f"need 0 <= p - r <= p <= 1, got p={p}, r={r}")
    t_n = p - 8.0 * math.sqrt(p * (1.0 - p) * math.log(n / alpha) / m)
    if t_n < 0.0:
        return ConstructionResult(False, None, t_n, 0,
                                  reason=f"t_n = {t_n:.4g} < 0", t_n=t_n)
    denom = binom_sf(m, p - r, m * t_n)
    if denom <= 0.0:
        return ConstructionResult(False, None, -math.inf, 0,
                                  reason="zero mass above m t_n", t_n=t_n)
    k = np.arange(m + 1)
    tail = (k >= ceil_int(m * t_n)).astype(float)
    raw = (binom_pmf_array(m, p)
           - (1.0 - eps_max) * tail / denom * binom_pmf_array(m, p - r)) / eps_max
    return _finalize(raw, t_n=t_n)


def _pois_array(lam: float, support_max: int) -> np.ndarray:
    k = np.arange(support_max + 1)
    if lam == 0.0:
        out = np.zeros(support_max + 1)
        out[0] = 1.0
        return out
    return np.exp(-lam + k * np.log(lam) - gammaln(k + 1))


def pois_q1_exact(lam: float, r: float, eps: float) -> ConstructionResult:
    """Poisson analogue of q1: mixture at lam matches Poisson(lam + r).

    Feasible iff exp(-r) >= 1 - eps.  Supports are truncated per the
    package-wide Poisson tail policy and the result renormalized.
    """
    if eps <= 0.0 or eps > 1.0:
        raise ValueError(f"eps must be in (0, 1], got {eps}")
    if r < 0.0 or lam < 0.0:
        raise ValueError(f"need lam >= 0 and r >= 0, got lam={lam}, r={r}")
    cut = poisson_support_cut(lam + r)
    raw = (_pois_array(lam + r, cut) - (1.0 - eps) * _pois_array(lam, cut)) / eps
    return _finalize(raw)


def pois_q0_exact(lam: float, r: float, eps_max: float) -> ConstructionResult:
    """Poisson analogue of q0: mixture at lam - r matches Poisson(lam).

    Feasible iff r <= log(1 / (1 - eps_max)).
    """
    if eps_max <= 0.0 or eps_max > 1.0:
        raise ValueError(f"eps_max must be in (0, 1], got {eps_max}")
    if r < 0.0 or lam - r < 0.0:
        raise ValueError(f"need 0 <= lam - r, got lam={lam}, r={r}")
    cut = poisson_support_cut(lam)
    raw = (_pois_array(lam, cut) - (1.0 - eps_max) * _pois_array(lam - r, cut)) / eps_max
    return _finalize(raw)


def tv_product_bound(tv_single: float, n: int) -> float:
    """min(n * tv, 1): TV between n-fold products from one-sample TV."""
    if tv_single < 0.0:
        raise ValueError(f"tv must be >= 0, got {tv_single}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return min(n * tv_single, 1.0)
