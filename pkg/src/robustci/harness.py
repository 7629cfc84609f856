"""Monte Carlo experiment runner: contaminated data generation, coverage
and length estimation for every interval method, CSV output.

Randomness uses the Philox counter-based generator addressed by
(seed, replication_index), so every replication has its own stream and a
rerun with the same configuration is reproducible draw for draw.
"""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .common import ConfidenceInterval
from .binomial import RobustBinomialCI, RobustCIConfig
from .dist import FinitePmf, SampleSet
from .ergraph import SubsetSearchConfig, er_conservative_ci, sample_node_contaminated
from .estimators import EstimatorConfig, adaptive_estimator, bernoulli_ci, known_eps_ci
from .poisson import RobustPoissonCI

METHODS = ("binom-robust", "binom-known-eps", "bernoulli", "poisson-robust",
           "er-conservative")

CSV_HEADER = ("method,m,n,p,eps,eps_max,alpha,q_strategy,reps,seed,coverage,"
              "mean_length,median_length,mc_stderr,empty_count,wallclock_s")


@dataclass
class ExperimentConfig:
    method: str
    n: int
    eps: float
    eps_max: float
    replications: int
    seed: int
    alpha: float = 0.05
    m: int | None = None
    lam: float | None = None
    n_nodes: int | None = None
    p: float | None = None
    q_strategy: str = ""
    exact_limit: int = 14
    warn_threshold: float = 0.1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError(f"eps must be in [0, 1], got {self.eps}")
        if not 0.0 <= self.eps_max <= 1.0:
            raise ValueError(f"eps_max must be in [0, 1], got {self.eps_max}")
        if self.method in ("binom-robust", "binom-known-eps", "bernoulli"):
            if self.m is None or self.m < 1:
                raise ValueError(f"field m: need a positive trial count for {self.method}")
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError("field p: need a proportion in [0, 1]")
            if self.method == "bernoulli" and self.m != 1:
                raise ValueError("field m: bernoulli method requires m = 1")
            if not self.q_strategy:
                self.q_strategy = "point:m"
        elif self.method == "poisson-robust":
            if self.lam is None or self.lam < 0:
                raise ValueError("field lam: need a nonnegative rate")
            if not self.q_strategy:
                self.q_strategy = "point:50"
        else:
            if self.n_nodes is None or self.n_nodes < 4:
                raise ValueError("field n_nodes: need at least 4 nodes")
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError("field p: need an edge probability in [0, 1]")
            if not self.q_strategy:
                self.q_strategy = "all-ones"
        if self.n < 1 and self.method != "er-conservative":
            raise ValueError(f"field n: need a positive sample size, got {self.n}")


@dataclass
class ExperimentRecord:
    config: ExperimentConfig
    coverage: float
    mean_length: float
    median_length: float
    mc_stderr: float
    empty_count: int
    wallclock_s: float


def stream_rng(seed: int, replication: int) -> np.random.Generator:
    """Philox stream keyed by (seed, replication)."""
    key = np.array([seed, replication], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _parse_point(spec: str, default: int) -> int:
    _, _, arg = spec.partition(":")
    if arg in ("", "m"):
        return default
    return int(arg)


def sample_contaminated(kind: str, param, m: int | None, eps: float,
                        q_strategy, rng: np.random.Generator,
                        n: int) -> SampleSet:
    """n i.i.d. draws from (1 - eps) * clean + eps * Q.

    kind is "binomial" (param = p, needs m) or "poisson" (param = lam).
    Q strategies: "point:<k>" (":m" for the value m), "binom:<q>", or a
    FinitePmf instance.
    """
    if kind == "binomial":
        values = rng.binomial(m, param, size=n)
    elif kind == "poisson":
        values = rng.poisson(param, size=n)
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    if eps > 0.0:
        bad = rng.random(n) < eps
        count = int(bad.sum())
        if count:
            values = values.copy()
            if isinstance(q_strategy, FinitePmf):
                draws = rng.choice(q_strategy.support, size=count,
                                   p=q_strategy.probs)
            elif q_strategy.startswith("point"):
                default = m if m is not None else 50
                draws = np.full(count, _parse_point(q_strategy, default))
            elif q_strategy.startswith("binom"):
                _, _, arg = q_strategy.partition(":")
                draws = rng.binomial(m, float(arg), size=count)
            else:
                raise ValueError(f"unknown q_strategy {q_strategy!r}")
            values[bad] = draws
    return SampleSet(values)


def _make_engine(cfg: ExperimentConfig):
    """Returns (per-replication interval function, true parameter)."""
    if cfg.method == "binom-robust":
        ci = RobustBinomialCI(RobustCIConfig(cfg.m, cfg.alpha, cfg.eps_max,
                                             cfg.n, cfg.warn_threshold))

        def run(rng):
            s = sample_contaminated("binomial", cfg.p, cfg.m, cfg.eps,
                                    cfg.q_strategy, rng, cfg.n)
            return ci.interval(s)
        return run, cfg.p

    if cfg.method == "binom-known-eps":
        est_cfg = EstimatorConfig(cfg.m, cfg.alpha)

        def run(rng):
            s = sample_contaminated("binomial", cfg.p, cfg.m, cfg.eps,
                                    cfg.q_strategy, rng, cfg.n)
            p_hat = adaptive_estimator(s, est_cfg)
            return known_eps_ci(p_hat, cfg.m, cfg.n, cfg.eps_max, cfg.alpha,
                                est_cfg.c_ci)
        return run, cfg.p

    if cfg.method == "bernoulli":
        def run(rng):
            s = sample_contaminated("binomial", cfg.p, 1, cfg.eps,
                                    cfg.q_strategy, rng, cfg.n)
            return bernoulli_ci(s, cfg.alpha)
        return run, cfg.p

    if cfg.method == "poisson-robust":
        ci = RobustPoissonCI(cfg.n, cfg.alpha, cfg.eps_max, cfg.warn_threshold)

        def run(rng):
            s = sample_contaminated("poisson", cfg.lam, None, cfg.eps,
                                    cfg.q_strategy, rng, cfg.n)
            return ci.interval(s)
        return run, cfg.lam

    search = SubsetSearchConfig(exact_limit=cfg.exact_limit,
                                heuristic=cfg.n_nodes > cfg.exact_limit)
    strategy, _, arg = cfg.q_strategy.partition(":")
    q_edge = float(arg) if arg else None

    def run(rng):
        a = sample_node_contaminated(cfg.n_nodes, cfg.p, cfg.eps,
                                     q_strategy=strategy, q_edge=q_edge,
                                     seed=rng)
        return er_conservative_ci(a, cfg.alpha, cfg=search)
    return run, cfg.p


def run_experiment(cfg: ExperimentConfig) -> ExperimentRecord:
    """Coverage / length Monte Carlo; deterministic given cfg.seed."""
    start = time.perf_counter()
    run, truth = _make_engine(cfg)
    covered = 0
    empty = 0
    lengths = []
    for rep in range(cfg.replications):
        interval = run(stream_rng(cfg.seed, rep))
        if interval.is_empty:
            empty += 1
        elif interval.contains(truth):
            covered += 1
        lengths.append(interval.length)
    coverage = covered / cfg.replications
    mc_stderr = math.sqrt(coverage * (1.0 - coverage) / cfg.replications)
    return ExperimentRecord(
        config=cfg,
        coverage=coverage,
        mean_length=float(np.mean(lengths)),
        median_length=float(np.median(lengths)),
        mc_stderr=mc_stderr,
        empty_count=empty,
        wallclock_s=time.perf_counter() - start,
    )


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def record_row(rec: ExperimentRecord, include_wallclock: bool = False) -> str:
    cfg = rec.config
    if cfg.method == "poisson-robust":
        m, n, p = None, cfg.n, cfg.lam
    elif cfg.method == "er-conservative":
        m, n, p = None, cfg.n_nodes, cfg.p
    else:
        m, n, p = cfg.m, cfg.n, cfg.p
    cells = [cfg.method, m, n, p, cfg.eps, cfg.eps_max, cfg.alpha,
             cfg.q_strategy, cfg.replications, cfg.seed, rec.coverage,
             rec.mean_length, rec.median_length, rec.mc_stderr,
             rec.empty_count,
             rec.wallclock_s if include_wallclock else 0.0]
    return ",".join(_fmt(c) for c in cells)


def emit_csv(records, path, include_wallclock: bool = False):
    """Write records with the fixed schema; one row per record.

    wallclock_s is written as 0.0 unless ``include_wallclock`` is set, so
    that identical configurations produce byte-identical files.
    """
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for rec in records:
            fh.write(record_row(rec, include_wallclock) + "\n")
