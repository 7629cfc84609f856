"""Edge-probability inference for random graphs with node contamination.

The estimator averages edges over the best subset of at least 3n/4 nodes,
where "best" minimizes a subset seminorm of the centered adjacency matrix.
Both optimizations (outer subset choice, inner seminorm) are exact
exponential searches below a size cap, with an optional uncertified local
search above it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .common import ConfidenceInterval, SearchSizeWarning
from .estimators import solve_absdev_interval

# Objectives within this of each other count as ties (broken toward the
# lexicographically smallest subset).
TIE_TOL = 1e-12


@dataclass(frozen=True)
class SubsetSearchConfig:
    exact_limit: int = 14
    heuristic: bool = False
    restarts: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.exact_limit < 4:
            raise ValueError(f"exact_limit must be >= 4, got {self.exact_limit}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")


@dataclass(frozen=True)
class SubsetSearchResult:
    nodes: tuple[int, ...]
    objective: float
    certified: bool


def validate_adjacency(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"adjacency matrix must be square, got shape {a.shape}")
    if not np.array_equal(a, a.T):
        raise ValueError("adjacency matrix must be symmetric")
    if np.any(np.diagonal(a) != 0):
        raise ValueError("adjacency matrix must have zero diagonal")
    if not np.isin(a, (0, 1)).all():
        raise ValueError("adjacency entries must be 0 or 1")
    return a.astype(np.int8)


def offdiag_mean(a: np.ndarray, nodes) -> float:
    """Mean of the off-diagonal entries of the submatrix on ``nodes``."""
    nodes = np.asarray(sorted(nodes))
    k = nodes.size
    if k < 2:
        raise ValueError("need at least two nodes")
    sub = np.asarray(a, dtype=float)[np.ix_(nodes, nodes)]
    return float((sub.sum() - np.trace(sub)) / (k * (k - 1)))


def _pair_sums(b: np.ndarray) -> np.ndarray:
    """sum_{i != j in mask} b_ij for every bitmask over b's index range."""
    k = b.shape[0]
    rp = np.asarray(b, dtype=float) + np.asarray(b, dtype=float).T
    rp = rp.copy()
    np.fill_diagonal(rp, 0.0)
    es = np.zeros(1 << k)
    for v in range(k):
        block = 1 << v
        if v == 0:
            cross = np.zeros(1)
        else:
            bits = ((np.arange(block)[:, None] >> np.arange(v)) & 1).astype(float)
            cross = bits @ rp[:v, v]
        es[block: 2 * block] = es[:block] + cross
    return es


def _expand_submasks(mask_bits: np.ndarray) -> np.ndarray:
    """All submasks of the mask whose set bit positions are ``mask_bits``."""
    k = mask_bits.size
    m = np.arange(1 << k, dtype=np.int64)
    out = np.zeros(1 << k, dtype=np.int64)
    for i, b in enumerate(mask_bits):
        out |= ((m >> i) & 1) << int(b)
    return out


def u_norm(b: np.ndarray, restrict=None, exact_limit: int = 14,
           heuristic: bool = False, rng=None, restarts: int = 20) -> float:
    """sup over node subsets S' of |sum_{i != j in S'} b_ij|.

    Exact by subset enumeration when the restricted index set has at most
    ``exact_limit`` elements; above that, a local search lower bound is
    returned when ``heuristic`` is set, otherwise the size is an error.
    """
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError(f"matrix must be square, got shape {b.shape}")
    if restrict is None:
        restrict = range(b.shape[0])
    nodes = sorted(set(int(v) for v in restrict))
    if any(v < 0 or v >= b.shape[0] for v in nodes):
        raise ValueError("restrict contains out-of-range node indices")
    sub = b[np.ix_(nodes, nodes)]
    if len(nodes) <= exact_limit:
        return float(np.abs(_pair_sums(sub)).max())
    if not heuristic:
        raise ValueError(
            f"{len(nodes)} nodes exceed exact_limit={exact_limit}; "
            f"pass heuristic=True for an uncertified value")
    return _u_norm_local_search(sub, rng, restarts)


def _u_norm_local_search(sub: np.ndarray, rng, restarts: int) -> float:
    rng = np.random.default_rng(rng)
    k = sub.shape[0]
    rp = sub + sub.T
    np.fill_diagonal(rp, 0.0)
    best = 0.0
    for sign in (1.0, -1.0):
        w = sign * rp
        for _ in range(restarts):
            z = (rng.random(k) < 0.5).astype(float)
            c = w @ z
            val = 0.5 * float(z @ w @ z)
            while True:
                gains = (1.0 - 2.0 * z) * c
                v = int(np.argmax(gains))
                if gains[v] <= 1e-12:
                    break
                val += gains[v]
                delta = 1.0 - 2.0 * z[v]
                z[v] += delta
                c += delta * w[:, v]
            best = max(best, val)
    return best


def min_subset_size(n: int) -> int:
    """ceil(3n/4), the smallest admissible kept-subset size."""
    return (3 * n + 3) // 4


def find_s_hat(a: np.ndarray, cfg: SubsetSearchConfig | None = None) -> SubsetSearchResult:
    """Best node subset of size >= 3n/4: minimizes the subset seminorm of
    the centered adjacency matrix; ties go to the lexicographically
    smallest subset."""
    if cfg is None:
        cfg = SubsetSearchConfig()
    a = validate_adjacency(a)
    n = a.shape[0]
    kmin = min_subset_size(n)
    if kmin < 2:
        raise ValueError(f"graph too small for subset search, n={n}")
    if n > cfg.exact_limit:
        if not cfg.heuristic:
            raise ValueError(
                f"n={n} exceeds exact_limit={cfg.exact_limit}; "
                f"enable heuristic search for an uncertified result")
        return _find_s_hat_local_search(a, cfg)

    es = _pair_sums(a)
    counts = np.array([bin(mask).count("1") for mask in range(1 << n)])
    pairs = counts * (counts - 1)

    best_nodes = None
    best_obj = math.inf
    for k in range(kmin, n + 1):
        for combo in itertools.combinations(range(n), k):
            mask = 0
            for v in combo:
                mask |= 1 << v
            p_s = es[mask] / pairs[mask]
            subs = _expand_submasks(np.array(combo))
            obj = float(np.abs(es[subs] - p_s * pairs[subs]).max())
            if obj < best_obj - TIE_TOL or (
                    abs(obj - best_obj) <= TIE_TOL
                    and (best_nodes is None or combo < best_nodes)):
                best_obj = obj
                best_nodes = combo
    return SubsetSearchResult(best_nodes, best_obj, certified=True)


def _find_s_hat_local_search(a: np.ndarray, cfg: SubsetSearchConfig) -> SubsetSearchResult:
    rng = np.random.default_rng(cfg.seed)
    n = a.shape[0]
    kmin = min_subset_size(n)

    def objective(nodes: tuple[int, ...]) -> float:
        sub = (a - offdiag_mean(a, nodes)).astype(float)
        return u_norm(sub, restrict=nodes, exact_limit=0, heuristic=True,
                      rng=rng, restarts=5)

    best_nodes, best_obj = None, math.inf
    for _ in range(cfg.restarts):
        size = int(rng.integers(kmin, n + 1))
        current = tuple(sorted(rng.choice(n, size=size, replace=False)))
        cur_obj = objective(current)
        improved = True
        while improved:
            improved = False
            inside = set(current)
            moves = []
            if len(current) > kmin:
                moves.extend(tuple(sorted(inside - {u})) for u in current)
            outside = [v for v in range(n) if v not in inside]
            moves.extend(tuple(sorted(inside | {v})) for v in outside)
            moves.extend(tuple(sorted((inside - {u}) | {v}))
                         for u in current for v in outside)
            for cand in moves:
                val = objective(cand)
                if val < cur_obj - TIE_TOL:
                    current, cur_obj, improved = cand, val, True
                    break
        if cur_obj < best_obj - TIE_TOL or (
                abs(cur_obj - best_obj) <= TIE_TOL
                and (best_nodes is None or current < best_nodes)):
            best_nodes, best_obj = current, cur_obj
    return SubsetSearchResult(best_nodes, best_obj, certified=False)


def er_estimate(a: np.ndarray, cfg: SubsetSearchConfig | None = None) -> float:
    """Off-diagonal edge frequency over the best kept subset."""
    result = find_s_hat(a, cfg)
    return offdiag_mean(a, result.nodes)


def er_conservative_ci(a: np.ndarray, alpha: float, c: float = 3.0,
                       cfg: SubsetSearchConfig | None = None) -> ConfidenceInterval:
    """Interval {p : |p_hat - p| <= C (sqrt(p(1-p)/n) + 1/n)}."""
    a = validate_adjacency(a)
    n = a.shape[0]
    p_hat = er_estimate(a, cfg)
    lower, upper = solve_absdev_interval(p_hat, c / math.sqrt(n), c / n)
    return ConfidenceInterval(lower, upper, alpha, "er-conservative")


def _as_rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.Generator(np.random.Philox(key=np.uint64(seed_or_rng)))


def sample_node_contaminated(n: int, p: float, eps: float,
                             q_strategy: str = "all-ones",
                             q_edge: float | None = None,
                             seed=0) -> np.ndarray:
    """Two-step sampler: contamination flags z_i ~ Bernoulli(eps), then
    clean pairs ~ Bernoulli(p) and contaminated-incident pairs per strategy.
    """
    if not 0.0 <= p <= 1.0 or not 0.0 <= eps <= 1.0:
        raise ValueError("p and eps must be in [0, 1]")
    rng = _as_rng(seed)
    z = rng.random(n) < eps
    iu, ju = np.triu_indices(n, k=1)
    edges = rng.random(iu.size) < p
    bad = z[iu] | z[ju]
    if bad.any():
        if q_strategy == "all-ones":
            edges[bad] = True
        elif q_strategy == "all-zeros":
            edges[bad] = False
        elif q_strategy == "bernoulli":
            if q_edge is None or not 0.0 <= q_edge <= 1.0:
                raise ValueError("bernoulli strategy needs q_edge in [0, 1]")
            edges[bad] = rng.random(int(bad.sum())) < q_edge
        else:
            raise ValueError(f"unknown q_strategy {q_strategy!r}")
    a = np.zeros((n, n), dtype=np.int8)
    a[iu, ju] = edges
    a[ju, iu] = edges
    return a


def sample_er(n: int, p: float, seed=0) -> np.ndarray:
    """Erdos-Renyi graph; identical stream layout to the contaminated
    sampler so the two agree bit-for-bit at eps = 0."""
    return sample_node_contaminated(n, p, 0.0, seed=seed)


def sample_sbm(n: int, p1: float, p2: float, q: float, eta: float,
               seed=0) -> np.ndarray:
    """Two-community stochastic block model with membership rate eta."""
    for name, v in (("p1", p1), ("p2", p2), ("q", q), ("eta", eta)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {v}")
    rng = _as_rng(seed)
    z = rng.random(n) < eta
    iu, ju = np.triu_indices(n, k=1)
    prob = np.where(~z[iu] & ~z[ju], p1, np.where(z[iu] & z[ju], p2, q))
    edges = rng.random(iu.size) < prob
    a = np.zeros((n, n), dtype=np.int8)
    a[iu, ju] = edges
    a[ju, iu] = edges
    return a


def write_edge_list(a: np.ndarray, path):
    """Plain-text edge list, one 0-indexed 'i j' pair per line (i < j)."""
    a = validate_adjacency(a)
    iu, ju = np.nonzero(np.triu(a, k=1))
    with open(path, "w") as fh:
        for i, j in zip(iu, ju):
            fh.write(f"{i} {j}\n")


def read_edge_list(path, n: int) -> np.ndarray:
    """Inverse of write_edge_list; node count must be supplied."""
    a = np.zeros((n, n), dtype=np.int8)
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            i, j = (int(x) for x in line.split())
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise ValueError(f"bad edge {i} {j} for n={n}")
            a[i, j] = 1
            a[j, i] = 1
    return a
