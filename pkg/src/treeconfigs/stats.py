"""Exact finite-size distributions, extremal shapes, and seeded sampling.

Exact distributions join the per-shape configuration counts with the
induced model weights, so every probability is a rational number; logs of
the (possibly huge) counts come from their bit length. Sampling uses a
counter-based generator (Philox) so runs are reproducible from a 64-bit
seed and independent across streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CapacityError, DegenerateDistributionError, TreeDomainError
from . import configs
from .moments import uniform_moments, yule_moments
from .numutil import log_int, normal_cdf, pearson_from_exact
from .trees import History, OrderedShape, Shape, enumerate_shapes, fold
from .weights import UNIFORM, YULE, check_model, induced_distribution

DEFAULT_DISTRIBUTION_CAP = 16
DEFAULT_SAMPLE_CAP = 2000
RNG_NAME = "philox"


@dataclass(frozen=True)
class DistEntry:
    shape: Shape
    total: int
    root: int
    prob: Fraction


@dataclass
class ExactDistribution:
    """Joint exact distribution of (total, root) counts over shapes."""

    n: int
    model: str
    entries: list

    def log_total_moments(self):
        """(mean, variance) of log(total), exact weights, float logs."""
        mean = 0.0
        second = 0.0
        for entry in self.entries:
            p = float(entry.prob)
            lt = log_int(entry.total)
            mean += p * lt
            second += p * lt * lt
        return mean, max(second - mean * mean, 0.0)


def exact_distribution(n: int, model: str,
                       cap: int = DEFAULT_DISTRIBUTION_CAP) -> ExactDistribution:
    check_model(model)
    if n > cap:
        raise CapacityError("exact distribution capped at %d leaves (asked %d)" % (cap, n))
    dist = induced_distribution(n, model)
    entries = [
        DistEntry(shape, configs.total_configs(shape), configs.root_configs(shape), prob)
        for shape, prob in dist.items()
    ]
    return ExactDistribution(n, model, entries)


def standardized_log_cdf(dist: ExactDistribution, ys) -> list:
    """Points (y, P[log total <= mean + y * sd]) with exact tail weights."""
    if dist.n < 3:
        raise DegenerateDistributionError(
            "log-total distribution is degenerate below 3 leaves"
        )
    mean, variance = dist.log_total_moments()
    if variance <= 0:
        raise DegenerateDistributionError("zero variance of log total")
    sd = math.sqrt(variance)
    weighted = sorted(
        (log_int(entry.total), entry.prob) for entry in dist.entries
    )
    out = []
    for y in ys:
        threshold = mean + y * sd
        acc = Fraction(0)
        for log_total, prob in weighted:
            if log_total <= threshold:
                acc += prob
            else:
                break
        out.append((y, float(acc)))
    return out


def max_normal_deviation(dist: ExactDistribution, ys) -> float:
    """Largest |CDF(y) - Phi(y)| over the grid."""
    points = standardized_log_cdf(dist, ys)
    return max(abs(value - normal_cdf(y)) for y, value in points)


@dataclass
class ExtremalReport:
    n: int
    max_root: int
    max_root_shape: Shape
    total_at_max_root: int
    max_total: int
    max_total_shape: Shape
    root_at_max_total: int
    scatter: list  # (shape, root, total) per canonical shape


def extremal_shapes(n: int, cap: int = DEFAULT_DISTRIBUTION_CAP) -> ExtremalReport:
    """Maximizers of root and total counts over all canonical shapes.

    Ties resolve to the earliest shape in canonical order.
    """
    if n > cap:
        raise CapacityError("extremal search capped at %d leaves (asked %d)" % (cap, n))
    scatter = []
    best_root = None
    best_total = None
    for shape in enumerate_shapes(n):
        root = configs.root_configs(shape)
        total = configs.total_configs(shape)
        scatter.append((shape, root, total))
        if best_root is None or root > best_root[1]:
            best_root = (shape, root, total)
        if best_total is None or total > best_total[2]:
            best_total = (shape, root, total)
    return ExtremalReport(
        n=n,
        max_root=best_root[1],
        max_root_shape=best_root[0],
        total_at_max_root=best_root[2],
        max_total=best_total[2],
        max_total_shape=best_total[0],
        root_at_max_total=best_total[1],
        scatter=scatter,
    )


# ---------------------------------------------------------------------------
# Sampling

def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def sample_tree(n: int, model: str, rng: np.random.Generator):
    """One random tree: a plane tree (uniform model, every plane tree
    equally likely) or a history (Yule model, every history equally
    likely)."""
    check_model(model)
    if n < 1:
        raise TreeDomainError("size must be at least 1, got %r" % (n,))
    if model == UNIFORM:
        return _sample_plane(n, rng)
    return _sample_history(n, rng)


def _sample_plane(n: int, rng) -> OrderedShape:
    """Leaf-insertion growth: at step k pick one of the 2k-1 nodes and a
    side, and graft a fresh leaf there. Plane trees come out uniform (the
    insertion sequences biject with leaf-labeled plane trees, n! per
    plane tree)."""
    if n == 1:
        return OrderedShape.leaf()
    highs = np.arange(1, 2 * n - 2, 2)
    picks = rng.integers(0, highs)
    sides = rng.integers(0, 2, size=n - 1)
    left = [None]
    right = [None]
    for step in range(n - 1):
        v = int(picks[step])
        w = len(left)
        left.append(left[v])
        right.append(right[v])
        leaf = len(left)
        left.append(None)
        right.append(None)
        if sides[step]:
            left[v], right[v] = w, leaf
        else:
            left[v], right[v] = leaf, w
    return _freeze_plane(left, right, 0)


def _freeze_plane(left, right, root) -> OrderedShape:
    done = {}
    stack = [root]
    while stack:
        v = stack[-1]
        if left[v] is None:
            done[v] = OrderedShape.leaf()
            stack.pop()
            continue
        a, b = left[v], right[v]
        if a in done and b in done:
            done[v] = OrderedShape.node(done[a], done[b])
            stack.pop()
        else:
            stack.append(b)
            stack.append(a)
    return done[root]


def _sample_history(n: int, rng) -> History:
    """The generative branching process itself: at each step a uniformly
    chosen leaf splits and takes the next rank, which makes all ranked
    histories equally likely."""
    if n == 1:
        return History.leaf()
    highs = np.arange(1, n)
    picks = rng.integers(0, highs)
    left = [None]
    right = [None]
    rank = [None]
    leaves = [0]
    for step in range(n - 1):
        idx = int(picks[step])
        v = leaves[idx]
        a = len(left)
        left.append(None)
        right.append(None)
        rank.append(None)
        b = len(left)
        left.append(None)
        right.append(None)
        rank.append(None)
        left[v], right[v], rank[v] = a, b, step + 1
        leaves[idx] = a
        leaves.append(b)
    return _freeze_history_arrays(left, right, rank, 0)


def _freeze_history_arrays(left, right, rank, root) -> History:
    done = {}
    stack = [root]
    while stack:
        v = stack[-1]
        if left[v] is None:
            done[v] = History.leaf()
            stack.pop()
            continue
        a, b = left[v], right[v]
        if a in done and b in done:
            done[v] = History.node(done[a], done[b], rank[v])
            stack.pop()
        else:
            stack.append(b)
            stack.append(a)
    return done[root]


@dataclass
class SampleRun:
    """Seeded Monte Carlo estimates of log-count moments."""

    n: int
    model: str
    samples: int
    seed: int
    generator: str
    mean_log_total: float
    var_log_total: float
    mean_log_root: float
    var_log_root: float
    se_mean: float
    se_var: float
    log_totals: list = field(repr=False)

    @property
    def mean_per_n(self) -> float:
        return self.mean_log_total / self.n

    @property
    def var_per_n(self) -> float:
        return self.var_log_total / self.n


def monte_carlo_log_moments(n: int, model: str, samples: int, seed: int,
                            cap: int = DEFAULT_SAMPLE_CAP) -> SampleRun:
    check_model(model)
    if samples < 1:
        raise TreeDomainError("need at least one sample, got %r" % (samples,))
    if n > cap:
        raise CapacityError("sampling capped at %d leaves (asked %d)" % (cap, n))
    rng = make_rng(seed)
    log_totals = []
    log_roots = []
    for _ in range(samples):
        tree = sample_tree(n, model, rng)
        root, total = fold(
            tree,
            lambda _: (0, 0),
            lambda _, a, b: ((a[0] + 1) * (b[0] + 1), a[1] + b[1] + (a[0] + 1) * (b[0] + 1)),
        )
        log_totals.append(log_int(total) if total else 0.0)
        log_roots.append(log_int(root) if root else 0.0)
    mean_t = math.fsum(log_totals) / samples
    var_t = math.fsum((x - mean_t) ** 2 for x in log_totals) / max(samples - 1, 1)
    mean_r = math.fsum(log_roots) / samples
    var_r = math.fsum((x - mean_r) ** 2 for x in log_roots) / max(samples - 1, 1)
    se_mean = math.sqrt(var_t / samples)
    se_var = var_t * math.sqrt(2.0 / max(samples - 1, 1))
    return SampleRun(
        n=n, model=model, samples=samples, seed=seed, generator=RNG_NAME,
        mean_log_total=mean_t, var_log_total=var_t,
        mean_log_root=mean_r, var_log_root=var_r,
        se_mean=se_mean, se_var=se_var,
        log_totals=log_totals,
    )


# ---------------------------------------------------------------------------
# Exact correlation and model comparison

def exact_moments_from_distribution(dist: ExactDistribution) -> dict:
    out = {
        "r": Fraction(0), "t": Fraction(0), "r2": Fraction(0),
        "tr": Fraction(0), "t2": Fraction(0),
    }
    for entry in dist.entries:
        p = entry.prob
        out["r"] += p * entry.root
        out["t"] += p * entry.total
        out["r2"] += p * entry.root * entry.root
        out["tr"] += p * entry.total * entry.root
        out["t2"] += p * entry.total * entry.total
    return out


def exact_correlation(n: int, model: str, cap: int = DEFAULT_DISTRIBUTION_CAP) -> float:
    """Pearson correlation of (total, root) under the exact distribution.

    Matches the moment-table value at the same n by construction (the same
    rationals feed the same float formula). Degenerate for n <= 2.
    """
    dist = exact_distribution(n, model, cap=cap)
    m = exact_moments_from_distribution(dist)
    var_t = m["t2"] - m["t"] * m["t"]
    var_r = m["r2"] - m["r"] * m["r"]
    cov = m["tr"] - m["t"] * m["r"]
    rho = pearson_from_exact(cov, var_t, var_r)
    if rho is None:
        raise DegenerateDistributionError(
            "correlation undefined at n=%d (zero variance)" % n
        )
    return rho


def mean_total_by_model(n_lo: int, n_hi: int) -> list:
    """Rows (n, uniform E[total], yule E[total]) as exact rationals."""
    uni = uniform_moments(n_hi)
    yul = yule_moments(n_hi)
    return [
        (n, uni.row(n).e_t, yul.row(n).e_t)
        for n in range(n_lo, n_hi + 1)
    ]
