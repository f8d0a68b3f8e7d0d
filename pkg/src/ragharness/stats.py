"""Non-parametric bootstrap machinery: percentile confidence intervals,
paired bootstrap deltas, and the pooled delta over matched config pairs.

Every replicate draws its resample indices from a generator seeded by a
stable hash of (master_seed, replicate), so results do not depend on
execution order or parallelism.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    level: float = 0.95

    def __post_init__(self):
        if self.lo > self.hi:
            raise StatsError(f"interval lo {self.lo} > hi {self.hi}")
        if not 0.0 < self.level < 1.0:
            raise StatsError(f"level must be in (0, 1), got {self.level}")

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class DeltaEstimate:
    delta: float
    interval: Interval
    significant: bool


@dataclass(frozen=True)
class ResamplePlan:
    n_resamples: int = 1000
    level: float = 0.95
    master_seed: int = 0

    def __post_init__(self):
        if self.n_resamples < 1:
            raise StatsError("n_resamples must be >= 1")
        if not 0.0 < self.level < 1.0:
            raise StatsError("level must be in (0, 1)")


def subseed(master_seed: int, replicate: int) -> int:
    """Stable 64-bit hash of (master_seed, replicate), the splitmix64 finalizer."""
    x = (master_seed + 0x9E3779B97F4A7C15 * (replicate + 1)) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def _replicate_indices(plan: ResamplePlan, replicate: int, n: int) -> np.ndarray:
    rng = np.random.default_rng(subseed(plan.master_seed, replicate))
    return rng.integers(0, n, size=n)


def _check_values(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise StatsError("values must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise StatsError("values must be finite")
    return arr


def _percentile_interval(replicate_stats: np.ndarray, level: float) -> Interval:
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(replicate_stats, [alpha, 1.0 - alpha])
    return Interval(lo=float(lo), hi=float(hi), level=level)


def bootstrap_ci(values, plan: ResamplePlan) -> Interval:
    """Percentile bootstrap interval around the mean of `values`."""
    arr = _check_values(values)
    n = arr.size
    means = np.empty(plan.n_resamples)
    for r in range(plan.n_resamples):
        means[r] = arr[_replicate_indices(plan, r, n)].mean()
    return _percentile_interval(means, plan.level)


def paired_bootstrap_delta(a, b, plan: ResamplePlan) -> DeltaEstimate:
    """Bootstrap the mean per-example difference of two aligned score vectors."""
    a = _check_values(a)
    b = _check_values(b)
    if a.shape != b.shape:
        raise StatsError(f"length mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    n = diff.size
    deltas = np.empty(plan.n_resamples)
    for r in range(plan.n_resamples):
        deltas[r] = diff[_replicate_indices(plan, r, n)].mean()
    interval = _percentile_interval(deltas, plan.level)
    significant = interval.lo > 0.0 or interval.hi < 0.0
    return DeltaEstimate(
        delta=float(diff.mean()), interval=interval, significant=significant
    )


def pooled_pair_delta(pairs, plan: ResamplePlan) -> DeltaEstimate:
    """Family-level delta: one shared index resample per replicate, pair mean
    differences averaged across pairs."""
    if not pairs:
        raise StatsError("pairs must be nonempty")
    diffs = []
    n = None
    for a, b in pairs:
        a = _check_values(a)
        b = _check_values(b)
        if a.shape != b.shape:
            raise StatsError("pair vectors must be aligned")
        if n is None:
            n = a.size
        elif a.size != n:
            raise StatsError("all pairs must share the same example index set")
        diffs.append(a - b)
    diff_matrix = np.stack(diffs)  # (n_pairs, n_examples)
    deltas = np.empty(plan.n_resamples)
    for r in range(plan.n_resamples):
        idx = _replicate_indices(plan, r, n)
        deltas[r] = diff_matrix[:, idx].mean(axis=1).mean()
    interval = _percentile_interval(deltas, plan.level)
    significant = interval.lo > 0.0 or interval.hi < 0.0
    return DeltaEstimate(
        delta=float(diff_matrix.mean(axis=1).mean()),
        interval=interval,
        significant=significant,
    )
