"""Chain-quality metrics: expected squared jump distance, effective sample
size, acceptance rate, and the random-projection Kolmogorov-Smirnov
ergodicity measure."""

from dataclasses import dataclass
from typing import Optional

import numpy as np


class EmptyChainError(Exception):
    """Diagnostics requested on an empty record list."""


class DegenerateChainError(Exception):
    """A coordinate has zero sample variance (e.g. an all-rejected chain)."""


class DimensionMismatchError(Exception):
    """Chain and reference samples live in different dimensions."""


@dataclass
class DiagnosticsReport:
    esjd: float
    ess_per_coordinate: np.ndarray
    min_ess: float
    mean_ess: float
    ess_per_second_min: float
    ess_per_second_mean: float
    acceptance_rate: float
    ks_stats: Optional[np.ndarray]
    ks_mean: Optional[float]


def compute_esjd(records):
    """Mean over transitions of accept_prob * squared proposal jump.

    The expectation over the acceptance decision is taken analytically, so
    rejected transitions still contribute alpha * ||q_prop - q||^2.
    """
    if not records:
        raise EmptyChainError("no transitions recorded")
    total = 0.0
    for r in records:
        total += r.accept_prob * r.sq_jump_distance
    return total / len(records)


def acceptance_rate(records):
    if not records:
        raise EmptyChainError("no transitions recorded")
    return sum(1 for r in records if r.accepted) / len(records)


def compute_ess(samples):
    """Effective sample size of a scalar chain.

    N / (1 + 2 sum rho_t) with autocovariances from direct lagwise summation,
    truncated by the initial-positive-sequence rule: lags are consumed in
    pairs (rho_2k + rho_2k+1) while the pair sums stay positive.
    """
    x = np.asarray(samples, dtype=float)
    n = x.shape[0]
    y = x - x.mean()
    c0 = float(y @ y) / n
    if c0 == 0.0:
        raise DegenerateChainError("zero sample variance")

    def rho(t):
        return float(y[: n - t] @ y[t:]) / (n * c0)

    acc = 0.0
    k = 0
    while 2 * k + 1 < n - 1:
        pair = rho(2 * k) + rho(2 * k + 1)
        if pair <= 0.0:
            break
        acc += pair
        k += 1
    tau = max(2.0 * acc - 1.0, 1.0 / n)
    return n / tau


def ks_two_sample(a, b):
    """Exact two-sample Kolmogorov-Smirnov statistic (sup over the merged sample)."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    pts = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pts, side="right") / a.shape[0]
    cdf_b = np.searchsorted(b, pts, side="right") / b.shape[0]
    return float(np.abs(cdf_a - cdf_b).max())


def ks_ergodicity(chain_samples, iid_samples, num_directions=100, rng=None):
    """KS statistics of 1-D projections along random unit directions.

    Directions are normalized standard Gaussians, drawn once from the supplied
    generator. Returns the per-direction statistics, shape (num_directions,).
    """
    chain = np.asarray(chain_samples, dtype=float)
    iid = np.asarray(iid_samples, dtype=float)
    if chain.ndim != 2 or iid.ndim != 2 or chain.shape[1] != iid.shape[1]:
        raise DimensionMismatchError(
            "chain %r vs reference %r" % (chain.shape, iid.shape)
        )
    if rng is None:
        rng = np.random.default_rng(0)
    m = chain.shape[1]
    directions = rng.standard_normal((num_directions, m))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    stats = np.empty(num_directions)
    for i, d in enumerate(directions):
        stats[i] = ks_two_sample(chain @ d, iid @ d)
    return stats


def build_report(records, samples, iid_samples=None, seed=0, num_directions=100):
    """Aggregate diagnostics for one chain.

    ESS-per-second uses the summed transition wall clock only; the KS block is
    present only when reference samples are supplied, with projection
    directions drawn from this report's own seed.
    """
    if not records:
        raise EmptyChainError("no transitions recorded")
    samples = np.asarray(samples, dtype=float)
    ess = np.array([compute_ess(samples[:, j]) for j in range(samples.shape[1])])
    wall_seconds = sum(r.wall_clock_nanos for r in records) / 1e9
    ks_stats = None
    ks_mean = None
    if iid_samples is not None:
        ks_stats = ks_ergodicity(
            samples, iid_samples, num_directions, np.random.default_rng(seed)
        )
        ks_mean = float(ks_stats.mean())
    return DiagnosticsReport(
        esjd=compute_esjd(records),
        ess_per_coordinate=ess,
        min_ess=float(ess.min()),
        mean_ess=float(ess.mean()),
        ess_per_second_min=float(ess.min() / wall_seconds),
        ess_per_second_mean=float(ess.mean() / wall_seconds),
        acceptance_rate=acceptance_rate(records),
        ks_stats=ks_stats,
        ks_mean=ks_mean,
    )
