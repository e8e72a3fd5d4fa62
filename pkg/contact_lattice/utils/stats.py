# utils/stats.py

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import stats

from contact_lattice.core.exceptions import InsufficientSamplesError


@dataclass
class MeanEstimate:
    mean: float
    stderr: float
    ci: Tuple[float, float]
    n: int

    @property
    def half_width(self) -> float:
        return 0.5 * (self.ci[1] - self.ci[0])

    def contains(self, value: float) -> bool:
        return self.ci[0] <= value <= self.ci[1]


def batch_means(batch_values: Sequence[float], confidence: float = 0.95) -> MeanEstimate:
    """Student-t interval from (approximately independent) batch means."""
    values = np.asarray(batch_values, dtype=float)
    if values.size < 2:
        raise InsufficientSamplesError("Batch-means interval needs at least two batches")
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(values.size))
    t = float(stats.t.ppf(0.5 + confidence / 2.0, df=values.size - 1))
    return MeanEstimate(mean, stderr, (mean - t * stderr, mean + t * stderr), int(values.size))


def replica_mean(values: np.ndarray, confidence: float = 0.95, axis: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and normal-approximation half-width across replicas along `axis`."""
    values = np.asarray(values, dtype=float)
    n = values.shape[axis]
    mean = values.mean(axis=axis)
    if n < 2:
        return mean, np.zeros_like(mean)
    z = float(stats.norm.ppf(0.5 + confidence / 2.0))
    return mean, z * values.std(axis=axis, ddof=1) / np.sqrt(n)


def clopper_pearson(successes, trials, confidence: float = 0.95) -> Tuple[np.ndarray, np.ndarray]:
    """Exact binomial interval; vectorised over `successes`."""
    k = np.asarray(successes, dtype=float)
    n = float(trials)
    alpha = 1.0 - confidence
    with np.errstate(invalid="ignore"):
        lo = np.where(k > 0, stats.beta.ppf(alpha / 2.0, k, n - k + 1), 0.0)
        hi = np.where(k < n, stats.beta.ppf(1.0 - alpha / 2.0, k + 1, n - k), 1.0)
    return lo, hi


def multinomial_sigma(counts: np.ndarray, probabilities: np.ndarray) -> np.ndarray:
    """Standardised deviation of each multinomial count from its expectation."""
    counts = np.asarray(counts, dtype=float)
    p = np.asarray(probabilities, dtype=float)
    n = counts.sum()
    expected = n * p
    sd = np.sqrt(n * p * (1 - p))
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(sd > 0, (counts - expected) / sd, 0.0)
    return z


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p, float) - np.asarray(q, float)).sum())
