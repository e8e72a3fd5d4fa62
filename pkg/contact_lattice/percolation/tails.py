# percolation/tails.py

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from scipy import stats

from contact_lattice.core.exceptions import InsufficientSamplesError, ParameterError
from contact_lattice.percolation.clusters import ClusterReport
from contact_lattice.utils.stats import clopper_pearson

logger = logging.getLogger(__name__)

MIN_SAMPLES = 100
R_SQUARED_EXPONENTIAL = 0.98
CURVATURE_RATIO = 0.5
FIT_P_MAX = 0.5
FIT_MIN_COUNT = 10


class TailClass(Enum):
    EXPONENTIAL = "Exponential"
    SUBEXPONENTIAL = "Subexponential"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class TailFit:
    """log p_hat(n) ~ a - rate * n over n in [n_lo, n_hi]."""
    rate: float
    rate_ci: tuple
    r_squared: float
    n_lo: int
    n_hi: int
    points: int
    lower_rate: Optional[float] = None
    upper_rate: Optional[float] = None


@dataclass
class TailEstimate:
    n_grid: np.ndarray = field(repr=False)
    p_hat: np.ndarray = field(repr=False)
    ci_lo: np.ndarray = field(repr=False)
    ci_hi: np.ndarray = field(repr=False)
    fit: Optional[TailFit]
    classification: TailClass
    samples: int
    censored: int = 0
    degenerate: bool = False

    def csv_rows(self) -> List[Dict[str, float]]:
        return [{"n": int(n), "p_hat": float(p), "ci_lo": float(lo), "ci_hi": float(hi)}
                for n, p, lo, hi in zip(self.n_grid, self.p_hat, self.ci_lo, self.ci_hi)]

    def to_dict(self) -> dict:
        fit = None
        if self.fit is not None:
            fit = {"exponential_rate": self.fit.rate, "rate_ci": list(self.fit.rate_ci),
                   "r_squared": self.fit.r_squared, "n_lo": self.fit.n_lo, "n_hi": self.fit.n_hi,
                   "lower_rate": self.fit.lower_rate, "upper_rate": self.fit.upper_rate}
        return {"classification": self.classification.value, "degenerate": self.degenerate,
                "samples": self.samples, "censored": self.censored, "fit": fit}


def _line(n: np.ndarray, p: np.ndarray, confidence: float):
    res = stats.linregress(n, np.log(p))
    t = float(stats.t.ppf(0.5 + confidence / 2.0, df=max(n.size - 2, 1)))
    rate = -float(res.slope)
    half = t * float(res.stderr)
    return rate, (rate - half, rate + half), float(res.rvalue ** 2)


def tail_estimate(samples: Sequence[Union[ClusterReport, int]], n_grid: Sequence[int],
                  confidence: float = 0.95, min_samples: int = MIN_SAMPLES) -> TailEstimate:
    """Tail p_hat(n) = P(|C_0| >= n) with exact binomial intervals, a log-linear fit
    and a three-way classification.

    Wrapping origin clusters are right-censored: they count as >= n for every n in
    p_hat but are left out of the fitted tail.
    """
    if len(samples) < min_samples:
        raise InsufficientSamplesError(f"{len(samples)} samples; tail estimates need >= {min_samples}")
    grid = np.asarray(n_grid, dtype=np.int64)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ParameterError("n_grid must be a nonempty increasing sequence")

    sizes = np.array([s.origin_size if isinstance(s, ClusterReport) else int(s) for s in samples])
    censored = np.array([bool(s.origin_wraps) if isinstance(s, ClusterReport) else False
                         for s in samples])
    total = sizes.size
    counts = np.array([np.count_nonzero((sizes >= n) | censored) for n in grid])
    p_hat = counts / total
    ci_lo, ci_hi = clopper_pearson(counts, total, confidence)

    fit_counts = np.array([np.count_nonzero((sizes >= n) & ~censored) for n in grid])
    fit_p = fit_counts / total
    in_range = (grid >= 1) & (fit_p >= FIT_MIN_COUNT / total) & (fit_p <= FIT_P_MAX)
    n_fit, p_fit = grid[in_range].astype(float), fit_p[in_range]

    fit = None
    degenerate = False
    if n_fit.size < 3:
        tail_empty = fit_p[grid >= 1].size > 0 and fit_p[-1] == 0
        classification = TailClass.EXPONENTIAL if tail_empty else TailClass.INCONCLUSIVE
        degenerate = tail_empty
    else:
        rate, rate_ci, r2 = _line(n_fit, p_fit, confidence)
        fit = TailFit(rate, rate_ci, r2, int(n_fit[0]), int(n_fit[-1]), int(n_fit.size))
        half = n_fit.size // 2
        if half >= 2 and n_fit.size - half >= 2:
            fit.lower_rate, _, _ = _line(n_fit[:half], p_fit[:half], confidence)
            fit.upper_rate, _, _ = _line(n_fit[half:], p_fit[half:], confidence)
        if r2 >= R_SQUARED_EXPONENTIAL and rate > 0 and rate_ci[0] > 0:
            classification = TailClass.EXPONENTIAL
        elif (fit.lower_rate is not None and fit.lower_rate > 0
              and fit.upper_rate < CURVATURE_RATIO * fit.lower_rate):
            classification = TailClass.SUBEXPONENTIAL
        else:
            classification = TailClass.INCONCLUSIVE

    if degenerate:
        logger.warning("Degenerate tail: origin clusters never reach the fit range")
    if censored.any():
        logger.info("%d of %d origin clusters wrap the lattice (censored)", int(censored.sum()), total)
    return TailEstimate(grid, p_hat, np.asarray(ci_lo, float), np.asarray(ci_hi, float), fit,
                        classification, total, int(censored.sum()), degenerate)
