# dynamics/stationary.py

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from contact_lattice.core.exceptions import ParameterError
from contact_lattice.core.lattice import Configuration, Geometry, SiteState
from contact_lattice.core.rates import RateSet
from contact_lattice.dynamics.engine import GillespieEngine
from contact_lattice.utils.stats import MeanEstimate, batch_means

logger = logging.getLogger(__name__)

DEFAULT_BATCHES = 20


@dataclass
class DensityEstimate:
    """Time-averaged stationary density with a batch-means interval."""
    rho_bar: float
    ci: tuple
    stderr: float
    batch_values: List[float] = field(repr=False)
    occupation: Optional[Dict[int, float]] = field(default=None, repr=False)
    event_count: int = 0

    @property
    def half_width(self) -> float:
        return 0.5 * (self.ci[1] - self.ci[0])

    def occupation_distribution(self, n_sites: int) -> np.ndarray:
        """Fraction of measured time spent in each base-3 encoded configuration."""
        if self.occupation is None:
            raise ParameterError("Estimate was computed without occupation tracking")
        dist = np.zeros(3 ** n_sites)
        for code, duration in self.occupation.items():
            dist[code] = duration
        return dist / dist.sum()


def estimate_density(rates: RateSet, geometry: Geometry, burn_in: float, samples: float,
                     rng: np.random.Generator, batches: int = DEFAULT_BATCHES,
                     initial: Optional[Configuration] = None, confidence: float = 0.95,
                     track_occupation: bool = False) -> DensityEstimate:
    """Time-averaged density after `burn_in` over `samples` time units, without the
    positivity requirement (used by solvers whose iterates may hit zero rates)."""
    if not burn_in > 0 or not samples > 0:
        raise ParameterError(f"burn_in and samples must be positive, got {burn_in}, {samples}")
    if batches < 2:
        raise ParameterError("Need at least two batches for a batch-means interval")
    start = initial if initial is not None else Configuration.full(geometry, SiteState.OCCUPIED)
    engine = GillespieEngine(start, rates, rng, track_occupation=track_occupation)
    engine.advance(burn_in)

    batch_len = samples / batches
    values = []
    occupation: Dict[int, float] = {}
    for b in range(batches):
        engine.reset_accumulators()
        engine.advance(burn_in + (b + 1) * batch_len)
        values.append(engine.time_average_density())
        if track_occupation:
            for code, duration in engine.occupation.items():
                occupation[code] = occupation.get(code, 0.0) + duration
    estimate: MeanEstimate = batch_means(values, confidence)
    logger.debug("Density %.5f +- %.5f after %d events", estimate.mean, estimate.half_width,
                 engine.event_count)
    return DensityEstimate(
        rho_bar=estimate.mean,
        ci=estimate.ci,
        stderr=estimate.stderr,
        batch_values=values,
        occupation=occupation if track_occupation else None,
        event_count=engine.event_count,
    )


def stationary_density(rates: RateSet, geometry: Geometry, burn_in: float, samples: float,
                       rng: np.random.Generator, **options) -> DensityEstimate:
    """Stationary probability that a site is 1, started from all-1 (upper invariant
    measure), time-averaged after burn_in with a batch-means interval."""
    if not rates.all_positive():
        raise ParameterError(
            "stationary_density needs every model rate strictly positive (unique stationary law)"
        )
    return estimate_density(rates, geometry, burn_in, samples, rng, **options)


def sample_stationary_configs(rates: RateSet, geometry: Geometry, burn_in: float, count: int,
                              spacing: float, rng: np.random.Generator,
                              initial: Optional[Configuration] = None) -> List[Configuration]:
    """Snapshots from one long all-1 run: burn_in, then `count` configurations `spacing` apart."""
    if count <= 0 or spacing <= 0 or burn_in < 0:
        raise ParameterError("count and spacing must be positive, burn_in nonnegative")
    start = initial if initial is not None else Configuration.full(geometry, SiteState.OCCUPIED)
    engine = GillespieEngine(start, rates, rng)
    engine.advance(burn_in)
    snapshots = []
    for k in range(count):
        engine.advance(burn_in + (k + 1) * spacing)
        snapshots.append(engine.configuration())
    return snapshots
