# graphical/rate_coupling.py
"""Coupling two rate sets of one model through a superposed timeline.

Every code c runs at the larger of its two intensities; a symbol is seen by a
process when its thinning mark U is at most (that process's rate) / (larger
rate). When `rates_high` dominates `rates_low`, the low process sees a subset
of the up symbols and a superset of the down symbols of the high process.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from contact_lattice.core.exceptions import ParameterError, TimelineError
from contact_lattice.core.lattice import Configuration
from contact_lattice.core.rates import RateSet
from contact_lattice.graphical.replay import CouplingReport, run_coupled
from contact_lattice.graphical.symbols import code_rates
from contact_lattice.graphical.timeline import Region

logger = logging.getLogger(__name__)


def dominates(rates_low: RateSet, rates_high: RateSet) -> bool:
    """True when rates_high has every up rate >= and every down rate <= rates_low."""
    if rates_low.model != rates_high.model:
        return False
    ups = all(h >= l for l, h in zip(rates_low.up_rates(), rates_high.up_rates()))
    downs = all(h <= l for l, h in zip(rates_low.down_rates(), rates_high.down_rates()))
    return ups and downs


@dataclass(eq=False)
class RateCoupledTimeline:
    region: Region
    rates_low: RateSet
    rates_high: RateSet
    sites: np.ndarray = field(repr=False)
    times: np.ndarray = field(repr=False)
    codes: np.ndarray = field(repr=False)
    in_low: np.ndarray = field(repr=False)
    in_high: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return int(self.sites.size)

    @property
    def geometry(self):
        return self.region.geometry


def build_rate_coupled(region: Region, rates_low: RateSet, rates_high: RateSet,
                       rng: np.random.Generator) -> RateCoupledTimeline:
    if rates_low.model != rates_high.model:
        raise ParameterError("Rate coupling needs both rate sets in the same model")
    low = code_rates(rates_low)
    high = code_rates(rates_high)
    top = np.maximum(low, high)
    line_rate = float(top.sum())
    geometry = region.geometry

    counts = rng.poisson(line_rate * region.duration, size=geometry.n_sites)
    total = int(counts.sum())
    sites = np.repeat(np.arange(geometry.n_sites, dtype=np.int64), counts)
    times = region.t_start + rng.random(total) * region.duration
    if line_rate > 0:
        codes = rng.choice(top.size, size=total, p=top / line_rate)
    else:
        codes = np.zeros(0, dtype=np.int64)
    thin = 1.0 - rng.random(total)
    with np.errstate(divide="ignore", invalid="ignore"):
        in_low = thin <= np.where(top[codes] > 0, low[codes] / top[codes], 0.0)
        in_high = thin <= np.where(top[codes] > 0, high[codes] / top[codes], 0.0)

    order = np.lexsort((codes, sites, times))
    logger.debug("Rate-coupled timeline with %d symbols (line rate %.4f)", total, line_rate)
    return RateCoupledTimeline(region, rates_low, rates_high, sites[order], times[order],
                               codes[order], in_low[order], in_high[order])


def couple_rates(timeline: RateCoupledTimeline, xi_low: Configuration, xi_high: Configuration,
                 horizon: Optional[float] = None) -> CouplingReport:
    """Replay the low and high processes and report the first ordering violation."""
    if not dominates(timeline.rates_low, timeline.rates_high):
        raise ParameterError("rates_high does not dominate rates_low")
    if xi_low.geometry != timeline.geometry or xi_high.geometry != timeline.geometry:
        raise TimelineError("Initial configurations are not defined on the timeline's region")
    region = timeline.region
    until = region.t_end if horizon is None else region.t_start + float(horizon)
    if until > region.t_end:
        raise TimelineError(f"Horizon reaches {until}, timeline ends at {region.t_end}")
    keep = timeline.times <= until
    return run_coupled(timeline.geometry, timeline.rates_low.model, xi_low, xi_high,
                       timeline.sites[keep], timeline.times[keep], timeline.codes[keep],
                       timeline.codes[keep], timeline.in_low[keep], timeline.in_high[keep])
