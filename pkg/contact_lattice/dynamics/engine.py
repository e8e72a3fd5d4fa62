# dynamics/engine.py

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

import numpy as np

from contact_lattice.core.exceptions import ParameterError, PropensityDriftError
from contact_lattice.core.lattice import Configuration, ones_neighbor_counts
from contact_lattice.core.rates import RateSet
from contact_lattice.dynamics.propensity import N_CLASSES, N_SLOTS, TransitionTable, site_classes
from contact_lattice.dynamics.schedule import RateSchedule

logger = logging.getLogger(__name__)

# Events between from-scratch rebuilds of the propensity totals.
AUDIT_INTERVAL = 1 << 20
# Below this maintained total the engine recomputes exactly before declaring absorption.
_ABSORPTION_RECHECK = 1e-9


@dataclass(frozen=True)
class Event:
    site: int
    from_state: int
    to_state: int
    time: float


@dataclass
class StepResult:
    config: Configuration
    dt: float
    event: Event


@dataclass
class Absorbed:
    """No transition is enabled: total rate is zero."""
    config: Configuration


@dataclass
class SimResult:
    final: Configuration
    event_count: int
    elapsed: float
    sample_times: np.ndarray = field(repr=False)
    density_trace: np.ndarray = field(repr=False)
    occupation: Optional[Dict[int, float]] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "event_count": self.event_count,
            "elapsed": self.elapsed,
            "sample_times": self.sample_times.tolist(),
            "density_trace": self.density_trace.tolist(),
            "final_density": self.final.density(),
        }


class GillespieEngine:
    """Exact event-by-event simulation of Model A / Model B on one configuration.

    Sites are kept in one bucket per transition class; a class's weight is
    (bucket size) x (class rate), so selection is a 15-way scan plus a uniform
    pick inside the bucket, and a state change touches the site and the sites
    its slots feed.
    """

    def __init__(self, config: Configuration, rates: RateSet, rng: np.random.Generator,
                 audit_interval: int = AUDIT_INTERVAL, track_occupation: bool = False):
        self.geometry = config.geometry
        self.rng = rng
        self.audit_interval = audit_interval
        self.logger = logging.getLogger(__name__)

        self._states: List[int] = config.states.astype(int).tolist()
        self._reverse = self.geometry.reverse_table
        self._ones: List[int] = ones_neighbor_counts(config).tolist()
        self._class: List[int] = site_classes(config).tolist()
        self._buckets: List[List[int]] = [[] for _ in range(N_CLASSES)]
        self._pos: List[int] = [0] * self.geometry.n_sites
        for site, c in enumerate(self._class):
            self._pos[site] = len(self._buckets[c])
            self._buckets[c].append(site)

        self.time = 0.0
        self.event_count = 0
        self.n_ones = sum(1 for s in self._states if s == 1)
        self._since_audit = 0
        self.ones_time = 0.0
        self.measured_time = 0.0

        self._occupation: Optional[Dict[int, float]] = None
        if track_occupation:
            n = self.geometry.n_sites
            self._weights = [3 ** (n - 1 - i) for i in range(n)]
            self._code = sum((s + 1) * w for s, w in zip(self._states, self._weights))
            self._occupation = {}

        self.set_rates(rates)

    # === Rates ===
    def set_rates(self, rates: RateSet):
        self.rates = rates
        self._table = TransitionTable.from_rates(rates)
        self._class_rates = list(self._table.class_rates)
        self._total = self._recompute_total()

    def _recompute_total(self) -> float:
        return math.fsum(len(b) * r for b, r in zip(self._buckets, self._class_rates))

    @property
    def total_rate(self) -> float:
        return self._total

    def class_counts(self) -> List[int]:
        return [len(b) for b in self._buckets]

    # === Bookkeeping ===
    def _move(self, site: int, new_class: int):
        old_class = self._class[site]
        if old_class == new_class:
            return
        bucket = self._buckets[old_class]
        pos = self._pos[site]
        last = bucket.pop()
        if last != site:
            bucket[pos] = last
            self._pos[last] = pos
        target = self._buckets[new_class]
        self._pos[site] = len(target)
        target.append(site)
        self._class[site] = new_class
        self._total += self._class_rates[new_class] - self._class_rates[old_class]

    def _apply(self, site: int, target: int):
        old = self._states[site]
        self._states[site] = target
        self._move(site, (target + 1) * (N_SLOTS + 1) + self._ones[site])
        delta = (target == 1) - (old == 1)
        if delta:
            self.n_ones += delta
            states, ones = self._states, self._ones
            for y in self._reverse[site]:
                ones[y] += delta
                self._move(y, (states[y] + 1) * (N_SLOTS + 1) + ones[y])
        if self._occupation is not None:
            self._code += (target - old) * self._weights[site]

    def audit(self) -> float:
        """Rebuild class membership and the total rate from scratch.

        Raises PropensityDriftError if any site sits in the wrong class; returns
        the floating-point drift of the maintained total and resets it.
        """
        expected = site_classes(self.configuration()).tolist()
        if expected != self._class:
            bad = next(i for i, (a, b) in enumerate(zip(expected, self._class)) if a != b)
            raise PropensityDriftError(
                f"Site {bad} is in class {self._class[bad]}, expected {expected[bad]}"
            )
        exact = self._recompute_total()
        drift = self._total - exact
        self._total = exact
        self._since_audit = 0
        return drift

    # === Dynamics ===
    def _select(self) -> Optional[Event]:
        u = self.rng.random() * self._total
        acc = 0.0
        chosen = -1
        for c in range(N_CLASSES):
            weight = len(self._buckets[c]) * self._class_rates[c]
            if weight <= 0:
                continue
            chosen = c
            acc += weight
            if u < acc:
                break
        if chosen < 0:
            return None
        bucket = self._buckets[chosen]
        site = bucket[min(int(self.rng.random() * len(bucket)), len(bucket) - 1)]
        transitions = self._table.transitions[chosen]
        target = transitions[-1][0]
        if len(transitions) > 1:
            v = self.rng.random() * self._class_rates[chosen]
            run = 0.0
            for candidate, rate in transitions:
                run += rate
                if v < run:
                    target = candidate
                    break
        old = self._states[site]
        self._apply(site, target)
        return Event(site, old, target, self.time)

    def _is_absorbed(self) -> bool:
        if self._total > _ABSORPTION_RECHECK:
            return False
        self._total = self._recompute_total()
        return self._total <= 0.0

    def _accumulate(self, dt: float):
        self.ones_time += self.n_ones * dt
        self.measured_time += dt
        if self._occupation is not None:
            self._occupation[self._code] = self._occupation.get(self._code, 0.0) + dt

    def step(self) -> Optional[float]:
        """Fire one event; returns its waiting time, or None when absorbed."""
        if self._is_absorbed():
            return None
        dt = self.rng.standard_exponential() / self._total
        self._accumulate(dt)
        self.time += dt
        self._fire()
        return dt

    def _fire(self) -> Optional[Event]:
        event = self._select()
        self.event_count += 1
        self._since_audit += 1
        if self._since_audit >= self.audit_interval:
            drift = self.audit()
            self.logger.debug("Propensity audit at %d events, drift %.3e", self.event_count, drift)
        return event

    def advance(self, until: float) -> int:
        """Simulate up to time `until`. The pending exponential clock is discarded
        at `until`, which is exact by memorylessness."""
        fired = 0
        while True:
            if self._is_absorbed():
                self._accumulate(until - self.time)
                self.time = until
                return fired
            dt = self.rng.standard_exponential() / self._total
            if self.time + dt >= until:
                self._accumulate(until - self.time)
                self.time = until
                return fired
            self._accumulate(dt)
            self.time += dt
            self._fire()
            fired += 1

    def reset_accumulators(self):
        self.ones_time = 0.0
        self.measured_time = 0.0
        if self._occupation is not None:
            self._occupation = {}

    def time_average_density(self) -> float:
        if self.measured_time <= 0:
            return self.density()
        return self.ones_time / (self.measured_time * self.geometry.n_sites)

    @property
    def occupation(self) -> Optional[Dict[int, float]]:
        return None if self._occupation is None else dict(self._occupation)

    def density(self) -> float:
        return self.n_ones / self.geometry.n_sites

    def configuration(self) -> Configuration:
        return Configuration(self.geometry, np.asarray(self._states, dtype=np.int8))


def step(config: Configuration, rates: RateSet,
         rng: np.random.Generator) -> Union[StepResult, Absorbed]:
    """One exact transition from `config`; `config` itself is not modified."""
    engine = GillespieEngine(config, rates, rng)
    if engine._is_absorbed():
        return Absorbed(config.copy())
    dt = engine.rng.standard_exponential() / engine.total_rate
    engine.time = dt
    event = engine._select()
    return StepResult(engine.configuration(), dt, event)


def sample_times_for(horizon: float, sample_dt: Optional[float]) -> np.ndarray:
    if sample_dt is None or sample_dt <= 0:
        return np.array([0.0, horizon]) if horizon > 0 else np.array([0.0])
    count = int(math.floor(horizon / sample_dt + 1e-9))
    return np.arange(count + 1) * sample_dt


def run(config: Configuration, schedule: Union[RateSchedule, RateSet], horizon: float,
        rng: np.random.Generator, sample_dt: Optional[float] = None,
        track_occupation: bool = False) -> SimResult:
    """Exact trajectory under a piecewise-constant schedule, density sampled every sample_dt."""
    if horizon < 0 or math.isnan(horizon):
        raise ParameterError(f"Horizon must be >= 0, got {horizon}")
    if isinstance(schedule, RateSet):
        schedule = RateSchedule.constant(schedule)

    times = sample_times_for(horizon, sample_dt)
    trace = np.empty(times.size)
    cell = 0
    engine = GillespieEngine(config, schedule.rates_for_cell(cell), rng,
                             track_occupation=track_occupation)
    next_cell_at = math.inf if schedule.is_constant else schedule.dt_grid

    k = 0
    t = 0.0
    while True:
        while k < times.size and times[k] <= t + 1e-12:
            trace[k] = engine.density()
            k += 1
        if t >= horizon:
            break
        target = min(horizon, next_cell_at, times[k] if k < times.size else math.inf)
        engine.advance(target)
        t = target
        if t >= next_cell_at:
            cell += 1
            engine.set_rates(schedule.rates_for_cell(cell))
            next_cell_at = (cell + 1) * schedule.dt_grid if cell + 1 < schedule.n_cells else math.inf

    return SimResult(
        final=engine.configuration(),
        event_count=engine.event_count,
        elapsed=t,
        sample_times=times,
        density_trace=trace,
        occupation=engine.occupation,
    )
