# graphical/replay.py

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from contact_lattice.core.exceptions import ParameterError, TimelineError
from contact_lattice.core.lattice import EXTERIOR, Configuration, Geometry, Site
from contact_lattice.core.rates import Model
from contact_lattice.graphical.symbols import A1_BASE, A2_BASE, D1, D2, U1, U2, resolve_codes
from contact_lattice.graphical.timeline import GraphicalTimeline

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Boundary:
    """Sites held at fixed states for the whole replay, keyed by site index."""
    pinned: Dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_sites(cls, geometry: Geometry, sites: Iterable[Site], state: int) -> "Boundary":
        return cls({geometry.index(s): int(state) for s in sites})


class _Interpreter:
    """Applies resolved symbols to a state vector in place."""

    def __init__(self, geometry: Geometry, model: Model, states: List[int],
                 pinned: Optional[Dict[int, int]] = None):
        self.states = states
        self.neighbors = geometry.neighbor_table.tolist()
        self.boundary_state = int(geometry.boundary_state)
        self.model_b = model == Model.B
        self.pinned = pinned or {}
        for site, value in self.pinned.items():
            self.states[site] = value

    def apply(self, site: int, code: int) -> bool:
        """Apply one symbol; True when the site changed."""
        if site in self.pinned:
            return False
        s = self.states[site]
        if code == D1:
            new = 0 if s == 1 else s
        elif code == D2:
            new = -1 if (self.model_b or s == 0) else s
        elif code == U1:
            new = 1 if s == 0 else s
        elif code == U2:
            new = 0 if s == -1 else s
        else:
            source = self.neighbors[site][(code - A1_BASE) % 4]
            source_state = self.boundary_state if source == EXTERIOR else self.states[source]
            if source_state != 1:
                return False
            if code < A2_BASE:
                new = 1 if s == 0 else s
            else:
                new = 0 if s == -1 else s
        if new == s:
            return False
        self.states[site] = new
        return True

    def run(self, sites: Sequence[int], codes: Sequence[int]):
        apply = self.apply
        for site, code in zip(sites, codes):
            apply(site, code)


def _window(timeline: GraphicalTimeline, start: Optional[float], until: Optional[float]):
    region = timeline.region
    start = region.t_start if start is None else float(start)
    until = region.t_end if until is None else float(until)
    if start < region.t_start or until > region.t_end or until < start:
        raise TimelineError(
            f"Window [{start}, {until}] not covered by timeline [{region.t_start}, {region.t_end}]"
        )
    return start, until


def _resolve_model(timeline: GraphicalTimeline, model: Optional[Model]) -> Model:
    model = timeline.base.model if model is None else Model(model)
    if model == Model.B and timeline.base.lam_tilde > 0:
        raise ParameterError("Model B replay of a timeline that carries A2 symbols")
    return model


def replay(timeline: GraphicalTimeline, q: float, initial: Configuration,
           boundary: Optional[Boundary] = None, model: Optional[Model] = None,
           start: Optional[float] = None, until: Optional[float] = None) -> Configuration:
    """State at `until` after applying, in (time, site, type) order, every symbol
    with start < time <= until (symbols exactly at the region start also count)."""
    if initial.geometry != timeline.geometry:
        raise TimelineError("Initial configuration is not defined on the timeline's region")
    start, until = _window(timeline, start, until)
    model = _resolve_model(timeline, model)
    pinned = dict(boundary.pinned) if boundary else {}
    for site in pinned:
        timeline.geometry.site(site)

    resolved = timeline.resolve(q)
    lower = start if start > timeline.region.t_start else -np.inf
    mask = (resolved.times > lower) & (resolved.times <= until)
    interpreter = _Interpreter(timeline.geometry, model, initial.states.astype(int).tolist(), pinned)
    interpreter.run(resolved.sites[mask].tolist(), resolved.codes[mask].tolist())
    return Configuration(timeline.geometry, np.asarray(interpreter.states, dtype=np.int8))


def replay_snapshots(timeline: GraphicalTimeline, q: float, initial: Configuration,
                     times: Sequence[float], boundary: Optional[Boundary] = None,
                     model: Optional[Model] = None) -> List[Configuration]:
    """States at each of the nondecreasing `times`, replayed from the region start.

    Same result as chaining `replay` over [t_start, times[0]], [times[0], times[1]], ...
    but the timeline is resolved at q only once.
    """
    if initial.geometry != timeline.geometry:
        raise TimelineError("Initial configuration is not defined on the timeline's region")
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        return []
    if np.any(np.diff(times) < 0):
        raise TimelineError("Snapshot times must be nondecreasing")
    _window(timeline, None, float(times[0]))
    _window(timeline, None, float(times[-1]))
    model = _resolve_model(timeline, model)
    pinned = dict(boundary.pinned) if boundary else {}
    for site in pinned:
        timeline.geometry.site(site)

    resolved = timeline.resolve(q)
    cuts = np.searchsorted(resolved.times, times, side="right")
    sites, codes = resolved.sites.tolist(), resolved.codes.tolist()
    interpreter = _Interpreter(timeline.geometry, model, initial.states.astype(int).tolist(), pinned)
    snapshots, done = [], 0
    for cut in cuts.tolist():
        interpreter.run(sites[done:cut], codes[done:cut])
        done = cut
        snapshots.append(Configuration(timeline.geometry, np.asarray(interpreter.states, dtype=np.int8)))
    return snapshots


@dataclass
class CouplingReport:
    ordered: bool
    violation_site: Optional[int] = None
    violation_time: Optional[float] = None
    events_checked: int = 0

    def to_dict(self) -> dict:
        return {
            "ordered": self.ordered,
            "violation_site": self.violation_site,
            "violation_time": self.violation_time,
            "events_checked": self.events_checked,
        }


def run_coupled(geometry: Geometry, model: Model, xi_low: Configuration, xi_high: Configuration,
                sites: np.ndarray, times: np.ndarray, low_codes: np.ndarray,
                high_codes: np.ndarray, low_active: Optional[np.ndarray] = None,
                high_active: Optional[np.ndarray] = None) -> CouplingReport:
    """Replay two processes over one symbol sequence, checking low <= high at the
    touched site after every symbol. Inactive symbols are skipped by that process."""
    if not xi_low <= xi_high:
        raise ParameterError("Initial configurations are not ordered: xi_low <= xi_high fails")
    n = sites.size
    low_active = np.ones(n, bool) if low_active is None else low_active
    high_active = np.ones(n, bool) if high_active is None else high_active
    low = _Interpreter(geometry, model, xi_low.states.astype(int).tolist())
    high = _Interpreter(geometry, model, xi_high.states.astype(int).tolist())
    lo_states, hi_states = low.states, high.states
    checked = 0
    for site, t, cl, ch, al, ah in zip(sites.tolist(), times.tolist(), low_codes.tolist(),
                                       high_codes.tolist(), low_active.tolist(), high_active.tolist()):
        if al:
            low.apply(site, cl)
        if ah:
            high.apply(site, ch)
        checked += 1
        if lo_states[site] > hi_states[site]:
            logger.warning("Ordering violated at site %d, time %.6f", site, t)
            return CouplingReport(False, site, t, checked)
    return CouplingReport(True, None, None, checked)


def couple_monotone(timeline: GraphicalTimeline, q_low: float, q_high: float,
                    xi_low: Configuration, xi_high: Configuration,
                    horizon: Optional[float] = None, model: Optional[Model] = None) -> CouplingReport:
    """Replay q_low from xi_low and q_high from xi_high on the same symbols and
    check the pathwise order after every symbol."""
    if not q_low <= q_high:
        raise ParameterError(f"Need q_low <= q_high, got {q_low} > {q_high}")
    if xi_low.geometry != timeline.geometry or xi_high.geometry != timeline.geometry:
        raise TimelineError("Initial configurations are not defined on the timeline's region")
    region = timeline.region
    until = region.t_end if horizon is None else region.t_start + float(horizon)
    _window(timeline, None, until)
    model = _resolve_model(timeline, model)

    base = timeline.base
    low_codes = resolve_codes(timeline.q_marks, timeline.b_marks, timeline.g_marks, q_low, base)
    high_codes = resolve_codes(timeline.q_marks, timeline.b_marks, timeline.g_marks, q_high, base)
    keep = timeline.times <= until
    return run_coupled(timeline.geometry, model, xi_low, xi_high, timeline.sites[keep],
                       timeline.times[keep], low_codes[keep], high_codes[keep])
