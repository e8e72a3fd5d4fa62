# graphical/boundary.py
"""Boundary-conditioned states and delta-discretized indicators.

For a site x and scale n let R = floor(sqrt(n)). The state eta^(q,n) at x is
obtained by starting every site of the diamond {d(x, y) < R} in state 1 at
time -sqrt(n), holding the rim {d(x, y) = R} at 1, and replaying the symbols
of the interior up to time 0.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from contact_lattice.core.exceptions import ParameterError, TimelineError
from contact_lattice.core.lattice import EXTERIOR, Geometry, Site, SiteState
from contact_lattice.core.rates import Model
from contact_lattice.graphical.replay import _Interpreter, _resolve_model
from contact_lattice.graphical.symbols import codes_for, label
from contact_lattice.graphical.timeline import GraphicalTimeline

logger = logging.getLogger(__name__)


def ball_radius(n: int) -> int:
    return math.isqrt(int(n))


def diamond(geometry: Geometry, x: Site, radius: int) -> Tuple[np.ndarray, np.ndarray]:
    """(interior, rim) site indices of the graph ball of `radius` around x."""
    cx, cy = x
    interior, rim = [], []
    for dy in range(-radius, radius + 1):
        span = radius - abs(dy)
        for dx in range(-span, span + 1):
            px, py = cx + dx, cy + dy
            if geometry.is_torus:
                px %= geometry.width
                py %= geometry.height
            index = geometry.index((px, py))
            (rim if abs(dx) + abs(dy) == radius else interior).append(index)
    return np.asarray(interior, dtype=np.int64), np.asarray(rim, dtype=np.int64)


def check_coverage(timeline: GraphicalTimeline, x: Site, n: int):
    """Raise TimelineError unless the timeline covers the ball of radius
    floor(sqrt(n)) around x over [-sqrt(n), 0] without self-overlap."""
    geometry = timeline.geometry
    radius = ball_radius(n)
    if not geometry.contains(x):
        raise TimelineError(f"Site {x} outside the timeline's region")
    if geometry.is_torus:
        if 2 * radius + 1 > geometry.width or 2 * radius + 1 > geometry.height:
            raise TimelineError(f"Ball of radius {radius} wraps a {geometry.width}x{geometry.height} torus")
    else:
        cx, cy = x
        if cx - radius < 0 or cy - radius < 0 or cx + radius >= geometry.width or cy + radius >= geometry.height:
            raise TimelineError(f"Ball of radius {radius} around {x} leaves the region")
    if timeline.region.t_start > -math.sqrt(n) or timeline.region.t_end < 0:
        raise TimelineError(
            f"Time window [{-math.sqrt(n):.4f}, 0] not covered by "
            f"[{timeline.region.t_start}, {timeline.region.t_end}]"
        )


def _eta(timeline: GraphicalTimeline, x: Site, q: float, n: int, model: Optional[Model],
         keep: Optional[np.ndarray] = None) -> SiteState:
    if n < 0:
        raise ParameterError(f"Scale n must be >= 0, got {n}")
    radius = ball_radius(n)
    if radius == 0:
        return SiteState.OCCUPIED
    check_coverage(timeline, x, n)
    model = _resolve_model(timeline, model)
    geometry = timeline.geometry
    interior, rim = diamond(geometry, x, radius)

    resolved = timeline.resolve(q)
    in_ball = np.zeros(geometry.n_sites, dtype=bool)
    in_ball[interior] = True
    mask = in_ball[resolved.sites] & (resolved.times > -math.sqrt(n)) & (resolved.times <= 0)
    if keep is not None:
        mask &= keep[resolved.order]

    states = [1] * geometry.n_sites
    interpreter = _Interpreter(geometry, model, states, {int(r): 1 for r in rim})
    interpreter.run(resolved.sites[mask].tolist(), resolved.codes[mask].tolist())
    return SiteState(states[geometry.index(x)])


def eta_qn(timeline: GraphicalTimeline, x: Site, q: float, n: int,
           model: Optional[Model] = None) -> SiteState:
    """State at (x, 0) under the all-1 boundary at distance floor(sqrt(n)) and time -sqrt(n)."""
    return _eta(timeline, x, q, n, model)


@dataclass
class Indicators:
    """0/1 array values[site, k - 1, type] for intervals (-k delta, (-k + 1) delta]
    measured back from the timeline's end time."""
    delta: float
    codes: List[int]
    values: np.ndarray = field(repr=False)

    @property
    def type_labels(self) -> List[str]:
        return [label(c) for c in self.codes]

    def total(self) -> int:
        return int(self.values.sum())

    def get(self, site: int, k: int, code: int) -> int:
        return int(self.values[site, k - 1, self.codes.index(code)])


def indicators(timeline: GraphicalTimeline, q: float, delta: float,
               model: Optional[Model] = None) -> Indicators:
    if not delta > 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    model = _resolve_model(timeline, model)
    codes = codes_for(model)
    region = timeline.region
    n_intervals = int(math.floor(region.duration / delta)) + 1
    values = np.zeros((timeline.geometry.n_sites, n_intervals, len(codes)), dtype=np.uint8)
    resolved = timeline.resolve(q)
    if len(resolved):
        k = np.floor((region.t_end - resolved.times) / delta).astype(np.int64)
        k = np.minimum(k, n_intervals - 1)
        column = np.searchsorted(np.asarray(codes), resolved.codes)
        values[resolved.sites, k, column] = 1
    return Indicators(delta, codes, values)


def _nearest_gap(query: np.ndarray, ref: np.ndarray) -> np.ndarray:
    if ref.size == 0:
        return np.full(query.size, np.inf)
    pos = np.searchsorted(ref, query)
    left = ref[np.clip(pos - 1, 0, ref.size - 1)]
    right = ref[np.clip(pos, 0, ref.size - 1)]
    return np.minimum(np.abs(query - left), np.abs(right - query))


def neighborhood_gaps(timeline: GraphicalTimeline) -> np.ndarray:
    """Per symbol: time to the nearest other symbol at its site or a neighbouring site."""
    geometry = timeline.geometry
    gaps = np.full(len(timeline), np.inf)
    if len(timeline) == 0:
        return gaps
    # timeline arrays are time-sorted, so each per-site slice is sorted too
    per_site = [np.flatnonzero(timeline.sites == s) for s in range(geometry.n_sites)]
    times = timeline.times
    table = geometry.neighbor_table.tolist()
    for s, members in enumerate(per_site):
        if members.size == 0:
            continue
        own = times[members]
        best = np.full(members.size, np.inf)
        if members.size > 1:
            diffs = np.diff(own)
            best[:-1] = np.minimum(best[:-1], diffs)
            best[1:] = np.minimum(best[1:], diffs)
        for u in set(table[s]) - {EXTERIOR, s}:
            best = np.minimum(best, _nearest_gap(own, times[per_site[u]]))
        gaps[members] = best
    return gaps


def min_neighborhood_gap(timeline: GraphicalTimeline) -> float:
    gaps = neighborhood_gaps(timeline)
    return float(gaps.min()) if gaps.size else math.inf


def implied_lower_bound(timeline: GraphicalTimeline, q: float, delta: float, x: Site, n: int,
                        model: Optional[Model] = None) -> SiteState:
    """Lower bound on eta_qn from the delta-discretized picture: every up symbol
    within delta of another symbol in its neighbourhood is dropped, the rest replayed."""
    if not delta > 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    resolved_up = timeline.q_marks <= q
    keep = ~(resolved_up & (neighborhood_gaps(timeline) <= delta))
    return _eta(timeline, x, q, n, model, keep)
