# harness/sharpness.py
"""Tail classification and finite-size decisions across a q grid.

With `coupled=True` every chain draws one graphical timeline and replays it
at each q from the all-1 state, so snapshots taken at the same time are
ordered in q and so are their crossing events. Otherwise each q gets its own
Gillespie chains.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from contact_lattice.core.exceptions import ParameterError
from contact_lattice.core.lattice import Configuration, Geometry, SiteState
from contact_lattice.core.rates import QParameterization, RateSet
from contact_lattice.dynamics.stationary import sample_stationary_configs
from contact_lattice.graphical.replay import replay_snapshots
from contact_lattice.graphical.timeline import Region, build_coupled
from contact_lattice.percolation.clusters import label_clusters
from contact_lattice.percolation.crossing import crossing_samples
from contact_lattice.percolation.finite_size import (
    DEFAULT_EPS_HAT, Decision, FiniteSizeDecision, decision_inversions, finite_size_check,
)
from contact_lattice.percolation.tails import (
    MIN_SAMPLES, R_SQUARED_EXPONENTIAL, TailClass, TailEstimate, tail_estimate,
)
from contact_lattice.utils.parallel import map_tasks
from contact_lattice.utils.rng import derive_stream, spawn_seed

logger = logging.getLogger(__name__)

TOP_SCALE = 16


@dataclass(frozen=True)
class SnapshotPlan:
    burn_in: float
    per_chain: int
    spacing: float

    @property
    def times(self) -> np.ndarray:
        return self.burn_in + self.spacing * np.arange(1, self.per_chain + 1)


def coupled_snapshots(base: QParameterization, q_grid: Sequence[float], geometry: Geometry,
                      plan: SnapshotPlan, rng: np.random.Generator) -> List[List[Configuration]]:
    """Snapshots per q from one shared timeline, all started from all-1."""
    times = plan.times
    timeline = build_coupled(Region(geometry, 0.0, float(times[-1])), base, rng)
    full = Configuration.full(geometry, SiteState.OCCUPIED)
    return [replay_snapshots(timeline, q, full, times) for q in q_grid]


def _chain(task) -> List[List[Configuration]]:
    base, q_grid, geometry, plan, coupled, seed, chain = task
    if coupled:
        return coupled_snapshots(base, q_grid, geometry, plan, derive_stream(seed, chain, "sharpness"))
    return [sample_stationary_configs(base.at(q).rates, geometry, plan.burn_in, plan.per_chain,
                                      plan.spacing, derive_stream(seed, chain, "sharpness", k))
            for k, q in enumerate(q_grid)]


@dataclass
class SharpnessPoint:
    q: float
    density: float
    tail: TailEstimate
    decisions: Dict[int, FiniteSizeDecision]

    def rows(self) -> List[Dict[str, object]]:
        fit = self.tail.fit
        rows = []
        for n, decision in sorted(self.decisions.items()):
            rows.append({
                "q": self.q,
                "density": self.density,
                "tail_class": self.tail.classification.value,
                "tail_degenerate": self.tail.degenerate,
                "exponential_rate": None if fit is None else fit.rate,
                "r_squared": None if fit is None else fit.r_squared,
                "n": n,
                "decision": decision.decision.value,
                "p_vertical": decision.p_vertical,
                "p_horizontal": decision.p_horizontal,
            })
        return rows


@dataclass
class SharpnessReport:
    q_grid: List[float]
    n_list: List[int]
    points: List[SharpnessPoint]
    coupled: bool = True
    inversions: Dict[int, List[Tuple[float, float]]] = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return not any(self.inversions.values())

    def decision_profile(self, n: int) -> List[Decision]:
        return [p.decisions[n].decision for p in self.points]

    def lowest_active(self) -> Optional[SharpnessPoint]:
        """Point at the smallest q with nonzero density."""
        return next((p for p in self.points if p.density > 0), None)

    def exponential_onset(self, min_r_squared: float = R_SQUARED_EXPONENTIAL) -> bool:
        """Tail at the lowest active q classifies Exponential with a good enough fit."""
        point = self.lowest_active()
        if point is None or point.tail.fit is None:
            return False
        return (point.tail.classification == TailClass.EXPONENTIAL
                and point.tail.fit.r_squared >= min_r_squared)

    def top_scale(self, n: int = TOP_SCALE) -> int:
        """`n` when scanned, otherwise the largest scanned scale."""
        return n if n in self.n_list else max(self.n_list)

    def supercritical_top(self, n: int = TOP_SCALE) -> bool:
        return self.points[-1].decisions[self.top_scale(n)].decision == Decision.SUPERCRITICAL

    def acceptance(self, n: int = TOP_SCALE) -> Dict[str, object]:
        onset = self.lowest_active()
        checks = {
            "consistent": self.consistent,
            "exponential_onset": self.exponential_onset(),
            "onset_q": None if onset is None else onset.q,
            "supercritical_top": self.supercritical_top(n),
            "top_scale": self.top_scale(n),
        }
        checks["passed"] = bool(checks["consistent"] and checks["exponential_onset"]
                                and checks["supercritical_top"])
        return checks

    def rows(self) -> List[Dict[str, object]]:
        return [row for p in self.points for row in p.rows()]

    def to_dict(self) -> dict:
        return {
            "q_grid": self.q_grid,
            "n_list": self.n_list,
            "coupled": self.coupled,
            "consistent": self.consistent,
            "acceptance": self.acceptance(),
            "inversions": {str(n): [list(pair) for pair in pairs] for n, pairs in self.inversions.items()},
            "points": [{"q": p.q, "density": p.density, "tail": p.tail.to_dict(),
                        "decisions": {str(n): d.to_dict() for n, d in p.decisions.items()}}
                       for p in self.points],
        }


def sharpness_scan(base: Union[QParameterization, RateSet], q_grid: Sequence[float], geometry: Geometry,
                   n_list: Sequence[int], samples: int, rng: np.random.Generator,
                   n_grid: Optional[Sequence[int]] = None, eps_hat: float = DEFAULT_EPS_HAT,
                   confidence: float = 0.95, burn_in: float = 50.0, spacing: float = 5.0,
                   chains: int = 8, coupled: bool = True, workers: int = 1,
                   min_samples: int = MIN_SAMPLES) -> SharpnessReport:
    """For each q: stationary snapshots, tail estimate of the origin cluster and the
    finite-size decision at every n, plus the ordering check of decisions in q."""
    if isinstance(base, RateSet):
        if not base.is_rescaled():
            raise ParameterError(f"Base rates must be rescaled, total line rate is {base.total_line_rate}")
        base = QParameterization(base, 0.0)
    grid = [float(q) for q in q_grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ParameterError("q_grid must be a nonempty increasing sequence")
    if not n_list:
        raise ParameterError("n_list must name at least one scale")
    for n in n_list:
        if 3 * n > geometry.width or n > geometry.height:
            raise ParameterError(f"Scale n={n} needs a lattice at least {3 * n}x{n}")
    if samples < 1 or chains < 1:
        raise ParameterError("Need samples >= 1 and chains >= 1")
    if n_grid is None:
        n_grid = [2 ** k for k in range(int(math.log2(geometry.n_sites)) + 1)]

    chains = min(chains, samples)
    plan = SnapshotPlan(burn_in, int(math.ceil(samples / chains)), spacing)
    seed = spawn_seed(rng)
    tasks = [(base, grid, geometry, plan, coupled, seed, c) for c in range(chains)]
    per_chain = map_tasks(_chain, tasks, workers)

    points = []
    for k, q in enumerate(grid):
        configs = [cfg for chain in per_chain for cfg in chain[k]][:samples]
        reports = [label_clusters(cfg) for cfg in configs]
        tail = tail_estimate(reports, n_grid, confidence, min_samples)
        decisions = {n: finite_size_check(crossing_samples(configs, n), n, eps_hat, confidence)
                     for n in n_list}
        density = float(np.mean([cfg.density() for cfg in configs]))
        points.append(SharpnessPoint(q, density, tail, decisions))
        logger.info("q=%.4g: density %.4f, tail %s, decisions %s", q, density,
                    tail.classification.value, {n: d.decision.value for n, d in decisions.items()})

    report = SharpnessReport(grid, list(n_list), points, coupled)
    for n in n_list:
        bad = decision_inversions(report.decision_profile(n))
        report.inversions[n] = [(grid[i], grid[j]) for i, j in bad]
        if bad:
            logger.warning("Decision inversions at n=%d: %s", n, report.inversions[n])
    return report
