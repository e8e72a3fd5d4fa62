# ddcp/trajectory.py
"""Trajectory solutions of the density-driven process.

The rates on grid cell j are (Lambda, H) of the density at the cell's left
endpoint. The horizon is cut into windows; on each window a Picard sweep
simulates every replica under the current schedule with the same random
streams (common random numbers), measures the cell densities and maps them
through the law. Sweeps repeat until the schedule stops changing. A window
whose sweep-to-sweep contraction factor stays at or above 0.5 is halved.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from contact_lattice.core.exceptions import ParameterError
from contact_lattice.core.lattice import Configuration, Geometry
from contact_lattice.core.rates import RateSet
from contact_lattice.ddcp.laws import DensityLaw
from contact_lattice.dynamics.engine import run
from contact_lattice.dynamics.schedule import RateSchedule
from contact_lattice.utils.parallel import map_tasks
from contact_lattice.utils.rng import derive_stream, spawn_seed
from contact_lattice.utils.stats import replica_mean

logger = logging.getLogger(__name__)

TRAJECTORY_SCHEMA_VERSION = 1
CONTRACTION_LIMIT = 0.5


@dataclass(frozen=True)
class InitialLaw:
    """Product law with P(-1), P(0), P(1) per site."""
    probabilities: Tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.shape != (3,) or np.any(p < 0) or not np.isclose(p.sum(), 1.0):
            raise ParameterError(f"Initial law needs three probabilities summing to 1, got {self.probabilities}")
        object.__setattr__(self, "probabilities", tuple(float(v) for v in p))

    @property
    def density(self) -> float:
        return self.probabilities[2]

    def sample(self, geometry: Geometry, rng: np.random.Generator) -> Configuration:
        return Configuration.random(geometry, self.probabilities, rng)


@dataclass
class TrajectorySolution:
    dt_grid: float
    grid: np.ndarray = field(repr=False)
    rho: np.ndarray = field(repr=False)
    lam: np.ndarray = field(repr=False)
    h: np.ndarray = field(repr=False)
    rho_half_width: np.ndarray = field(repr=False)
    residual: float = 0.0
    sweeps: int = 0
    converged: bool = True
    clamped: bool = False
    window_cells: List[int] = field(default_factory=list)
    sweeps_per_window: List[int] = field(default_factory=list)
    seed: Optional[int] = None
    params: Dict[str, Any] = field(default_factory=dict)

    def self_consistency(self, law: DensityLaw) -> float:
        """max over cells of |lam - Lambda(rho)| and |h - H(rho)|."""
        lam, h, _ = law.evaluate_many(self.rho)
        return float(max(np.abs(self.lam - lam).max(), np.abs(self.h - h).max()))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": TRAJECTORY_SCHEMA_VERSION,
            "grid_dt": self.dt_grid,
            "rho": self.rho.tolist(),
            "rho_half_width": self.rho_half_width.tolist(),
            "lambda": self.lam.tolist(),
            "h": self.h.tolist(),
            "residual": self.residual,
            "sweeps": self.sweeps,
            "converged": self.converged,
            "clamped": self.clamped,
            "window_cells": self.window_cells,
            "seed": self.seed,
            "params": self.params,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _simulate_window(task: Tuple[Configuration, RateSchedule, float, float, int, tuple]):
    config, schedule, horizon, dt_grid, seed, labels = task
    result = run(config, schedule, horizon, derive_stream(seed, *labels), sample_dt=dt_grid)
    return result.density_trace, result.final


def _sweep(starts: List[Configuration], schedule: RateSchedule, n_cells: int, dt_grid: float,
           seed: int, first_cell: int, workers: int):
    tasks = [(cfg, schedule, n_cells * dt_grid, dt_grid, seed, (i, "window", first_cell))
             for i, cfg in enumerate(starts)]
    outputs = map_tasks(_simulate_window, tasks, workers)
    traces = np.array([trace[:n_cells] for trace, _ in outputs])
    finals = [final for _, final in outputs]
    return traces, finals


def solve_trajectory(law: DensityLaw, fixed_rates: RateSet, initial: InitialLaw, geometry: Geometry,
                     horizon: float, replicas: int, tol: float, max_sweeps: int,
                     rng: np.random.Generator, dt_grid: float = 0.5,
                     window: Optional[float] = None, workers: int = 1,
                     master_seed: Optional[int] = None) -> TrajectorySolution:
    """Picard construction of (lam(t), h(t)) = (Lambda(rho(t)), H(rho(t))) on [0, horizon].

    `fixed_rates` supplies every rate except lam and h. The horizon is rounded
    up to whole grid cells. Non-convergence on a window is flagged on the
    result, not raised.
    """
    if not horizon > 0:
        raise ParameterError(f"Horizon must be positive, got {horizon}")
    if not dt_grid > 0 or replicas < 1 or max_sweeps < 1 or not tol > 0:
        raise ParameterError("Need dt_grid > 0, replicas >= 1, max_sweeps >= 1 and tol > 0")
    seed = spawn_seed(rng) if master_seed is None else int(master_seed)
    n_cells = int(math.ceil(horizon / dt_grid - 1e-9))
    window_cells = n_cells if window is None else max(1, int(round(window / dt_grid)))

    starts = [initial.sample(geometry, derive_stream(seed, i, "initial")) for i in range(replicas)]
    rho = np.zeros(n_cells)
    rho_hw = np.zeros(n_cells)
    lam = np.zeros(n_cells)
    h = np.zeros(n_cells)
    start_density = initial.density
    clamped = False
    converged = True
    worst_residual = 0.0
    total_sweeps = 0
    windows: List[int] = []
    sweeps_per_window: List[int] = []

    c0 = 0
    while c0 < n_cells:
        cells = min(window_cells, n_cells - c0)
        lam0, h0, flag = law.evaluate_many([start_density])
        clamped |= flag
        cur_lam = np.full(cells, lam0[0])
        cur_h = np.full(cells, h0[0])
        history: List[float] = []
        halved = False
        window_ok = False
        for sweep in range(1, max_sweeps + 1):
            schedule = RateSchedule.from_values(fixed_rates, dt_grid, cur_lam, cur_h)
            traces, finals = _sweep(starts, schedule, cells, dt_grid, seed, c0, workers)
            cell_rho = traces.mean(axis=0)
            new_lam, new_h, flag = law.evaluate_many(cell_rho)
            clamped |= flag
            residual = float(max(np.abs(new_lam - cur_lam).max(), np.abs(new_h - cur_h).max()))
            history.append(residual)
            total_sweeps += 1
            logger.debug("Window at cell %d (%d cells), sweep %d: residual %.3e", c0, cells, sweep, residual)
            if residual < tol:
                window_ok = True
                break
            if (len(history) >= 3 and cells > 1 and history[-2] > 0
                    and history[-1] / history[-2] >= CONTRACTION_LIMIT):
                window_cells = max(1, cells // 2)
                logger.debug("Contraction %.3f >= %.1f, halving window to %d cells",
                             history[-1] / history[-2], CONTRACTION_LIMIT, window_cells)
                halved = True
                break
            if sweep < max_sweeps:
                cur_lam, cur_h = new_lam, new_h
        if halved:
            continue
        if not window_ok:
            converged = False
            logger.warning("Window at cell %d did not converge in %d sweeps (residual %.3e)",
                           c0, max_sweeps, history[-1])

        _, half_width = replica_mean(traces, axis=0)
        rho[c0:c0 + cells] = cell_rho
        rho_hw[c0:c0 + cells] = half_width
        lam[c0:c0 + cells] = cur_lam
        h[c0:c0 + cells] = cur_h
        worst_residual = max(worst_residual, history[-1])
        windows.append(cells)
        sweeps_per_window.append(len(history))
        starts = finals
        start_density = float(np.mean([cfg.density() for cfg in finals]))
        c0 += cells

    if converged:
        logger.info("Trajectory converged: %d sweeps over %d windows, residual %.3e",
                    total_sweeps, len(windows), worst_residual)
    return TrajectorySolution(
        dt_grid=dt_grid,
        grid=np.arange(n_cells) * dt_grid,
        rho=rho,
        lam=lam,
        h=h,
        rho_half_width=rho_hw,
        residual=worst_residual,
        sweeps=total_sweeps,
        converged=converged,
        clamped=clamped,
        window_cells=windows,
        sweeps_per_window=sweeps_per_window,
        seed=seed,
        params={"law": law.to_dict(), "fixed_rates": fixed_rates.to_dict(),
                "geometry": geometry.to_dict(), "replicas": replicas, "tol": tol,
                "initial": list(initial.probabilities)},
    )
