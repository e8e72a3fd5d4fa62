# dynamics/schedule.py

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Sequence

import math

import numpy as np

from contact_lattice.core.exceptions import ParameterError
from contact_lattice.core.rates import RateSet


@dataclass(frozen=True)
class RateSchedule:
    """Piecewise-constant lam(t), h(t) on a uniform grid; other rates from `constants`.

    Cell j covers [j * dt_grid, (j + 1) * dt_grid). Times past the last cell
    keep the last value.
    """
    dt_grid: float
    lam_values: np.ndarray = field(repr=False)
    h_values: np.ndarray = field(repr=False)
    constants: RateSet

    def __post_init__(self):
        lam = np.asarray(self.lam_values, dtype=float).reshape(-1)
        h = np.asarray(self.h_values, dtype=float).reshape(-1)
        if not self.dt_grid > 0:
            raise ParameterError(f"dt_grid must be positive, got {self.dt_grid}")
        if lam.size == 0 or lam.shape != h.shape:
            raise ParameterError("lam and h schedules need the same nonzero length")
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(h))):
            raise ParameterError("Schedules must be bounded")
        if np.any(lam < 0) or np.any(h < 0):
            raise ParameterError("Schedules must be nonnegative")
        lam.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "lam_values", lam)
        object.__setattr__(self, "h_values", h)

    @classmethod
    def constant(cls, rates: RateSet) -> "RateSchedule":
        return cls(math.inf, np.array([rates.lam]), np.array([rates.h]), rates)

    @classmethod
    def from_values(cls, constants: RateSet, dt_grid: float, lam_values: Sequence[float],
                    h_values: Sequence[float]) -> "RateSchedule":
        return cls(dt_grid, np.asarray(lam_values, float), np.asarray(h_values, float), constants)

    @property
    def n_cells(self) -> int:
        return int(self.lam_values.size)

    @property
    def is_constant(self) -> bool:
        return math.isinf(self.dt_grid)

    def cell_of(self, t: float) -> int:
        if self.is_constant:
            return 0
        return min(int(math.floor(t / self.dt_grid)), self.n_cells - 1)

    def rates_for_cell(self, cell: int) -> RateSet:
        cell = min(max(cell, 0), self.n_cells - 1)
        return replace(self.constants, lam=float(self.lam_values[cell]), h=float(self.h_values[cell]))

    def rates_at(self, t: float) -> RateSet:
        return self.rates_for_cell(self.cell_of(t))

    def next_boundary(self, t: float) -> float:
        """First grid boundary strictly after t where the rates can change."""
        if self.is_constant:
            return math.inf
        cell = int(math.floor(t / self.dt_grid)) + 1
        if cell >= self.n_cells:
            return math.inf
        return cell * self.dt_grid

    def shifted(self, first_cell: int) -> "RateSchedule":
        """Schedule starting at cell `first_cell` (time origin moved there)."""
        if self.is_constant:
            return self
        return replace(self, lam_values=self.lam_values[first_cell:], h_values=self.h_values[first_cell:])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dt_grid": None if self.is_constant else self.dt_grid,
            "lambda": self.lam_values.tolist(),
            "h": self.h_values.tolist(),
            "constants": self.constants.to_dict(),
        }
