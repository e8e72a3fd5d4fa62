# percolation/crossing.py

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Tuple

import numpy as np
from scipy import ndimage

from contact_lattice.core.exceptions import GeometryError
from contact_lattice.core.lattice import Configuration

Rect = Tuple[int, int, int, int]


class CrossingDirection(Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


def window(config: Configuration, rect: Rect) -> np.ndarray:
    """Occupied mask of the cut-open window (x0, y0, width m, height n)."""
    x0, y0, m, n = rect
    geometry = config.geometry
    if m < 1 or n < 1 or x0 < 0 or y0 < 0 or x0 + m > geometry.width or y0 + n > geometry.height:
        raise GeometryError(f"Rectangle {rect} exceeds the {geometry.width}x{geometry.height} lattice")
    return config.grid()[y0:y0 + n, x0:x0 + m] == 1


def crossing(config: Configuration, rect: Rect, direction: CrossingDirection) -> bool:
    """Path of 1's inside the rectangle joining its left and right columns
    (HORIZONTAL) or its top and bottom rows (VERTICAL)."""
    mask = window(config, rect)
    labels, count = ndimage.label(mask)
    if count == 0:
        return False
    if CrossingDirection(direction) == CrossingDirection.HORIZONTAL:
        first, last = labels[:, 0], labels[:, -1]
    else:
        first, last = labels[0, :], labels[-1, :]
    common = np.intersect1d(first[first > 0], last[last > 0])
    return bool(common.size)


@dataclass
class CrossingSamples:
    """Indicator draws of V(3n, n) (top-bottom) and H(3n, n) (left-right) on
    windows 3n wide and n tall."""
    n: int
    vertical: np.ndarray
    horizontal: np.ndarray

    @property
    def trials(self) -> int:
        return int(self.vertical.size)

    def merged(self, other: "CrossingSamples") -> "CrossingSamples":
        return CrossingSamples(self.n, np.concatenate([self.vertical, other.vertical]),
                               np.concatenate([self.horizontal, other.horizontal]))


def crossing_samples(configs: Iterable[Configuration], n: int,
                     origin: Tuple[int, int] = (0, 0)) -> CrossingSamples:
    rect = (origin[0], origin[1], 3 * n, n)
    vertical, horizontal = [], []
    for config in configs:
        vertical.append(crossing(config, rect, CrossingDirection.VERTICAL))
        horizontal.append(crossing(config, rect, CrossingDirection.HORIZONTAL))
    return CrossingSamples(n, np.asarray(vertical, dtype=bool), np.asarray(horizontal, dtype=bool))
