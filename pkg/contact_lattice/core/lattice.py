# core/lattice.py

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from functools import cached_property
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from contact_lattice.core.exceptions import GeometryError, ParameterError

Site = Tuple[int, int]


class SiteState(IntEnum):
    """Per-site state. The integer order -1 < 0 < 1 is the order monotonicity uses."""
    DEGRADED = -1
    EMPTY = 0
    OCCUPIED = 1


class Direction(Enum):
    """Incoming neighbour slots. A slot names the side the neighbour sits on."""
    LEFT = "left"
    RIGHT = "right"
    UP = "up"
    DOWN = "down"


# Slot order is fixed; arrow symbols and neighbour tables index into it.
DIRECTIONS: Tuple[Direction, ...] = (Direction.LEFT, Direction.RIGHT, Direction.UP, Direction.DOWN)
_OFFSETS = {
    Direction.LEFT: (-1, 0),
    Direction.RIGHT: (1, 0),
    Direction.UP: (0, -1),
    Direction.DOWN: (0, 1),
}

# Neighbour-table entry for a slot that points outside a rectangle.
EXTERIOR = -1


class GeometryKind(Enum):
    TORUS = "torus"
    RECTANGLE = "rectangle"


@dataclass(frozen=True)
class Geometry:
    """Finite 2-D lattice. Sites are (x, y) with row-major index y * width + x."""
    kind: GeometryKind
    width: int
    height: int
    boundary_state: SiteState = SiteState.EMPTY

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise GeometryError(f"Lattice must have positive size, got {self.width}x{self.height}")
        if self.kind == GeometryKind.TORUS and (self.width < 2 or self.height < 2):
            raise GeometryError(
                f"Torus needs width >= 2 and height >= 2, got {self.width}x{self.height}"
            )
        object.__setattr__(self, "boundary_state", SiteState(int(self.boundary_state)))

    @classmethod
    def torus(cls, width: int, height: Optional[int] = None) -> "Geometry":
        return cls(GeometryKind.TORUS, width, width if height is None else height)

    @classmethod
    def rectangle(cls, width: int, height: Optional[int] = None,
                  boundary_state: int = SiteState.EMPTY) -> "Geometry":
        return cls(GeometryKind.RECTANGLE, width, width if height is None else height,
                   SiteState(int(boundary_state)))

    @property
    def n_sites(self) -> int:
        return self.width * self.height

    @property
    def is_torus(self) -> bool:
        return self.kind == GeometryKind.TORUS

    def contains(self, site: Site) -> bool:
        x, y = site
        return 0 <= x < self.width and 0 <= y < self.height

    def index(self, site: Site) -> int:
        if not self.contains(site):
            raise GeometryError(f"Site {site} outside {self.width}x{self.height} {self.kind.value}")
        x, y = site
        return y * self.width + x

    def site(self, index: int) -> Site:
        if not 0 <= index < self.n_sites:
            raise GeometryError(f"Site index {index} outside lattice of {self.n_sites} sites")
        return index % self.width, index // self.width

    def distance(self, a: Site, b: Site) -> int:
        """Graph distance; wraps on a torus."""
        dx = abs(a[0] - b[0])
        dy = abs(a[1] - b[1])
        if self.is_torus:
            dx = min(dx, self.width - dx)
            dy = min(dy, self.height - dy)
        return dx + dy

    @cached_property
    def neighbor_table(self) -> np.ndarray:
        """(n_sites, 4) array of neighbour indices per slot, EXTERIOR outside a rectangle."""
        table = np.empty((self.n_sites, 4), dtype=np.int64)
        for index in range(self.n_sites):
            x, y = index % self.width, index // self.width
            for slot, direction in enumerate(DIRECTIONS):
                dx, dy = _OFFSETS[direction]
                nx, ny = x + dx, y + dy
                if self.is_torus:
                    table[index, slot] = (ny % self.height) * self.width + (nx % self.width)
                elif 0 <= nx < self.width and 0 <= ny < self.height:
                    table[index, slot] = ny * self.width + nx
                else:
                    table[index, slot] = EXTERIOR
        table.setflags(write=False)
        return table

    @cached_property
    def reverse_table(self) -> Tuple[Tuple[int, ...], ...]:
        """For each site, the sites whose incoming slots point at it, with multiplicity."""
        reverse: List[List[int]] = [[] for _ in range(self.n_sites)]
        for target, row in enumerate(self.neighbor_table.tolist()):
            for source in row:
                if source != EXTERIOR:
                    reverse[source].append(target)
        return tuple(tuple(r) for r in reverse)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "width": self.width,
            "height": self.height,
            "boundary_state": int(self.boundary_state),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Geometry":
        return cls(
            GeometryKind(data["kind"]),
            int(data["width"]),
            int(data["height"]),
            SiteState(int(data.get("boundary_state", 0))),
        )


def neighbors(geometry: Geometry, site: Site) -> List[Tuple[Direction, Optional[Site]]]:
    """The 4 incoming slots of `site`. Rectangle slots leaving the region map to None,
    which callers resolve to `geometry.boundary_state`."""
    index = geometry.index(site)
    result = []
    for slot, direction in enumerate(DIRECTIONS):
        source = int(geometry.neighbor_table[index, slot])
        result.append((direction, None if source == EXTERIOR else geometry.site(source)))
    return result


@dataclass(eq=False)
class Configuration:
    """Dense row-major array of site states over a geometry."""
    geometry: Geometry
    states: np.ndarray = field(repr=False)

    def __post_init__(self):
        states = np.asarray(self.states, dtype=np.int8).reshape(-1)
        if states.shape[0] != self.geometry.n_sites:
            raise GeometryError(
                f"Configuration has {states.shape[0]} states, geometry needs {self.geometry.n_sites}"
            )
        if states.size and (states.min() < -1 or states.max() > 1):
            raise ParameterError("Site states must lie in {-1, 0, 1}")
        self.states = states

    # === Constructors ===
    @classmethod
    def full(cls, geometry: Geometry, state: int = SiteState.OCCUPIED) -> "Configuration":
        return cls(geometry, np.full(geometry.n_sites, int(state), dtype=np.int8))

    @classmethod
    def from_grid(cls, geometry: Geometry, rows: Sequence[Sequence[int]]) -> "Configuration":
        """Rows are indexed by y, columns by x."""
        grid = np.asarray(rows, dtype=np.int8)
        if grid.shape != (geometry.height, geometry.width):
            raise GeometryError(
                f"Grid shape {grid.shape} does not match {geometry.height}x{geometry.width}"
            )
        return cls(geometry, grid.reshape(-1))

    @classmethod
    def random(cls, geometry: Geometry, probabilities: Sequence[float],
               rng: np.random.Generator) -> "Configuration":
        """I.i.d. sites with P(-1), P(0), P(1) = probabilities."""
        probs = np.asarray(probabilities, dtype=float)
        if probs.shape != (3,) or np.any(probs < 0) or not np.isclose(probs.sum(), 1.0):
            raise ParameterError(f"Need three nonnegative probabilities summing to 1, got {probabilities}")
        draws = rng.choice(np.array([-1, 0, 1], dtype=np.int8), size=geometry.n_sites, p=probs)
        return cls(geometry, draws)

    # === Access ===
    def __getitem__(self, site: Site) -> SiteState:
        return SiteState(int(self.states[self.geometry.index(site)]))

    def grid(self) -> np.ndarray:
        return self.states.reshape(self.geometry.height, self.geometry.width)

    def copy(self) -> "Configuration":
        return Configuration(self.geometry, self.states.copy())

    def density(self) -> float:
        """Fraction of sites in state 1."""
        return float(np.count_nonzero(self.states == 1)) / self.geometry.n_sites

    def count(self, state: int) -> int:
        return int(np.count_nonzero(self.states == int(state)))

    # === Partial order ===
    def _check_comparable(self, other: "Configuration"):
        if not isinstance(other, Configuration):
            return NotImplemented
        if other.geometry != self.geometry:
            raise GeometryError("Configurations on different geometries are not comparable")
        return None

    def __le__(self, other: "Configuration") -> bool:
        if self._check_comparable(other) is NotImplemented:
            return NotImplemented
        return bool(np.all(self.states <= other.states))

    def __ge__(self, other: "Configuration") -> bool:
        if self._check_comparable(other) is NotImplemented:
            return NotImplemented
        return bool(np.all(self.states >= other.states))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.geometry == other.geometry and bool(np.array_equal(self.states, other.states))

    __hash__ = None

    def first_violation(self, other: "Configuration") -> Optional[int]:
        """Index of the first site where self > other, or None when self <= other."""
        self._check_comparable(other)
        bad = np.flatnonzero(self.states > other.states)
        return int(bad[0]) if bad.size else None

    def to_dict(self) -> Dict[str, Any]:
        return {"geometry": self.geometry.to_dict(), "states": self.states.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Configuration":
        return cls(Geometry.from_dict(data["geometry"]), np.asarray(data["states"], dtype=np.int8))


def ones_neighbor_counts(config: Configuration) -> np.ndarray:
    """Number of incoming slots holding a 1, per site (exterior slots use the boundary state)."""
    table = config.geometry.neighbor_table
    padded = np.append(config.states, np.int8(config.geometry.boundary_state))
    # EXTERIOR == -1 picks the appended boundary entry
    return np.count_nonzero(padded[table] == 1, axis=1)


def iter_sites(geometry: Geometry) -> Iterable[Site]:
    for y in range(geometry.height):
        for x in range(geometry.width):
            yield x, y
