# graphical/timeline.py

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from contact_lattice.core.exceptions import ParameterError, TimelineError
from contact_lattice.core.lattice import Direction, Geometry, Site
from contact_lattice.core.rates import QParameterization, RateSet
from contact_lattice.graphical.symbols import (
    SymbolType, decode, encode, label, marks_for_code, resolve_codes,
)

logger = logging.getLogger(__name__)

TIMELINE_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Region:
    """Space-time region: a geometry times the window [t_start, t_end]."""
    geometry: Geometry
    t_start: float
    t_end: float

    def __post_init__(self):
        if not self.t_end >= self.t_start:
            raise ParameterError(f"Empty time window [{self.t_start}, {self.t_end}]")

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class ResolvedTimeline:
    """Symbol types at one value of q, in replay order (time, site, type rank)."""
    q: float
    order: np.ndarray = field(repr=False)
    sites: np.ndarray = field(repr=False)
    times: np.ndarray = field(repr=False)
    codes: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return int(self.sites.size)

    def type_counts(self) -> Dict[str, int]:
        labels, counts = np.unique(self.codes, return_counts=True)
        return {label(c): int(n) for c, n in zip(labels, counts)}


@dataclass(eq=False)
class GraphicalTimeline:
    """Unit-rate Poisson symbols on every site line, each carrying uniforms (Q, B, G).

    The timeline does not fix symbol types: `resolve(q)` types it for any q, so
    one stored timeline couples the graphical representations of all q.
    """
    region: Region
    base: RateSet
    sites: np.ndarray = field(repr=False)
    times: np.ndarray = field(repr=False)
    q_marks: np.ndarray = field(repr=False)
    b_marks: np.ndarray = field(repr=False)
    g_marks: np.ndarray = field(repr=False)
    master_seed: Optional[int] = None

    def __post_init__(self):
        self.sites = np.asarray(self.sites, dtype=np.int64).reshape(-1)
        self.times = np.asarray(self.times, dtype=float).reshape(-1)
        self.q_marks = np.asarray(self.q_marks, dtype=float).reshape(-1)
        self.b_marks = np.asarray(self.b_marks, dtype=float).reshape(-1)
        self.g_marks = np.asarray(self.g_marks, dtype=float).reshape(-1)
        n = self.sites.size
        if not all(a.size == n for a in (self.times, self.q_marks, self.b_marks, self.g_marks)):
            raise TimelineError("Symbol arrays have inconsistent lengths")
        if not self.base.is_rescaled():
            self.base = self.base.rescaled()
        self.validate()

    def validate(self):
        if self.sites.size == 0:
            return
        n_sites = self.region.geometry.n_sites
        if self.sites.min() < 0 or self.sites.max() >= n_sites:
            raise TimelineError("Symbol at a site outside the region")
        if self.times.min() < self.region.t_start or self.times.max() > self.region.t_end:
            raise TimelineError("Symbol time outside the region's time window")
        keys = np.lexsort((self.sites, self.times))
        if not np.array_equal(keys, np.arange(self.sites.size)):
            raise TimelineError("Symbols must be sorted by (time, site)")

    def __len__(self) -> int:
        return int(self.sites.size)

    @property
    def geometry(self) -> Geometry:
        return self.region.geometry

    # === Construction ===
    @classmethod
    def from_symbols(cls, region: Region, base: RateSet, q: float,
                     symbols: Iterable[Tuple[Site, float, SymbolType, Optional[Direction]]]
                     ) -> "GraphicalTimeline":
        """Timeline whose symbols resolve at `q` to the given types."""
        base = base if base.is_rescaled() else base.rescaled()
        rows = []
        for site, time, symbol_type, direction in symbols:
            code = encode(symbol_type, direction)
            rows.append((region.geometry.index(site), float(time)) + marks_for_code(code, q, base))
        rows.sort(key=lambda r: (r[1], r[0]))
        arr = np.array(rows, dtype=float).reshape(-1, 5)
        return cls(region, base, arr[:, 0].astype(np.int64), arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4])

    # === Resolution ===
    def resolve(self, q: float) -> ResolvedTimeline:
        if not 0.0 <= q <= 1.0:
            raise ParameterError(f"q must lie in [0, 1], got {q}")
        codes = resolve_codes(self.q_marks, self.b_marks, self.g_marks, q, self.base)
        order = np.lexsort((codes, self.sites, self.times))
        return ResolvedTimeline(q, order, self.sites[order], self.times[order], codes[order])

    def symbols(self, q: float) -> List[Tuple[Site, float, SymbolType, Optional[Direction]]]:
        resolved = self.resolve(q)
        out = []
        for s, t, c in zip(resolved.sites.tolist(), resolved.times.tolist(), resolved.codes.tolist()):
            symbol_type, direction = decode(c)
            out.append((self.geometry.site(s), t, symbol_type, direction))
        return out

    def counts_per_site(self) -> np.ndarray:
        return np.bincount(self.sites, minlength=self.geometry.n_sites)

    # === Serialization ===
    def header(self) -> Dict[str, Any]:
        return {
            "schema_version": TIMELINE_SCHEMA_VERSION,
            "geometry": self.geometry.to_dict(),
            "t_start": self.region.t_start,
            "t_end": self.region.t_end,
            "base": self.base.to_dict(),
            "master_seed": self.master_seed,
        }

    def to_dict(self) -> Dict[str, Any]:
        xs = (self.sites % self.geometry.width).tolist()
        ys = (self.sites // self.geometry.width).tolist()
        records = [list(r) for r in zip(xs, ys, self.times.tolist(), self.q_marks.tolist(),
                                        self.b_marks.tolist(), self.g_marks.tolist())]
        return {"header": self.header(), "records": records}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GraphicalTimeline":
        header = data["header"]
        geometry = Geometry.from_dict(header["geometry"])
        region = Region(geometry, float(header["t_start"]), float(header["t_end"]))
        records = np.asarray(data["records"], dtype=float).reshape(-1, 6)
        sites = records[:, 1].astype(np.int64) * geometry.width + records[:, 0].astype(np.int64)
        return cls(region, RateSet.from_dict(header["base"]), sites, records[:, 2], records[:, 3],
                   records[:, 4], records[:, 5], header.get("master_seed"))

    def save(self, path: Union[str, Path]) -> Path:
        """`.json` writes the record list; any other suffix writes a flat .npz."""
        path = Path(path)
        if path.suffix == ".json":
            path.write_text(json.dumps(self.to_dict()), encoding="utf-8")
            return path
        xs = self.sites % self.geometry.width
        ys = self.sites // self.geometry.width
        records = np.stack([xs, ys, self.times, self.q_marks, self.b_marks, self.g_marks], axis=1)
        with open(path, "wb") as handle:
            np.savez(handle, header=json.dumps(self.header()), records=records)
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "GraphicalTimeline":
        path = Path(path)
        if path.suffix == ".json":
            return cls.from_dict(json.loads(path.read_text(encoding="utf-8")))
        with np.load(path, allow_pickle=False) as data:
            header = json.loads(str(data["header"]))
            return cls.from_dict({"header": header, "records": data["records"].tolist()})


def build_coupled(region: Region, base: Union[QParameterization, RateSet],
                  rng: np.random.Generator, master_seed: Optional[int] = None) -> GraphicalTimeline:
    """Unit-rate Poisson symbols per site line over the region, with independent
    uniform (Q, B, G) marks in (0, 1]."""
    rates = base.base if isinstance(base, QParameterization) else base
    geometry = region.geometry
    counts = rng.poisson(region.duration, size=geometry.n_sites)
    total = int(counts.sum())
    sites = np.repeat(np.arange(geometry.n_sites, dtype=np.int64), counts)
    times = region.t_start + rng.random(total) * region.duration
    marks = 1.0 - rng.random((3, total))
    order = np.lexsort((sites, times))
    logger.debug("Built coupled timeline: %d symbols on %d sites over %.3f", total,
                 geometry.n_sites, region.duration)
    return GraphicalTimeline(region, rates, sites[order], times[order], marks[0, order],
                             marks[1, order], marks[2, order], master_seed)
