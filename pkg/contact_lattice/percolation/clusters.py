# percolation/clusters.py

import logging
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from contact_lattice.core.lattice import EXTERIOR, Configuration, Site
from contact_lattice.percolation.union_find import UnionFind

logger = logging.getLogger(__name__)

# slots RIGHT and DOWN; each nearest-neighbour pair is visited once from its left / upper end
_FORWARD_SLOTS = (1, 3)
_STEPS = ((-1, 0), (1, 0), (0, -1), (0, 1))


@dataclass
class ClusterReport:
    """Clusters of state-1 sites. labels[i] is -1 for sites not in state 1."""
    labels: np.ndarray = field(repr=False)
    sizes: np.ndarray = field(repr=False)
    origin_size: int
    wraps_x: bool = False
    wraps_y: bool = False
    origin_wraps: bool = False
    cluster_wraps: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def wraps(self) -> bool:
        return self.wraps_x or self.wraps_y

    @property
    def n_clusters(self) -> int:
        return int(self.sizes.size)

    def histogram(self) -> Dict[int, int]:
        """Cluster size -> number of clusters of that size."""
        return {int(k): int(v) for k, v in sorted(Counter(self.sizes.tolist()).items())}

    def site_cluster_sizes(self) -> np.ndarray:
        """Size of each site's cluster (0 off the clusters); averaging this over sites
        estimates the mean of |C_0| over all origins."""
        out = np.zeros(self.labels.size, dtype=np.int64)
        on = self.labels >= 0
        out[on] = self.sizes[self.labels[on]]
        return out

    def to_dict(self) -> dict:
        return {
            "n_clusters": self.n_clusters,
            "origin_size": self.origin_size,
            "origin_wraps": self.origin_wraps,
            "wraps_x": self.wraps_x,
            "wraps_y": self.wraps_y,
            "histogram": self.histogram(),
        }


def _wrap_flags(config: Configuration, labels: np.ndarray, n_labels: int):
    """Per-cluster (wraps_x, wraps_y): BFS with unwrapped coordinates; reaching a
    site twice at different unwrapped positions means a winding path."""
    geometry = config.geometry
    width, height = geometry.width, geometry.height
    table = geometry.neighbor_table.tolist()
    label_list = labels.tolist()
    pos: Dict[int, tuple] = {}
    wx = np.zeros(n_labels, dtype=bool)
    wy = np.zeros(n_labels, dtype=bool)
    for start in range(geometry.n_sites):
        lab = label_list[start]
        if lab < 0 or start in pos:
            continue
        pos[start] = (start % width, start // width)
        queue = deque([start])
        while queue:
            s = queue.popleft()
            px, py = pos[s]
            for slot, t in enumerate(table[s]):
                if t == EXTERIOR or label_list[t] != lab:
                    continue
                dx, dy = _STEPS[slot]
                expected = (px + dx, py + dy)
                seen = pos.get(t)
                if seen is None:
                    pos[t] = expected
                    queue.append(t)
                elif seen != expected:
                    wx[lab] |= seen[0] != expected[0]
                    wy[lab] |= seen[1] != expected[1]
    return wx, wy


def label_clusters(config: Configuration, origin: Site = (0, 0)) -> ClusterReport:
    """Nearest-neighbour clusters of 1's (wrapping on a torus)."""
    geometry = config.geometry
    states = config.states
    occupied = states == 1
    uf = UnionFind(geometry.n_sites)
    table = geometry.neighbor_table
    occ_list = occupied.tolist()
    for s in np.flatnonzero(occupied).tolist():
        for slot in _FORWARD_SLOTS:
            t = int(table[s, slot])
            if t != EXTERIOR and occ_list[t]:
                uf.union(s, t)

    labels = np.full(geometry.n_sites, -1, dtype=np.int64)
    root_label: Dict[int, int] = {}
    for s in np.flatnonzero(occupied).tolist():
        root = uf.find(s)
        labels[s] = root_label.setdefault(root, len(root_label))
    sizes = np.bincount(labels[occupied], minlength=len(root_label)).astype(np.int64)

    if geometry.is_torus and sizes.size:
        wx, wy = _wrap_flags(config, labels, sizes.size)
    else:
        wx = wy = np.zeros(sizes.size, dtype=bool)

    o = geometry.index(origin)
    origin_label = int(labels[o])
    origin_size = int(sizes[origin_label]) if origin_label >= 0 else 0
    origin_wraps = bool(origin_label >= 0 and (wx[origin_label] or wy[origin_label]))
    return ClusterReport(
        labels=labels,
        sizes=sizes,
        origin_size=origin_size,
        wraps_x=bool(wx.any()),
        wraps_y=bool(wy.any()),
        origin_wraps=origin_wraps,
        cluster_wraps=wx | wy,
    )
