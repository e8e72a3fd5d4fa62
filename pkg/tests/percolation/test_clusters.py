import unittest
from collections import deque

import numpy as np

from contact_lattice.core.exceptions import GeometryError
from contact_lattice.core.lattice import Configuration, Geometry
from contact_lattice.percolation.clusters import label_clusters
from contact_lattice.percolation.crossing import (
    CrossingDirection, CrossingSamples, crossing, crossing_samples, window,
)
from contact_lattice.percolation.union_find import UnionFind


def bfs_cluster_sizes(grid, torus):
    """Sorted cluster sizes of 1's by plain breadth-first search."""
    height, width = grid.shape
    seen = np.zeros_like(grid, dtype=bool)
    sizes = []
    for y in range(height):
        for x in range(width):
            if grid[y, x] != 1 or seen[y, x]:
                continue
            seen[y, x] = True
            queue, size = deque([(x, y)]), 0
            while queue:
                cx, cy = queue.popleft()
                size += 1
                for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    nx, ny = cx + dx, cy + dy
                    if torus:
                        nx, ny = nx % width, ny % height
                    elif not (0 <= nx < width and 0 <= ny < height):
                        continue
                    if grid[ny, nx] == 1 and not seen[ny, nx]:
                        seen[ny, nx] = True
                        queue.append((nx, ny))
            sizes.append(size)
    return sorted(sizes)


def bfs_crosses(mask, horizontal):
    height, width = mask.shape
    if horizontal:
        starts = [(0, y) for y in range(height) if mask[y, 0]]
    else:
        starts = [(x, 0) for x in range(width) if mask[0, x]]
    seen = set(starts)
    queue = deque(starts)
    while queue:
        x, y = queue.popleft()
        if (horizontal and x == width - 1) or (not horizontal and y == height - 1):
            return True
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nx, ny = x + dx, y + dy
            if 0 <= nx < width and 0 <= ny < height and mask[ny, nx] and (nx, ny) not in seen:
                seen.add((nx, ny))
                queue.append((nx, ny))
    return False


class TestUnionFind(unittest.TestCase):

    def test_union_joins_components(self):
        uf = UnionFind(5)
        uf.union(0, 1)
        uf.union(3, 4)
        self.assertTrue(uf.same(0, 1))
        self.assertFalse(uf.same(1, 3))
        uf.union(1, 4)
        self.assertTrue(uf.same(0, 3))
        self.assertEqual(uf.find(2), 2)


class TestLabelClusters(unittest.TestCase):

    def test_matches_bfs_on_random_configurations(self):
        rng = np.random.default_rng(11)
        for torus in (True, False):
            geometry = Geometry.torus(8) if torus else Geometry.rectangle(8)
            for _ in range(25):
                config = Configuration.random(geometry, [0.2, 0.25, 0.55], rng)
                report = label_clusters(config)
                self.assertEqual(sorted(report.sizes.tolist()),
                                 bfs_cluster_sizes(config.grid(), torus))
                self.assertEqual(int(report.sizes.sum()), config.count(1))

    def test_checkerboard_has_singletons(self):
        geometry = Geometry.torus(4)
        rows = [[(x + y) % 2 for x in range(4)] for y in range(4)]
        report = label_clusters(Configuration.from_grid(geometry, rows))
        self.assertEqual(report.n_clusters, 8)
        self.assertEqual(report.histogram(), {1: 8})
        self.assertEqual(report.origin_size, 0)
        self.assertFalse(report.wraps)

    def test_full_torus_wraps_both_ways(self):
        report = label_clusters(Configuration.full(Geometry.torus(5, 4)))
        self.assertEqual(report.n_clusters, 1)
        self.assertEqual(report.origin_size, 20)
        self.assertTrue(report.wraps_x)
        self.assertTrue(report.wraps_y)
        self.assertTrue(report.origin_wraps)

    def test_full_rectangle_does_not_wrap(self):
        report = label_clusters(Configuration.full(Geometry.rectangle(5, 4)))
        self.assertEqual(report.origin_size, 20)
        self.assertFalse(report.origin_wraps)

    def test_horizontal_band_wraps_in_x_only(self):
        geometry = Geometry.torus(4)
        rows = [[1, 1, 1, 1], [0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0]]
        report = label_clusters(Configuration.from_grid(geometry, rows), origin=(1, 2))
        self.assertTrue(report.wraps_x)
        self.assertFalse(report.wraps_y)
        self.assertEqual(report.origin_size, 1)
        self.assertFalse(report.origin_wraps)

    def test_site_cluster_sizes(self):
        geometry = Geometry.rectangle(3, 1)
        report = label_clusters(Configuration.from_grid(geometry, [[1, 1, -1]]))
        self.assertEqual(report.site_cluster_sizes().tolist(), [2, 2, 0])
        self.assertEqual(report.to_dict()["histogram"], {2: 1})


class TestCrossing(unittest.TestCase):

    def test_matches_bfs_on_random_windows(self):
        rng = np.random.default_rng(5)
        geometry = Geometry.torus(9, 6)
        rect = (1, 2, 6, 3)
        for _ in range(40):
            config = Configuration.random(geometry, [0.1, 0.3, 0.6], rng)
            mask = window(config, rect)
            self.assertEqual(crossing(config, rect, CrossingDirection.HORIZONTAL),
                             bfs_crosses(mask, horizontal=True))
            self.assertEqual(crossing(config, rect, CrossingDirection.VERTICAL),
                             bfs_crosses(mask, horizontal=False))

    def test_horizontal_crossing_is_monotone(self):
        rng = np.random.default_rng(19)
        geometry = Geometry.torus(12, 4)
        rect = (0, 0, 12, 4)
        for _ in range(60):
            config = Configuration.random(geometry, [0.3, 0.3, 0.4], rng)
            upgraded = Configuration(geometry, np.where(rng.random(geometry.n_sites) < 0.2, 1, config.states))
            self.assertTrue(config <= upgraded)
            if crossing(config, rect, CrossingDirection.HORIZONTAL):
                self.assertTrue(crossing(upgraded, rect, CrossingDirection.HORIZONTAL))

    def test_window_does_not_wrap(self):
        geometry = Geometry.torus(4)
        rows = [[1, 0, 0, 1]] * 4
        config = Configuration.from_grid(geometry, rows)
        self.assertFalse(crossing(config, (0, 0, 4, 4), CrossingDirection.HORIZONTAL))
        self.assertTrue(crossing(config, (0, 0, 4, 4), CrossingDirection.VERTICAL))

    def test_window_out_of_bounds(self):
        config = Configuration.full(Geometry.torus(4))
        with self.assertRaises(GeometryError):
            window(config, (2, 0, 3, 1))
        with self.assertRaises(GeometryError):
            window(config, (0, 0, 0, 1))

    def test_empty_window_never_crosses(self):
        config = Configuration.full(Geometry.torus(4), state=0)
        self.assertFalse(crossing(config, (0, 0, 3, 1), CrossingDirection.HORIZONTAL))

    def test_crossing_samples_use_three_by_one_windows(self):
        geometry = Geometry.torus(6, 2)
        full = Configuration.full(geometry)
        stripe = Configuration.from_grid(geometry, [[1, 1, 1, 1, 1, 1], [0, 0, 0, 0, 0, 0]])
        samples = crossing_samples([full, stripe], n=2)
        self.assertEqual(samples.trials, 2)
        self.assertEqual(samples.vertical.tolist(), [True, False])
        self.assertEqual(samples.horizontal.tolist(), [True, True])
        merged = samples.merged(CrossingSamples(2, np.array([False]), np.array([False])))
        self.assertEqual(merged.trials, 3)


if __name__ == "__main__":
    unittest.main()
