import os
import tempfile
import unittest

import numpy as np

from contact_lattice.core.exceptions import ParameterError, TimelineError
from contact_lattice.core.lattice import Configuration, Direction, Geometry, neighbors
from contact_lattice.core.rates import Model, QParameterization, RateSet
from contact_lattice.graphical.replay import Boundary, couple_monotone, replay, replay_snapshots
from contact_lattice.graphical.symbols import SymbolType
from contact_lattice.graphical.timeline import GraphicalTimeline, Region, build_coupled

BASE_B = RateSet.model_b(1.0, 0.5, 0.3, 0.2, 0.4)


def naive_replay(timeline, q, initial):
    """Symbol-by-symbol Model B interpreter working on site tuples."""
    geometry = timeline.geometry
    state = {site: int(initial[site]) for site in
             [(x, y) for y in range(geometry.height) for x in range(geometry.width)]}
    for site, _, symbol_type, direction in timeline.symbols(q):
        s = state[site]
        if symbol_type == SymbolType.D1 and s == 1:
            state[site] = 0
        elif symbol_type == SymbolType.D2:
            state[site] = -1
        elif symbol_type == SymbolType.U1 and s == 0:
            state[site] = 1
        elif symbol_type == SymbolType.U2 and s == -1:
            state[site] = 0
        elif symbol_type == SymbolType.A1 and s == 0:
            source = dict(neighbors(geometry, site))[direction]
            if state[source] == 1:
                state[site] = 1
    rows = [[state[(x, y)] for x in range(geometry.width)] for y in range(geometry.height)]
    return Configuration.from_grid(geometry, rows)


class TestReplay(unittest.TestCase):

    def setUp(self):
        self.geometry = Geometry.torus(2)
        self.region = Region(self.geometry, 0.0, 1.0)
        self.timeline = GraphicalTimeline.from_symbols(self.region, BASE_B, 0.5, [
            ((0, 0), 0.1, SymbolType.U1, None),
            ((1, 0), 0.2, SymbolType.A1, Direction.LEFT),
            ((0, 0), 0.3, SymbolType.D1, None),
            ((0, 1), 0.4, SymbolType.A1, Direction.UP),
        ])

    def test_hand_built_sequence(self):
        empty = Configuration.full(self.geometry, 0)
        mid = replay(self.timeline, 0.5, empty, until=0.25)
        self.assertEqual(mid.grid().tolist(), [[1, 1], [0, 0]])
        end = replay(self.timeline, 0.5, empty)
        # the arrow into (0, 1) arrives after (0, 0) dropped back to 0
        self.assertEqual(end.grid().tolist(), [[0, 1], [0, 0]])

    def test_window_start_skips_earlier_symbols(self):
        empty = Configuration.full(self.geometry, 0)
        late = replay(self.timeline, 0.5, empty, start=0.15)
        self.assertEqual(late.grid().tolist(), [[0, 0], [0, 0]])

    def test_up_symbols_do_not_touch_degraded_sites(self):
        degraded = Configuration.full(self.geometry, -1)
        self.assertEqual(replay(self.timeline, 0.5, degraded), degraded)

    def test_lower_q_turns_up_symbols_down(self):
        occupied = Configuration.full(self.geometry, 1)
        result = replay(self.timeline, 0.1, occupied)
        self.assertTrue(result <= occupied)
        self.assertNotEqual(result, occupied)

    def test_pinned_sites_hold(self):
        boundary = Boundary.from_sites(self.geometry, [(0, 0)], 1)
        result = replay(self.timeline, 0.5, Configuration.full(self.geometry, 0), boundary=boundary)
        self.assertEqual(result[(0, 0)], 1)
        self.assertEqual(result[(0, 1)], 1)

    def test_window_outside_timeline(self):
        with self.assertRaises(TimelineError):
            replay(self.timeline, 0.5, Configuration.full(self.geometry, 0), until=2.0)
        with self.assertRaises(TimelineError):
            replay(self.timeline, 0.5, Configuration.full(Geometry.torus(3), 0))

    def test_matches_naive_interpreter(self):
        geometry = Geometry.torus(3)
        qparam = QParameterization.from_ratios(Model.B, (3, 1), {"lam": 4, "h": 1, "h_tilde": 1}, 0.5)
        for seed in range(5):
            rng = np.random.default_rng(seed)
            timeline = build_coupled(Region(geometry, 0.0, 4.0), qparam, rng)
            initial = Configuration.random(geometry, (1 / 3, 1 / 3, 1 / 3), rng)
            for q in (0.0, 0.4, 0.8, 1.0):
                self.assertEqual(replay(timeline, q, initial), naive_replay(timeline, q, initial))

    def test_zero_q_only_lowers(self):
        geometry = Geometry.torus(3)
        rng = np.random.default_rng(12)
        timeline = build_coupled(Region(geometry, 0.0, 3.0), BASE_B, rng)
        initial = Configuration.random(geometry, (0.2, 0.3, 0.5), rng)
        self.assertTrue(replay(timeline, 0.0, initial) <= initial)


class TestCoupleMonotone(unittest.TestCase):

    def setUp(self):
        self.geometry = Geometry.torus(6)
        self.qparam = QParameterization.from_ratios(Model.B, (3, 1), {"lam": 4, "h": 1, "h_tilde": 1}, 0.5)

    def test_ordered_over_many_seeds(self):
        low = Configuration.full(self.geometry, -1)
        high = Configuration.full(self.geometry, 1)
        for seed in range(10):
            timeline = build_coupled(Region(self.geometry, 0.0, 5.0), self.qparam, np.random.default_rng(seed))
            for q_low, q_high in ((0.2, 0.3), (0.5, 0.5), (0.1, 0.9)):
                report = couple_monotone(timeline, q_low, q_high, low, high)
                self.assertTrue(report.ordered)
                self.assertEqual(report.events_checked, len(timeline))

    def test_horizon_limits_checked_events(self):
        timeline = build_coupled(Region(self.geometry, 0.0, 5.0), self.qparam, np.random.default_rng(1))
        low = Configuration.full(self.geometry, -1)
        report = couple_monotone(timeline, 0.3, 0.6, low, low, horizon=1.0)
        self.assertEqual(report.events_checked, int(np.count_nonzero(timeline.times <= 1.0)))

    def test_preconditions(self):
        timeline = build_coupled(Region(self.geometry, 0.0, 1.0), self.qparam, np.random.default_rng(1))
        low = Configuration.full(self.geometry, -1)
        high = Configuration.full(self.geometry, 1)
        with self.assertRaises(ParameterError):
            couple_monotone(timeline, 0.7, 0.3, low, high)
        with self.assertRaises(ParameterError):
            couple_monotone(timeline, 0.3, 0.7, high, low)
        with self.assertRaises(TimelineError):
            couple_monotone(timeline, 0.3, 0.7, low, high, horizon=2.0)


class TestReplaySnapshots(unittest.TestCase):

    def setUp(self):
        self.geometry = Geometry.torus(5)
        self.qparam = QParameterization.from_ratios(Model.B, (3, 1), {"lam": 4, "h": 1, "h_tilde": 1}, 0.5)
        self.timeline = build_coupled(Region(self.geometry, 0.0, 6.0), self.qparam, np.random.default_rng(8))

    def test_matches_chained_replay(self):
        times = [0.5, 1.0, 1.0, 2.5, 4.0, 6.0]
        start = Configuration.full(self.geometry, 1)
        for q in (0.2, 0.5, 0.9):
            snapshots = replay_snapshots(self.timeline, q, start, times)
            config, t = start, 0.0
            for t_next, snapshot in zip(times, snapshots):
                config = replay(self.timeline, q, config, start=t, until=t_next)
                np.testing.assert_array_equal(snapshot.states, config.states)
                t = t_next
            self.assertEqual(len(snapshots), len(times))

    def test_times_checked(self):
        start = Configuration.full(self.geometry, 1)
        self.assertEqual(replay_snapshots(self.timeline, 0.5, start, []), [])
        with self.assertRaises(TimelineError):
            replay_snapshots(self.timeline, 0.5, start, [2.0, 1.0])
        with self.assertRaises(TimelineError):
            replay_snapshots(self.timeline, 0.5, start, [1.0, 7.0])


class TestTimelineStorage(unittest.TestCase):

    def test_json_and_npz(self):
        timeline = build_coupled(Region(Geometry.torus(3), 0.0, 2.0), BASE_B, np.random.default_rng(3),
                                 master_seed=3)
        with tempfile.TemporaryDirectory() as tmp:
            for name in ("timeline.json", "timeline.npz"):
                loaded = GraphicalTimeline.load(timeline.save(os.path.join(tmp, name)))
                np.testing.assert_array_equal(loaded.sites, timeline.sites)
                np.testing.assert_allclose(loaded.q_marks, timeline.q_marks)
                self.assertEqual(loaded.master_seed, 3)

    def test_unsorted_symbols_rejected(self):
        region = Region(Geometry.torus(2), 0.0, 1.0)
        with self.assertRaises(TimelineError):
            GraphicalTimeline(region, BASE_B, [0, 1], [0.5, 0.2], [0.1, 0.1], [0.1, 0.1], [0.1, 0.1])
        with self.assertRaises(TimelineError):
            GraphicalTimeline(region, BASE_B, [0], [1.5], [0.1], [0.1], [0.1])


if __name__ == "__main__":
    unittest.main()
