import unittest

import numpy as np

from contact_lattice.core.exceptions import ParameterError, TimelineError
from contact_lattice.core.lattice import Geometry, SiteState
from contact_lattice.core.rates import Model, QParameterization, RateSet
from contact_lattice.graphical.boundary import (
    ball_radius, diamond, eta_qn, implied_lower_bound, indicators, min_neighborhood_gap,
)
from contact_lattice.graphical.symbols import D1, U1, SymbolType
from contact_lattice.graphical.timeline import GraphicalTimeline, Region, build_coupled

QPARAM = QParameterization.from_ratios(Model.B, (3, 1), {"lam": 4, "h": 1, "h_tilde": 1}, 0.5)


class TestDiamond(unittest.TestCase):

    def test_interior_and_rim_sizes(self):
        interior, rim = diamond(Geometry.torus(7), (3, 3), 2)
        self.assertEqual(interior.size, 5)
        self.assertEqual(rim.size, 8)
        self.assertEqual(ball_radius(8), 2)
        self.assertEqual(ball_radius(9), 3)


class TestEta(unittest.TestCase):

    def setUp(self):
        self.geometry = Geometry.torus(7)
        self.region = Region(self.geometry, -2.0, 0.0)

    def test_zero_radius_is_occupied(self):
        timeline = build_coupled(self.region, QPARAM, np.random.default_rng(0))
        self.assertEqual(eta_qn(timeline, (3, 3), 0.2, 0), SiteState.OCCUPIED)
        with self.assertRaises(ParameterError):
            eta_qn(timeline, (3, 3), 0.2, -1)

    def test_no_symbols_keeps_all_one_start(self):
        timeline = GraphicalTimeline.from_symbols(self.region, QPARAM.base, 0.5, [])
        self.assertEqual(eta_qn(timeline, (3, 3), 0.5, 4), SiteState.OCCUPIED)

    def test_down_symbol_at_centre(self):
        timeline = GraphicalTimeline.from_symbols(self.region, QPARAM.base, 0.5,
                                                  [((3, 3), -0.5, SymbolType.D1, None)])
        self.assertEqual(eta_qn(timeline, (3, 3), 0.5, 4), SiteState.EMPTY)
        # a symbol outside the time window is ignored
        early = GraphicalTimeline.from_symbols(self.region, QPARAM.base, 0.5,
                                               [((3, 3), -2.0, SymbolType.D1, None)])
        self.assertEqual(eta_qn(early, (3, 3), 0.5, 4), SiteState.OCCUPIED)

    def test_coverage_checks(self):
        short = build_coupled(Region(self.geometry, -1.0, 0.0), QPARAM, np.random.default_rng(0))
        with self.assertRaises(TimelineError):
            eta_qn(short, (3, 3), 0.5, 4)
        small = build_coupled(Region(Geometry.torus(4), -3.0, 0.0), QPARAM, np.random.default_rng(0))
        with self.assertRaises(TimelineError):
            eta_qn(small, (1, 1), 0.5, 4)
        rect = build_coupled(Region(Geometry.rectangle(7), -2.0, 0.0), QPARAM, np.random.default_rng(0))
        with self.assertRaises(TimelineError):
            eta_qn(rect, (1, 3), 0.5, 4)

    def test_monotone_in_q(self):
        for seed in range(10):
            timeline = build_coupled(self.region, QPARAM, np.random.default_rng(seed))
            values = [int(eta_qn(timeline, (3, 3), q, 4)) for q in (0.1, 0.4, 0.7, 0.95)]
            self.assertEqual(values, sorted(values))


class TestLowerBound(unittest.TestCase):

    def test_bound_holds_on_random_timelines(self):
        region = Region(Geometry.torus(12), -3.0, 0.0)
        for seed in range(25):
            timeline = build_coupled(region, QPARAM, np.random.default_rng(100 + seed))
            eta = eta_qn(timeline, (6, 6), 0.6, 9)
            bound = implied_lower_bound(timeline, 0.6, 0.05, (6, 6), 9)
            self.assertLessEqual(int(bound), int(eta))
            if min_neighborhood_gap(timeline) > 0.05:
                self.assertEqual(bound, eta)

    def test_tiny_delta_gives_equality(self):
        region = Region(Geometry.torus(7), -2.0, 0.0)
        timeline = build_coupled(region, QPARAM, np.random.default_rng(5))
        self.assertGreater(min_neighborhood_gap(timeline), 1e-12)
        self.assertEqual(implied_lower_bound(timeline, 0.5, 1e-12, (3, 3), 4),
                         eta_qn(timeline, (3, 3), 0.5, 4))

    def test_delta_must_be_positive(self):
        timeline = build_coupled(Region(Geometry.torus(7), -2.0, 0.0), QPARAM, np.random.default_rng(5))
        with self.assertRaises(ParameterError):
            implied_lower_bound(timeline, 0.5, 0.0, (3, 3), 4)


class TestIndicators(unittest.TestCase):

    def test_interval_indexing(self):
        geometry = Geometry.torus(2)
        region = Region(geometry, 0.0, 1.0)
        timeline = GraphicalTimeline.from_symbols(region, QPARAM.base, 0.5, [
            ((0, 0), 0.9, SymbolType.U1, None),
            ((1, 1), 0.1, SymbolType.D1, None),
        ])
        ind = indicators(timeline, 0.5, 0.25)
        self.assertEqual(ind.values.shape, (4, 5, 8))
        self.assertEqual(ind.get(0, 1, U1), 1)
        self.assertEqual(ind.get(3, 4, D1), 1)
        self.assertEqual(ind.total(), 2)
        self.assertEqual(ind.type_labels[:4], ["D1", "D2", "U1", "U2"])

    def test_model_a_has_twelve_types(self):
        base = RateSet.model_a(0.3, 0.2, 0.05, 0.05, 0.1, 0.1)
        timeline = build_coupled(Region(Geometry.torus(3), 0.0, 1.0), base, np.random.default_rng(2))
        ind = indicators(timeline, 0.5, 0.1)
        self.assertEqual(len(ind.codes), 12)
        self.assertEqual(ind.total(), len(timeline) - self._collisions(timeline, 0.5, 0.1))

    @staticmethod
    def _collisions(timeline, q, delta):
        resolved = timeline.resolve(q)
        k = np.minimum(np.floor((timeline.region.t_end - resolved.times) / delta).astype(int),
                       int(timeline.region.duration / delta))
        keys = set(zip(resolved.sites.tolist(), k.tolist(), resolved.codes.tolist()))
        return len(resolved) - len(keys)


if __name__ == "__main__":
    unittest.main()
