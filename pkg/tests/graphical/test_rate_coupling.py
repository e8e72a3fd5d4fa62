import unittest

import numpy as np

from contact_lattice.core.exceptions import ParameterError
from contact_lattice.core.lattice import Configuration, Direction, Geometry
from contact_lattice.core.rates import RateSet
from contact_lattice.graphical.rate_coupling import build_rate_coupled, couple_rates, dominates
from contact_lattice.graphical.symbols import (
    A1_BASE, A2_BASE, D1, D2, U1, SymbolType, code_rates, decode, encode, marks_for_code, resolve_codes,
    up_partition,
)
from contact_lattice.graphical.timeline import Region

LOW = RateSet.model_b(0.8, 0.3, 0.2, 0.1, 0.2)
HIGH = RateSet.model_b(0.5, 0.2, 0.4, 0.2, 0.3)


class TestDominates(unittest.TestCase):

    def test_order(self):
        self.assertTrue(dominates(LOW, HIGH))
        self.assertFalse(dominates(HIGH, LOW))
        self.assertTrue(dominates(LOW, LOW))
        self.assertFalse(dominates(LOW, RateSet.model_a(0.5, 0.2, 0.4, 0.0, 0.2, 0.3)))


class TestRateCoupling(unittest.TestCase):

    def setUp(self):
        self.geometry = Geometry.torus(8)
        self.region = Region(self.geometry, 0.0, 10.0)

    def test_low_sees_fewer_up_symbols(self):
        timeline = build_rate_coupled(self.region, LOW, HIGH, np.random.default_rng(0))
        up = timeline.codes >= U1
        self.assertTrue(np.all(timeline.in_high[up] | ~timeline.in_low[up]))
        self.assertTrue(np.all(timeline.in_low[~up] | ~timeline.in_high[~up]))

    def test_ordered_runs(self):
        for seed in range(5):
            rng = np.random.default_rng(seed)
            timeline = build_rate_coupled(self.region, LOW, HIGH, rng)
            high = Configuration.random(self.geometry, (1 / 3, 1 / 3, 1 / 3), rng)
            low = Configuration(self.geometry, np.minimum(high.states, -1))
            report = couple_rates(timeline, low, high)
            self.assertTrue(report.ordered)
            self.assertEqual(report.events_checked, len(timeline))

    def test_requires_domination(self):
        timeline = build_rate_coupled(self.region, HIGH, LOW, np.random.default_rng(0))
        low = Configuration.full(self.geometry, -1)
        with self.assertRaises(ParameterError):
            couple_rates(timeline, low, low)

    def test_requires_same_model(self):
        with self.assertRaises(ParameterError):
            build_rate_coupled(self.region, LOW, RateSet.model_a(0.5, 0.2, 0.4, 0.0, 0.2, 0.3),
                               np.random.default_rng(0))


class TestSymbols(unittest.TestCase):

    def test_codes(self):
        self.assertEqual(encode(SymbolType.A1, Direction.UP), A1_BASE + 2)
        self.assertEqual(decode(A1_BASE + 2), (SymbolType.A1, Direction.UP))
        with self.assertRaises(ParameterError):
            encode(SymbolType.A2)
        with self.assertRaises(ParameterError):
            decode(12)

    def test_code_rates_per_slot(self):
        rates = code_rates(LOW)
        self.assertEqual(rates[D1], 0.8)
        self.assertEqual(rates[D2], 0.3)
        self.assertAlmostEqual(rates.sum(), LOW.total_line_rate)

    def test_marks_round_trip_through_resolution(self):
        base = LOW.rescaled()
        for code in (D1, D2, U1, A1_BASE + 3):
            qm, bm, gm = marks_for_code(code, 0.4, base)
            resolved = resolve_codes(np.array([qm]), np.array([bm]), np.array([gm]), 0.4, base)
            self.assertEqual(int(resolved[0]), code)

    def test_up_partition_edges(self):
        # awkward ratios so the running sum does not land on 1.0 by itself
        base = RateSet.model_b(0.3, 0.1, 0.7, 1.0 / 3.0, 0.1).rescaled()
        edges = up_partition(base)
        self.assertTrue(np.all(np.diff(edges) >= 0))
        self.assertTrue(np.all((edges >= 0) & (edges <= 1)))
        self.assertEqual(edges[A1_BASE + 3 - U1], 1.0)
        self.assertEqual(edges[-1], 1.0)

    def test_g_mark_near_one_stays_on_live_code(self):
        base = RateSet.model_b(0.3, 0.1, 0.7, 1.0 / 3.0, 0.1).rescaled()
        g = np.array([np.nextafter(1.0, 0.0), 1.0])
        codes = resolve_codes(np.zeros(2), np.zeros(2), g, 0.5, base)
        self.assertTrue(np.all(codes == A1_BASE + 3))
        self.assertFalse(np.any(codes >= A2_BASE))

    def test_unrealisable_marks(self):
        base = LOW.rescaled()
        with self.assertRaises(ParameterError):
            marks_for_code(U1, 0.0, base)
        with self.assertRaises(ParameterError):
            marks_for_code(D1, 1.0, base)


if __name__ == "__main__":
    unittest.main()
