import unittest

import numpy as np

from contact_lattice.core.exceptions import InsufficientSamplesError, ParameterError
from contact_lattice.core.lattice import Configuration, Geometry
from contact_lattice.percolation.clusters import label_clusters
from contact_lattice.percolation.tails import TailClass, tail_estimate


class TestTailEstimate(unittest.TestCase):

    def test_geometric_sizes_are_exponential(self):
        rng = np.random.default_rng(3)
        sizes = rng.geometric(0.3, size=5000)
        estimate = tail_estimate(sizes.tolist(), list(range(1, 16)))
        self.assertEqual(estimate.classification, TailClass.EXPONENTIAL)
        self.assertAlmostEqual(estimate.fit.rate, -np.log(0.7), delta=0.05)
        self.assertLess(estimate.fit.rate_ci[0], estimate.fit.rate)
        self.assertAlmostEqual(float(estimate.p_hat[0]), 1.0)

    def test_power_law_sizes_are_subexponential(self):
        rng = np.random.default_rng(8)
        sizes = rng.zipf(2.0, size=5000)
        grid = [2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192]
        estimate = tail_estimate(sizes.tolist(), grid)
        self.assertEqual(estimate.classification, TailClass.SUBEXPONENTIAL)
        self.assertLess(estimate.fit.upper_rate, estimate.fit.lower_rate)

    def test_classification_ignores_sample_order(self):
        rng = np.random.default_rng(6)
        sizes = rng.geometric(0.2, size=2000)
        grid = list(range(1, 25))
        forward = tail_estimate(sizes.tolist(), grid)
        shuffled = tail_estimate(rng.permutation(sizes).tolist(), grid)
        self.assertEqual(forward.classification, shuffled.classification)
        self.assertTrue(np.array_equal(forward.p_hat, shuffled.p_hat))
        self.assertTrue(np.all(np.diff(forward.p_hat) <= 0))

    def test_disjoint_halves_agree(self):
        rng = np.random.default_rng(11)
        grid = list(range(1, 16))
        trials = 40
        agree = 0
        for _ in range(trials):
            sizes = rng.geometric(0.3, size=10000)
            first = tail_estimate(sizes[:5000].tolist(), grid)
            second = tail_estimate(sizes[5000:].tolist(), grid)
            agree += first.classification == second.classification
        self.assertGreaterEqual(agree / trials, 0.95)

    def test_all_zero_is_degenerate_exponential(self):
        estimate = tail_estimate([0] * 200, [1, 2, 3])
        self.assertEqual(estimate.classification, TailClass.EXPONENTIAL)
        self.assertTrue(estimate.degenerate)
        self.assertIsNone(estimate.fit)
        self.assertTrue(np.all(estimate.p_hat == 0))
        self.assertTrue(estimate.to_dict()["degenerate"])

    def test_intervals_bracket_estimates(self):
        rng = np.random.default_rng(1)
        estimate = tail_estimate(rng.geometric(0.5, size=300).tolist(), [1, 2, 3, 4, 5])
        self.assertTrue(np.all(estimate.ci_lo <= estimate.p_hat))
        self.assertTrue(np.all(estimate.p_hat <= estimate.ci_hi))
        rows = estimate.csv_rows()
        self.assertEqual([row["n"] for row in rows], [1, 2, 3, 4, 5])

    def test_wrapping_clusters_are_censored(self):
        full = label_clusters(Configuration.full(Geometry.torus(3)))
        estimate = tail_estimate([full] * 100 + [1] * 100, [1, 5, 50])
        self.assertEqual(estimate.censored, 100)
        self.assertAlmostEqual(float(estimate.p_hat[-1]), 0.5)

    def test_too_few_samples(self):
        with self.assertRaises(InsufficientSamplesError):
            tail_estimate([1] * 10, [1, 2])

    def test_grid_must_increase(self):
        with self.assertRaises(ParameterError):
            tail_estimate([1] * 200, [3, 2])
        with self.assertRaises(ParameterError):
            tail_estimate([1] * 200, [])


if __name__ == "__main__":
    unittest.main()
