import unittest

import numpy as np

from contact_lattice.core.exceptions import ParameterError
from contact_lattice.core.lattice import Configuration, Geometry
from contact_lattice.core.rates import RateSet
from contact_lattice.dynamics.stationary import (
    estimate_density, sample_stationary_configs, stationary_density,
)
from contact_lattice.oracle.generator import build_generator
from contact_lattice.oracle.solvers import per_site_stationary, site_density, stationary


class TestStationaryDensity(unittest.TestCase):

    def test_independent_sites_give_one_third(self):
        # no neighbour terms: each site is the uniform 3-cycle
        rates = RateSet.model_a(1.0, 1.0, 0.0, 0.0, 1.0, 1.0)
        estimate = estimate_density(rates, Geometry.torus(4), 5.0, 400.0, np.random.default_rng(17))
        self.assertAlmostEqual(estimate.rho_bar, 1 / 3, delta=0.04)
        self.assertAlmostEqual(float(per_site_stationary(rates)[2]), 1 / 3)
        self.assertEqual(len(estimate.batch_values), 20)

    def test_requires_positive_rates(self):
        with self.assertRaises(ParameterError):
            stationary_density(RateSet.two_state(1.0, 0.5, 0.1), Geometry.torus(3), 1.0, 1.0,
                               np.random.default_rng(0))

    def test_matches_exact_marginal_on_small_torus(self):
        rates = RateSet.model_b(0.6, 0.3, 0.4, 0.3, 0.5)
        geometry = Geometry.torus(2)
        exact = site_density(stationary(build_generator(rates, geometry)), 0)
        estimate = stationary_density(rates, geometry, 10.0, 4000.0, np.random.default_rng(23), batches=40)
        self.assertLess(abs(estimate.rho_bar - exact), 4 * estimate.stderr + 0.01)

    def test_occupation_frequencies(self):
        rates = RateSet.model_b(0.6, 0.3, 0.4, 0.3, 0.5)
        geometry = Geometry.torus(2)
        estimate = stationary_density(rates, geometry, 5.0, 50.0, np.random.default_rng(4),
                                      track_occupation=True)
        dist = estimate.occupation_distribution(geometry.n_sites)
        self.assertEqual(dist.shape, (81,))
        self.assertAlmostEqual(dist.sum(), 1.0)

    def test_occupation_requires_tracking(self):
        rates = RateSet.model_b(0.6, 0.3, 0.4, 0.3, 0.5)
        estimate = stationary_density(rates, Geometry.torus(2), 1.0, 2.0, np.random.default_rng(4))
        with self.assertRaises(ParameterError):
            estimate.occupation_distribution(4)


class TestSnapshots(unittest.TestCase):

    def test_count_and_geometry(self):
        geometry = Geometry.torus(5)
        rates = RateSet.model_b(0.6, 0.3, 0.4, 0.3, 0.5)
        snapshots = sample_stationary_configs(rates, geometry, 2.0, 6, 0.5, np.random.default_rng(8))
        self.assertEqual(len(snapshots), 6)
        self.assertTrue(all(s.geometry == geometry for s in snapshots))

    def test_frozen_dynamics_keep_initial(self):
        geometry = Geometry.torus(3)
        rates = RateSet.model_b(1.0, 0.3, 0.4, 0.2, 0.0)
        start = Configuration.full(geometry, -1)
        snapshots = sample_stationary_configs(rates, geometry, 1.0, 3, 1.0, np.random.default_rng(8),
                                              initial=start)
        self.assertTrue(all(s == start for s in snapshots))

    def test_invalid_arguments(self):
        rates = RateSet.model_b(0.6, 0.3, 0.4, 0.3, 0.5)
        with self.assertRaises(ParameterError):
            sample_stationary_configs(rates, Geometry.torus(3), 1.0, 0, 1.0, np.random.default_rng(0))


if __name__ == "__main__":
    unittest.main()
