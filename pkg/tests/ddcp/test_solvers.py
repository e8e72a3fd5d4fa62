import json
import unittest

import numpy as np

from contact_lattice.core.exceptions import ParameterError
from contact_lattice.core.lattice import Geometry
from contact_lattice.core.rates import RateSet
from contact_lattice.ddcp.laws import DensityLaw
from contact_lattice.ddcp.stationary import (
    CSV_FIELDS, MonteCarloOptions, solve_stationary, solve_stationary_multistart,
)
from contact_lattice.ddcp.trajectory import InitialLaw, solve_trajectory

FIXED = RateSet.model_b(0.5, 0.1, 0.1, 0.1, 0.2)
SMALL_MC = MonteCarloOptions(burn_in=1.0, samples=4.0, batches=2)


class TestTrajectory(unittest.TestCase):

    def setUp(self):
        self.geometry = Geometry.torus(3)

    def _solve(self, law, seed=7, **kwargs):
        options = dict(tol=0.05, max_sweeps=10, dt_grid=0.5)
        options.update(kwargs)
        return solve_trajectory(law, FIXED, InitialLaw((0.0, 0.5, 0.5)), self.geometry, 1.0, 2,
                                rng=np.random.default_rng(0), master_seed=seed, **options)

    def test_constant_law_needs_one_sweep(self):
        solution = self._solve(DensityLaw.constant(0.2, 0.1))
        self.assertTrue(solution.converged)
        self.assertEqual(solution.sweeps, 1)
        self.assertEqual(solution.residual, 0.0)
        np.testing.assert_allclose(solution.lam, 0.2)
        self.assertEqual(solution.grid.tolist(), [0.0, 0.5])

    def test_flat_table_matches_constant_law(self):
        constant = self._solve(DensityLaw.constant(0.2, 0.1))
        table = self._solve(DensityLaw.tabulated([0.0, 1.0], [0.2, 0.2], [0.0, 1.0], [0.1, 0.1]))
        np.testing.assert_array_equal(constant.rho, table.rho)

    def test_kefi_solution_is_self_consistent(self):
        law = DensityLaw.kefi(2.0, 0.3, 0.9, 0.5)
        solution = self._solve(law, max_sweeps=30, window=0.5)
        self.assertEqual(len(solution.rho), 2)
        self.assertEqual(sum(solution.window_cells), 2)
        if solution.converged:
            self.assertLess(solution.self_consistency(law), 0.05)
        data = json.loads(solution.to_json())
        self.assertEqual(data["schema_version"], 1)
        self.assertEqual(data["seed"], 7)

    def test_same_seed_same_schedule(self):
        law = DensityLaw.kefi(2.0, 0.3, 0.9, 0.5)
        a = self._solve(law, seed=3)
        b = self._solve(law, seed=3)
        np.testing.assert_array_equal(a.lam, b.lam)
        np.testing.assert_array_equal(a.rho, b.rho)

    def test_invalid_arguments(self):
        law = DensityLaw.constant(0.2, 0.1)
        with self.assertRaises(ParameterError):
            self._solve(law, dt_grid=0.0)
        with self.assertRaises(ParameterError):
            solve_trajectory(law, FIXED, InitialLaw(), self.geometry, 0.0, 2, 0.05, 5,
                             np.random.default_rng(0))
        with self.assertRaises(ParameterError):
            InitialLaw((0.5, 0.5, 0.5))


class TestStationaryFixedPoint(unittest.TestCase):

    def setUp(self):
        self.geometry = Geometry.torus(3)

    def test_constant_law_is_its_own_fixed_point(self):
        point = solve_stationary(DensityLaw.constant(0.2, 0.1), FIXED, self.geometry, mc=SMALL_MC,
                                 master_seed=1)
        self.assertTrue(point.converged)
        self.assertEqual(point.iterations, 1)
        self.assertEqual((point.lambda_star, point.h_star), (0.2, 0.1))
        self.assertEqual(point.residual, 0.0)
        self.assertEqual(list(point.csv_row().keys()), CSV_FIELDS)

    def test_damped_steps_from_a_start(self):
        point = solve_stationary(DensityLaw.constant(0.2, 0.1), FIXED, self.geometry, damping=0.5,
                                 tol=1e-3, mc=SMALL_MC, start=(0.0, 0.0), master_seed=1)
        self.assertTrue(point.converged)
        self.assertAlmostEqual(point.lambda_star, 0.2, delta=2e-3)
        steps = [row["step"] for row in point.trace]
        self.assertTrue(all(b < a for a, b in zip(steps, steps[1:])))

    def test_residual_bound_is_strict_unless_noise_tolerant(self):
        law = DensityLaw.kefi(2.0, 0.5, 0.5, 0.0)
        strict = solve_stationary(law, FIXED, self.geometry, tol=1e-3, max_iters=3, mc=SMALL_MC,
                                  master_seed=2)
        self.assertEqual(strict.effective_tol, 1e-3)
        self.assertEqual(strict.csv_row()["effective_tol"], 1e-3)
        self.assertFalse(strict.params["noise_tolerant"])
        widened = solve_stationary(law, FIXED, self.geometry, tol=1e-3, max_iters=3, mc=SMALL_MC,
                                   master_seed=2, noise_tolerant=True)
        self.assertGreaterEqual(widened.effective_tol, 1e-3)
        if strict.converged:
            self.assertLess(strict.trace[-1]["residual"], 1e-3)

    def test_kefi_fixed_density_grows_with_beta(self):
        mc = MonteCarloOptions(burn_in=5.0, samples=40.0, batches=4)
        geometry = Geometry.torus(4)
        points = [solve_stationary(DensityLaw.kefi(beta, 0.5, 0.5, 0.0), FIXED, geometry, tol=5e-3,
                                   max_iters=15, mc=mc, master_seed=9, noise_tolerant=True)
                  for beta in (1.0, 4.0)]
        low, high = points
        self.assertGreaterEqual(high.rho_star, low.rho_star - (low.ci_half_width + high.ci_half_width))

    def test_multistart_keeps_one_point_for_constant_law(self):
        points = solve_stationary_multistart(DensityLaw.constant(0.2, 0.1), FIXED, self.geometry,
                                             [(0.0, 0.0), (0.5, 0.5)], master_seed=4, merge_tol=1.0,
                                             mc=SMALL_MC)
        self.assertEqual(len(points), 1)
        self.assertAlmostEqual(points[0].h_star, 0.1, delta=2e-3)

    def test_rejects_nonpositive_fixed_rates(self):
        with self.assertRaises(ParameterError):
            solve_stationary(DensityLaw.constant(0.2, 0.1), RateSet.model_b(0.5, 0.0, 0.1, 0.1, 0.2),
                             self.geometry, mc=SMALL_MC)

    def test_rejects_negative_law(self):
        with self.assertRaises(ParameterError):
            solve_stationary(DensityLaw.kefi(2.0, 0.3, 0.4, 0.5), FIXED, self.geometry, mc=SMALL_MC)
        with self.assertRaises(ParameterError):
            solve_stationary(DensityLaw.constant(0.2, 0.1), FIXED, self.geometry, damping=0.0)


if __name__ == "__main__":
    unittest.main()
