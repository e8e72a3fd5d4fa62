import unittest

from contact_lattice.core.exceptions import ParameterError
from contact_lattice.ddcp.laws import DensityLaw, LawKind, eval_law


class TestKefiLaw(unittest.TestCase):

    def test_values(self):
        law = DensityLaw.kefi(1.0, 0.5, 1.0, 0.0)
        lam, h = eval_law(law, 0.5)
        self.assertAlmostEqual(lam, 0.125)
        self.assertAlmostEqual(h, 0.25)

    def test_no_spontaneous_colonisation_at_zero_density(self):
        lam, h = eval_law(DensityLaw.kefi(2.0, 0.3, 0.9, 0.5), 0.0)
        self.assertEqual(h, 0.0)
        self.assertAlmostEqual(lam, 2.0 * 0.7 / 4 * 0.9)

    def test_saturation(self):
        lam, h = eval_law(DensityLaw.kefi(2.0, 0.3, 0.5, 0.5), 1.0)
        self.assertAlmostEqual(lam, 0.0)
        self.assertAlmostEqual(h, 0.0)

    def test_negative_values_are_clamped(self):
        law = DensityLaw.kefi(2.0, 0.3, 0.4, 0.5)
        value = law.evaluate(1.0)
        self.assertTrue(value.clamped)
        self.assertEqual((value.lam, value.h), (0.0, 0.0))
        _, _, clamped = law.evaluate_many([0.0, 0.5, 1.0])
        self.assertTrue(clamped)

    def test_parameter_checks(self):
        with self.assertRaises(ParameterError):
            DensityLaw.kefi(2.0, 1.0, 0.9, 0.5)
        with self.assertRaises(ParameterError):
            DensityLaw.kefi(0.0, 0.3, 0.9, 0.5)
        with self.assertRaises(ParameterError):
            DensityLaw.kefi(2.0, 0.3, 0.9, 0.5).evaluate(1.2)

    def test_lipschitz_bounds_slope(self):
        law = DensityLaw.kefi(2.0, 0.3, 0.9, 0.5)
        bound = law.lipschitz()
        for a, b in ((0.0, 0.1), (0.4, 0.5), (0.9, 1.0)):
            va, vb = law.evaluate(a), law.evaluate(b)
            self.assertLessEqual(abs(vb.h - va.h) / (b - a), bound + 1e-12)
            self.assertLessEqual(abs(vb.lam - va.lam) / (b - a), bound + 1e-12)


class TestOtherLaws(unittest.TestCase):

    def test_constant(self):
        law = DensityLaw.constant(0.2, 0.1)
        self.assertEqual(eval_law(law, 0.7), (0.2, 0.1))
        self.assertEqual(law.lipschitz(), 0.0)
        with self.assertRaises(ParameterError):
            DensityLaw.constant(-0.1, 0.1)

    def test_tabulated_interpolates(self):
        law = DensityLaw.tabulated([0.0, 1.0], [0.0, 1.0], [0.0, 0.5, 1.0], [0.2, 0.2, 0.0])
        lam, h = eval_law(law, 0.75)
        self.assertAlmostEqual(lam, 0.75)
        self.assertAlmostEqual(h, 0.1)
        self.assertAlmostEqual(law.lipschitz(), 1.0)
        self.assertEqual(law.to_dict()["kind"], LawKind.TABULATED.value)

    def test_tabulated_validation(self):
        with self.assertRaises(ParameterError):
            DensityLaw.tabulated([0.0, 0.5], [0.1, 0.1], [0.0, 1.0], [0.1, 0.1])
        with self.assertRaises(ParameterError):
            DensityLaw.tabulated([0.0, 1.0, 0.5], [0.1, 0.1, 0.1], [0.0, 1.0], [0.1, 0.1])
        with self.assertRaises(ParameterError):
            DensityLaw.tabulated([0.0, 1.0], [0.1, -0.1], [0.0, 1.0], [0.1, 0.1])


if __name__ == "__main__":
    unittest.main()
