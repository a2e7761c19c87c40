import unittest

import numpy as np

from pinnedbeam import Zero, build_profile
from pinnedbeam.generators import GeneratorName


class TestZero(unittest.TestCase):
    def test_generator_name(self):
        """Test that the zero generator reports its config name."""
        self.assertEqual(Zero().generator_name, GeneratorName.ZERO.value)

    def test_samples_and_derivatives_vanish(self):
        """Test that alpha, beta and their derivatives are identically zero."""
        x = np.linspace(0.0, np.pi, 65)
        generator = Zero()
        for order in range(4):
            np.testing.assert_array_equal(generator.alpha(x, order), 0.0)
            np.testing.assert_array_equal(generator.beta(x, order), 0.0)

    def test_constant_beam(self):
        """Test that the zero pair builds rho = p = 1 with phi(x) = x."""
        profile = build_profile(Zero().pair(257))
        np.testing.assert_allclose(profile.rho, 1.0)
        np.testing.assert_allclose(profile.p, 1.0)
        np.testing.assert_allclose(profile.zeta, 1.0)
        np.testing.assert_allclose(profile.q, 1.0)
        np.testing.assert_allclose(profile.phi, profile.x, atol=1e-14)
        self.assertAlmostEqual(profile.p0, 1.0, places=12)


if __name__ == "__main__":
    unittest.main()
