import unittest

import numpy as np
from scipy.special import i0

from pinnedbeam import SinePair, build_profile
from pinnedbeam.generators import GeneratorName


class TestSinePair(unittest.TestCase):
    def test_default_amplitude(self):
        """Test that the default amplitude is 0.05."""
        x = np.array([np.pi / 2])
        generator = SinePair()
        self.assertEqual(generator.generator_name, GeneratorName.SINE_PAIR.value)
        np.testing.assert_allclose(generator.alpha(x), 0.05)
        np.testing.assert_allclose(generator.beta(x), -0.05)

    def test_amplitude_chaining(self):
        """Test that `amplitude` returns the instance."""
        generator = SinePair()
        self.assertIs(generator.amplitude(0.2), generator)
        np.testing.assert_allclose(generator.alpha(np.array([np.pi / 2])), 0.2)

    def test_derivatives(self):
        """Test the analytic derivatives against sin, cos, -sin, -cos."""
        x = np.linspace(0.0, np.pi, 33)
        generator = SinePair().amplitude(0.1)
        np.testing.assert_allclose(generator.alpha(x, 1), 0.1 * np.cos(x))
        np.testing.assert_allclose(generator.alpha(x, 2), -0.1 * np.sin(x))
        np.testing.assert_allclose(generator.alpha(x, 3), -0.1 * np.cos(x))
        np.testing.assert_allclose(generator.beta(x, 3), 0.1 * np.cos(x))

    def test_closed_form_profile(self):
        """Test rho, p and the calibrated p0 against their closed forms."""
        a = 0.05
        profile = build_profile(SinePair().amplitude(a).pair(1025))
        x = profile.x
        # int_0^pi exp(2a (1 - cos x)) dx = pi e^{2a} I0(2a)
        p0 = (np.exp(2 * a) * i0(2 * a)) ** 4
        self.assertAlmostEqual(profile.p0, p0, delta=1e-5 * p0)
        np.testing.assert_allclose(profile.rho, np.exp(4 * a * (1 - np.cos(x))), rtol=1e-5)
        np.testing.assert_allclose(
            profile.p, p0 * np.exp(-4 * a * (1 - np.cos(x))), rtol=1e-5
        )
        self.assertLess(profile.normalization_residual, 1e-8)


if __name__ == "__main__":
    unittest.main()
