import unittest

import numpy as np

from pinnedbeam.models import ForcingModel, LoadShape, load_profile


class TestLoadProfile(unittest.TestCase):
    def test_shapes(self):
        """Test the sine, constant and empty load shapes."""
        x = np.linspace(0.0, np.pi, 9)
        np.testing.assert_allclose(load_profile("sine", 2.0, x), 2.0 * np.sin(x))
        np.testing.assert_allclose(load_profile(LoadShape.CONSTANT, 0.5, x), 0.5)
        np.testing.assert_array_equal(load_profile("none", 3.0, x), 0.0)

    def test_unknown_shape(self):
        """Test that an unknown shape name raises ValueError."""
        with self.assertRaises(ValueError):
            load_profile("triangle", 1.0, np.zeros(3))


class TestForcingModel(unittest.TestCase):
    def setUp(self):
        self.model = ForcingModel("custom", _coefficients=(1.0, -2.0, 0.0, 0.5))
        self.t = np.array([0.0, 0.3])
        self.x = np.array([0.4, 1.1])
        self.u = np.array([0.2, -0.7])

    def test_polynomial_derivatives(self):
        """Test coefficients of P, P' and P''."""
        np.testing.assert_allclose(self.model.polynomial(1), [-2.0, 0.0, 1.5])
        np.testing.assert_allclose(self.model.polynomial(2), [0.0, 3.0])
        with self.assertRaises(ValueError):
            self.model.polynomial(-1)

    def test_evaluate(self):
        """Test f, f_u and f_uu pointwise, loads included only in f."""
        u, t, x = self.u, self.t, self.x
        expected = 1.0 - 2.0 * u + 0.5 * u**3 + np.sin(x) * np.cos(t)
        np.testing.assert_allclose(self.model.f(t, x, u), expected)
        np.testing.assert_allclose(self.model.fu(t, x, u), -2.0 + 1.5 * u**2)
        np.testing.assert_allclose(self.model.fuu(t, x, u), 3.0 * u)

    def test_loads_chain(self):
        """Test that `load` and `static_load` chain and set g and s."""
        model = self.model.load("constant", 2.0).static_load("sine", 0.5)
        self.assertIs(model, self.model)
        np.testing.assert_allclose(model.g(self.x), 2.0)
        np.testing.assert_allclose(model.s(self.x), 0.5 * np.sin(self.x))

    def test_is_linear(self):
        """Test the affine check with trailing zero coefficients."""
        self.assertFalse(self.model.is_linear)
        self.assertTrue(ForcingModel("affine", _coefficients=(1.0, 2.0, 0.0)).is_linear)

    def test_str(self):
        """Test the readable form."""
        self.assertEqual(
            str(ForcingModel("affine", _coefficients=(0.0, 1.0))),
            "affine(P=[0.0, 1.0], g=sine:1, s=none:0)",
        )


if __name__ == "__main__":
    unittest.main()
