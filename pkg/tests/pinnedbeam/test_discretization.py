import unittest

import numpy as np

from pinnedbeam.discretization import (
    Discretization,
    SpatialBasis,
    from_sine_coefficients,
    h2_norm_squared,
    sine_coefficients,
    spectral_second_derivative,
    uniform_grid,
)


class TestSineTransforms(unittest.TestCase):
    def test_sine_coefficients_exact(self):
        """Test that a sum of sines is recovered exactly."""
        x = uniform_grid(129)
        values = 2.0 * np.sin(x) - 0.5 * np.sin(3 * x)
        b = sine_coefficients(values)
        expected = np.zeros(127)
        expected[0], expected[2] = 2.0, -0.5
        np.testing.assert_allclose(b, expected, atol=1e-13)
        np.testing.assert_allclose(from_sine_coefficients(b), values, atol=1e-13)

    def test_complex_samples(self):
        """Test that complex samples transform componentwise."""
        x = uniform_grid(65)
        values = np.sin(2 * x) + 1j * np.sin(x)
        b = sine_coefficients(values)
        self.assertAlmostEqual(b[1], 1.0, places=12)
        self.assertAlmostEqual(b[0], 1j, places=12)

    def test_h2_norm(self):
        """Test that |sin x|^2 in H^2 is 3 pi / 2."""
        x = uniform_grid(257)
        self.assertAlmostEqual(float(h2_norm_squared(np.sin(x))), 1.5 * np.pi, places=10)

    def test_second_derivative(self):
        """Test the spectral second derivative of sin 2x."""
        x = uniform_grid(129)
        np.testing.assert_allclose(
            spectral_second_derivative(np.sin(2 * x)), -4.0 * np.sin(2 * x), atol=1e-11
        )


class TestSpatialBasis(unittest.TestCase):
    def test_default_modes(self):
        """Test the default number of Galerkin modes."""
        self.assertEqual(SpatialBasis(512).size, 64)
        self.assertEqual(SpatialBasis(4096).size, 128)
        self.assertEqual(SpatialBasis(512, Discretization.FINITE_DIFFERENCE).size, 510)

    def test_too_coarse(self):
        """Test that grids below 64 points are rejected."""
        with self.assertRaises(ValueError):
            SpatialBasis(32)
        with self.assertRaises(ValueError):
            SpatialBasis(128, n_modes=200)

    def test_string_discretization(self):
        """Test that the discretization may be given by name."""
        basis = SpatialBasis(128, "finite_difference")
        self.assertIs(basis.discretization, Discretization.FINITE_DIFFERENCE)

    def test_orthonormal_columns(self):
        """Test that both bases are orthonormal for the trapezoid product."""
        for discretization in Discretization:
            with self.subTest(discretization=discretization):
                basis = SpatialBasis(130, discretization)
                np.testing.assert_allclose(basis.gram(np.ones(130)), np.eye(basis.size), atol=1e-12)
                self.assertTrue(np.all(basis.matrix[[0, -1], :] == 0.0))

    def test_constant_stiffness(self):
        """Test that the constant Galerkin stiffness is diag(k^4)."""
        basis = SpatialBasis(256, n_modes=16)
        k = np.arange(1, 17, dtype=float)
        np.testing.assert_allclose(basis.stiffness(np.ones(256)), np.diag(k**4), atol=1e-8)

    def test_analyze_synthesize(self):
        """Test that analysis inverts synthesis."""
        basis = SpatialBasis(256, n_modes=20)
        c = np.random.default_rng(0).standard_normal(20)
        np.testing.assert_allclose(basis.analyze(basis.synthesize(c)), c, atol=1e-12)

    def test_energy_matches_stiffness(self):
        """Test the factored energy against the assembled stiffness."""
        basis = SpatialBasis(200, n_modes=12)
        p = 1.0 + 0.3 * np.cos(basis.x)
        c = np.random.default_rng(1).standard_normal((12, 3))
        stiffness = basis.stiffness(p)
        np.testing.assert_allclose(
            basis.energy(p, c), np.einsum("ij,ik,kj->j", c, stiffness, c), rtol=1e-10
        )

    def test_apply_stiffness(self):
        """Test (p y'')'' on grid samples for p = 1 and y = sin 2x."""
        basis = SpatialBasis(257)
        x = basis.x
        np.testing.assert_allclose(
            basis.apply_stiffness(np.ones(257), np.sin(2 * x)), 16.0 * np.sin(2 * x), atol=1e-8
        )

    def test_apply_stiffness_ignores_unresolved_modes(self):
        """Test that sine content above n_modes does not reach (p y'')''."""
        basis = SpatialBasis(512)
        x = basis.x
        p = 1.0 + 0.2 * np.cos(x)
        clean = 1e-4 * np.sin(x)
        noisy = clean + 1e-12 * np.sin(500 * x)
        np.testing.assert_allclose(
            basis.apply_stiffness(p, noisy), basis.apply_stiffness(p, clean), rtol=0, atol=1e-11
        )
        np.testing.assert_allclose(basis.resolve(np.sin(3 * x)), np.sin(3 * x), atol=1e-13)
        np.testing.assert_allclose(basis.resolve(np.sin(100 * x)), 0.0, atol=1e-13)

    def test_finite_difference_convergence(self):
        """Test second-order convergence of the first finite-difference eigenvalue."""
        errors = []
        sizes = (129, 257, 513)
        for n_x in sizes:
            basis = SpatialBasis(n_x, Discretization.FINITE_DIFFERENCE)
            lowest = np.linalg.eigvalsh(basis.stiffness(np.ones(n_x)))[0]
            errors.append(abs(lowest - 1.0))
        orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
        self.assertTrue(np.all(orders >= 1.9), orders)


if __name__ == "__main__":
    unittest.main()
