import unittest

import numpy as np

from pinnedbeam.coefficients import build_profile
from pinnedbeam.discretization import SpatialBasis, uniform_grid
from pinnedbeam.eigensolver import EigenProblem, solve_spectrum
from pinnedbeam.fields import (
    NormMachinery,
    Projection,
    TimeFourierField,
    field_product,
    mode_weights,
    next_pow2,
    project,
    sobolev_norm,
)
from pinnedbeam.generators import Zero

N_X = 129


def random_field(n_time, seed=0, decay=2.0):
    rng = np.random.default_rng(seed)
    x = uniform_grid(N_X)
    modes = {}
    for l in range(n_time + 1):
        k = np.arange(1, 6)
        c = (rng.standard_normal(5) + 1j * rng.standard_normal(5)) / (1.0 + l) ** decay
        if l == 0:
            c = c.real
        modes[l] = np.sin(np.outer(x, k)) @ c
    return TimeFourierField.from_modes(modes, n_time)


class TestTimeFourierField(unittest.TestCase):
    def test_zeros(self):
        """Test the zero field."""
        u = TimeFourierField.zeros(3, N_X)
        self.assertEqual(u.n_time, 3)
        self.assertEqual(u.n_x, N_X)
        self.assertEqual(sobolev_norm(u, 1.0), 0.0)
        with self.assertRaises(ValueError):
            TimeFourierField.zeros(-1, N_X)

    def test_from_modes_conjugation(self):
        """Test that negative modes are stored through conjugation."""
        x = uniform_grid(N_X)
        u = TimeFourierField.from_modes({-2: 1j * np.sin(x)}, 3)
        np.testing.assert_allclose(u.mode(2), -1j * np.sin(x))
        np.testing.assert_allclose(u.mode(-2), 1j * np.sin(x))
        np.testing.assert_allclose(u.mode(7), 0.0)

    def test_from_modes_errors(self):
        """Test inconsistent pairs, complex means and out-of-range modes."""
        x = uniform_grid(N_X)
        with self.assertRaises(ValueError):
            TimeFourierField.from_modes({1: np.sin(x), -1: 2 * np.sin(x)}, 2)
        with self.assertRaises(ValueError):
            TimeFourierField.from_modes({0: 1j * np.sin(x)}, 2)
        with self.assertRaises(ValueError):
            TimeFourierField.from_modes({3: np.sin(x)}, 2)
        with self.assertRaises(ValueError):
            TimeFourierField.from_modes({}, 2)

    def test_modes_are_read_only(self):
        """Test that stored modes cannot be mutated."""
        u = TimeFourierField.zeros(1, N_X)
        with self.assertRaises(ValueError):
            u.modes[0, 3] = 1.0

    def test_time_samples(self):
        """Test samples of sin x cos t and their transform back."""
        x = uniform_grid(N_X)
        u = TimeFourierField.from_modes({1: 0.5 * np.sin(x)}, 1)
        samples = u.time_samples(8)
        t = 2 * np.pi * np.arange(8) / 8
        np.testing.assert_allclose(samples, np.outer(np.cos(t), np.sin(x)), atol=1e-14)
        back = TimeFourierField.from_samples(samples, 1)
        np.testing.assert_allclose(back.modes, u.modes, atol=1e-14)
        self.assertEqual(back.tail_norm, 0.0)
        with self.assertRaises(ValueError):
            u.time_samples(2)

    def test_from_samples_records_tail(self):
        """Test that discarded modes are accumulated in the tail norm."""
        x = uniform_grid(N_X)
        t = 2 * np.pi * np.arange(16) / 16
        samples = np.outer(np.cos(3 * t), np.sin(x))
        u = TimeFourierField.from_samples(samples, 1)
        self.assertAlmostEqual(u.tail_norm**2, 0.75 * np.pi, places=10)
        np.testing.assert_allclose(u.modes, 0.0, atol=1e-14)

    def test_truncate_and_pad(self):
        """Test truncation bookkeeping and padding."""
        u = random_field(4)
        short = u.truncate(2)
        self.assertEqual(short.n_time, 2)
        self.assertAlmostEqual(
            short.tail_norm**2,
            sobolev_norm(project(u, "P_N_perp", 2), 0.0) ** 2 / 2.0,
            places=10,
        )
        padded = short.pad(5)
        self.assertEqual(padded.n_time, 5)
        np.testing.assert_allclose(padded.modes[3:], 0.0)
        with self.assertRaises(ValueError):
            u.pad(2)

    def test_arithmetic(self):
        """Test addition, subtraction, scaling and negation."""
        u, v = random_field(2, seed=1), random_field(4, seed=2)
        w = u + v
        self.assertEqual(w.n_time, 4)
        np.testing.assert_allclose((w - v).truncate(2).modes, u.modes, atol=1e-14)
        np.testing.assert_allclose((2.0 * u).modes, (u * 2.0).modes)
        np.testing.assert_allclose((-u).modes, -u.modes)
        with self.assertRaises(ValueError):
            u + TimeFourierField.zeros(2, 65)

    def test_with_mode0(self):
        """Test replacing the time mean."""
        x = uniform_grid(N_X)
        u = random_field(2).with_mode0(np.sin(x))
        np.testing.assert_allclose(u.mean, np.sin(x))

    def test_rows(self):
        """Test the CSV row layout."""
        rows = TimeFourierField.zeros(1, N_X).to_rows()
        self.assertEqual(len(rows), 2 * 2 * N_X)
        self.assertEqual(rows[0], ("real", 0, 0, 0.0))


class TestSobolevNorm(unittest.TestCase):
    def test_closed_form(self):
        """Test ||sin x cos t||_1^2 = 3 pi / 2."""
        x = uniform_grid(N_X)
        u = TimeFourierField.from_modes({1: 0.5 * np.sin(x)}, 2)
        self.assertAlmostEqual(sobolev_norm(u, 1.0) ** 2, 1.5 * np.pi, places=10)

    def test_weights(self):
        """Test the mode weights."""
        np.testing.assert_allclose(mode_weights(2, 1.0), [1.0, 4.0, 10.0])
        np.testing.assert_allclose(mode_weights(2, 0.0), [1.0, 4.0, 4.0])
        for s in (0.0, 0.5, 2.0):
            with self.subTest(s=s):
                self.assertEqual(mode_weights(3, s)[0], 1.0)
        with self.assertRaises(ValueError):
            mode_weights(2, -1.0)

    def test_monotone_in_s(self):
        """Test that the norm grows with s."""
        u = random_field(6)
        norms = [sobolev_norm(u, s) for s in (0.0, 0.5, 1.0, 2.0)]
        self.assertTrue(np.all(np.diff(norms) > 0))

    def test_log_convex_in_s(self):
        """Test ||u||_s <= ||u||_a^(1/2) ||u||_b^(1/2) for s = (a + b) / 2."""
        u = random_field(6, seed=3)
        for a, b in ((0.0, 2.0), (1.0, 3.0), (0.5, 1.5)):
            with self.subTest(a=a, b=b):
                mid = sobolev_norm(u, (a + b) / 2)
                bound = np.sqrt(sobolev_norm(u, a) * sobolev_norm(u, b))
                self.assertLessEqual(mid, bound * (1 + 1e-12))


class TestProjections(unittest.TestCase):
    def setUp(self):
        self.u = random_field(8, seed=4)

    def test_partitions(self):
        """Test V + W = I and P_N + P_N_perp = W."""
        u = self.u
        np.testing.assert_allclose((project(u, "V") + project(u, "W")).modes, u.modes)
        np.testing.assert_allclose(
            (project(u, Projection.P_N, 3) + project(u, Projection.P_N_PERP, 3)).modes,
            project(u, "W").modes,
        )

    def test_idempotent(self):
        """Test that every projector is idempotent."""
        for which in Projection:
            with self.subTest(which=which):
                once = project(self.u, which, 3)
                np.testing.assert_allclose(project(once, which, 3).modes, once.modes)

    def test_invalid_cutoff(self):
        """Test that P_N needs a cut-off inside the truncation."""
        with self.assertRaises(ValueError):
            project(self.u, "P_N")
        with self.assertRaises(ValueError):
            project(self.u, "P_N", 9)

    def test_smoothing_estimates(self):
        """Test ||P_N u||_{s'} <= N^{s'-s} ||u||_s and ||P_N^perp u||_s <= N^{s-s'} ||u||_{s'}."""
        u = self.u
        for N in (1, 3, 6):
            for s in (1.0, 2.0, 3.0):
                for delta in (0.5, 1.0, 2.0):
                    with self.subTest(N=N, s=s, delta=delta):
                        low = sobolev_norm(project(u, "P_N", N), s + delta)
                        self.assertLessEqual(low, N**delta * sobolev_norm(u, s) * (1 + 1e-12))
                        high = sobolev_norm(project(u, "P_N_perp", N), s)
                        self.assertLessEqual(
                            high, N ** (-delta) * sobolev_norm(u, s + delta) * (1 + 1e-12)
                        )


class TestFieldProduct(unittest.TestCase):
    def test_matches_pointwise_product(self):
        """Test the collocation product against products of samples."""
        u, v = random_field(2, seed=5), random_field(3, seed=6)
        w = field_product(u, v)
        self.assertEqual(w.n_time, 5)
        self.assertLess(w.tail_norm, 1e-12)
        count = 16
        np.testing.assert_allclose(
            w.time_samples(count), u.time_samples(count) * v.time_samples(count), atol=1e-12
        )

    def test_truncated_product(self):
        """Test that a truncated product records its tail."""
        u = random_field(2, seed=7)
        w = field_product(u, u, n_time=1)
        self.assertEqual(w.n_time, 1)
        self.assertGreater(w.tail_norm, 0.0)

    def test_next_pow2(self):
        """Test the FFT size helper."""
        self.assertEqual([next_pow2(n) for n in (1, 2, 3, 5, 8, 9)], [1, 2, 4, 8, 8, 16])


class TestNormMachinery(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        profile = build_profile(Zero().pair(257))
        spectrum = solve_spectrum(EigenProblem(profile, np.zeros(257), SpatialBasis(257)), 8)
        cls.norms = NormMachinery(spectrum, s=1.0)
        cls.x = profile.x

    def test_eigen_norm(self):
        """Test ||sin x||_eigen^2 = (lambda_1 + M) pi / 2 = pi."""
        self.assertAlmostEqual(float(self.norms.eigen_norm(np.sin(self.x))) ** 2, np.pi, places=10)

    def test_rho_product(self):
        """Test (sin x, sin x)_rho = pi / 2."""
        value = self.norms.rho_product(np.sin(self.x), np.sin(self.x))
        self.assertAlmostEqual(value, np.pi / 2, places=12)

    def test_equivalence_constants(self):
        """Test the measured ratios on sin x and sin 2x."""
        lower, upper = self.norms.equivalence_constants([np.sin(self.x), np.sin(2 * self.x)])
        self.assertAlmostEqual(lower, np.sqrt(2 / 3), places=10)
        self.assertAlmostEqual(upper, np.sqrt(17 / 21), places=10)
        with self.assertRaises(ValueError):
            self.norms.equivalence_constants([])

    def test_eigen_field_norm(self):
        """Test the eigen field norm of sin x cos t."""
        u = TimeFourierField.from_modes({1: 0.5 * np.sin(self.x)}, 1)
        self.assertAlmostEqual(self.norms.eigen_field_norm(u) ** 2, np.pi, places=10)

    def test_needs_spectrum(self):
        """Test that the eigen norm requires a spectrum."""
        with self.assertRaises(ValueError):
            NormMachinery().eigen_norm(np.sin(self.x))
        with self.assertRaises(ValueError):
            NormMachinery(s=-1.0)


if __name__ == "__main__":
    unittest.main()
