import unittest

import numpy as np

from pinnedbeam import (
    CubicForcing,
    LinearForcing,
    PeriodicBeam,
    Preset,
    RunConfig,
    build_profile,
)
from pinnedbeam.eigensolver import asymptotic_coefficients
from pinnedbeam.errors import UncertifiedParameters
from pinnedbeam.fields import TimeFourierField
from pinnedbeam.generators import SinePair
from pinnedbeam.lyapunov_schmidt import solve_q
from pinnedbeam.sieve import measure_estimate


def small_config(**solver):
    config = RunConfig().with_overrides("coefficients", n_x=256)
    config = config.with_overrides("sieve", l_cap=64)
    return config.with_overrides("solver", J=8, stages=1, **solver)


class TestPeriodicBeam(unittest.TestCase):
    def test_with_default_settings(self):
        """Test the default beam: constant coefficients, cubic forcing, the desk problem."""
        beam = PeriodicBeam.with_default_settings()
        self.assertIsInstance(beam.model, CubicForcing)
        self.assertEqual(beam.profile.n_x, 512)
        self.assertEqual(beam.settings.epsilon, 1e-3)
        self.assertEqual(beam.settings.omega, 2.5)
        self.assertEqual(beam.schedule().Ns, (4, 16, 64))
        self.assertEqual(
            str(beam),
            "zero beam, n_x=512, " + str(beam.model)
            + ", eps=0.001, omega=2.5, N0=4, stages=2, J=16",
        )
        self.assertTrue(repr(beam).startswith("PeriodicBeam(config=RunConfig("))

    def test_presets(self):
        """Test that every preset builds."""
        self.assertIsInstance(PeriodicBeam.from_preset(Preset.LINEAR).model, LinearForcing)
        sine = PeriodicBeam.from_preset(Preset.SINE_PAIR)
        self.assertEqual(sine.config.coefficients.generator, "sine_pair")
        self.assertNotAlmostEqual(float(np.ptp(sine.profile.rho)), 0.0)
        self.assertEqual(PeriodicBeam.from_preset(Preset.DESK).config, RunConfig())
        with self.assertRaises(ValueError):
            PeriodicBeam.from_preset("unknown")

    def test_explicit_components(self):
        """Test construction from a profile and a model."""
        profile = SinePair().amplitude(0.05).pair(256)
        beam = PeriodicBeam(
            profile=build_profile(profile),
            model=LinearForcing(),
            config=small_config(),
        )
        self.assertEqual(beam.ctx.n_x, 256)
        self.assertGreater(beam.spectrum().lambdas[0], 0.0)

    def test_with_settings(self):
        """Test that solver settings are replaced and the rest is shared."""
        beam = PeriodicBeam.from_config(small_config())
        refusing = beam.with_settings(stage_policy="refuse", omega=2.37)
        self.assertEqual(refusing.settings.stage_policy, "refuse")
        self.assertEqual(refusing.settings.omega, 2.37)
        self.assertIs(refusing.profile, beam.profile)
        self.assertIs(refusing.ctx.basis, beam.ctx.basis)
        self.assertEqual(beam.settings.stage_policy, "record")

    def test_spectrum_and_asymptotics(self):
        """Test the cached spectrum and the asymptotic check of the constant beam."""
        beam = PeriodicBeam.from_config(small_config())
        spectrum = beam.spectrum()
        self.assertEqual(spectrum.J, 8)
        self.assertIs(beam.spectrum(), spectrum)
        np.testing.assert_allclose(spectrum.lambdas, np.arange(1, 9) ** 4.0, rtol=1e-9)
        asym, report = beam.asymptotics((2, 8))
        self.assertAlmostEqual(asym.upsilon0, 0.0, places=10)
        self.assertLess(report.mu_deviation, 1e-6)

    def test_solve_q_and_linearize(self):
        """Test the time-mean solve and the operator at the configured point."""
        beam = PeriodicBeam.from_config(small_config())
        state = beam.solve_q()
        self.assertEqual(state.steps, 0)
        op = beam.linearize()
        self.assertEqual(op.N, 4)
        self.assertEqual(op.J, 8)
        self.assertAlmostEqual(op.diag[0, 0], 5.25, places=6)

    def test_solve(self):
        """Test the staged solve at a certified frequency."""
        beam = PeriodicBeam.from_config(small_config(omega=2.37))
        state, report = beam.solve()
        self.assertTrue(state.finished)
        self.assertTrue(report.converged)
        self.assertEqual(report.flags, ("decay_fit_unavailable",))
        self.assertEqual(report.inputs["config_digest"], beam.config.digest)
        self.assertLessEqual(report.strong_residual, 1e-9)

    def test_solve_refused(self):
        """Test that the refuse policy surfaces the stage-1 failure at omega = 2.5."""
        beam = PeriodicBeam.from_config(small_config(stage_policy="refuse"))
        with self.assertRaises(UncertifiedParameters):
            beam.solve()


class TestMeasure(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.beam = PeriodicBeam.from_config(small_config())

    def test_matches_closed_form_spectrum(self):
        """Test the facade measure against mu_j = j^2."""
        report = self.beam.measure(gamma=0.01)
        mus = np.arange(1, 30, dtype=float) ** 2
        expected = measure_estimate(0.0, (2.0, 3.0), 0.01, 1.5, mus, l_cap=64)
        self.assertAlmostEqual(report.passed_fraction, expected.passed_fraction, places=8)
        self.assertEqual(report.l_cap, 64)

    def test_resonance_centres(self):
        """Test that the centres cover the requested range."""
        centres = self.beam.resonance_centres(200.0)
        self.assertGreaterEqual(centres.values[-1] - centres.slack[-1], 200.0)
        np.testing.assert_allclose(centres.values[:5], [1.0, 4.0, 9.0, 16.0, 25.0], rtol=1e-9)
        np.testing.assert_array_equal(centres.slack[: centres.resolved], 0.0)

    def test_perturbed_tail(self):
        """Test that centres beyond the grid follow the asymptotics at the perturbed potential."""
        config = small_config().with_overrides("forcing", static="sine", static_amplitude=1.0)
        beam = PeriodicBeam.from_config(config)
        centres = beam.perturbed_centres(0.1, 2000.0)
        self.assertTrue(centres.tail_used)
        self.assertEqual(centres.resolved, beam.ctx.max_modes)

        q_state = solve_q(beam.ctx, 0.1, TimeFourierField.zeros(1, beam.ctx.n_x))
        potential = 0.1 * beam.ctx.compose(q_state.u, 1, n_out=0).mean
        self.assertGreater(float(np.max(np.abs(potential))), 0.0)
        asym = asymptotic_coefficients(beam.profile, potential, beam.ctx.max_modes)
        unloaded = asymptotic_coefficients(
            beam.profile, np.zeros_like(potential), beam.ctx.max_modes
        )
        self.assertNotAlmostEqual(asym.upsilon1, unloaded.upsilon1, places=6)

        j = np.arange(centres.resolved + 1, centres.values.size + 1)
        tail = centres.values[centres.resolved :]
        np.testing.assert_allclose(tail, np.sqrt(asym.smooth(j)), rtol=1e-14)
        self.assertTrue(np.all(centres.slack[centres.resolved :] > 0.0))
        self.assertGreaterEqual(tail[-1] - centres.slack[-1], 2000.0)

    def test_epsilon_grid_average(self):
        """Test that a load-free time mean leaves the averaged measure unchanged."""
        config = small_config().with_overrides("sieve", epsilon_grid=(0.0, 1e-3))
        beam = PeriodicBeam.from_config(config)
        self.assertAlmostEqual(
            beam.measure_rectangle(0.01),
            self.beam.measure(gamma=0.01).passed_fraction,
            places=10,
        )

    def test_sample_excluded(self):
        """Test the pointwise mask at frequencies on and off a resonance."""
        mask = self.beam.sample_excluded(np.array([2.37, 2.5, 3.0]), gamma=0.01)
        np.testing.assert_array_equal(mask, [False, True, True])


if __name__ == "__main__":
    unittest.main()
