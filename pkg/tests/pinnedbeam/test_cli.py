import csv
import io
import json
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

from pinnedbeam import __version__
from pinnedbeam.cli import run

SMALL = """
[coefficients]
n_x = 256

[solver]
J = 8
stages = 1

[sieve]
l_cap = 64
"""


class TestCli(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)
        self.config = self.root / "small.toml"
        self.config.write_text(SMALL)

    def tearDown(self):
        self.tmp.cleanup()

    def invoke(self, *argv, output="reports"):
        """Run the command line with the small configuration; returns (code, stdout)."""
        out = self.root / output
        stdout = io.StringIO()
        args = list(argv) + ["--config", str(self.config), "--output", str(out), "-q"]
        with redirect_stdout(stdout), redirect_stderr(io.StringIO()):
            code = run(args)
        return code, stdout.getvalue()

    def read_csv(self, name, output="reports"):
        with (self.root / output / name).open(newline="") as handle:
            return list(csv.reader(handle))

    def test_version(self):
        """Test that --version names the package and exits 0."""
        stdout = io.StringIO()
        with redirect_stdout(stdout):
            code = run(["--version"])
        self.assertEqual(code, 0)
        self.assertIn(f"pinnedbeam {__version__}", stdout.getvalue())

    def test_usage_errors(self):
        """Test that unknown flags and missing commands exit 1."""
        with redirect_stderr(io.StringIO()):
            self.assertEqual(run(["solve", "--bogus"]), 1)
            self.assertEqual(run([]), 1)
            self.assertEqual(run(["sieve", "--omega-range", "2"]), 1)

    def test_configuration_error(self):
        """Test that an out-of-range setting exits 1."""
        code, _ = self.invoke("solve", "--tau", "3")
        self.assertEqual(code, 1)
        self.config.write_text("[solver]\nunknown = 1\n")
        code, _ = self.invoke("solve")
        self.assertEqual(code, 1)

    def test_solve(self):
        """Test a solve at zero coupling and its report files."""
        code, stdout = self.invoke("solve", "--epsilon", "0", "--omega", "2.37")
        self.assertEqual(code, 0)
        self.assertIn("converged        True", stdout)
        stages = self.read_csv("stages.csv")
        self.assertEqual(stages[0][:2], ["stage", "N"])
        self.assertEqual([row[1] for row in stages[1:]], ["4", "16"])
        summary = json.loads((self.root / "reports" / "summary.json").read_text())
        self.assertEqual(summary["strong_residual"], 0.0)
        self.assertTrue((self.root / "reports" / "solution.csv").exists())
        self.assertTrue((self.root / "reports" / "mode_residuals.csv").exists())

    def test_solve_domain_error(self):
        """Test that a resonant frequency exits 2."""
        code, _ = self.invoke("solve", "--omega", "1.0001")
        self.assertEqual(code, 2)

    def test_solve_is_reproducible(self):
        """Test that two runs write byte-identical CSV files."""
        for output in ("first", "second"):
            code, _ = self.invoke("solve", "--omega", "2.37", output=output)
            self.assertEqual(code, 0)
        for name in ("stages.csv", "mode_residuals.csv", "solution.csv"):
            with self.subTest(name=name):
                self.assertEqual(
                    (self.root / "first" / name).read_bytes(),
                    (self.root / "second" / name).read_bytes(),
                )

    def test_eig(self):
        """Test the spectrum listing of the constant beam."""
        code, stdout = self.invoke("eig", "--j-range", "2,8")
        self.assertEqual(code, 0)
        rows = self.read_csv("eigenvalues.csv")
        self.assertEqual(rows[0], ["j", "lambda", "mu", "r_j"])
        self.assertEqual(len(rows), 1 + 8)
        self.assertAlmostEqual(float(rows[2][1]), 16.0, places=8)
        self.assertAlmostEqual(float(rows[2][2]), 4.0, places=8)
        self.assertEqual(rows[1][3], "")
        self.assertLess(abs(float(rows[2][3])), 1e-6)
        self.assertIn("upsilon0", stdout)
        self.assertIn("over j=2..8", stdout)
        self.assertFalse((self.root / "reports" / "asymptotics.csv").exists())

    def test_eig_check_asymptotics(self):
        """Test that --check-asymptotics fills r_j for every j and reports the slope."""
        code, stdout = self.invoke("eig", "--J", "6", "--check-asymptotics")
        self.assertEqual(code, 0)
        rows = self.read_csv("eigenvalues.csv")
        self.assertEqual(len(rows), 1 + 6)
        self.assertTrue(all(row[3] != "" for row in rows[1:]))
        self.assertIn("slope", stdout)
        self.assertIn("over j=1..6", stdout)
        code, stdout = self.invoke("eig", output="plain")
        self.assertEqual(code, 0)
        self.assertNotIn("slope", stdout)
        self.assertTrue(all(row[3] == "" for row in self.read_csv("eigenvalues.csv", "plain")[1:]))

    def test_eig_profile(self):
        """Test that --profile takes the [coefficients] section from another file."""
        profile = self.root / "profile.toml"
        profile.write_text('[coefficients]\nn_x = 256\ngenerator = "sine_pair"\namplitude = 0.05\n')
        code, _ = self.invoke("eig", "--profile", str(profile), output="profiled")
        self.assertEqual(code, 0)
        code, _ = self.invoke(
            "eig", "--generator", "sine_pair", "--amplitude", "0.05", output="flagged"
        )
        self.assertEqual(code, 0)
        self.assertEqual(
            (self.root / "profiled" / "eigenvalues.csv").read_bytes(),
            (self.root / "flagged" / "eigenvalues.csv").read_bytes(),
        )
        code, _ = self.invoke("eig", "--profile", str(self.root / "missing.toml"))
        self.assertEqual(code, 1)

    def test_qsolve(self):
        """Test the time-mean solve at w = 0."""
        code, stdout = self.invoke("qsolve", "--epsilon", "0.001")
        self.assertEqual(code, 0)
        self.assertIn("margin", stdout)
        self.assertEqual(len(self.read_csv("qsolve.csv")), 1 + 256)
        self.assertEqual(self.read_csv("newton_trace.csv")[0], ["step", "residual"])

    def test_qsolve_forcing(self):
        """Test that --forcing takes the [forcing] section from another file."""
        forcing = self.root / "forcing.toml"
        forcing.write_text('[forcing]\nstatic = "sine"\nstatic_amplitude = 1.0\n')
        code, _ = self.invoke("qsolve", "--epsilon", "0.001", "--forcing", str(forcing))
        self.assertEqual(code, 0)
        v = [float(row[1]) for row in self.read_csv("qsolve.csv")[1:]]
        # v'''' = eps sin x to leading order
        self.assertAlmostEqual(max(abs(value) for value in v), 1e-3, delta=1e-5)
        forcing.write_text('[forcing]\nmodel = "unknown"\n')
        code, _ = self.invoke("qsolve", "--forcing", str(forcing))
        self.assertEqual(code, 1)

    def test_linop_check(self):
        """Test the operator diagnostics at a certified frequency."""
        code, _ = self.invoke("linop-check", "--epsilon", "0.001", "--omega", "2.37")
        self.assertEqual(code, 0)
        summary = json.loads((self.root / "reports" / "linop_check.json").read_text())
        self.assertEqual(summary["N"], 4)
        self.assertEqual(summary["resonant"], [])
        self.assertTrue(summary["neumann_converged"])
        self.assertLess(summary["direct_vs_preconditioned"], 1e-10)

    def test_sieve(self):
        """Test a single-gamma measure and its files."""
        code, stdout = self.invoke("sieve", "--omega-range", "2,3", "--gamma", "0.01")
        self.assertEqual(code, 0)
        self.assertIn("gamma=0.01 passed", stdout)
        intervals = self.read_csv("excluded_gamma_0.01.csv")
        self.assertEqual(intervals[0], ["low", "high", "family", "l", "j", "causes"])
        self.assertGreater(len(intervals), 3)
        ladder = self.read_csv("ladder.csv")
        self.assertEqual(len(ladder), 2)

    def test_sieve_ladder_with_sampling(self):
        """Test the default ladder and the sampling comparison."""
        code, stdout = self.invoke("sieve", "--sample-check", "20001")
        self.assertEqual(code, 0)
        self.assertIn("fitted Q", stdout)
        self.assertEqual(stdout.count("sampled"), 3)
        self.assertEqual(len(self.read_csv("ladder.csv")), 4)

    def test_sweep(self):
        """Test a serial sweep with one refused point per coupling."""
        code, stdout = self.invoke(
            "sweep",
            "--epsilon-range", "0,0.001",
            "--epsilon-steps", "2",
            "--omega-range", "1.0001,2.37",
            "--omega-steps", "2",
            "--stages", "0",
            "--workers", "1",
        )
        self.assertEqual(code, 0)
        self.assertIn("converged    2/4", stdout)
        rows = self.read_csv("sweep.csv")
        self.assertEqual(rows[0], ["index", "epsilon", "omega", "status", "residual", "flags"])
        self.assertEqual(
            [row[3] for row in rows[1:]],
            ["UncertifiedParameters", "UncertifiedParameters", "converged", "converged"],
        )
        events = (self.root / "reports" / "sweep_events.jsonl").read_text().splitlines()
        self.assertEqual(len(events), 4)
        frontier = self.read_csv("frontier.csv")
        self.assertEqual(frontier[1][1], "nan")
        self.assertEqual(float(frontier[2][1]), 0.001)


if __name__ == "__main__":
    unittest.main()
