import json
import textwrap
from pathlib import Path

import numpy as np

from pyjai import cli
from pyjai.core import tickio
from pyjai.core.tickio import TickSeries
from pyjai.tests import base

DRIFT_ONLY_INI = textwrap.dedent(
    """\
    [model]
    x0 = 2.0
    alpha0 = 1.0
    sigma0 = 0.0
    alpha_speed = 0.0
    alpha_vol = 0.0
    sigma_coupling = 0.0

    [scheme]
    delta_inv = 1024
    phi = constant
    lambda_level = 1.0
    lambda_speed = 0.0
    lambda_vol = 0.0
    lambda_init = 1.0
    """
)

SMALL_STUDY_INI = textwrap.dedent(
    """\
    [estimator]
    mc_size = 10000

    [study]
    betas = 1.5
    rhos = 0.5
    delta_inv = 300
    n_reps = 2
    """
)


class TestCli(base.TestCase):
    """Tests for the pyjai command line."""

    def setUp(self) -> None:
        """Work in a fresh directory."""
        super().setUp()
        self.dir = self.tempdir()

    def _ini(self, text: str, name: str = "run.ini") -> str:
        path = self.dir / name
        path.write_text(text)
        return str(path)

    def _simulate(self, out: Path, *extra: str) -> int:
        return cli.main(["simulate", "--out", str(out), "--seed", "3", *extra])

    def test_simulate_drift_only(self) -> None:
        """A drift-only model on a regular grid gives prices x0 + τ."""
        out = self.dir / "ticks.csv"
        self.assertEqual(0, self._simulate(out, "--config", self._ini(DRIFT_ONLY_INI)))
        ticks = tickio.read_ticks(out)
        self.assertEqual(1025, ticks.times.size)
        np.testing.assert_array_equal(ticks.times, np.arange(1025) / 1024.0)
        np.testing.assert_allclose(ticks.prices, 2.0 + ticks.times, atol=1e-12)
        self.assertIn("1024 observations", self.output())
        manifest = json.loads(out.with_suffix(".json").read_text())
        self.assertEqual("simulate", manifest["command"])
        self.assertNotIn("--config", manifest["arguments"])
        self.assertEqual({"seed": 3}, manifest["seeds"])

    def test_simulate_is_reproducible(self) -> None:
        """The same seed writes the same bytes."""
        first, second = self.dir / "a.csv", self.dir / "b.csv"
        self._simulate(first)
        self._simulate(second)
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_replay_simulate(self) -> None:
        """Replaying a manifest rewrites identical ticks."""
        out = self.dir / "ticks.csv"
        scheme = self.dir / "scheme.csv"
        self._simulate(out, "--scheme-out", str(scheme))
        original = out.read_bytes()
        out.unlink()
        self.assertEqual(0, cli.main(["replay", str(out.with_suffix(".json"))]))
        self.assertEqual(original, out.read_bytes())
        self.assertTrue(scheme.is_file())

    def test_estimate(self) -> None:
        """A simulated file gives a report and scaling prices keeps β̂."""
        out = self.dir / "ticks.csv"
        self._simulate(out)
        self.assertEqual(0, cli.main(["estimate", str(out), "--true-beta", "1.5"]))
        (first,) = self._beta_hats()

        ticks = tickio.read_ticks(out)
        scaled = self.dir / "scaled.csv"
        tickio.write_ticks(scaled, TickSeries(ticks.times, 100.0 * ticks.prices))
        report_csv = self.dir / "report.csv"
        self.assertEqual(
            0, cli.main(["estimate", str(scaled), "--csv", str(report_csv)])
        )
        _, second = self._beta_hats()
        self.assertClose(first, second, rel=1e-10)
        self.assertTrue(report_csv.read_text().startswith("beta_hat,beta_bar,"))

    def test_replay_estimate(self) -> None:
        """An estimate with --csv writes a manifest that replays to the same row."""
        ticks = self.dir / "ticks.csv"
        self._simulate(ticks)
        report_csv = self.dir / "report.csv"
        config = self._ini("[estimator]\nrho = 2\n")
        args = ["estimate", str(ticks), "--config", config, "--csv", str(report_csv)]
        self.assertEqual(0, cli.main(args))
        original = report_csv.read_bytes()
        manifest = json.loads(report_csv.with_suffix(".json").read_text())
        self.assertEqual("estimate", manifest["command"])
        self.assertIn("rho = 2.0\n", manifest["config_ini"])
        self.assertEqual([str(report_csv)], manifest["outputs"])

        report_csv.unlink()
        self.assertEqual(0, cli.main(["replay", str(report_csv.with_suffix(".json"))]))
        self.assertEqual(original, report_csv.read_bytes())

    def test_estimate_manifest_flag(self) -> None:
        """--manifest records a run that only prints its report."""
        ticks = self.dir / "ticks.csv"
        self._simulate(ticks)
        target = self.dir / "estimate.json"
        self.assertEqual(0, cli.main(["estimate", str(ticks), "--manifest", str(target)]))
        first = self._beta_hats()
        self.assertEqual([], json.loads(target.read_text())["outputs"])
        self.assertEqual(0, cli.main(["replay", str(target)]))
        self.assertEqual(first * 2, self._beta_hats())

    def _beta_hats(self) -> list[float]:
        return [
            float(line.split("=", 1)[1])
            for line in self.output().splitlines()
            if line.startswith("beta_hat=")
        ]

    def test_estimate_too_few_rows(self) -> None:
        """A ten-line file cannot fill the windows."""
        path = self.dir / "short.csv"
        rows = "".join(f"{i / 8},{np.sin(i)}\n" for i in range(9))
        path.write_text("time,price\n" + rows)
        self.assertEqual(3, cli.main(["estimate", str(path)]))

    def test_estimate_unknown_key(self) -> None:
        """Configuration errors exit with status 2."""
        out = self.dir / "ticks.csv"
        self._simulate(out)
        config = self._ini("[estimator]\nrhoo = 2\n")
        self.assertEqual(2, cli.main(["estimate", str(out), "--config", config]))

    def test_estimate_flags_override_config(self) -> None:
        """Estimator flags win over the configuration file."""
        out = self.dir / "ticks.csv"
        self._simulate(out)
        config = self._ini("[estimator]\nrho = 2\n")
        cli.main(["estimate", str(out), "--config", config, "--rho", "0.5", "--debias"])
        record = self.output()
        self.assertNotIn("beta_bar=NA", record)
        self.assertIn("v_n=", record)

    def test_constants(self) -> None:
        """The constants are printed one per line."""
        self.assertEqual(
            0, cli.main(["constants", "--beta", "1.5", "--phi", "constant"])
        )
        output = self.output()
        self.assertIn("phi=constant", output)
        self.assertIn("kappa_p_beta=2", output)
        self.assertIn("c_p_beta=", output)

    def test_mc_table(self) -> None:
        """One replication gives an NA variance; replay is byte-identical."""
        out_dir = self.dir / "study"
        args = ["mc-table", "--config", self._ini(SMALL_STUDY_INI), "--out-dir", str(out_dir)]
        self.assertEqual(0, cli.main([*args, "--reps", "1"]))
        study = (out_dir / "study.csv").read_text().splitlines()
        self.assertEqual(2, len(study))
        self.assertEqual("NA", study[1].split(",")[4])

        self.assertEqual(0, cli.main(args))
        original = (out_dir / "study.csv").read_bytes()
        self.assertEqual(0, cli.main(["replay", str(out_dir / "manifest.json")]))
        self.assertEqual(original, (out_dir / "study.csv").read_bytes())

    def test_mc_table_qq(self) -> None:
        """Cells with enough replications get QQ files."""
        out_dir = self.dir / "study"
        config = self._ini(SMALL_STUDY_INI)
        cli.main(
            ["mc-table", "--config", config, "--out-dir", str(out_dir), "--reps", "12", "--svg"]
        )
        self.assertTrue((out_dir / "qq_beta1.5_rho0.5_dinv300.csv").is_file())
        self.assertTrue((out_dir / "qq_beta1.5_rho0.5_dinv300.svg").is_file())

    def test_sensitivity(self) -> None:
        """One row per divisor."""
        out = self.dir / "sensitivity.csv"
        config = self._ini(SMALL_STUDY_INI)
        self.assertEqual(
            0,
            cli.main(
                ["sensitivity", "--config", config, "--divisors", "1,2", "--out", str(out)]
            ),
        )
        self.assertEqual(3, len(out.read_text().splitlines()))
        self.assertIn("divisor=2", self.output())

    def test_replay_sensitivity(self) -> None:
        """The sensitivity table replays byte for byte from its manifest."""
        out = self.dir / "sensitivity.csv"
        config = self._ini(SMALL_STUDY_INI)
        cli.main(["sensitivity", "--config", config, "--divisors", "1,3", "--out", str(out)])
        original = out.read_bytes()
        manifest = json.loads(out.with_suffix(".json").read_text())
        self.assertEqual("sensitivity", manifest["command"])
        self.assertNotIn("--config", manifest["arguments"])
        self.assertIn("master_seed", manifest["seeds"])

        out.unlink()
        self.assertEqual(0, cli.main(["replay", str(out.with_suffix(".json"))]))
        self.assertEqual(original, out.read_bytes())
