import textwrap

import fixtures

from pyjai import config
from pyjai.config import RunConfig
from pyjai.core.simulator import ResidualJumps
from pyjai.exceptions import ConfigError
from pyjai.tests import base

EXAMPLE = textwrap.dedent(
    """\
    # drift only, no stable part
    [model]
    beta = 1.7
    sigma0 = 0.0
    alpha_speed = 0   ; constant drift
    alpha_vol = 0
    residual_intensity = 3.5

    [scheme]
    delta_inv = 2000
    phi = constant

    [estimator]
    rho = 2
    debias = yes

    [study]
    betas = 1.3, 1.7
    delta_inv = 1000, 10000
    n_reps = 20
    """
)


class TestParseConfig(base.TestCase):
    """Tests for INI parsing."""

    def test_defaults(self) -> None:
        """An empty file is the reference configuration."""
        parsed = config.parse_config("")
        defaults = RunConfig()
        self.assertEqual(defaults.model, parsed.model)
        self.assertEqual(defaults.scheme, parsed.scheme)
        self.assertEqual(defaults.estimator, parsed.estimator)
        self.assertEqual(1000, round(1.0 / parsed.scheme.delta_n))
        self.assertEqual(1, parsed.study.workers)

    def test_values(self) -> None:
        """Every section is read into its dataclass."""
        parsed = config.parse_config(EXAMPLE, "example.ini")
        self.assertEqual(1.7, parsed.model.stable.beta)
        self.assertEqual(0.0, parsed.model.alpha_speed)
        self.assertEqual(ResidualJumps(3.5), parsed.model.residual_jumps)
        self.assertEqual(1.0 / 2000, parsed.scheme.delta_n)
        self.assertEqual("constant", parsed.scheme.phi.kind)
        self.assertEqual(2.0, parsed.estimator.rho)
        self.assertTrue(parsed.estimator.debias)
        self.assertEqual((1.3, 1.7), parsed.study.betas)
        self.assertEqual((1000, 10000), parsed.study.delta_inv)
        self.assertEqual(parsed.estimator, parsed.study.estimator)
        self.assertEqual("example.ini", parsed.source)

    def test_unknown_key(self) -> None:
        """Unknown keys are reported with their line."""
        text = "[model]\nbeta = 1.5\nbetta = 1.6\n"
        error = self.assertRaises(ConfigError, config.parse_config, text)
        self.assertEqual(("model", "betta", 3), (error.section, error.key, error.line))
        self.assertIn("line=3", str(error))

    def test_unknown_section(self) -> None:
        """Unknown sections are reported with their line."""
        error = self.assertRaises(ConfigError, config.parse_config, "\n[modle]\nx0 = 1\n")
        self.assertEqual(("modle", 2), (error.section, error.line))

    def test_bad_value(self) -> None:
        """Unparsable values name the key."""
        error = self.assertRaises(
            ConfigError, config.parse_config, "[estimator]\np = half\n"
        )
        self.assertEqual(("estimator", "p", 2), (error.section, error.key, error.line))

    def test_out_of_domain(self) -> None:
        """Domain errors from the dataclasses become configuration errors."""
        error = self.assertRaises(
            ConfigError, config.parse_config, "[estimator]\n\nrho = 1.0\n"
        )
        self.assertEqual(("estimator", "rho", 3), (error.section, error.key, error.line))

    def test_both_step_keys(self) -> None:
        """delta_inv and delta_n are exclusive."""
        self.assertRaises(
            ConfigError, config.parse_config, "[scheme]\ndelta_inv = 10\ndelta_n = 0.1\n"
        )

    def test_syntax_error(self) -> None:
        """Lines outside a section are rejected."""
        self.assertRaises(ConfigError, config.parse_config, "beta = 1.5\n")

    def test_missing_file(self) -> None:
        """A missing file is a configuration error."""
        self.assertRaises(ConfigError, config.load_config, self.tempdir() / "none.ini")

    def test_load_file(self) -> None:
        """Files are read with their path as source."""
        path = self.tempdir() / "run.ini"
        path.write_text(EXAMPLE)
        self.assertEqual(str(path), config.load_config(path).source)


class TestRenderConfig(base.TestCase):
    """Tests for rendering a configuration back to INI."""

    def test_round_trip(self) -> None:
        """Rendered text parses back to the same configuration."""
        for parsed in (RunConfig(), config.parse_config(EXAMPLE)):
            again = config.parse_config(config.render_config(parsed))
            self.assertEqual(parsed.model, again.model)
            self.assertEqual(parsed.scheme, again.scheme)
            self.assertEqual(parsed.estimator, again.estimator)
            self.assertEqual(parsed.study, again.study)

    def test_table_law(self) -> None:
        """A table duration law survives rendering."""
        text = "[scheme]\nphi = table\nphi_values = 1, 3\nphi_weights = 1, 1\n"
        parsed = config.parse_config(text)
        again = config.parse_config(config.render_config(parsed))
        self.assertEqual(parsed.scheme.phi, again.scheme.phi)


class TestWorkers(base.TestCase):
    """Tests for the worker count."""

    def test_environment(self) -> None:
        """PYJAI_WORKERS sets the default worker count."""
        self.useFixture(fixtures.EnvironmentVariable("PYJAI_WORKERS", "3"))
        self.assertEqual(3, config.default_workers())
        self.assertEqual(3, config.parse_config("").study.workers)
        self.assertEqual(2, config.parse_config("[study]\nworkers = 2\n").study.workers)

    def test_bad_environment(self) -> None:
        """A non-numeric worker count is rejected."""
        self.useFixture(fixtures.EnvironmentVariable("PYJAI_WORKERS", "many"))
        self.assertRaises(ConfigError, config.default_workers)
