# Copyright 2024 The pyjai developers
#
# This file is part of pyjai
#
# pyjai is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# pyjai is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with pyjai. If not, see <http://www.gnu.org/licenses/>.

import os
from pathlib import Path

import fixtures
import numpy as np
import testtools

from pyjai.core.sampling import LambdaSpec
from pyjai.core.simulator import SchemeConfig
from pyjai.core.stable import PhiSpec

# Monte Carlo reproductions take minutes; opt in through the environment
long_test = testtools.skipUnless(
    os.environ.get("PYJAI_LONG_TESTS") == "1", "set PYJAI_LONG_TESTS=1"
)
full_test = testtools.skipUnless(
    os.environ.get("PYJAI_FULL_TESTS") == "1", "set PYJAI_FULL_TESTS=1"
)

CONSTANT_LAMBDA = LambdaSpec(level=1.0, speed=0.0, vol=0.0, init=1.0)


def regular_scheme(delta_inv: int = 1000) -> SchemeConfig:
    """Scheme with φ ≡ 1 and λ ≡ 1, i.e. the grid i/delta_inv."""
    return SchemeConfig(
        delta_n=1.0 / delta_inv, lam=CONSTANT_LAMBDA, phi=PhiSpec.constant()
    )


class TestCase(testtools.TestCase):  # type: ignore
    """Test case setup class."""

    def setUp(self) -> None:
        """Set up a test case."""
        super(TestCase, self).setUp()
        stdout = self.useFixture(fixtures.StringStream("stdout")).stream
        self.useFixture(fixtures.MonkeyPatch("sys.stdout", stdout))
        stderr = self.useFixture(fixtures.StringStream("stderr")).stream
        self.useFixture(fixtures.MonkeyPatch("sys.stderr", stderr))
        self.useFixture(fixtures.LoggerFixture(nuke_handlers=False, level=None))
        self.stdout = stdout
        self.useFixture(fixtures.EnvironmentVariable("PYJAI_WORKERS"))

    def output(self) -> str:
        """Everything written to stdout so far."""
        self.stdout.flush()
        self.stdout.seek(0)
        return str(self.stdout.read())

    def tempdir(self) -> Path:
        """Fresh temporary directory removed after the test."""
        return Path(self.useFixture(fixtures.TempDir()).path)

    def rng(self, seed: int = 0) -> np.random.Generator:
        """Seeded generator for test data."""
        return np.random.default_rng(seed)

    def assertClose(  # noqa: N802
        self, expected: float, actual: float, rel: float = 1e-12, abs_: float = 0.0
    ) -> None:
        """Assert ``actual`` is within ``rel`` relative or ``abs_`` absolute of ``expected``."""
        tolerance = max(rel * abs(expected), abs_)
        if not abs(actual - expected) <= tolerance:
            self.fail(f"{actual!r} differs from {expected!r} by more than {tolerance!r}")
