import logging
import math
import warnings

import fixtures
import numpy as np
from scipy import stats
from scipy.integrate import IntegrationWarning

from pyjai.core import stable
from pyjai.core.stable import PhiSpec, StableLaw
from pyjai.exceptions import ParameterError
from pyjai.tests import base


class TestStableLaw(base.TestCase):
    """Tests for the stable sampler and the Lévy-Khintchine constant."""

    def test_a_beta_matches_closed_form(self) -> None:
        """Quadrature agrees with -2AΓ(-β)cos(πβ/2)."""
        for beta in (1.05, 1.1, 1.3, 1.5, 1.7, 1.9, 1.95):
            self.assertClose(
                stable.a_beta_closed_form(beta), stable.a_beta(beta), rel=1e-8
            )

    def test_a_beta_is_linear_in_scale(self) -> None:
        """A_β scales with A."""
        self.assertClose(3.0 * stable.a_beta(1.4), stable.a_beta(1.4, 3.0))

    def test_beta_outside_range(self) -> None:
        """β must lie in (1, 2)."""
        for beta in (1.0, 2.0, 0.5, math.nan):
            self.assertRaises(ParameterError, StableLaw, beta)
            self.assertRaises(
                ParameterError, stable.sample_standard_stable, beta, self.rng()
            )

    def test_ratio_needs_p_below_half_beta(self) -> None:
        """A_β/μ_{p,β} is only defined for p < β/2."""
        self.assertRaises(ParameterError, stable.ratio_a_mu, 0.8, 1.5)
        self.assertClose(
            stable.absolute_moment(0.5, 1.5) ** -3.0, stable.ratio_a_mu(0.5, 1.5)
        )

    def test_absolute_moment_against_samples(self) -> None:
        """E|S|^p matches the sample average of the sampler."""
        draws = stable.sample_standard_stable(1.6, self.rng(3), 400_000)
        empirical = float(np.mean(np.abs(draws) ** 0.5))
        self.assertClose(stable.absolute_moment(0.5, 1.6), empirical, rel=0.01)

    def test_characteristic_function(self) -> None:
        """E cos(uS) = exp(-u^β) within 0.01."""
        for beta in (1.1, 1.5, 1.9):
            draws = stable.sample_standard_stable(beta, self.rng(11), 1_000_000)
            for u in (0.5, 1.0, 2.0):
                empirical = float(np.mean(np.cos(u * draws)))
                self.assertClose(math.exp(-(u**beta)), empirical, rel=0.0, abs_=0.01)

    def test_sum_stability(self) -> None:
        """σ₁S₁ + σ₂S₂ has the law of (σ₁^β + σ₂^β)^(1/β) S."""
        rng = self.rng(5)
        size = 100_000
        for beta, (s1, s2) in ((1.5, (1.0, 1.0)), (1.9, (1.0, 1.0)), (1.3, (0.4, 2.5))):
            first = stable.sample_standard_stable(beta, rng, size)
            second = stable.sample_standard_stable(beta, rng, size)
            pair = s1 * first + s2 * second
            scale = (s1**beta + s2**beta) ** (1.0 / beta)
            single = scale * stable.sample_standard_stable(beta, rng, size)
            self.assertGreater(stats.ks_2samp(pair, single).pvalue, 0.01)

    def test_symmetry(self) -> None:
        """S and -S have the same law."""
        rng = self.rng(8)
        for beta in (1.1, 1.3, 1.5, 1.7, 1.9):
            draws = stable.sample_standard_stable(beta, rng, 100_000)
            mirrored = -stable.sample_standard_stable(beta, rng, 100_000)
            self.assertGreater(stats.ks_2samp(draws, mirrored).pvalue, 0.01)

    def test_ratio_against_sampled_moments(self) -> None:
        """A_β/μ_{p,β} = (E|S|^p)^(-β/p) with the moment taken over 10⁷ draws."""
        rng = self.rng(13)
        chunk, chunks = 1_000_000, 10
        for beta in (1.3, 1.5, 1.7):
            sums = {0.4: 0.0, 0.5: 0.0}
            for _ in range(chunks):
                magnitudes = np.abs(stable.sample_standard_stable(beta, rng, chunk))
                for p in sums:
                    sums[p] += float(np.sum(magnitudes**p))
            for p, total in sums.items():
                moment = total / (chunk * chunks)
                self.assertClose(
                    moment ** (-beta / p), stable.ratio_a_mu(p, beta), rel=0.01
                )

    def test_quadrature_does_not_warn(self) -> None:
        """The Fourier tail integral keeps its accuracy notes out of warnings."""
        stable._levy_khintchine_integral.cache_clear()
        logs = self.useFixture(
            fixtures.FakeLogger(name="pyjai", level=logging.WARNING)
        )
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            for beta in (1.1, 1.5, 1.9):
                self.assertClose(
                    stable.a_beta_closed_form(beta), stable.a_beta(beta), rel=1e-8
                )
        integration = [w for w in caught if issubclass(w.category, IntegrationWarning)]
        self.assertEqual([], integration)
        self.assertEqual("", logs.output)

    def test_single_draw_is_float(self) -> None:
        """Without size a plain float is returned."""
        self.assertIsInstance(stable.sample_standard_stable(1.5, self.rng()), float)
        self.assertEqual((7,), stable.sample_standard_stable(1.5, self.rng(), 7).shape)


class TestPhi(base.TestCase):
    """Tests for the duration laws."""

    def test_truncated_exponential_normalization(self) -> None:
        """E[φ' ∨ 0.1] = 0.1 + e^(-0.1) for a unit exponential."""
        spec = PhiSpec.truncated_exponential()
        self.assertClose(0.1 + math.exp(-0.1), spec.normalization)
        self.assertClose(1.0, stable.phi_moment(spec, 1.0), rel=1e-10)
        self.assertClose(1.0, stable.phi_moment(spec, 0.0), rel=1e-10)

    def test_samples_have_unit_mean(self) -> None:
        """Sampled durations average to one and respect the floor."""
        spec = PhiSpec.truncated_exponential()
        draws = stable.sample_phi(spec, self.rng(2), 1_000_000)
        self.assertClose(1.0, float(np.mean(draws)), rel=0.005)
        self.assertClose(0.1 / spec.normalization, float(draws.min()))

    def test_moment_against_samples(self) -> None:
        """Quadrature moments agree with sample moments."""
        spec = PhiSpec.truncated_exponential(rate=2.0, floor=0.2)
        draws = stable.sample_phi(spec, self.rng(4), 1_000_000)
        for q in (-0.7, -0.3, 0.5, 2.0):
            self.assertClose(
                float(np.mean(draws**q)), stable.phi_moment(spec, q), rel=0.01
            )

    def test_moment_domain(self) -> None:
        """q <= -2 is rejected."""
        self.assertRaises(
            ParameterError, stable.phi_moment, PhiSpec.truncated_exponential(), -2.0
        )

    def test_table_law(self) -> None:
        """Table values are rescaled to mean one."""
        spec = PhiSpec.table((1.0, 3.0), (1.0, 1.0))
        self.assertEqual(2.0, spec.normalization)
        self.assertEqual((0.5, 0.5), spec.weights)
        self.assertClose(1.25, stable.phi_moment(spec, 2.0))
        draws = stable.sample_phi(spec, self.rng(), 100)
        self.assertTrue(set(np.unique(draws)) <= {0.5, 1.5})

    def test_bad_table(self) -> None:
        """Tables need matching positive entries."""
        self.assertRaises(ParameterError, PhiSpec.table, (1.0,), (0.5, 0.5))
        self.assertRaises(ParameterError, PhiSpec.table, (0.0, 1.0), (0.5, 0.5))
        self.assertRaises(ParameterError, PhiSpec, "gamma")

    def test_constant_law(self) -> None:
        """φ ≡ 1."""
        spec = PhiSpec.constant()
        self.assertEqual(1.0, stable.phi_moment(spec, -0.5))
        self.assertEqual(1.0, stable.sample_phi(spec, self.rng()))
        self.assertEqual("constant", spec.describe())


class TestKappa(base.TestCase):
    """Tests for κ_{β,β}, κ_{p,β} and C_{p,β}."""

    def test_constant_phi(self) -> None:
        """Both κ equal 2 for φ ≡ 1."""
        spec = PhiSpec.constant()
        self.assertEqual(2.0, stable.kappa_beta_beta(1.5, spec))
        self.assertEqual(2.0, stable.kappa_p_beta(0.5, 1.5, spec))

    def test_p_equal_beta(self) -> None:
        """κ_{β,β} is the special case p = β."""
        spec = PhiSpec.truncated_exponential()
        self.assertEqual(
            stable.kappa_beta_beta(1.3, spec), stable.kappa_p_beta(1.3, 1.3, spec)
        )
        self.assertRaises(ParameterError, stable.kappa_p_beta, 1.4, 1.3, spec)

    def test_table_is_exact(self) -> None:
        """κ_{p,β} for a two-point law is a finite sum."""
        spec = PhiSpec.table((1.0, 3.0), (1.0, 1.0))
        beta, p = 1.5, 0.5
        points = (0.5 ** (1 - beta), 1.5 ** (1 - beta))
        moment = sum(0.25 * (a + b) ** (p / beta) for a in points for b in points)
        self.assertClose(
            moment ** (beta / p), stable.kappa_p_beta(p, beta, spec), rel=1e-12
        )

    def test_monte_carlo_below_kappa_bb(self) -> None:
        """The Monte Carlo κ_{p,β} lies a little below κ_{β,β}."""
        spec = PhiSpec.truncated_exponential()
        kappa_p = stable.kappa_p_beta(0.5, 1.5, spec, mc_size=500_000)
        kappa_bb = stable.kappa_beta_beta(1.5, spec)
        # Jensen: E[G^r]^(1/r) <= E[G] for r < 1
        self.assertLess(kappa_p, kappa_bb)
        self.assertGreater(kappa_p, 0.85 * kappa_bb)

    def test_monte_carlo_is_reproducible_across_seeds(self) -> None:
        """Two independent 10⁷-pair integrals of κ_{p,β} agree within 0.5%."""
        spec = PhiSpec.truncated_exponential(rate=1.0, floor=0.1)
        first = stable.kappa_p_beta(0.5, 1.5, spec, mc_size=10_000_000, seed=1)
        second = stable.kappa_p_beta(0.5, 1.5, spec, mc_size=10_000_000, seed=2)
        self.assertClose(first, second, rel=0.005)

    def test_constants_do_not_depend_on_scale(self) -> None:
        """C_{p,β} is free of A."""
        spec = PhiSpec.constant()
        unit = stable.stable_constants(0.5, StableLaw(1.5), spec)
        scaled = stable.stable_constants(0.5, StableLaw(1.5, A=3.0), spec)
        self.assertClose(unit.c_p_beta, scaled.c_p_beta)
        self.assertClose(3.0 * unit.a_beta, scaled.a_beta)
        self.assertClose(
            unit.a_beta / (unit.mu_p_beta * unit.kappa_p_beta), unit.c_p_beta
        )

    def test_known_constants_are_cached(self) -> None:
        """Repeated lookups return the same object."""
        spec = PhiSpec.truncated_exponential()
        first = stable.known_phi_constants(0.5, 1.7, spec, mc_size=100_000)
        self.assertIs(first, stable.known_phi_constants(0.5, 1.7, spec, mc_size=100_000))
