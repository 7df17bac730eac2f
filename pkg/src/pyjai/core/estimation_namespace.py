from typing import Optional, cast

import numpy.typing as npt

from pyjai.base_namespace import BaseNamespace
from pyjai.core.estimators import (
    EstimateReport,
    asymptotic_variance,
    estimate,
    rate_conditions,
)
from pyjai.core.stable import StableConstants, known_phi_constants
from pyjai.core.tickio import TickSeries


class EstimationNamespace(BaseNamespace):
    """Namespace for β estimation and the constants of its limit theory."""

    def estimate(
        self,
        taus: npt.ArrayLike,
        xs: npt.ArrayLike,
        true_beta: Optional[float] = None,
        known_phi: bool = False,
    ) -> EstimateReport:
        """Estimate β with the configured estimator.

        :param taus: Observation times.
        :param xs: Observed prices.
        :param float true_beta: Known β, for the standardized statistic.
        :param bool known_phi: Take C_{p,β} and κ_{β,β} from the configured
            duration law instead of estimating them.
        :rtype: EstimateReport
        """
        config = self._wrapper.config
        return estimate(
            taus,
            xs,
            config.estimator,
            true_beta=true_beta,
            known_phi=config.scheme.phi if known_phi else None,
        )

    def estimate_ticks(
        self, series: TickSeries, true_beta: Optional[float] = None
    ) -> EstimateReport:
        """Estimate β from a tick series."""
        return self.estimate(series.times, series.prices, true_beta)

    def constants(
        self, beta: Optional[float] = None, p: Optional[float] = None
    ) -> StableConstants:
        """Constants for the configured duration law, cached per (β, p)."""
        config = self._wrapper.config
        beta = config.model.stable.beta if beta is None else beta
        p = config.estimator.p if p is None else p
        return cast(
            StableConstants,
            self._cached(
                ("constants", beta, p),
                lambda: known_phi_constants(
                    p, beta, config.scheme.phi, config.estimator.mc_size
                ),
            ),
        )

    def theoretical_variance(self, beta: Optional[float] = None) -> float:
        """Limit variance of the estimator at β for the configured ρ and p."""
        config = self._wrapper.config
        beta = config.model.stable.beta if beta is None else beta
        consts = self.constants(beta)
        return asymptotic_variance(
            beta,
            config.estimator.rho,
            config.estimator.p,
            consts.kappa_beta_beta,
            consts.c_p_beta,
        )

    def rate_conditions(self, beta: Optional[float] = None) -> list[str]:
        """Rate conditions the configured tuning violates at β."""
        config = self._wrapper.config
        est = config.estimator
        beta = config.model.stable.beta if beta is None else beta
        return rate_conditions(est.p, est.u_exponent, est.k_exponent, beta)
