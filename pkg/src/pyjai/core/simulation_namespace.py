from dataclasses import replace
from typing import Optional

from pyjai.base_namespace import BaseNamespace
from pyjai.core.sampling import SamplingTimes, generate_times
from pyjai.core.simulator import PathSample, simulate_replication
from pyjai.core.tickio import TickSeries


class SimulationNamespace(BaseNamespace):
    """Namespace for the observation scheme and path simulation."""

    def scheme(self, seed: Optional[int] = None) -> SamplingTimes:
        """Generate observation times from the configured scheme."""
        scheme = self._wrapper.config.scheme
        return generate_times(
            scheme.delta_n, scheme.lam, scheme.phi, scheme.horizon, self._rng(seed)
        )

    def path(self, seed: Optional[int] = None, beta: Optional[float] = None) -> PathSample:
        """Simulate one replication of the configured model.

        :param int seed: Replication seed, the API seed if omitted.
        :param float beta: Override of the model's β.
        :rtype: PathSample
        """
        model = self._wrapper.config.model
        if beta is not None:
            model = replace(model, stable=replace(model.stable, beta=beta))
        return simulate_replication(model, self._wrapper.config.scheme, self._seed(seed))

    def ticks(self, seed: Optional[int] = None) -> TickSeries:
        """Observed part of :meth:`path` as a tick series."""
        return TickSeries.from_path(self.path(seed))
