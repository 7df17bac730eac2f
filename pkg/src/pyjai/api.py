import logging
from dataclasses import replace
from pathlib import Path
from typing import Any, Optional, Union, cast

from pyjai.checks import require_range
from pyjai.config import RunConfig, load_config
from pyjai.constants import DEFAULT_SEED
from pyjai.core.estimation_namespace import EstimationNamespace
from pyjai.core.simulation_namespace import SimulationNamespace
from pyjai.core.study_namespace import StudyNamespace

# Create a module-level logger
logger = logging.getLogger(__name__)


class JumpActivityAPI(object):
    """Front object holding the configuration, the seed and the namespaces."""

    def __init__(
        self,
        config_file: Optional[Union[str, Path]] = None,
        config: Optional[RunConfig] = None,
        seed: int = DEFAULT_SEED,
        workers: Optional[int] = None,
    ) -> None:
        """Initialize from a configuration file, a parsed configuration or defaults.

        :param config_file: INI file, see :func:`pyjai.config.parse_config`.
        :param RunConfig config: Already parsed configuration.
        :param int seed: Seed of single simulations.
        :param int workers: Override of the study worker count.
        :raises ValueError: If both a file and a configuration are given.
        """
        if config_file and config:
            msg = "Provide either config_file or config, not both."
            raise ValueError(msg)
        if config_file:
            logger.info("Initializing JumpActivityAPI with configuration file.")
            config = load_config(config_file)
        elif config is None:
            logger.info("Initializing JumpActivityAPI with the reference configuration.")
            config = RunConfig()

        if workers is not None:
            require_range("workers", workers, low=1)
            config = replace(config, study=replace(config.study, workers=workers))

        self.config = config
        self.seed = seed

        # Lazy initialization of namespaces
        self._namespaces: dict[str, Any] = {}

    def _set_config(self, config: RunConfig) -> None:
        """Replace the configuration and invalidate existing namespaces."""
        self.config = config
        self._namespaces.clear()

    @property
    def simulation(self) -> SimulationNamespace:
        """Access scheme and path simulation."""
        if "simulation" not in self._namespaces:
            self._namespaces["simulation"] = SimulationNamespace(self)
        return cast(SimulationNamespace, self._namespaces["simulation"])

    @property
    def estimation(self) -> EstimationNamespace:
        """Access the estimator and its constants."""
        if "estimation" not in self._namespaces:
            self._namespaces["estimation"] = EstimationNamespace(self)
        return cast(EstimationNamespace, self._namespaces["estimation"])

    @property
    def study(self) -> StudyNamespace:
        """Access Monte Carlo studies."""
        if "study" not in self._namespaces:
            self._namespaces["study"] = StudyNamespace(self)
        return cast(StudyNamespace, self._namespaces["study"])
