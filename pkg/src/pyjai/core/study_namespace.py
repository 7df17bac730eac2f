from collections.abc import Sequence

from pyjai.base_namespace import BaseNamespace
from pyjai.core.harness import CellResult, StudyRow, divisor_sensitivity, run_study


class StudyNamespace(BaseNamespace):
    """Namespace for Monte Carlo studies."""

    def run(self) -> list[CellResult]:
        """Run the configured study."""
        return run_study(self._wrapper.config.study)

    def sensitivity(self, divisors: Sequence[int] = (1, 5, 20)) -> list[StudyRow]:
        """First study cell rerun at several Euler substep divisors."""
        return divisor_sensitivity(self._wrapper.config.study, divisors)
