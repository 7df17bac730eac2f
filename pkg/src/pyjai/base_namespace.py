from collections.abc import Callable
from typing import Any, Optional

import numpy as np


class BaseNamespace:
    """Base class for pyjai namespaces to manage common functionality."""

    def __init__(self, wrapper: Any) -> None:  # noqa: ANN401
        """Initialize a base namespace object."""
        self._wrapper = wrapper
        self._cache: dict[Any, Any] = {}

    def _cached(self, key: Any, factory: Callable[[], Any]) -> Any:  # noqa: ANN401
        """Lazy computation of values shared by the namespace's calls."""
        if key not in self._cache:
            self._cache[key] = factory()
        return self._cache[key]

    def _seed(self, seed: Optional[int]) -> int:
        """The given seed, or the wrapper's seed."""
        return self._wrapper.seed if seed is None else seed

    def _rng(self, seed: Optional[int], *key: int) -> np.random.Generator:
        """Generator for ``seed`` (the wrapper's by default) and a spawn key."""
        return np.random.default_rng(
            np.random.SeedSequence(self._seed(seed), spawn_key=key)
        )
