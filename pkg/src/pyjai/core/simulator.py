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

"""Euler simulation of the stable-driven pure-jump model on the random grid."""

import hashlib
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Literal, Optional, Union

import numpy as np
from numba import njit

from pyjai.checks import require_positive, require_range
from pyjai.constants import (
    DEFAULT_ALPHA0,
    DEFAULT_ALPHA_LEVEL,
    DEFAULT_ALPHA_SPEED,
    DEFAULT_ALPHA_VOL,
    DEFAULT_DELTA_INV,
    DEFAULT_EULER_DIVISOR,
    DEFAULT_HORIZON,
    DEFAULT_SIGMA0,
    DEFAULT_X0,
)
from pyjai.core.sampling import LambdaSpec, SamplingTimes, generate_times
from pyjai.core.stable import (
    FloatArray,
    PhiSpec,
    StableLaw,
    a_beta,
    sample_standard_stable,
)
from pyjai.exceptions import SimulationError

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence]


@dataclass(frozen=True)
class ResidualJumps:
    """Compound Poisson jumps Y with a symmetric jump-size law.

    ``two_point`` jumps are ±size with equal probability, ``uniform`` jumps
    are uniform on [-size, size].
    """

    intensity: float
    law: Literal["two_point", "uniform"] = "two_point"
    size: float = 1.0

    def __post_init__(self) -> None:
        """Validate the jump component."""
        require_range("intensity", self.intensity, low=0.0)
        require_positive("size", self.size)


@dataclass(frozen=True)
class ModelConfig:
    """X = x0 + ∫α ds + ∫σ_{s-} dL_s + Y with OU drift α and dσ = coupling·α dW."""

    stable: StableLaw
    x0: float = DEFAULT_X0
    alpha0: float = DEFAULT_ALPHA0
    sigma0: float = DEFAULT_SIGMA0
    alpha_speed: float = DEFAULT_ALPHA_SPEED
    alpha_level: float = DEFAULT_ALPHA_LEVEL
    alpha_vol: float = DEFAULT_ALPHA_VOL
    sigma_coupling: float = 1.0
    residual_jumps: Optional[ResidualJumps] = None
    euler_substep_divisor: int = DEFAULT_EULER_DIVISOR

    def __post_init__(self) -> None:
        """Validate the model."""
        require_range("euler_substep_divisor", self.euler_substep_divisor, low=1)
        require_range("alpha_speed", self.alpha_speed, low=0.0)
        require_range("alpha_vol", self.alpha_vol, low=0.0)


@dataclass(frozen=True)
class SchemeConfig:
    """Parameters of the observation scheme of one replication."""

    delta_n: float = 1.0 / DEFAULT_DELTA_INV
    lam: LambdaSpec = field(default_factory=LambdaSpec)
    phi: PhiSpec = field(default_factory=PhiSpec.truncated_exponential)
    horizon: float = DEFAULT_HORIZON

    def __post_init__(self) -> None:
        """Validate the scheme."""
        require_positive("delta_n", self.delta_n)
        require_positive("horizon", self.horizon)


@dataclass(frozen=True)
class PathSample:
    """Observed values of X at the scheme times, with provenance."""

    times: SamplingTimes
    values: FloatArray
    true_beta: float
    seed: Any = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Check the observed pairs line up and are finite."""
        if self.values.shape != self.times.taus.shape:
            msg = "values and taus must have the same length"
            raise SimulationError(msg)
        if not np.all(np.isfinite(self.values)):
            msg = "path contains non-finite values"
            raise SimulationError(msg)

    def observed(self) -> tuple[FloatArray, FloatArray]:
        """(τ_i, X_{τ_i}) for i = 0, ..., N_n(T), dropping the overshooting time."""
        n = self.times.n_obs + 1
        return self.times.taus[:n], self.values[:n]

    def digest(self) -> str:
        """SHA-256 of the time and value arrays, for regression pinning."""
        sha = hashlib.sha256()
        sha.update(np.ascontiguousarray(self.times.taus).tobytes())
        sha.update(np.ascontiguousarray(self.values).tobytes())
        return sha.hexdigest()


@njit(cache=True)
def _euler_kernel(
    taus: FloatArray,
    divisor: int,
    x0: float,
    alpha0: float,
    sigma0: float,
    speed: float,
    level: float,
    alpha_vol: float,
    coupling: float,
    scale: float,
    beta: float,
    stable: FloatArray,
    normal: FloatArray,
) -> tuple[FloatArray, int]:
    n = taus.shape[0]
    values = np.empty(n)
    values[0] = x0
    x = x0
    a = alpha0
    s = sigma0
    inv_beta = 1.0 / beta
    k = 0
    for i in range(1, n):
        h = (taus[i] - taus[i - 1]) / divisor
        jump_scale = scale * h**inv_beta
        root_h = math.sqrt(h)
        for _ in range(divisor):
            dw = root_h * normal[k]
            # σ from the left endpoint multiplies the stable increment
            x += a * h + s * jump_scale * stable[k]
            s += coupling * a * dw
            a += speed * (level - a) * h + alpha_vol * dw
            k += 1
        if not (math.isfinite(x) and math.isfinite(a) and math.isfinite(s)):
            return values, i
        values[i] = x
    return values, -1


def _residual_path(
    jumps: ResidualJumps, taus: FloatArray, rng: np.random.Generator
) -> tuple[FloatArray, int]:
    horizon = float(taus[-1])
    if jumps.intensity == 0.0:
        return np.zeros_like(taus), 0
    mean = jumps.intensity * horizon
    batch = int(mean + 10.0 * math.sqrt(mean) + 10.0)
    arrivals = np.cumsum(rng.exponential(1.0 / jumps.intensity, batch))
    while arrivals[-1] <= horizon:
        more = np.cumsum(rng.exponential(1.0 / jumps.intensity, batch))
        arrivals = np.concatenate([arrivals, arrivals[-1] + more])
    arrivals = arrivals[arrivals <= horizon]
    if jumps.law == "two_point":
        sizes = jumps.size * rng.choice(np.array([-1.0, 1.0]), size=arrivals.size)
    else:
        sizes = rng.uniform(-jumps.size, jumps.size, arrivals.size)
    cumulative = np.concatenate([[0.0], np.cumsum(sizes)])
    return cumulative[np.searchsorted(arrivals, taus, side="right")], int(arrivals.size)


def simulate_path(
    model: ModelConfig,
    times: SamplingTimes,
    rng: np.random.Generator,
    seed: Any = None,
) -> PathSample:
    """Simulate X at the scheme times by Euler on a refinement of the grid.

    Every gap is split into ``model.euler_substep_divisor`` equal substeps.
    Stable increments over a substep of length h are drawn exactly as
    ``(A_β h)^(1/β) S`` with S standard symmetric stable; α and σ share one
    Brownian driver.

    :param ModelConfig model: Model parameters.
    :param SamplingTimes times: Observation scheme (the overshooting time is
        simulated too).
    :param Generator rng: Random stream; child streams for the stable
        increments, the Brownian driver and the residual jumps are spawned.
    :param seed: Provenance recorded on the sample.
    :raises SimulationError: If the state becomes non-finite.
    :rtype: PathSample
    """
    stable_rng, brownian_rng, jump_rng = rng.spawn(3)
    law = model.stable
    divisor = int(model.euler_substep_divisor)
    total = (times.taus.size - 1) * divisor
    stable_draws = sample_standard_stable(law.beta, stable_rng, total)
    normal_draws = brownian_rng.standard_normal(total)
    scale = a_beta(law.beta, law.A) ** (1.0 / law.beta)

    values, failed = _euler_kernel(
        times.taus,
        divisor,
        model.x0,
        model.alpha0,
        model.sigma0,
        model.alpha_speed,
        model.alpha_level,
        model.alpha_vol,
        model.sigma_coupling,
        scale,
        law.beta,
        stable_draws,
        normal_draws,
    )
    if failed >= 0:
        msg = f"Euler state became non-finite at observation {failed}"
        logger.error(msg)
        raise SimulationError(msg, time=float(times.taus[failed]))

    n_jumps = 0
    if model.residual_jumps is not None:
        residual, n_jumps = _residual_path(model.residual_jumps, times.taus, jump_rng)
        values = values + residual

    return PathSample(
        times=times,
        values=values,
        true_beta=law.beta,
        seed=seed,
        metadata={
            "euler_substeps": total,
            "substep_divisor": divisor,
            "lambda_substeps": times.lambda_substeps,
            "clamp_events": times.clamp_events,
            "residual_jumps": n_jumps,
        },
    )


def replication_streams(
    rep_seed: SeedLike,
) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent (scheme, path) generators derived from a replication seed."""
    seq = (
        rep_seed
        if isinstance(rep_seed, np.random.SeedSequence)
        else np.random.SeedSequence(rep_seed)
    )
    scheme_seq, path_seq = (
        np.random.SeedSequence(seq.entropy, spawn_key=(*seq.spawn_key, child))
        for child in (0, 1)
    )
    return np.random.default_rng(scheme_seq), np.random.default_rng(path_seq)


def simulate_replication(
    model: ModelConfig, scheme: SchemeConfig, rep_seed: SeedLike
) -> PathSample:
    """Generate the scheme and then the path of one replication.

    Identical ``rep_seed`` gives a bit-identical sample; the scheme stream
    does not depend on the model.
    """
    scheme_rng, path_rng = replication_streams(rep_seed)
    times = generate_times(
        scheme.delta_n, scheme.lam, scheme.phi, scheme.horizon, scheme_rng
    )
    if isinstance(rep_seed, np.random.SeedSequence):
        provenance: Any = {"entropy": rep_seed.entropy, "spawn_key": rep_seed.spawn_key}
    else:
        provenance = rep_seed
    return simulate_path(model, times, path_rng, seed=provenance)
