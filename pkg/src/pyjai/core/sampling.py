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

"""Random observation times driven by an intensity process."""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy import integrate

from pyjai.checks import require_positive, require_range
from pyjai.constants import (
    DEFAULT_LAMBDA_CLAMP,
    DEFAULT_LAMBDA_INIT,
    DEFAULT_LAMBDA_LEVEL,
    DEFAULT_LAMBDA_SPEED,
    DEFAULT_LAMBDA_VOL,
    LAMBDA_SUBSTEP_DIVISOR,
)
from pyjai.core.stable import FloatArray, PhiSpec, sample_phi
from pyjai.exceptions import ParameterError, SimulationError

logger = logging.getLogger(__name__)

_OK = 0
_NEED_PHI = 1
_NEED_NOISE = 2
_NOT_INCREASING = 3


@dataclass(frozen=True)
class LambdaSpec:
    """Mean-reverting intensity dλ = speed (level - λ) dt + vol dW~, clamped below."""

    level: float = DEFAULT_LAMBDA_LEVEL
    speed: float = DEFAULT_LAMBDA_SPEED
    vol: float = DEFAULT_LAMBDA_VOL
    init: float = DEFAULT_LAMBDA_INIT
    clamp_floor: float = DEFAULT_LAMBDA_CLAMP

    def __post_init__(self) -> None:
        """Validate the intensity parameters."""
        require_positive("init", self.init)
        require_positive("clamp_floor", self.clamp_floor)
        require_range("speed", self.speed, low=0.0)
        require_range("vol", self.vol, low=0.0)


@dataclass(frozen=True)
class SamplingTimes:
    """A generated observation scheme.

    ``taus`` holds τ₀ = 0, ..., τ_{N}, plus the first time beyond the horizon.
    ``phi_draws[i]`` is the duration used for τ_i (``phi_draws[0]`` is NaN) and
    ``lambda_at_tau[i]`` is the intensity at τ_i. ``gaps[i]`` is the stored
    Δ_n φ_i λ_{τ_{i-2}} (Δ_n φ₁ for i = 1, 0 for i = 0), and ``taus`` is its
    running sum taken left to right, so ``np.cumsum(gaps)`` rebuilds ``taus``
    bit for bit.
    """

    taus: FloatArray
    gaps: FloatArray
    lambda_at_tau: FloatArray
    phi_draws: FloatArray
    n_obs: int
    delta_n: float
    horizon: float
    clamp_events: int = 0
    lambda_substeps: int = 0

    def observed_taus(self) -> FloatArray:
        """τ₀, ..., τ_{N_n(T)}, i.e. without the overshooting time."""
        return self.taus[: self.n_obs + 1]


@njit(cache=True)
def _scheme_kernel(
    delta_n: float,
    horizon: float,
    phi: FloatArray,
    noise: FloatArray,
    level: float,
    speed: float,
    vol: float,
    init: float,
    clamp: float,
    max_substep: float,
) -> tuple[int, int, FloatArray, FloatArray, FloatArray, int, int]:
    size = phi.shape[0]
    taus = np.empty(size)
    lam = np.empty(size)
    taus[0] = 0.0
    lam[0] = max(init, clamp)
    lam_now = lam[0]
    gaps = np.empty(size)
    gaps[0] = 0.0
    k = 0
    clamps = 0
    i = 1
    while True:
        if i >= size:
            return _NEED_PHI, i, taus, gaps, lam, clamps, k
        if i == 1:
            gap = delta_n * phi[1]
        else:
            gap = delta_n * phi[i] * lam[i - 2]
        if not gap > 0.0:
            return _NOT_INCREASING, i, taus, gaps, lam, clamps, k
        gaps[i] = gap
        taus[i] = taus[i - 1] + gap

        m = max(1, int(math.ceil(gap / max_substep)))
        h = gap / m
        root_h = math.sqrt(h)
        for _ in range(m):
            if k >= noise.shape[0]:
                return _NEED_NOISE, i, taus, gaps, lam, clamps, k
            lam_now = lam_now + speed * (level - lam_now) * h + vol * root_h * noise[k]
            k += 1
            if lam_now < clamp:
                lam_now = clamp
                clamps += 1
        lam[i] = lam_now
        if taus[i] > horizon:
            return _OK, i + 1, taus, gaps, lam, clamps, k
        i += 1


def generate_times(
    delta_n: float,
    lam: LambdaSpec,
    phi: PhiSpec,
    horizon: float,
    rng: np.random.Generator,
) -> SamplingTimes:
    """Generate τ₀ = 0, τ₁ = Δ_n φ₁, τ_i = τ_{i-1} + Δ_n φ_i λ_{τ_{i-2}}.

    λ is advanced by Euler steps of length at most Δ_n/5 landing exactly on
    every τ, and clamped at ``lam.clamp_floor``. Generation stops at the first
    τ beyond ``horizon``; that time is kept but not counted in ``n_obs``.

    :param float delta_n: Base sampling step Δ_n.
    :param LambdaSpec lam: Intensity dynamics.
    :param PhiSpec phi: Law of the durations.
    :param float horizon: Observation horizon T.
    :param Generator rng: Random stream; two child streams (durations, intensity
        noise) are spawned from it.
    :rtype: SamplingTimes
    """
    require_positive("delta_n", delta_n)
    require_positive("horizon", horizon)
    phi_rng, noise_rng = rng.spawn(2)
    expected = horizon / delta_n
    n_phi = int(2.0 * expected) + 16
    n_noise = int(LAMBDA_SUBSTEP_DIVISOR * 1.5 * expected) + n_phi
    phi_buf = sample_phi(phi, phi_rng, n_phi)
    noise_buf = noise_rng.standard_normal(n_noise)
    max_substep = delta_n / LAMBDA_SUBSTEP_DIVISOR

    while True:
        status, n, taus, gaps, lam_values, clamps, substeps = _scheme_kernel(
            delta_n,
            horizon,
            phi_buf,
            noise_buf,
            lam.level,
            lam.speed,
            lam.vol,
            lam.init,
            lam.clamp_floor,
            max_substep,
        )
        if status == _OK:
            break
        if status == _NEED_PHI:
            logger.debug("Growing duration buffer beyond %d draws", phi_buf.size)
            phi_buf = np.concatenate([phi_buf, sample_phi(phi, phi_rng, phi_buf.size)])
        elif status == _NEED_NOISE:
            logger.debug("Growing intensity noise buffer beyond %d draws", noise_buf.size)
            noise_buf = np.concatenate(
                [noise_buf, noise_rng.standard_normal(noise_buf.size)]
            )
        else:
            msg = f"Observation times stopped increasing at index {n}"
            raise SimulationError(msg, time=float(taus[n - 1]))

    if clamps:
        logger.warning("Intensity was clamped at %s on %d substeps", lam.clamp_floor, clamps)
    phi_draws = phi_buf[:n].copy()
    phi_draws[0] = np.nan
    return SamplingTimes(
        taus=taus[:n].copy(),
        gaps=gaps[:n].copy(),
        lambda_at_tau=lam_values[:n].copy(),
        phi_draws=phi_draws,
        n_obs=n - 2,
        delta_n=delta_n,
        horizon=horizon,
        clamp_events=int(clamps),
        lambda_substeps=int(substeps),
    )


def count_observations(times: SamplingTimes, t: float) -> int:
    """Return N_n(t), the number of i >= 1 with τ_i <= t.

    :raises ParameterError: If t lies outside [0, horizon].
    """
    if not 0.0 <= t <= times.horizon:
        msg = f"t must lie in [0, {times.horizon}], got {t}"
        raise ParameterError(msg, {"t": t})
    return int(np.searchsorted(times.taus, t, side="right")) - 1


def integrated_inverse_intensity(times: SamplingTimes) -> float:
    """Trapezoid estimate of ∫₀^τ_N 1/λ_s ds over the observed times."""
    taus = times.observed_taus()
    return float(integrate.trapezoid(1.0 / times.lambda_at_tau[: taus.size], taus))
