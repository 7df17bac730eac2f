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

"""Symmetric stable variates, sampling durations and the stable-law constants."""

import logging
import math
import warnings
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal, Optional, Union, overload

import numpy as np
import numpy.typing as npt
from scipy import integrate, special

from pyjai.checks import require_open, require_positive
from pyjai.constants import (
    DEFAULT_MC_SEED,
    DEFAULT_MC_SIZE,
    DEFAULT_PHI_FLOOR,
    DEFAULT_PHI_RATE,
    DEFAULT_STABLE_SCALE,
)
from pyjai.exceptions import ParameterError

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
PhiKind = Literal["truncated_exponential", "constant", "table"]

_MC_CHUNK = 1_000_000


@dataclass(frozen=True)
class StableLaw:
    """Symmetric β-stable law with Lévy density ``A |x|^(-1-β)``.

    :param float beta: Stability index in (1, 2).
    :param float A: Scale of the Lévy density.
    """

    beta: float
    A: float = DEFAULT_STABLE_SCALE

    def __post_init__(self) -> None:
        """Validate the law."""
        require_open("beta", self.beta, 1.0, 2.0)
        require_positive("A", self.A)


@dataclass(frozen=True)
class PhiSpec:
    """Law of the normalized sampling durations φ.

    Use the :meth:`truncated_exponential`, :meth:`constant` and :meth:`table`
    constructors. ``normalization`` is filled in on construction so that
    ``E[φ] = 1``.
    """

    kind: PhiKind
    rate: float = DEFAULT_PHI_RATE
    floor: float = DEFAULT_PHI_FLOOR
    values: tuple[float, ...] = ()
    weights: tuple[float, ...] = ()
    normalization: float = field(init=False)

    def __post_init__(self) -> None:
        """Validate the spec and compute the normalizing divisor."""
        if self.kind == "truncated_exponential":
            require_positive("rate", self.rate)
            require_positive("floor", self.floor)
            norm = self.floor + math.exp(-self.rate * self.floor) / self.rate
        elif self.kind == "constant":
            norm = 1.0
        elif self.kind == "table":
            if not self.values or len(self.values) != len(self.weights):
                msg = "table PhiSpec needs equally long, nonempty values and weights"
                raise ParameterError(msg)
            if min(self.values) <= 0 or min(self.weights) < 0 or sum(self.weights) <= 0:
                msg = "table PhiSpec needs positive values and nonnegative weights"
                raise ParameterError(msg)
            total = math.fsum(self.weights)
            object.__setattr__(
                self, "weights", tuple(w / total for w in self.weights)
            )
            norm = math.fsum(v * w for v, w in zip(self.values, self.weights))
        else:
            msg = f"Unknown PhiSpec kind: {self.kind}"
            raise ParameterError(msg)
        object.__setattr__(self, "normalization", norm)

    @classmethod
    def truncated_exponential(
        cls, rate: float = DEFAULT_PHI_RATE, floor: float = DEFAULT_PHI_FLOOR
    ) -> "PhiSpec":
        """φ = (φ' ∨ floor) / E[φ' ∨ floor] with φ' exponential of the given rate."""
        return cls("truncated_exponential", rate=rate, floor=floor)

    @classmethod
    def constant(cls) -> "PhiSpec":
        """φ ≡ 1, which turns the scheme into λ-modulated regular sampling."""
        return cls("constant")

    @classmethod
    def table(cls, values: tuple[float, ...], weights: tuple[float, ...]) -> "PhiSpec":
        """Discrete φ taking ``values`` (rescaled to mean one) with ``weights``."""
        return cls("table", values=tuple(values), weights=tuple(weights))

    def describe(self) -> str:
        """Short text form used in manifests and reports."""
        if self.kind == "truncated_exponential":
            return f"truncated_exponential(rate={self.rate}, floor={self.floor})"
        if self.kind == "table":
            return f"table(values={list(self.values)}, weights={list(self.weights)})"
        return "constant"


@dataclass(frozen=True)
class StableConstants:
    """Constants entering the limit of the empirical characteristic function."""

    a_beta: float
    mu_p_beta: float
    kappa_p_beta: float
    kappa_beta_beta: float
    c_p_beta: float


@overload
def sample_standard_stable(beta: float, rng: np.random.Generator) -> float: ...


@overload
def sample_standard_stable(
    beta: float, rng: np.random.Generator, size: int
) -> FloatArray: ...


def sample_standard_stable(
    beta: float, rng: np.random.Generator, size: Optional[int] = None
) -> Union[float, FloatArray]:
    """Draw symmetric β-stable variates with characteristic function exp(-|u|^β).

    Symmetric Chambers-Mallows-Stuck transform of a uniform angle on
    (-π/2, π/2) and a unit exponential.

    :param float beta: Stability index in (1, 2).
    :param Generator rng: Random stream, owned by the caller.
    :param int size: Number of draws, or None for a single float.
    :raises ParameterError: If beta is outside (1, 2).
    """
    require_open("beta", beta, 1.0, 2.0)
    n = 1 if size is None else size
    angle = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, n)
    expo = rng.standard_exponential(n)
    draws = (
        np.sin(beta * angle)
        / np.cos(angle) ** (1.0 / beta)
        * (np.cos((1.0 - beta) * angle) / expo) ** ((1.0 - beta) / beta)
    )
    if size is None:
        return float(draws[0])
    return draws


@lru_cache(maxsize=256)
def _levy_khintchine_integral(beta: float) -> float:
    """∫₀^∞ (1 - cos y) y^(-1-β) dy by adaptive quadrature."""

    # 1 - cos y = 2 sin²(y/2) on (0, 1], algebraic weight carries y^(1-β)
    def head(y: float) -> float:
        return 0.5 * float(np.sinc(y / (2.0 * np.pi))) ** 2

    near, _ = integrate.quad(
        head, 0.0, 1.0, weight="alg", wvar=(1.0 - beta, 0.0), epsabs=1e-14, epsrel=1e-13
    )
    # QAWF flags its cycle extrapolation even when the result is at rounding level
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        oscillating, _ = integrate.quad(
            lambda y: y ** (-1.0 - beta),
            1.0,
            np.inf,
            weight="cos",
            wvar=1.0,
            epsabs=1e-14,
        )
    for warning in caught:
        logger.debug("Fourier tail quadrature for beta=%s: %s", beta, warning.message)
    return near + 1.0 / beta - oscillating


def a_beta(beta: float, A: float = DEFAULT_STABLE_SCALE) -> float:
    """Return A_β with E[exp(iuL_t)] = exp(-A_β |u|^β t).

    Computed as ``2A ∫₀^∞ (1 - cos y) y^(-1-β) dy`` by quadrature.

    :param float beta: Stability index in (1, 2).
    :param float A: Scale of the Lévy density.
    :rtype: float
    """
    require_open("beta", beta, 1.0, 2.0)
    require_positive("A", A)
    return A * (2.0 * _levy_khintchine_integral(beta))


def a_beta_closed_form(beta: float, A: float = DEFAULT_STABLE_SCALE) -> float:
    """Closed form ``-2A Γ(-β) cos(πβ/2)`` of :func:`a_beta`."""
    require_open("beta", beta, 1.0, 2.0)
    return float(-2.0 * A * special.gamma(-beta) * math.cos(0.5 * math.pi * beta))


def absolute_moment(p: float, beta: float) -> float:
    """E|S|^p of the standard symmetric stable law, valid for 0 < p < β."""
    require_open("p", p, 0.0, beta)
    return float(
        2.0**p
        * special.gamma(0.5 * (1.0 + p))
        * special.gamma(1.0 - p / beta)
        / (math.sqrt(math.pi) * special.gamma(1.0 - 0.5 * p))
    )


def ratio_a_mu(p: float, beta: float) -> float:
    """Return A_β / μ_{p,β}, which does not depend on A.

    :param float p: Power, 0 < p < β/2.
    :param float beta: Stability index in (1, 2).
    :raises ParameterError: If p >= β/2.
    """
    require_open("beta", beta, 1.0, 2.0)
    require_open("p", p, 0.0, 0.5 * beta)
    return absolute_moment(p, beta) ** (-beta / p)


@overload
def sample_phi(spec: PhiSpec, rng: np.random.Generator) -> float: ...


@overload
def sample_phi(spec: PhiSpec, rng: np.random.Generator, size: int) -> FloatArray: ...


def sample_phi(
    spec: PhiSpec, rng: np.random.Generator, size: Optional[int] = None
) -> Union[float, FloatArray]:
    """Draw normalized sampling durations φ.

    :param PhiSpec spec: Law of φ.
    :param Generator rng: Random stream.
    :param int size: Number of draws, or None for a single float.
    """
    n = 1 if size is None else size
    if spec.kind == "truncated_exponential":
        raw = rng.exponential(1.0 / spec.rate, n)
        draws = np.maximum(raw, spec.floor) / spec.normalization
    elif spec.kind == "table":
        picks = rng.choice(len(spec.values), size=n, p=np.asarray(spec.weights))
        draws = np.asarray(spec.values)[picks] / spec.normalization
    else:
        draws = np.ones(n)
    if size is None:
        return float(draws[0])
    return draws


def phi_moment(spec: PhiSpec, q: float) -> float:
    """Return E[φ^q].

    :param PhiSpec spec: Law of φ.
    :param float q: Order, q > -2.
    :raises ParameterError: If q <= -2.
    """
    if not q > -2.0:
        msg = f"phi moments are only guaranteed for q > -2, got {q}"
        raise ParameterError(msg, {"q": q})
    if spec.kind == "constant":
        return 1.0
    if spec.kind == "table":
        values = np.asarray(spec.values) / spec.normalization
        return float(np.dot(np.asarray(spec.weights), values**q))
    rate, floor = spec.rate, spec.floor
    atom = floor**q * -math.expm1(-rate * floor)
    tail, _ = integrate.quad(
        lambda x: x**q * rate * math.exp(-rate * x),
        floor,
        np.inf,
        epsabs=1e-14,
        epsrel=1e-12,
    )
    return (atom + tail) / spec.normalization**q


def pair_expectation(
    spec: PhiSpec,
    beta: float,
    fn: Callable[[FloatArray], FloatArray],
    mc_size: int = DEFAULT_MC_SIZE,
    seed: int = DEFAULT_MC_SEED,
) -> float:
    """E[fn(G)] with ``G = (φ⁽¹⁾)^(1-β) + (φ⁽²⁾)^(1-β)`` for independent copies.

    Exact for constant and table laws, seeded Monte Carlo of ``mc_size``
    pairs otherwise.
    """
    if spec.kind == "constant":
        return float(fn(np.array([2.0]))[0])
    if spec.kind == "table":
        powered = (np.asarray(spec.values) / spec.normalization) ** (1.0 - beta)
        weights = np.asarray(spec.weights)
        grid = powered[:, None] + powered[None, :]
        return float(np.sum(np.outer(weights, weights) * fn(grid)))

    rng = np.random.default_rng(seed)
    total = 0.0
    remaining = mc_size
    while remaining > 0:
        n = min(_MC_CHUNK, remaining)
        g = sample_phi(spec, rng, n) ** (1.0 - beta) + sample_phi(spec, rng, n) ** (
            1.0 - beta
        )
        total += float(np.sum(fn(g)))
        remaining -= n
    return total / mc_size


def kappa_beta_beta(beta: float, spec: PhiSpec) -> float:
    """κ_{β,β} = 2 E[φ^(1-β)]."""
    return 2.0 * phi_moment(spec, 1.0 - beta)


def kappa_p_beta(
    p: float,
    beta: float,
    spec: PhiSpec,
    mc_size: int = DEFAULT_MC_SIZE,
    seed: int = DEFAULT_MC_SEED,
) -> float:
    """κ_{p,β} = E[G^(p/β)]^(β/p); p = β is allowed and gives κ_{β,β}."""
    if not 0.0 < p <= beta:
        msg = f"kappa_p_beta needs 0 < p <= beta, got p={p}, beta={beta}"
        raise ParameterError(msg, {"p": p, "beta": beta})
    if p == beta:
        return kappa_beta_beta(beta, spec)
    if spec.kind == "constant":
        return 2.0
    ratio = p / beta
    logger.debug(
        "Integrating kappa_p_beta for p=%s beta=%s over %d pairs", p, beta, mc_size
    )
    moment = pair_expectation(spec, beta, lambda g: g**ratio, mc_size, seed)
    return moment ** (1.0 / ratio)


def stable_constants(
    p: float,
    law: StableLaw,
    spec: PhiSpec,
    mc_size: int = DEFAULT_MC_SIZE,
    seed: int = DEFAULT_MC_SEED,
) -> StableConstants:
    """Fill in A_β, μ_{p,β}, κ_{p,β}, κ_{β,β} and C_{p,β} for a known φ law.

    :param float p: Power, 0 < p < β/2.
    :param StableLaw law: Driving stable law.
    :param PhiSpec spec: Law of the sampling durations.
    :param int mc_size: Monte Carlo pairs for κ_{p,β} (truncated exponential φ).
    :param int seed: Seed of that Monte Carlo integral.
    :rtype: StableConstants
    """
    ratio = ratio_a_mu(p, law.beta)
    a_b = a_beta(law.beta, law.A)
    mu = a_b / ratio
    kappa_p = kappa_p_beta(p, law.beta, spec, mc_size, seed)
    return StableConstants(
        a_beta=a_b,
        mu_p_beta=mu,
        kappa_p_beta=kappa_p,
        kappa_beta_beta=kappa_beta_beta(law.beta, spec),
        c_p_beta=a_b / (mu * kappa_p),
    )


def known_phi_constants(
    p: float,
    beta: float,
    spec: PhiSpec,
    mc_size: int = DEFAULT_MC_SIZE,
    seed: int = DEFAULT_MC_SEED,
) -> StableConstants:
    """Cached :func:`stable_constants` at unit scale; C_{p,β} does not depend on A."""
    return _cached_constants(p, beta, spec, mc_size, seed)


@lru_cache(maxsize=128)
def _cached_constants(
    p: float, beta: float, spec: PhiSpec, mc_size: int, seed: int
) -> StableConstants:
    return stable_constants(p, StableLaw(beta), spec, mc_size, seed)
