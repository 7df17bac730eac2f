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

"""Empirical characteristic function estimator of the jump activity index.

Increments are indexed the way observations are: ``incs[i]`` is the rescaled
increment over (τ_{i-1}, τ_i] for i >= 1 and ``incs[0]`` is NaN. Arrays of
per-observation statistics (``vhat``) follow the same convention and hold NaN
where the statistic is undefined.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

import numpy as np
import numpy.typing as npt
from numpy.lib.stride_tricks import sliding_window_view
from scipy import stats

from pyjai.checks import require_open, require_positive, require_range
from pyjai.constants import (
    CI_LEVEL,
    DEFAULT_BETA_CLAMP,
    DEFAULT_K_EXPONENT,
    DEFAULT_MC_SEED,
    DEFAULT_MC_SIZE,
    DEFAULT_P,
    DEFAULT_R_EXPONENT,
    DEFAULT_RHO,
    DEFAULT_U_EXPONENT,
    DEFAULT_U_SCALE,
    MACHINE_DIGITS,
    NOT_AVAILABLE,
)
from pyjai.core.stable import (
    FloatArray,
    PhiSpec,
    StableConstants,
    known_phi_constants,
    pair_expectation,
    ratio_a_mu,
)
from pyjai.exceptions import (
    DegenerateDataError,
    DegenerateStatisticError,
    InsufficientDataError,
    ParameterError,
)

logger = logging.getLogger(__name__)

REPORT_COLUMNS = (
    "beta_hat",
    "beta_bar",
    "l_u",
    "l_v",
    "u_n",
    "v_n",
    "k_n",
    "r_n",
    "n_obs",
    "kappa_hat",
    "kappa_p_hat",
    "c_p_beta",
    "variance_hat",
    "std_stat",
    "scaled_error",
    "scaled_error_bar",
    "ci_low",
    "ci_high",
    "true_beta",
    "constants_source",
    "warnings",
)


@dataclass(frozen=True)
class EstimatorConfig:
    """Tuning of the estimator.

    With N = N_n(1) the rules are u_n = u_scale N^-u_exponent, v_n = rho u_n,
    k_n = ⌈N^k_exponent⌉ and r_n = ⌈N^r_exponent⌉.
    """

    p: float = DEFAULT_P
    rho: float = DEFAULT_RHO
    u_exponent: float = DEFAULT_U_EXPONENT
    u_scale: float = DEFAULT_U_SCALE
    k_exponent: float = DEFAULT_K_EXPONENT
    r_exponent: float = DEFAULT_R_EXPONENT
    debias: bool = False
    mc_size: int = DEFAULT_MC_SIZE
    beta_clamp: tuple[float, float] = DEFAULT_BETA_CLAMP

    def __post_init__(self) -> None:
        """Validate the tuning parameters."""
        require_open("p", self.p, 0.0, 1.0)
        require_positive("rho", self.rho)
        if self.rho == 1.0:
            msg = "rho must differ from 1"
            raise ParameterError(msg, {"rho": self.rho})
        for name in ("u_exponent", "k_exponent", "r_exponent"):
            require_open(name, getattr(self, name), 0.0, 1.0)
        require_positive("u_scale", self.u_scale)
        require_range("mc_size", self.mc_size, low=1)
        low, high = self.beta_clamp
        if not 1.0 < low < high < 2.0:  # noqa: PLR2004
            msg = f"beta_clamp must satisfy 1 < lo < hi < 2, got {self.beta_clamp}"
            raise ParameterError(msg, {"beta_clamp": self.beta_clamp})


@dataclass(frozen=True)
class EstimateReport:
    """Result of :func:`estimate`."""

    beta_hat: float
    l_u: float
    l_v: float
    u_n: float
    v_n: float
    k_n: int
    r_n: int
    n_obs: int
    kappa_hat: float
    kappa_p_hat: float
    c_p_beta: float
    variance_hat: float
    ci_low: float
    ci_high: float
    constants_source: str
    beta_bar: Optional[float] = None
    true_beta: Optional[float] = None
    std_stat: Optional[float] = None
    scaled_error: Optional[float] = None
    scaled_error_bar: Optional[float] = None
    warnings: list[str] = field(default_factory=list)
    clamped: bool = False

    def as_dict(self) -> dict[str, Any]:
        """Plain dictionary of every field."""
        return asdict(self)

    def to_row(self) -> list[str]:
        """One CSV row in :data:`REPORT_COLUMNS` order."""
        values = self.as_dict()
        return [_format_value(values[name]) for name in REPORT_COLUMNS]

    def to_record(self) -> str:
        """Flat ``key=value`` text record, one field per line."""
        return "\n".join(
            f"{name}={value}" for name, value in zip(REPORT_COLUMNS, self.to_row())
        )


def _format_value(value: Any) -> str:
    if value is None:
        return NOT_AVAILABLE
    if isinstance(value, list):
        return "; ".join(value)
    if isinstance(value, float):
        return NOT_AVAILABLE if math.isnan(value) else f"{value:.{MACHINE_DIGITS}g}"
    return str(value)


def rescaled_increments(
    taus: npt.ArrayLike, xs: npt.ArrayLike, delta_proxy: float
) -> FloatArray:
    """Rescale every increment to a gap of length ``delta_proxy``.

    :param taus: Observation times, strictly increasing.
    :param xs: Observed values, same length as ``taus``.
    :param float delta_proxy: Common gap length the increments are rescaled to.
    :return: ``incs`` with ``incs[0]`` NaN and
        ``incs[i] = delta_proxy (xs[i] - xs[i-1]) / (taus[i] - taus[i-1])``.
    :rtype: numpy.ndarray
    :raises DegenerateDataError: On a zero or negative gap.
    """
    t = np.asarray(taus, dtype=np.float64)
    x = np.asarray(xs, dtype=np.float64)
    if t.shape != x.shape or t.ndim != 1:
        msg = f"taus and xs must be 1-d of equal length, got {t.shape} and {x.shape}"
        raise ParameterError(msg)
    if t.size < 2:  # noqa: PLR2004
        msg = "at least two observations are needed"
        raise InsufficientDataError(msg)
    require_positive("delta_proxy", delta_proxy)
    gaps = np.diff(t)
    bad = np.flatnonzero(~(gaps > 0.0))
    if bad.size:
        msg = f"observation times must increase strictly, gap {bad[0] + 1} is {gaps[bad[0]]}"
        logger.error(msg)
        raise DegenerateDataError(msg, row=int(bad[0]) + 1)
    incs = np.empty_like(t)
    incs[0] = np.nan
    incs[1:] = delta_proxy * np.diff(x) / gaps
    return incs


def local_scale(incs: FloatArray, p: float, k_n: int) -> FloatArray:
    """Local power variation V̂_i = (1/k_n) Σ_{j=i-k_n-1}^{i-2} |incs[j] - incs[j-1]|^p.

    Defined for i = k_n + 3, ..., N; earlier entries are NaN. The window ends
    two increments before i, so V̂_i never sees incs[i-1] or incs[i].

    :raises InsufficientDataError: If N < k_n + 3.
    :raises DegenerateDataError: If some V̂_i is zero.
    """
    require_range("k_n", k_n, low=1)
    n = incs.size - 1
    if n < k_n + 3:
        msg = f"local scale needs at least {k_n + 3} increments, got {n}"
        raise InsufficientDataError(msg)
    powers = np.abs(np.diff(incs[1 : n - 1])) ** p
    vhat = np.full(incs.size, np.nan)
    vhat[k_n + 3 :] = sliding_window_view(powers, k_n).mean(axis=1)
    zero = np.flatnonzero(vhat[k_n + 3 :] == 0.0)
    if zero.size:
        index = int(zero[0]) + k_n + 3
        msg = f"local scale vanishes at observation {index} (locally constant prices)"
        logger.error(msg)
        raise DegenerateDataError(msg, row=index)
    return vhat


def _normalized_differences(
    incs: FloatArray, vhat: FloatArray, p: float, k_n: int
) -> FloatArray:
    n = incs.size - 1
    if n <= k_n + 2:
        msg = f"statistic needs more than {k_n + 2} increments, got {n}"
        raise InsufficientDataError(msg)
    start = k_n + 3
    return (incs[start:] - incs[start - 1 : -1]) / vhat[start:] ** (1.0 / p)


def ecf_statistic(
    incs: FloatArray, vhat: FloatArray, p: float, u: float, k_n: int
) -> float:
    """Average of cos(u (incs_i - incs_{i-1}) / V̂_i^(1/p)) over i = k_n+3, ..., N.

    :raises InsufficientDataError: If N <= k_n + 2.
    """
    require_positive("u", u)
    value = float(np.mean(np.cos(u * _normalized_differences(incs, vhat, p, k_n))))
    assert -1.0 <= value <= 1.0  # noqa: S101
    return value


def _one_minus_ecf(y: FloatArray, u: float) -> float:
    # 1 - cos(x) = 2 sin²(x/2) without cancellation near zero
    return float(np.mean(2.0 * np.sin(0.5 * u * y) ** 2))


def _log_ratio_estimate(gap_u: float, gap_v: float, u: float, v: float) -> float:
    if not (gap_u > 0.0 and gap_v > 0.0):
        msg = "empirical characteristic function is 1: u too small or insufficient data"
        raise DegenerateStatisticError(msg, {"one_minus_l_u": gap_u, "one_minus_l_v": gap_v})
    return (math.log(gap_u) - math.log(gap_v)) / math.log(u / v)


def _check_pair(u: float, v: float) -> None:
    require_positive("u", u)
    require_positive("v", v)
    if u == v:
        msg = "u and v must differ"
        raise ParameterError(msg, {"u": u, "v": v})


def beta_hat(l_u: float, l_v: float, u: float, v: float) -> float:
    """β̂ = (log(1 - l_u) - log(1 - l_v)) / log(u/v); symmetric in (u, l_u) ↔ (v, l_v).

    :raises DegenerateStatisticError: If l_u >= 1 or l_v >= 1.
    """
    _check_pair(u, v)
    return _log_ratio_estimate(-(l_u - 1.0), -(l_v - 1.0), u, v)


def beta_bar(
    l_u: float, l_v: float, u: float, v: float, deb_u: float, deb_v: float
) -> float:
    """Bias-corrected β̄, :func:`beta_hat` with 1 - l replaced by 1 - l + deb.

    :raises DegenerateStatisticError: If l - 1 - deb >= 0 for u or v.
    """
    _check_pair(u, v)
    return _log_ratio_estimate(-(l_u - 1.0 - deb_u), -(l_v - 1.0 - deb_v), u, v)


def _chi(taus: npt.ArrayLike, beta_est: float, r_n: int) -> FloatArray:
    t = np.asarray(taus, dtype=np.float64)
    require_range("r_n", r_n, low=1)
    n = t.size - 1
    if n <= r_n + 2:
        msg = f"duration statistics need more than {r_n + 2} increments, got {n}"
        raise InsufficientDataError(msg)
    power = 1.0 - beta_est
    gaps = np.diff(t, prepend=np.nan)
    i = np.arange(r_n + 3, n + 1)
    span = t[i - 2] - t[i - 2 - r_n]
    return (r_n / span) ** power * (gaps[i] ** power + gaps[i - 1] ** power)


def kappa_hat(taus: npt.ArrayLike, beta_est: float, r_n: int) -> float:
    """Estimate κ_{β,β} = 2 E[φ^(1-β)] from the observation times alone.

    Each term compares the two latest gaps with the average gap over the
    r_n gaps preceding them, so it equals 2 on any regular grid.

    :param taus: Observation times τ₀, ..., τ_N.
    :param float beta_est: Plug-in value of β.
    :param int r_n: Length of the averaging window.
    :rtype: float
    :raises InsufficientDataError: If N <= r_n + 2.
    """
    return float(np.mean(_chi(taus, beta_est, r_n)))


def kappa_p_hat(taus: npt.ArrayLike, beta_est: float, p: float, r_n: int) -> float:
    """Estimate κ_{p,β} = E[G^(p/β)]^(β/p) with the terms of :func:`kappa_hat`."""
    if not 0.0 < p <= beta_est:
        msg = f"kappa_p_hat needs 0 < p <= beta, got p={p}, beta={beta_est}"
        raise ParameterError(msg, {"p": p, "beta": beta_est})
    ratio = p / beta_est
    return float(np.mean(_chi(taus, beta_est, r_n) ** ratio) ** (1.0 / ratio))


def deb_hat(
    taus: npt.ArrayLike, beta_est: float, u: float, c_p_beta: float, r_n: int
) -> float:
    """Second and third order terms (C u^β)² M₂/2 - (C u^β)³ M₃/6 of 1 - L."""
    chi = _chi(taus, beta_est, r_n)
    z = c_p_beta * u**beta_est
    return float(z**2 * np.mean(chi**2) / 2.0 - z**3 * np.mean(chi**3) / 6.0)


def _check_variance_inputs(
    beta: float, rho: float, kappa_bb: float, c_p_beta: float
) -> None:
    require_open("beta", beta, 0.0, 2.0)
    require_positive("rho", rho)
    if rho == 1.0:
        msg = "rho = 1 makes log(1/rho) vanish"
        raise ParameterError(msg, {"rho": rho})
    require_positive("kappa_bb", kappa_bb)
    require_positive("c_p_beta", c_p_beta)


def ecf_covariance(
    beta: float, rho: float, p: float, kappa_bb: float, c_p_beta: float
) -> FloatArray:
    """Limit covariance of the normalized statistics at u and v = ρu.

    :param float beta: Jump activity index.
    :param float rho: Ratio v/u.
    :param float p: Power of the local scale (the limit does not depend on it
        beyond C_{p,β}).
    :param float kappa_bb: κ_{β,β}.
    :param float c_p_beta: C_{p,β}.
    :return: 2x2 covariance matrix.
    :rtype: numpy.ndarray
    """
    _check_variance_inputs(beta, rho, kappa_bb, c_p_beta)
    require_open("p", p, 0.0, beta)
    scale = c_p_beta * kappa_bb
    diagonal = scale * (4.0 - 2.0**beta)
    cross = (
        scale
        * (2.0 + 2.0 * rho**beta - (1.0 + rho) ** beta - abs(1.0 - rho) ** beta)
        / rho ** (beta / 2.0)
    )
    return np.array([[diagonal, cross], [cross, diagonal]])


def asymptotic_variance(
    beta: float, rho: float, p: float, kappa_bb: float, c_p_beta: float
) -> float:
    """Variance of the limit of u_n^(β/2) √N (β̂ - β).

    :raises ParameterError: If ρ = 1 or another input is out of its domain.
    """
    _check_variance_inputs(beta, rho, kappa_bb, c_p_beta)
    require_open("p", p, 0.0, beta)
    rho_b = rho**beta
    numerator = (rho_b + 1.0) * (4.0 - 2.0**beta) - 2.0 * (
        2.0 + 2.0 * rho_b - (1.0 + rho) ** beta - abs(1.0 - rho) ** beta
    )
    return numerator / (kappa_bb * rho_b * math.log(1.0 / rho) ** 2 * c_p_beta)


def theoretical_L(
    p: float,
    u: float,
    beta: float,
    spec: PhiSpec,
    constants: StableConstants,
    mc_size: int = DEFAULT_MC_SIZE,
    seed: int = DEFAULT_MC_SEED,
) -> float:
    """Limit E[exp(-u^β C_{p,β} (φ₁^(1-β) + φ₂^(1-β)))] of the statistic."""
    require_open("p", p, 0.0, beta)
    require_range("u", u, low=0.0)
    z = u**beta * constants.c_p_beta
    if spec.kind == "constant":
        return math.exp(-2.0 * z)
    return pair_expectation(spec, beta, lambda g: np.exp(-z * g), mc_size, seed)


def rate_conditions(
    p: float, u_exponent: float, k_exponent: float, beta: float
) -> list[str]:
    """Return the rate conditions of the central limit theorem that fail.

    ``u_n ~ N^-u_exponent`` and ``k_n ~ N^k_exponent``. An empty list means
    the tuning is admissible at ``beta``.
    """
    checks = (
        (
            max(1.0 / 3.0, 1.0 / (8.0 * u_exponent)) < p < beta / 2.0,
            "max(1/3, 1/(8 u_exponent)) < p < beta/2",
        ),
        (k_exponent >= 2.0 / 3.0, "k_exponent >= 2/3"),
        (
            1.0 / (3.0 * beta) < u_exponent < 1.0 / beta,
            "1/(3 beta) < u_exponent < 1/beta",
        ),
        (1.0 / beta < k_exponent / p - u_exponent, "1/beta < k_exponent/p - u_exponent"),
        (2.0 * k_exponent - u_exponent * beta < 1.0, "2 k_exponent - u_exponent beta < 1"),
    )
    return [text for holds, text in checks if not holds]


def estimate(
    taus: npt.ArrayLike,
    xs: npt.ArrayLike,
    cfg: Optional[EstimatorConfig] = None,
    true_beta: Optional[float] = None,
    known_phi: Optional[PhiSpec] = None,
    delta_proxy: Optional[float] = None,
) -> EstimateReport:
    """Estimate β from prices observed on [0, 1] at irregular times.

    All supplied observations are used, N = len(taus) - 1. Plug-in quantities
    (κ̂, variance, bias terms) use β̂ clamped to ``cfg.beta_clamp``; the raw
    β̂ is reported and ``clamped`` is set when the clamp fires.

    :param taus: Observation times τ₀ = 0 < ... < τ_N <= 1.
    :param xs: Prices at those times.
    :param EstimatorConfig cfg: Tuning, the reference configuration if omitted.
    :param float true_beta: Known β of a simulated path; enables ``std_stat``.
    :param PhiSpec known_phi: Known duration law; C_{p,β} and κ_{β,β} then come
        from :func:`pyjai.core.stable.known_phi_constants` instead of the data.
    :param float delta_proxy: Rescaling gap, 1/N if omitted.
    :rtype: EstimateReport
    """
    cfg = cfg or EstimatorConfig()
    t = np.asarray(taus, dtype=np.float64)
    n = t.size - 1
    if n < 1:
        msg = "at least two observations are needed"
        raise InsufficientDataError(msg)
    k_n = math.ceil(n**cfg.k_exponent)
    r_n = math.ceil(n**cfg.r_exponent)
    u_n = cfg.u_scale * n ** (-cfg.u_exponent)
    v_n = cfg.rho * u_n
    logger.debug("N=%d k_n=%d r_n=%d u_n=%s v_n=%s", n, k_n, r_n, u_n, v_n)
    if n < max(k_n, r_n) + 3:
        msg = f"{n} observations are too few for k_n={k_n} and r_n={r_n}"
        raise InsufficientDataError(msg)

    incs = rescaled_increments(t, xs, delta_proxy or 1.0 / n)
    vhat = local_scale(incs, cfg.p, k_n)
    y = _normalized_differences(incs, vhat, cfg.p, k_n)
    gap_u = _one_minus_ecf(y, u_n)
    gap_v = _one_minus_ecf(y, v_n)
    raw = _log_ratio_estimate(gap_u, gap_v, u_n, v_n)

    notes: list[str] = []
    low, high = cfg.beta_clamp
    plug = min(max(raw, low), high)
    clamped = plug != raw
    if clamped:
        notes.append(f"beta_hat={raw:.6g} outside ({low}, {high}); plug-ins use {plug}")
        logger.debug(notes[0])
    violated = [
        f"rate condition violated: {text}"
        for text in rate_conditions(cfg.p, cfg.u_exponent, cfg.k_exponent, plug)
    ]
    notes.extend(violated)

    if not cfg.p < plug / 2.0:
        msg = f"p={cfg.p} must be below beta/2 for the plug-in beta {plug}"
        raise ParameterError(msg, {"p": cfg.p, "beta": plug})
    k_hat = kappa_hat(t, plug, r_n)
    kp_hat = kappa_p_hat(t, plug, cfg.p, r_n)
    if known_phi is None:
        source = "estimated"
        c_p_beta = ratio_a_mu(cfg.p, plug) / kp_hat
        kappa_bb = k_hat
    else:
        source = "known_phi"
        known = known_phi_constants(cfg.p, plug, known_phi, cfg.mc_size)
        c_p_beta = known.c_p_beta
        kappa_bb = known.kappa_beta_beta

    variance = asymptotic_variance(plug, cfg.rho, cfg.p, kappa_bb, c_p_beta)
    norm_factor = math.sqrt(n)
    z = float(stats.norm.ppf(0.5 + CI_LEVEL / 2.0))
    half_width = z * math.sqrt(variance) / (u_n ** (plug / 2.0) * norm_factor)

    bar: Optional[float] = None
    if cfg.debias:
        deb_u = deb_hat(t, plug, u_n, c_p_beta, r_n)
        deb_v = deb_hat(t, plug, v_n, c_p_beta, r_n)
        bar = _log_ratio_estimate(gap_u + deb_u, gap_v + deb_v, u_n, v_n)

    std_stat = scaled = scaled_bar = None
    if true_beta is not None:
        weight = u_n ** (true_beta / 2.0) * norm_factor
        scaled = weight * (raw - true_beta)
        std_stat = scaled / math.sqrt(variance)
        if bar is not None:
            scaled_bar = weight * (bar - true_beta)

    for note in violated:
        logger.warning(note)

    return EstimateReport(
        beta_hat=raw,
        l_u=1.0 - gap_u,
        l_v=1.0 - gap_v,
        u_n=u_n,
        v_n=v_n,
        k_n=k_n,
        r_n=r_n,
        n_obs=n,
        kappa_hat=k_hat,
        kappa_p_hat=kp_hat,
        c_p_beta=c_p_beta,
        variance_hat=variance,
        ci_low=raw - half_width,
        ci_high=raw + half_width,
        constants_source=source,
        beta_bar=bar,
        true_beta=true_beta,
        std_stat=std_stat,
        scaled_error=scaled,
        scaled_error_bar=scaled_bar,
        warnings=notes,
        clamped=clamped,
    )
