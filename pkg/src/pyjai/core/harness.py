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

"""Monte Carlo study driver reproducing the simulation tables and QQ plots."""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import numpy.typing as npt
from joblib import Parallel, delayed
from scipy import stats

from pyjai.checks import require_open, require_range
from pyjai.constants import (
    DEFAULT_BETAS,
    DEFAULT_DELTA_INV,
    DEFAULT_N_REPS,
    DEFAULT_RHOS,
    DEFAULT_SEED,
    MACHINE_DIGITS,
    MAX_FAILURE_RATE,
    MIN_QQ_POINTS,
    NOT_AVAILABLE,
)
from pyjai.core.estimators import (
    EstimateReport,
    EstimatorConfig,
    asymptotic_variance,
    estimate,
)
from pyjai.core.simulator import ModelConfig, SchemeConfig, simulate_replication
from pyjai.core.stable import FloatArray, StableLaw, known_phi_constants
from pyjai.exceptions import (
    DegenerateDataError,
    DegenerateStatisticError,
    InsufficientDataError,
    StudyError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StudyConfig:
    """Grid of (β, ρ, Δ_n⁻¹) cells and the templates every cell starts from.

    The β of ``model.stable``, the ρ of ``estimator`` and the Δ_n of
    ``scheme`` are overwritten cell by cell.
    """

    betas: tuple[float, ...] = DEFAULT_BETAS
    rhos: tuple[float, ...] = DEFAULT_RHOS
    delta_inv: tuple[int, ...] = (DEFAULT_DELTA_INV,)
    n_reps: int = DEFAULT_N_REPS
    master_seed: int = DEFAULT_SEED
    model: ModelConfig = field(default_factory=lambda: ModelConfig(StableLaw(1.5)))
    scheme: SchemeConfig = field(default_factory=SchemeConfig)
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    workers: int = 1

    def __post_init__(self) -> None:
        """Validate the grid."""
        require_range("n_reps", self.n_reps, low=1)
        require_range("workers", self.workers, low=1)
        for beta in self.betas:
            require_open("beta", beta, 1.0, 2.0)
        for delta_inv in self.delta_inv:
            require_range("delta_inv", delta_inv, low=1)


@dataclass(frozen=True)
class StudyRow:
    """Summary of one cell: mean estimate, empirical and theoretical variance.

    ``n_clamped`` counts the successful replications whose plug-ins used a
    clamped β̂. It is logged but not part of the study CSV.
    """

    beta: float
    rho: float
    delta_inv: int
    mean_beta_hat: float
    emp_var_std: float
    theo_var: float
    n_failed: int
    mean_n_obs: float
    estimator: str = "beta_hat"
    substep_divisor: Optional[int] = None
    n_clamped: int = 0

    def to_row(self, digits: int = MACHINE_DIGITS) -> list[str]:
        """Study CSV row; undefined values are written as ``NA``."""

        def fmt(value: float) -> str:
            return NOT_AVAILABLE if math.isnan(value) else f"{value:.{digits}g}"

        return [
            fmt(self.beta),
            fmt(self.rho),
            str(self.delta_inv),
            fmt(self.mean_beta_hat),
            fmt(self.emp_var_std),
            fmt(self.theo_var),
            str(self.n_failed),
            fmt(self.mean_n_obs),
        ]


@dataclass(frozen=True)
class QQData:
    """Sorted standardized statistics against standard normal quantiles."""

    pairs: FloatArray
    label: str

    @property
    def theoretical(self) -> FloatArray:
        """Normal quantiles at the midpoint plotting positions."""
        return self.pairs[:, 0]

    @property
    def sample(self) -> FloatArray:
        """Sorted sample quantiles."""
        return self.pairs[:, 1]


@dataclass(frozen=True)
class CellResult:
    """Everything a study produces for one (β, ρ, Δ_n⁻¹) cell."""

    row: StudyRow
    qq: Optional[QQData]
    records: list[EstimateReport]
    coverage: float


def qq_data(std_stats: npt.ArrayLike, variance: float, label: str = "") -> QQData:
    """Pair sorted ``std_stats / √variance`` with N(0,1) quantiles at (i - 1/2)/m.

    :raises InsufficientDataError: With fewer than ten finite values.
    """
    values = np.asarray(std_stats, dtype=np.float64)
    values = values[np.isfinite(values)]
    if values.size < MIN_QQ_POINTS:
        msg = f"QQ data needs at least {MIN_QQ_POINTS} finite values, got {values.size}"
        raise InsufficientDataError(msg)
    m = values.size
    positions = (np.arange(1, m + 1) - 0.5) / m
    pairs = np.column_stack(
        [stats.norm.ppf(positions), np.sort(values) / math.sqrt(variance)]
    )
    return QQData(pairs=pairs, label=label)


def qq_max_deviation(qq: QQData, central: float = 0.9) -> float:
    """Largest |sample - theoretical| over the central ``central`` share of quantiles.

    With ρ = 1/2 the estimate never exceeds 2, so sample quantiles stay below
    (2 - β) u_n^(β/2) √N / √variance. For β = 1.7 at N ≈ 480 that is about 0.75,
    and the upper band sits well under the normal quantiles.
    """
    require_open("central", central, 0.0, 1.0)
    m = qq.pairs.shape[0]
    positions = (np.arange(1, m + 1) - 0.5) / m
    band = np.abs(positions - 0.5) <= central / 2.0
    return float(np.max(np.abs(qq.sample[band] - qq.theoretical[band])))


def coverage_report(reports: Sequence[EstimateReport], true_beta: float) -> float:
    """Share of reports whose confidence interval contains ``true_beta``."""
    if not reports:
        msg = "coverage needs at least one report"
        raise InsufficientDataError(msg)
    hits = sum(r.ci_low <= true_beta <= r.ci_high for r in reports)
    return hits / len(reports)


def replication_seed(
    master_seed: int, cell: tuple[int, int, int], rep: int
) -> np.random.SeedSequence:
    """Stream of one replication, fixed by the cell indices and the rep index."""
    return np.random.SeedSequence(master_seed, spawn_key=(*cell, rep))


def _replicate(
    model: ModelConfig,
    scheme: SchemeConfig,
    estimator: EstimatorConfig,
    seed: np.random.SeedSequence,
) -> Optional[EstimateReport]:
    sample = simulate_replication(model, scheme, seed)
    taus, xs = sample.observed()
    try:
        return estimate(taus, xs, estimator, true_beta=sample.true_beta)
    except (DegenerateStatisticError, DegenerateDataError, InsufficientDataError) as e:
        logger.debug("Replication %s failed: %s", seed.spawn_key, e)
        return None


def _run_cell(
    cfg: StudyConfig,
    cell: tuple[int, int, int],
    model: ModelConfig,
    scheme: SchemeConfig,
    estimator: EstimatorConfig,
) -> CellResult:
    beta = model.stable.beta
    rho = estimator.rho
    delta_inv = cfg.delta_inv[cell[2]]
    logger.info(
        "Study cell beta=%s rho=%s delta_inv=%d: %d replications on %d workers",
        beta,
        rho,
        delta_inv,
        cfg.n_reps,
        cfg.workers,
    )
    outcomes = Parallel(n_jobs=cfg.workers)(
        delayed(_replicate)(
            model, scheme, estimator, replication_seed(cfg.master_seed, cell, rep)
        )
        for rep in range(cfg.n_reps)
    )
    records = [r for r in outcomes if r is not None]
    n_failed = cfg.n_reps - len(records)
    if n_failed / cfg.n_reps > MAX_FAILURE_RATE:
        msg = (
            f"{n_failed} of {cfg.n_reps} replications failed in cell "
            f"beta={beta} rho={rho} delta_inv={delta_inv}"
        )
        raise StudyError(msg, {"beta": beta, "rho": rho, "delta_inv": delta_inv})
    if n_failed:
        logger.warning("%d of %d replications failed", n_failed, cfg.n_reps)
    n_clamped = sum(r.clamped for r in records)
    if n_clamped:
        logger.warning(
            "%d of %d replications had beta_hat outside %s; plug-ins were clamped",
            n_clamped,
            len(records),
            estimator.beta_clamp,
        )

    constants = known_phi_constants(
        estimator.p, beta, scheme.phi, estimator.mc_size
    )
    theo_var = asymptotic_variance(
        beta, rho, estimator.p, constants.kappa_beta_beta, constants.c_p_beta
    )

    if estimator.debias:
        label = "beta_bar"
        point = np.array([r.beta_bar for r in records], dtype=np.float64)
        scaled = np.array([r.scaled_error_bar for r in records], dtype=np.float64)
    else:
        label = "beta_hat"
        point = np.array([r.beta_hat for r in records], dtype=np.float64)
        scaled = np.array([r.scaled_error for r in records], dtype=np.float64)
    emp_var = float(np.var(scaled, ddof=1)) if scaled.size > 1 else math.nan

    row = StudyRow(
        beta=beta,
        rho=rho,
        delta_inv=delta_inv,
        mean_beta_hat=float(np.mean(point)) if point.size else math.nan,
        emp_var_std=emp_var,
        theo_var=theo_var,
        n_failed=n_failed,
        mean_n_obs=float(np.mean([r.n_obs for r in records])) if records else math.nan,
        estimator=label,
        substep_divisor=model.euler_substep_divisor,
        n_clamped=n_clamped,
    )
    qq = None
    if scaled.size >= MIN_QQ_POINTS:
        qq = qq_data(scaled, theo_var, f"beta={beta} rho={rho} delta_inv={delta_inv}")
    coverage = coverage_report(records, beta) if records else math.nan
    logger.info(
        "Cell done: mean=%.4f emp_var=%.4f theo_var=%.4f failed=%d clamped=%d",
        row.mean_beta_hat,
        row.emp_var_std,
        row.theo_var,
        n_failed,
        n_clamped,
    )
    return CellResult(row=row, qq=qq, records=records, coverage=coverage)


def run_study(cfg: StudyConfig) -> list[CellResult]:
    """Run every (β, ρ, Δ_n⁻¹) cell of the study.

    Replication ``rep`` of cell (bi, ri, di) always draws from
    :func:`replication_seed`, so results do not depend on ``cfg.workers``;
    cells are reduced in replication order.

    :param StudyConfig cfg: Study design.
    :return: One :class:`CellResult` per cell, β outermost, Δ_n⁻¹ innermost.
    :rtype: list
    :raises StudyError: If more than half of a cell's replications fail.
    """
    results = []
    for bi, beta in enumerate(cfg.betas):
        model = replace(cfg.model, stable=replace(cfg.model.stable, beta=beta))
        for ri, rho in enumerate(cfg.rhos):
            estimator = replace(cfg.estimator, rho=rho)
            for di, delta_inv in enumerate(cfg.delta_inv):
                scheme = replace(cfg.scheme, delta_n=1.0 / delta_inv)
                results.append(_run_cell(cfg, (bi, ri, di), model, scheme, estimator))
    return results


def divisor_sensitivity(
    cfg: StudyConfig, divisors: Sequence[int] = (1, 5, 20)
) -> list[StudyRow]:
    """Rerun the first cell of ``cfg`` at several Euler substep divisors.

    The replication streams are shared across divisors, so rows differ only
    through the discretisation of the path.
    """
    model = replace(cfg.model, stable=replace(cfg.model.stable, beta=cfg.betas[0]))
    estimator = replace(cfg.estimator, rho=cfg.rhos[0])
    scheme = replace(cfg.scheme, delta_n=1.0 / cfg.delta_inv[0])
    rows = []
    for divisor in divisors:
        logger.info("Euler substep divisor %d", divisor)
        cell_model = replace(model, euler_substep_divisor=divisor)
        rows.append(_run_cell(cfg, (0, 0, 0), cell_model, scheme, estimator).row)
    return rows
