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

"""Tick files, study tables, QQ plots and run manifests."""

import csv
import json
import logging
import math
import time
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Any, Union
from xml.sax.saxutils import escape

import numpy as np

from pyjai.constants import (
    MACHINE_DIGITS,
    QQ_HEADER,
    SCHEME_HEADER,
    STUDY_HEADER,
    TICK_HEADER,
)
from pyjai.core.estimators import REPORT_COLUMNS, EstimateReport
from pyjai.core.harness import QQData, StudyRow
from pyjai.core.sampling import SamplingTimes
from pyjai.core.simulator import PathSample
from pyjai.core.stable import FloatArray
from pyjai.exceptions import ConfigError, DataError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_SVG_SIZE = 600
_SVG_MARGIN = 60
_MANIFEST_PACKAGES = ("numpy", "scipy", "numba", "joblib", "pyjai")


def _fmt(value: float) -> str:
    return f"{value:.{MACHINE_DIGITS}g}"


@dataclass(frozen=True)
class TickSeries:
    """Prices observed at strictly increasing finite times."""

    times: FloatArray
    prices: FloatArray
    source: str = "<memory>"

    def __post_init__(self) -> None:
        """Check lengths, finiteness and monotonicity, naming the first bad row."""
        if self.times.shape != self.prices.shape or self.times.ndim != 1:
            msg = "times and prices must be 1-d arrays of equal length"
            raise DataError(msg)
        bad = np.flatnonzero(~(np.isfinite(self.times) & np.isfinite(self.prices)))
        if bad.size:
            msg = f"non-finite value in {self.source}"
            raise DataError(msg, row=int(bad[0]) + 1)
        steps = np.flatnonzero(~(np.diff(self.times) > 0.0))
        if steps.size:
            msg = f"times must increase strictly in {self.source}"
            raise DataError(msg, row=int(steps[0]) + 2)

    @classmethod
    def from_path(cls, sample: PathSample, source: str = "<simulation>") -> "TickSeries":
        """Observed part of a simulated path."""
        times, prices = sample.observed()
        return cls(times.copy(), prices.copy(), source)

    def rescaled(self) -> "TickSeries":
        """Map the first and last time onto 0 and 1."""
        if self.times.size < 2:  # noqa: PLR2004
            msg = "rescaling needs at least two observations"
            raise DataError(msg)
        start, end = self.times[0], self.times[-1]
        times = (self.times - start) / (end - start)
        times[-1] = 1.0
        return TickSeries(times, self.prices, self.source)


def read_ticks(path: PathLike, rescale_time: bool = False) -> TickSeries:
    """Read a ``time,price`` CSV file.

    Rows are numbered as data rows, the first row after the header is row 1.

    :param path: CSV file with the header ``time,price``.
    :param bool rescale_time: Map the session onto [0, 1].
    :rtype: TickSeries
    :raises DataError: On a bad header, unparsable or non-finite values, or
        times that do not increase strictly.
    """
    source = str(path)
    times: list[float] = []
    prices: list[float] = []
    try:
        with Path(path).open(newline="", encoding="utf-8") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header is None or tuple(h.strip() for h in header) != TICK_HEADER:
                msg = f"{source} must start with the header {','.join(TICK_HEADER)}"
                logger.error(msg)
                raise DataError(msg, row=0)
            for row, fields in enumerate(reader, start=1):
                if not fields:
                    continue
                if len(fields) != len(TICK_HEADER):
                    msg = f"expected {len(TICK_HEADER)} columns in {source}"
                    raise DataError(msg, row=row)
                try:
                    times.append(float(fields[0]))
                    prices.append(float(fields[1]))
                except ValueError as e:
                    msg = f"cannot parse {fields!r} in {source}"
                    raise DataError(msg, row=row) from e
    except OSError as e:
        msg = f"cannot read {source}: {e}"
        logger.error(msg)
        raise DataError(msg) from e
    series = TickSeries(np.array(times), np.array(prices), source)
    logger.info("Read %d ticks from %s", series.times.size, source)
    return series.rescaled() if rescale_time else series


def _write_rows(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info("Wrote %s", target)


def write_ticks(path: PathLike, series: TickSeries) -> None:
    """Write a ``time,price`` CSV with 17 significant digits."""
    _write_rows(
        path,
        TICK_HEADER,
        ((_fmt(t), _fmt(x)) for t, x in zip(series.times, series.prices)),
    )


def write_scheme(path: PathLike, times: SamplingTimes) -> None:
    """Write τ_i, λ_{τ_i} and φ_i of a generated scheme, overshoot included."""
    _write_rows(
        path,
        SCHEME_HEADER,
        (
            (str(i), _fmt(t), _fmt(lam), "NA" if math.isnan(phi) else _fmt(phi))
            for i, (t, lam, phi) in enumerate(
                zip(times.taus, times.lambda_at_tau, times.phi_draws)
            )
        ),
    )


def write_report(path: PathLike, report: EstimateReport) -> None:
    """Write one estimate as a single CSV row under :data:`REPORT_COLUMNS`."""
    _write_rows(path, REPORT_COLUMNS, [report.to_row()])


def write_study(path: PathLike, rows: Sequence[StudyRow]) -> None:
    """Write the study table, one row per cell."""
    _write_rows(path, STUDY_HEADER, (row.to_row() for row in rows))


def write_sensitivity(path: PathLike, rows: Sequence[StudyRow]) -> None:
    """Write study rows with the Euler substep divisor as an extra column."""
    _write_rows(
        path,
        (*STUDY_HEADER, "substep_divisor"),
        ([*row.to_row(), str(row.substep_divisor)] for row in rows),
    )


def format_study(rows: Sequence[StudyRow], digits: int) -> str:
    """Human readable study table."""
    lines = [" ".join(f"{name:>10}" for name in STUDY_HEADER)]
    lines.extend(" ".join(f"{cell:>10}" for cell in row.to_row(digits)) for row in rows)
    return "\n".join(lines)


def write_qq(path: PathLike, qq: QQData) -> None:
    """Write QQ pairs as ``theoretical_q,sample_q``."""
    _write_rows(path, QQ_HEADER, ((_fmt(a), _fmt(b)) for a, b in qq.pairs))


def render_qq_svg(qq: QQData) -> str:
    """Self-contained SVG scatter of a QQ plot with the unit diagonal."""
    low = float(min(qq.pairs.min(), -1.0))
    high = float(max(qq.pairs.max(), 1.0))
    span = high - low
    inner = _SVG_SIZE - 2 * _SVG_MARGIN

    def x_of(value: float) -> float:
        return _SVG_MARGIN + (value - low) / span * inner

    def y_of(value: float) -> float:
        return _SVG_SIZE - _SVG_MARGIN - (value - low) / span * inner

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_SIZE}" '
        f'height="{_SVG_SIZE}" viewBox="0 0 {_SVG_SIZE} {_SVG_SIZE}">',
        f'<rect x="{_SVG_MARGIN}" y="{_SVG_MARGIN}" width="{inner}" height="{inner}" '
        'fill="none" stroke="black"/>',
        f'<line x1="{x_of(low):.2f}" y1="{y_of(low):.2f}" x2="{x_of(high):.2f}" '
        f'y2="{y_of(high):.2f}" stroke="red"/>',
    ]
    parts.extend(
        f'<circle cx="{x_of(a):.2f}" cy="{y_of(b):.2f}" r="1"/>' for a, b in qq.pairs
    )
    middle = _SVG_SIZE / 2
    parts.extend(
        [
            f'<text x="{middle}" y="{_SVG_SIZE - 20}" text-anchor="middle">'
            "Standard normal quantiles</text>",
            f'<text x="20" y="{middle}" text-anchor="middle" '
            f'transform="rotate(-90 20 {middle})">Sample quantiles</text>',
            f'<text x="{middle}" y="30" text-anchor="middle">{escape(qq.label)}</text>',
            "</svg>",
        ]
    )
    return "\n".join(parts) + "\n"


def write_qq_svg(path: PathLike, qq: QQData) -> None:
    """Write :func:`render_qq_svg` output to ``path``."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(render_qq_svg(qq), encoding="utf-8")
    logger.info("Wrote %s", target)


def package_versions() -> dict[str, str]:
    """Installed versions of the numerical stack and of pyjai."""
    versions = {}
    for name in _MANIFEST_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


@dataclass
class RunManifest:
    """Record of one command invocation, sufficient to replay it.

    ``arguments`` is the command line without the ``--config`` option;
    ``config_ini`` is the full resolved configuration.
    """

    command: str
    arguments: list[str]
    config_ini: str
    seeds: dict[str, Any] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    versions: dict[str, str] = field(default_factory=package_versions)
    started: float = field(default_factory=time.time)
    wall_clock_seconds: float = 0.0

    def finish(self, outputs: Sequence[PathLike]) -> None:
        """Record the outputs and the elapsed time."""
        self.outputs = [str(p) for p in outputs]
        self.wall_clock_seconds = time.time() - self.started

    def write(self, path: PathLike) -> None:
        """Write the manifest as indented JSON."""
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")
        logger.info("Wrote manifest %s", target)

    @classmethod
    def read(cls, path: PathLike) -> "RunManifest":
        """Load a manifest written by :meth:`write`.

        :raises ConfigError: If the file is missing or not a manifest.
        """
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
            return cls(**data)
        except (OSError, json.JSONDecodeError, TypeError) as e:
            msg = f"cannot read manifest {path}: {e}"
            logger.error(msg)
            raise ConfigError(msg) from e
