"""Command line interface: ``pyjai simulate|estimate|mc-table|constants|sensitivity|replay``."""

import argparse
import logging
import sys
import tempfile
from collections.abc import Sequence
from dataclasses import replace
from pathlib import Path
from typing import Optional

from pyjai.api import JumpActivityAPI
from pyjai.config import RunConfig, load_config, render_config
from pyjai.constants import (
    DEFAULT_MC_SIZE,
    DEFAULT_P,
    DEFAULT_PHI_FLOOR,
    DEFAULT_PHI_RATE,
    DEFAULT_SEED,
    EXIT_OK,
    HUMAN_DIGITS,
)
from pyjai.core import tickio
from pyjai.core.stable import PhiSpec, known_phi_constants
from pyjai.exceptions import JumpActivityError

logger = logging.getLogger(__name__)

_ESTIMATOR_FLAGS = ("p", "rho", "u_exponent", "u_scale", "k_exponent", "r_exponent")


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(item) for item in text.split(",") if item.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(item) for item in text.split(",") if item.strip())


def _add_config(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="INI configuration file")


def _add_estimator_flags(parser: argparse.ArgumentParser) -> None:
    for name in _ESTIMATOR_FLAGS:
        parser.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)
    parser.add_argument(
        "--debias", action="store_true", default=None, help="report the bias corrected estimate"
    )


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per operation."""
    parser = argparse.ArgumentParser(
        prog="pyjai",
        description="Jump activity index estimation at irregular observation times.",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="simulate one path and write its ticks")
    _add_config(simulate)
    simulate.add_argument("--out", type=Path, required=True, help="tick CSV to write")
    simulate.add_argument("--scheme-out", type=Path, help="also write the scheme CSV")
    simulate.add_argument("--seed", type=int, default=DEFAULT_SEED)
    simulate.add_argument("--beta", type=float, help="override the model's beta")
    simulate.add_argument("--manifest", type=Path, help="manifest path (default: <out>.json)")
    simulate.set_defaults(func=cmd_simulate)

    est = sub.add_parser("estimate", help="estimate beta from a tick CSV")
    est.add_argument("ticks", type=Path, help="CSV with header time,price")
    _add_config(est)
    _add_estimator_flags(est)
    est.add_argument("--rescale-time", action="store_true", help="map the session onto [0, 1]")
    est.add_argument("--true-beta", type=float, help="known beta of a simulated file")
    est.add_argument("--csv", type=Path, help="also write the report as a CSV row")
    est.add_argument(
        "--manifest", type=Path, help="manifest path (default: <csv>.json when --csv is given)"
    )
    est.set_defaults(func=cmd_estimate)

    table = sub.add_parser("mc-table", help="run a Monte Carlo study")
    _add_config(table)
    _add_estimator_flags(table)
    table.add_argument("--out-dir", type=Path, required=True)
    table.add_argument("--betas", type=_floats)
    table.add_argument("--rhos", type=_floats)
    table.add_argument("--delta-inv", type=_ints)
    table.add_argument("--reps", type=int)
    table.add_argument("--seed", type=int, help="master seed of the study")
    table.add_argument("--workers", type=int)
    table.add_argument("--svg", action="store_true", help="also write SVG QQ plots")
    table.set_defaults(func=cmd_mc_table)

    consts = sub.add_parser("constants", help="print the stable-law constants")
    consts.add_argument("--p", type=float, default=DEFAULT_P)
    consts.add_argument("--beta", type=float, required=True)
    consts.add_argument(
        "--phi", choices=("truncated_exponential", "constant"), default="truncated_exponential"
    )
    consts.add_argument("--phi-rate", type=float, default=DEFAULT_PHI_RATE)
    consts.add_argument("--phi-floor", type=float, default=DEFAULT_PHI_FLOOR)
    consts.add_argument("--mc-size", type=int, default=DEFAULT_MC_SIZE)
    consts.set_defaults(func=cmd_constants)

    sens = sub.add_parser("sensitivity", help="rerun one study cell at several Euler divisors")
    _add_config(sens)
    sens.add_argument("--divisors", type=_ints, default=(1, 5, 20))
    sens.add_argument("--reps", type=int)
    sens.add_argument("--workers", type=int)
    sens.add_argument("--out", type=Path, help="CSV to write")
    sens.add_argument(
        "--manifest", type=Path, help="manifest path (default: <out>.json when --out is given)"
    )
    sens.set_defaults(func=cmd_sensitivity)

    replay = sub.add_parser("replay", help="rerun a command from its manifest")
    replay.add_argument("manifest", type=Path)
    replay.set_defaults(func=cmd_replay)
    return parser


def _load(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    overrides = {
        name: getattr(args, name)
        for name in (*_ESTIMATOR_FLAGS, "debias")
        if getattr(args, name, None) is not None
    }
    if overrides:
        estimator = replace(config.estimator, **overrides)
        config = replace(
            config, estimator=estimator, study=replace(config.study, estimator=estimator)
        )
    return config


def _manifest(args: argparse.Namespace, config: RunConfig, **seeds: int) -> tickio.RunManifest:
    arguments: list[str] = []
    skip = False
    for token in args.argv:
        if skip:
            skip = False
        elif token == "--config":
            skip = True
        elif not token.startswith("--config="):
            arguments.append(token)
    return tickio.RunManifest(
        command=args.command,
        arguments=arguments,
        config_ini=render_config(config),
        seeds=dict(seeds),
    )


def _write_manifest(
    manifest: tickio.RunManifest,
    outputs: list[Path],
    path: Optional[Path],
    primary: Optional[Path],
) -> None:
    """Write the manifest to ``path``, or next to ``primary``, or not at all."""
    target = path or (primary.with_suffix(".json") if primary else None)
    if target is None:
        logger.debug("No output file and no --manifest, manifest not written")
        return
    manifest.finish(outputs)
    manifest.write(target)


def cmd_simulate(args: argparse.Namespace) -> int:
    """Simulate a path at the random observation times and write its ticks."""
    config = _load(args)
    manifest = _manifest(args, config, seed=args.seed)
    api = JumpActivityAPI(config=config, seed=args.seed)
    sample = api.simulation.path(beta=args.beta)
    tickio.write_ticks(args.out, tickio.TickSeries.from_path(sample, str(args.out)))
    outputs = [args.out]
    if args.scheme_out:
        tickio.write_scheme(args.scheme_out, sample.times)
        outputs.append(args.scheme_out)
    print(f"{sample.times.n_obs} observations written to {args.out}")
    _write_manifest(manifest, outputs, args.manifest, args.out)
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace) -> int:
    """Estimate β from a tick file and print the report."""
    config = _load(args)
    manifest = _manifest(args, config)
    api = JumpActivityAPI(config=config)
    series = tickio.read_ticks(args.ticks, rescale_time=args.rescale_time)
    report = api.estimation.estimate_ticks(series, true_beta=args.true_beta)
    print(report.to_record())
    outputs: list[Path] = []
    if args.csv:
        tickio.write_report(args.csv, report)
        outputs.append(args.csv)
    _write_manifest(manifest, outputs, args.manifest, args.csv)
    return EXIT_OK


def _study_config(args: argparse.Namespace) -> RunConfig:
    config = _load(args)
    overrides = {
        name: value
        for name, value in (
            ("betas", getattr(args, "betas", None)),
            ("rhos", getattr(args, "rhos", None)),
            ("delta_inv", getattr(args, "delta_inv", None)),
            ("n_reps", args.reps),
            ("master_seed", getattr(args, "seed", None)),
            ("workers", args.workers),
        )
        if value is not None
    }
    if overrides:
        config = replace(config, study=replace(config.study, **overrides))
    return config


def cmd_mc_table(args: argparse.Namespace) -> int:
    """Run the study and write the table, the QQ data and optional plots."""
    config = _study_config(args)
    manifest = _manifest(args, config, master_seed=config.study.master_seed)
    cells = JumpActivityAPI(config=config).study.run()
    out_dir: Path = args.out_dir
    study_csv = out_dir / "study.csv"
    tickio.write_study(study_csv, [cell.row for cell in cells])
    outputs = [study_csv]
    for cell in cells:
        if cell.qq is None:
            logger.warning("Too few replications for a QQ plot of %s", cell.row)
            continue
        stem = f"qq_beta{cell.row.beta:g}_rho{cell.row.rho:g}_dinv{cell.row.delta_inv}"
        tickio.write_qq(out_dir / f"{stem}.csv", cell.qq)
        outputs.append(out_dir / f"{stem}.csv")
        if args.svg:
            tickio.write_qq_svg(out_dir / f"{stem}.svg", cell.qq)
            outputs.append(out_dir / f"{stem}.svg")
    print(tickio.format_study([cell.row for cell in cells], HUMAN_DIGITS))
    manifest.finish(outputs)
    manifest.write(out_dir / "manifest.json")
    return EXIT_OK


def cmd_constants(args: argparse.Namespace) -> int:
    """Print A_β, μ_{p,β}, κ_{p,β}, κ_{β,β} and C_{p,β}."""
    if args.phi == "constant":
        phi = PhiSpec.constant()
    else:
        phi = PhiSpec.truncated_exponential(args.phi_rate, args.phi_floor)
    consts = known_phi_constants(args.p, args.beta, phi, args.mc_size)
    print(f"phi={phi.describe()} p={args.p} beta={args.beta}")
    for name, value in vars(consts).items():
        print(f"{name}={value:.{HUMAN_DIGITS + 2}g}")
    return EXIT_OK


def cmd_sensitivity(args: argparse.Namespace) -> int:
    """Rerun the first study cell at several Euler substep divisors."""
    config = _study_config(args)
    manifest = _manifest(args, config, master_seed=config.study.master_seed)
    rows = JumpActivityAPI(config=config).study.sensitivity(args.divisors)
    for row in rows:
        print(f"divisor={row.substep_divisor} " + " ".join(row.to_row(HUMAN_DIGITS)))
    outputs: list[Path] = []
    if args.out:
        tickio.write_sensitivity(args.out, rows)
        outputs.append(args.out)
    _write_manifest(manifest, outputs, args.manifest, args.out)
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    """Rerun the command recorded in a manifest with its configuration."""
    manifest = tickio.RunManifest.read(args.manifest)
    logger.info("Replaying %s from %s", manifest.command, args.manifest)
    with tempfile.TemporaryDirectory() as tmp:
        config_path = Path(tmp) / "config.ini"
        config_path.write_text(manifest.config_ini, encoding="utf-8")
        return main([*manifest.arguments, "--config", str(config_path)])


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the ``pyjai`` console script.

    :return: 0 on success, 2 on configuration or parameter errors, 3 on data
        errors, 4 when the statistic is degenerate, 1 otherwise.
    """
    tokens = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(tokens)
    args.argv = tokens
    _configure_logging(args.verbose)
    try:
        return int(args.func(args))
    except JumpActivityError as e:
        print(f"pyjai: error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
