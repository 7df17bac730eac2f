"""INI configuration of models, schemes, estimators and studies."""

import configparser
import logging
import os
import re
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

from pyjai.constants import (
    DEFAULT_BETA,
    DEFAULT_STABLE_SCALE,
    WORKERS_ENV_VAR,
)
from pyjai.core.estimators import EstimatorConfig
from pyjai.core.harness import StudyConfig
from pyjai.core.sampling import LambdaSpec
from pyjai.core.simulator import ModelConfig, ResidualJumps, SchemeConfig
from pyjai.core.stable import PhiSpec, StableLaw
from pyjai.exceptions import ConfigError, JumpActivityError

logger = logging.getLogger(__name__)

_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([^=:#;\s\[][^=:]*?)\s*[=:]")


def _boolean(text: str) -> bool:
    states = configparser.ConfigParser.BOOLEAN_STATES
    if text.lower() not in states:
        msg = f"not a boolean: {text!r}"
        raise ValueError(msg)
    return states[text.lower()]


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(item) for item in text.split(",") if item.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(item) for item in text.split(",") if item.strip())


def _choice(*allowed: str) -> Callable[[str], str]:
    def convert(text: str) -> str:
        if text not in allowed:
            msg = f"expected one of {', '.join(allowed)}, got {text!r}"
            raise ValueError(msg)
        return text

    return convert


_SCHEMA: dict[str, dict[str, Callable[[str], Any]]] = {
    "model": {
        "beta": float,
        "stable_scale": float,
        "x0": float,
        "alpha0": float,
        "sigma0": float,
        "alpha_speed": float,
        "alpha_level": float,
        "alpha_vol": float,
        "sigma_coupling": float,
        "euler_substep_divisor": int,
        "residual_intensity": float,
        "residual_law": _choice("two_point", "uniform"),
        "residual_size": float,
    },
    "scheme": {
        "delta_inv": float,
        "delta_n": float,
        "horizon": float,
        "phi": _choice("truncated_exponential", "constant", "table"),
        "phi_rate": float,
        "phi_floor": float,
        "phi_values": _floats,
        "phi_weights": _floats,
        "lambda_level": float,
        "lambda_speed": float,
        "lambda_vol": float,
        "lambda_init": float,
        "lambda_clamp": float,
    },
    "estimator": {
        "p": float,
        "rho": float,
        "u_exponent": float,
        "u_scale": float,
        "k_exponent": float,
        "r_exponent": float,
        "debias": _boolean,
        "mc_size": int,
        "beta_clamp_low": float,
        "beta_clamp_high": float,
    },
    "study": {
        "betas": _floats,
        "rhos": _floats,
        "delta_inv": _ints,
        "n_reps": int,
        "master_seed": int,
        "workers": int,
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs, parsed from one INI file."""

    model: ModelConfig = field(default_factory=lambda: ModelConfig(StableLaw(DEFAULT_BETA)))
    scheme: SchemeConfig = field(default_factory=SchemeConfig)
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    study: StudyConfig = field(default_factory=StudyConfig)
    source: str = "<defaults>"


def default_workers() -> int:
    """Worker count from the ``PYJAI_WORKERS`` environment variable, 1 if unset."""
    raw = os.environ.get(WORKERS_ENV_VAR)
    if raw is None:
        return 1
    try:
        workers = int(raw)
    except ValueError as e:
        msg = f"{WORKERS_ENV_VAR} must be an integer, got {raw!r}"
        raise ConfigError(msg, key=WORKERS_ENV_VAR) from e
    if workers < 1:
        msg = f"{WORKERS_ENV_VAR} must be at least 1, got {workers}"
        raise ConfigError(msg, key=WORKERS_ENV_VAR)
    return workers


def _locate(text: str) -> dict[tuple[Optional[str], str], int]:
    lines: dict[tuple[Optional[str], str], int] = {}
    section: Optional[str] = None
    for number, line in enumerate(text.splitlines(), start=1):
        header = _SECTION_RE.match(line)
        if header:
            section = header.group(1).strip()
            lines.setdefault((section, ""), number)
            continue
        key = _KEY_RE.match(line)
        if key and section is not None:
            lines.setdefault((section, key.group(1).strip().lower()), number)
    return lines


def _read_values(
    parser: configparser.ConfigParser, lines: dict[tuple[Optional[str], str], int]
) -> dict[str, dict[str, Any]]:
    values: dict[str, dict[str, Any]] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            msg = f"unknown section [{section}]"
            logger.error(msg)
            raise ConfigError(msg, section=section, line=lines.get((section, "")))
        values[section] = {}
        for key, raw in parser.items(section):
            line = lines.get((section, key))
            if key not in _SCHEMA[section]:
                msg = f"unknown key {key!r}"
                logger.error("%s in [%s] at line %s", msg, section, line)
                raise ConfigError(msg, section=section, key=key, line=line)
            try:
                values[section][key] = _SCHEMA[section][key](raw.strip())
            except ValueError as e:
                msg = f"invalid value {raw!r}: {e}"
                logger.error("%s in [%s] at line %s", msg, section, line)
                raise ConfigError(msg, section=section, key=key, line=line) from e
    return values


def _build_model(v: dict[str, Any]) -> ModelConfig:
    residual = None
    if v.get("residual_intensity", 0.0) > 0.0:
        residual = ResidualJumps(
            intensity=v["residual_intensity"],
            law=v.get("residual_law", "two_point"),
            size=v.get("residual_size", 1.0),
        )
    kwargs = {
        name: v[name]
        for name in (
            "x0",
            "alpha0",
            "sigma0",
            "alpha_speed",
            "alpha_level",
            "alpha_vol",
            "sigma_coupling",
            "euler_substep_divisor",
        )
        if name in v
    }
    law = StableLaw(v.get("beta", DEFAULT_BETA), v.get("stable_scale", DEFAULT_STABLE_SCALE))
    return ModelConfig(stable=law, residual_jumps=residual, **kwargs)


def _build_scheme(v: dict[str, Any]) -> SchemeConfig:
    kind = v.get("phi", "truncated_exponential")
    if kind == "constant":
        phi = PhiSpec.constant()
    elif kind == "table":
        phi = PhiSpec.table(v.get("phi_values", ()), v.get("phi_weights", ()))
    else:
        defaults = PhiSpec.truncated_exponential()
        phi = PhiSpec.truncated_exponential(
            v.get("phi_rate", defaults.rate), v.get("phi_floor", defaults.floor)
        )
    lam = LambdaSpec(
        **{
            name: v[f"lambda_{name}"]
            for name in ("level", "speed", "vol", "init")
            if f"lambda_{name}" in v
        },
        **({"clamp_floor": v["lambda_clamp"]} if "lambda_clamp" in v else {}),
    )
    defaults_scheme = SchemeConfig()
    if "delta_inv" in v and "delta_n" in v:
        msg = "give either delta_inv or delta_n, not both"
        raise ConfigError(msg, section="scheme", key="delta_n")
    delta_n = v.get("delta_n", defaults_scheme.delta_n)
    if "delta_inv" in v:
        delta_n = 1.0 / v["delta_inv"]
    return SchemeConfig(
        delta_n=delta_n,
        lam=lam,
        phi=phi,
        horizon=v.get("horizon", defaults_scheme.horizon),
    )


def _build_estimator(v: dict[str, Any]) -> EstimatorConfig:
    kwargs = {
        name: v[name]
        for name in (
            "p",
            "rho",
            "u_exponent",
            "u_scale",
            "k_exponent",
            "r_exponent",
            "debias",
            "mc_size",
        )
        if name in v
    }
    default_low, default_high = EstimatorConfig().beta_clamp
    clamp = (v.get("beta_clamp_low", default_low), v.get("beta_clamp_high", default_high))
    return EstimatorConfig(beta_clamp=clamp, **kwargs)


def _build_study(
    v: dict[str, Any],
    model: ModelConfig,
    scheme: SchemeConfig,
    estimator: EstimatorConfig,
) -> StudyConfig:
    kwargs = {
        name: v[name]
        for name in ("betas", "rhos", "delta_inv", "n_reps", "master_seed")
        if name in v
    }
    return StudyConfig(
        model=model,
        scheme=scheme,
        estimator=estimator,
        workers=v.get("workers", default_workers()),
        **kwargs,
    )


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    """Parse INI text into a :class:`RunConfig`.

    Missing sections and keys take the reference configuration.

    :param str text: INI text with any of the sections ``[model]``,
        ``[scheme]``, ``[estimator]`` and ``[study]``.
    :param str source: Name used in log messages.
    :rtype: RunConfig
    :raises ConfigError: On syntax errors, unknown sections or keys and
        values outside their domain, naming the line where possible.
    """
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    try:
        parser.read_string(text, source=source)
    except configparser.ParsingError as e:
        line = getattr(e, "lineno", None) or (e.errors[0][0] if e.errors else None)
        msg = f"cannot parse {source}"
        logger.error("%s at line %s", msg, line)
        raise ConfigError(msg, line=line) from e
    except configparser.Error as e:
        msg = f"cannot parse {source}: {e.message}"
        logger.error(msg)
        raise ConfigError(msg, line=getattr(e, "lineno", None)) from e

    lines = _locate(text)
    values = _read_values(parser, lines)
    builders: list[tuple[str, Callable[..., Any]]] = [
        ("model", _build_model),
        ("scheme", _build_scheme),
        ("estimator", _build_estimator),
    ]
    built: dict[str, Any] = {}
    for section, builder in builders:
        built[section] = _checked(section, lines, builder, values.get(section, {}))
    built["study"] = _checked(
        "study",
        lines,
        _build_study,
        values.get("study", {}),
        built["model"],
        built["scheme"],
        built["estimator"],
    )
    logger.info("Loaded configuration from %s", source)
    return RunConfig(source=source, **built)


def _checked(
    section: str,
    lines: dict[tuple[Optional[str], str], int],
    builder: Callable[..., Any],
    *args: Any,  # noqa: ANN401
) -> Any:  # noqa: ANN401
    try:
        return builder(*args)
    except ConfigError:
        raise
    except JumpActivityError as e:
        key = next(iter(e.details), None)
        msg = f"invalid [{section}] configuration: {e}"
        logger.error(msg)
        raise ConfigError(
            msg, section=section, key=key, line=lines.get((section, key or ""))
        ) from e


def load_config(path: Union[str, Path]) -> RunConfig:
    """Read and parse an INI configuration file.

    :raises ConfigError: If the file is missing or invalid.
    """
    config_path = Path(path)
    if not config_path.is_file():
        msg = f"configuration file {path} does not exist"
        logger.error(msg)
        raise ConfigError(msg)
    logger.debug("Reading configuration from %s", config_path)
    return parse_config(config_path.read_text(encoding="utf-8"), str(config_path))


def render_config(cfg: RunConfig) -> str:
    """INI text that :func:`parse_config` turns back into ``cfg``."""
    model, scheme, est, study = cfg.model, cfg.scheme, cfg.estimator, cfg.study
    sections: dict[str, dict[str, Any]] = {
        "model": {
            "beta": model.stable.beta,
            "stable_scale": model.stable.A,
            "x0": model.x0,
            "alpha0": model.alpha0,
            "sigma0": model.sigma0,
            "alpha_speed": model.alpha_speed,
            "alpha_level": model.alpha_level,
            "alpha_vol": model.alpha_vol,
            "sigma_coupling": model.sigma_coupling,
            "euler_substep_divisor": model.euler_substep_divisor,
        },
        "scheme": {
            "delta_n": scheme.delta_n,
            "horizon": scheme.horizon,
            "phi": scheme.phi.kind,
            "phi_rate": scheme.phi.rate,
            "phi_floor": scheme.phi.floor,
            "lambda_level": scheme.lam.level,
            "lambda_speed": scheme.lam.speed,
            "lambda_vol": scheme.lam.vol,
            "lambda_init": scheme.lam.init,
            "lambda_clamp": scheme.lam.clamp_floor,
        },
        "estimator": {
            "p": est.p,
            "rho": est.rho,
            "u_exponent": est.u_exponent,
            "u_scale": est.u_scale,
            "k_exponent": est.k_exponent,
            "r_exponent": est.r_exponent,
            "debias": est.debias,
            "mc_size": est.mc_size,
            "beta_clamp_low": est.beta_clamp[0],
            "beta_clamp_high": est.beta_clamp[1],
        },
        "study": {
            "betas": study.betas,
            "rhos": study.rhos,
            "delta_inv": study.delta_inv,
            "n_reps": study.n_reps,
            "master_seed": study.master_seed,
            "workers": study.workers,
        },
    }
    if model.residual_jumps is not None:
        sections["model"]["residual_intensity"] = model.residual_jumps.intensity
        sections["model"]["residual_law"] = model.residual_jumps.law
        sections["model"]["residual_size"] = model.residual_jumps.size
    if scheme.phi.kind == "table":
        # weights are stored normalized, values as given
        sections["scheme"]["phi_values"] = scheme.phi.values
        sections["scheme"]["phi_weights"] = scheme.phi.weights

    def fmt(value: Any) -> str:  # noqa: ANN401
        if isinstance(value, tuple):
            return ", ".join(repr(item) for item in value)
        if isinstance(value, bool):
            return "true" if value else "false"
        return repr(value)

    blocks = []
    for section, entries in sections.items():
        body = "\n".join(f"{key} = {fmt(value)}" for key, value in entries.items())
        blocks.append(f"[{section}]\n{body}\n")
    return "\n".join(blocks)
