"""
Experiment configuration loading: TOML file -> ExperimentConfig, with errors
anchored to the line of the offending key
"""
import logging
import os
import re
from typing import Any, Dict, Optional, Sequence

from pydantic import ValidationError

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from config import settings
from models.errors import ConfigError, NumericDomainError
from models.schemas import ArrayLayout, ExperimentConfig, OutputFormat
from services.codebook_service import build_grid

logger = logging.getLogger(__name__)

_TABLE = re.compile(r"^\s*\[+\s*([A-Za-z0-9_.\-\s\"]+?)\s*\]+\s*(#.*)?$")
_KEY = re.compile(r"^\s*([A-Za-z0-9_\-]+)\s*=")
_DECODE_LINE = re.compile(r"line (\d+)")


def _key_lines(text: str) -> Dict[str, int]:
    """Map dotted key paths ("geometry.n") and table names ("geometry") to 1-based line numbers"""
    lines: Dict[str, int] = {}
    table = ""
    for number, raw in enumerate(text.splitlines(), start=1):
        header = _TABLE.match(raw)
        if header:
            table = ".".join(part.strip().strip('"') for part in header.group(1).split("."))
            lines.setdefault(table, number)
            continue
        key = _KEY.match(raw)
        if key:
            path = f"{table}.{key.group(1)}" if table else key.group(1)
            lines.setdefault(path, number)
    return lines


def locate(text: str, location: Sequence[Any]) -> Optional[int]:
    """Line of the deepest key in `location` present in the file, else of its section header"""
    parts = [str(part) for part in location if not isinstance(part, int)]
    lines = _key_lines(text)
    for depth in range(len(parts), 0, -1):
        line = lines.get(".".join(parts[:depth]))
        if line is not None:
            return line
    return None


def _raise_validation(error: ValidationError, text: str, path: str) -> None:
    first = error.errors()[0]
    location = first.get("loc", ())
    dotted = ".".join(str(part) for part in location) or "config"
    raise ConfigError(f"{dotted}: {first.get('msg', 'invalid value')}", path=path, line=locate(text, location))


def parse_config(text: str, path: str = "<config>") -> ExperimentConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        match = _DECODE_LINE.search(str(e))
        raise ConfigError(f"invalid TOML: {e}", path=path, line=int(match.group(1)) if match else None)

    try:
        config = ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        _raise_validation(e, text, path)

    _check_preconditions(config, text, path)
    return config


def _check_preconditions(config: ExperimentConfig, text: str, path: str) -> None:
    """Operation preconditions that depend on several keys at once"""
    try:
        geometry = config.geometry.to_geometry()
    except (ValidationError, ValueError) as e:
        message = e.errors()[0]["msg"] if isinstance(e, ValidationError) else str(e)
        raise ConfigError(f"geometry: {message}", path=path, line=locate(text, ("geometry",)))

    # codebook parameters are checked here only when the file sets them
    lines = _key_lines(text)
    explicit = any(f"analysis.{key}" in lines for key in ("correlation_threshold", "r_min_m", "ring_spacing"))
    if geometry.layout == ArrayLayout.UCA and explicit:
        analysis = config.analysis
        try:
            build_grid(geometry, analysis.correlation_threshold, analysis.r_min_m, analysis.ring_spacing)
        except NumericDomainError as e:
            key = "r_min_m" if "r_min" in str(e) else "correlation_threshold"
            raise ConfigError(f"analysis.{key}: {e}", path=path, line=locate(text, ("analysis", key)))


def load_config(path: Optional[str] = None) -> ExperimentConfig:
    """
    Load an experiment file.

    Without a path the default preset is used when present, otherwise the
    built-in defaults.
    """
    if path is None:
        path = settings.DEFAULT_CONFIG_PATH
        if not os.path.exists(path):
            logger.info("No config given and %s not found; using built-in defaults", path)
            return ExperimentConfig()
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e.strerror or e}", path=path)
    config = parse_config(text, path)
    logger.info("Loaded experiment config from %s", path)
    return config


def apply_overrides(config: ExperimentConfig, seed: Optional[int] = None, out: Optional[str] = None,
                    output_format: Optional[str] = None) -> ExperimentConfig:
    """Command-line values replace experiment.seed, output.path and output.format"""
    experiment, output = config.experiment, config.output
    if seed is not None:
        experiment = experiment.model_copy(update={"seed": int(seed)})
    updates: Dict[str, Any] = {}
    if out is not None:
        updates["path"] = out
    if output_format is not None:
        try:
            updates["format"] = OutputFormat(output_format)
        except ValueError:
            raise ConfigError(f"output.format: unsupported format {output_format!r}")
    if updates:
        output = output.model_copy(update=updates)
    return config.model_copy(update={"experiment": experiment, "output": output})

