"""
Command router shared by the CLI route modules
"""
import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from middleware.error_middleware import handle_errors
from models.errors import NumericDomainError
from models.schemas import ArrayGeometry, ArrayLayout, ExperimentConfig
from services.config_service import apply_overrides, load_config
from services.report_service import write_golden, write_table

logger = logging.getLogger(__name__)

Argument = Tuple[Tuple[str, ...], Dict[str, Any]]


def argument(*flags: str, **kwargs: Any) -> Argument:
    return flags, kwargs


class CommandRouter:
    """Collects subcommands of one route module; main.py includes them into the parser"""

    def __init__(self):
        self.commands: List[Tuple[str, str, Sequence[Argument], Callable]] = []

    def command(self, name: str, help: str, arguments: Sequence[Argument] = ()):
        def register(handler: Callable) -> Callable:
            self.commands.append((name, help, arguments, handler))
            return handler
        return register

    def include(self, subparsers, parents: Sequence[argparse.ArgumentParser] = ()) -> None:
        for name, help, arguments, handler in self.commands:
            parser = subparsers.add_parser(name, help=help, description=help, parents=list(parents))
            for flags, kwargs in arguments:
                parser.add_argument(*flags, **kwargs)
            parser.set_defaults(handler=handle_errors(handler), command=name)


def load_experiment(args: argparse.Namespace) -> ExperimentConfig:
    """Config file named by --config with --seed / --out / --format applied"""
    config = load_config(getattr(args, "config", None))
    return apply_overrides(
        config,
        seed=getattr(args, "seed", None),
        out=getattr(args, "out", None),
        output_format=getattr(args, "format", None),
    )


def require_layout(geometry: ArrayGeometry, *layouts: ArrayLayout, command: str) -> None:
    if geometry.layout not in layouts:
        names = ", ".join(layout.value for layout in layouts)
        raise NumericDomainError(f"{command} needs a {names} geometry, got {geometry.layout.value}")


def _confirm(path_name: str, args: argparse.Namespace) -> bool:
    if getattr(args, "yes", False):
        return True
    if not sys.stdin.isatty():
        logger.warning("Not regenerating %s: confirmation needs a terminal or --yes", path_name)
        return False
    answer = input(f"Regenerate golden fixture '{path_name}'? [y/N] ")
    return answer.strip().lower() in ("y", "yes")


def emit(args: argparse.Namespace, config: ExperimentConfig, name: str, header: Sequence[str],
         rows: List[Sequence[Any]], meta: Optional[Dict[str, Any]] = None) -> None:
    """Write a result table to the configured output and, with --golden, to the fixture directory"""
    write_table(header, rows, config.output.path, config.output.format, meta)
    if getattr(args, "golden", False) and _confirm(name, args):
        write_golden(name, header, rows, config.output.format)
