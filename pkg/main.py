"""
nearfield-uca - near-field beamforming analysis for circular, linear and cylindrical arrays
Main command-line entry point
"""
import argparse
import logging
import sys
from typing import List, Optional

from config import settings
from models.schemas import OutputFormat
from routes import codebook, cylinder, erd, rate, sweeps, zeros

logger = logging.getLogger("nearfield")


def global_options(suppress: bool) -> argparse.ArgumentParser:
    """
    Flags accepted both before and after the subcommand name.

    The copy attached to each subcommand uses SUPPRESS defaults so it never
    overwrites a value given before the subcommand.
    """
    parser = argparse.ArgumentParser(add_help=False)
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=default, metavar="PATH",
                        help=f"experiment TOML file (default: {settings.DEFAULT_CONFIG_PATH})")
    parser.add_argument("--out", default=default, metavar="PATH", help="output file (default: stdout)")
    parser.add_argument("--seed", type=int, default=default, help="base RNG seed")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=default,
                        help="output format")
    parser.add_argument("--golden", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="also regenerate the golden fixture for this command")
    parser.add_argument("--yes", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="do not ask before overwriting golden fixtures")
    parser.add_argument("--log-level", default=argparse.SUPPRESS if suppress else settings.LOG_LEVEL,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="stderr log level")
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nearfield",
        description="Near-field beamforming analysis: gains, Rayleigh distances, codebooks and rates",
        parents=[global_options(suppress=False)],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.PROJECT_VERSION}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    shared = [global_options(suppress=True)]
    sweeps.router.include(subparsers, shared)
    erd.router.include(subparsers, shared)
    codebook.router.include(subparsers, shared)
    rate.router.include(subparsers, shared)
    cylinder.router.include(subparsers, shared)
    zeros.router.include(subparsers, shared)
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    logger.info("%s %s starting: %s (%s)", settings.PROJECT_TITLE, settings.PROJECT_VERSION,
                args.command, settings.ENVIRONMENT)
    code = args.handler(args)
    logger.info("%s finished with exit code %d", args.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
