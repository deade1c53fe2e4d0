"""
Codebook routes: build, verify and export the concentric-ring codebook
"""
import argparse
import logging
import os
from typing import Optional

from models.errors import ConfigError, NearFieldError
from models.schemas import ArrayLayout, ExperimentConfig, OutputFormat, VerifyMode
from routes.base import CommandRouter, argument, emit, load_experiment, require_layout
from services.codebook_service import (
    Codebook, build_codebook, export_header, export_records, focal_point_rows, load_codebook,
    verify_codebook,
)
from services.report_service import write_json, write_json_stream, write_table

logger = logging.getLogger(__name__)

router = CommandRouter()

POINTS_HEADER = ["s1", "s2", "angle_rad", "distance_m"]


def codebook_from_config(config: ExperimentConfig, path: Optional[str] = None) -> Codebook:
    if path:
        return load_codebook(path)
    geometry = config.geometry.to_geometry()
    require_layout(geometry, ArrayLayout.UCA, command="codebook")
    analysis = config.analysis
    return build_codebook(geometry, analysis.correlation_threshold, analysis.r_min_m, analysis.ring_spacing)


def points_path(export_path: str) -> str:
    """Companion focal-point CSV next to an exported codebook"""
    root, _ = os.path.splitext(export_path)
    return f"{root}_points.csv"


@router.command(
    "codebook",
    help="Build, verify or export the concentric-ring codebook",
    arguments=[
        argument("action", choices=["build", "verify", "export"]),
        argument("--codebook", dest="codebook_path", default=None,
                 help="exported codebook to verify instead of building one"),
        argument("--mode", choices=[mode.value for mode in VerifyMode], default=None,
                 help="verification mode (default: analysis.verify_mode)"),
        argument("--no-phases", action="store_true", help="omit per-element phases from the export"),
    ],
)
def codebook(args: argparse.Namespace) -> int:
    config = load_experiment(args)
    cb = codebook_from_config(config, args.codebook_path)
    grid = cb.grid

    if args.action == "build":
        rows = list(focal_point_rows(cb))
        emit(args, config, "codebook_points", POINTS_HEADER, rows,
             {"s1_count": grid.s1_count, "s2_count": grid.s2_count, "codewords": len(cb)})
        return 0

    if args.action == "verify":
        mode = VerifyMode(args.mode) if args.mode else config.analysis.verify_mode
        report = verify_codebook(cb, mode)
        write_json(report.model_dump(mode="json"), config.output.path)
        logger.info("Codebook %s check: %s, max correlation %.4f over %d pairs",
                    mode.value, "passed" if report.passed else "FAILED",
                    report.max_correlation, report.checked_pairs)
        if not report.passed:
            raise NearFieldError(f"{len(report.violations)} codeword pairs exceed the correlation limit")
        return 0

    path = config.output.path
    if path is None:
        raise ConfigError("codebook export needs an output path (--out or output.path)")
    include_phases = config.analysis.include_phases and not args.no_phases
    write_json_stream(export_header(cb), export_records(cb, include_phases), path)
    write_table(POINTS_HEADER, focal_point_rows(cb), points_path(path), OutputFormat.CSV)
    return 0
