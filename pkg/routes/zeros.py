"""
Zero-gain distances route
"""
import argparse
import logging
from typing import Any, List

from models.schemas import ArrayGeometry, ArrayLayout, FocusPoint
from routes.base import CommandRouter, argument, emit, load_experiment, require_layout
from services.gain_service import GainService, distance_gain, zero_gain_distances

logger = logging.getLogger(__name__)

router = CommandRouter()

ZEROS_HEADER = ["r1_m", "r2_m", "approx_gain", "exact_gain"]


def zero_rows(geometry: ArrayGeometry, r1: float, azimuth_rad: float, count: int, polish: bool) -> List[List[Any]]:
    radius, wavelength = geometry.radius_m, geometry.wavelength_m
    distances = zero_gain_distances(radius, wavelength, r1, count, geometry if polish else None, polish,
                                    azimuth_rad)
    if not distances:
        return []
    exact = GainService(geometry).gain_curve(FocusPoint(distance_m=r1, azimuth_rad=azimuth_rad),
                                             distances, azimuth_rad)
    return [
        [r1, r2, distance_gain(radius, wavelength, r1, r2).value, float(gain)]
        for r2, gain in zip(distances, exact)
    ]


@router.command(
    "zero-gains",
    help="Distances on the focal ray where the beam gain vanishes",
    arguments=[
        argument("--count", type=int, default=None, help="number of J0 zeros (default: analysis.zero_count)"),
        argument("--no-polish", action="store_true", help="report closed-form distances without refinement"),
    ],
)
def zero_gains(args: argparse.Namespace) -> None:
    config = load_experiment(args)
    geometry = config.geometry.to_geometry()
    require_layout(geometry, ArrayLayout.UCA, command="zero-gains")
    analysis = config.analysis
    count = args.count if args.count is not None else analysis.zero_count
    polish = analysis.polish_zeros and not args.no_polish
    rows = zero_rows(geometry, analysis.focus_distance_m, analysis.focus_azimuth_rad, count, polish)
    logger.info("Found %d zero-gain distances for r1=%.2f m", len(rows), analysis.focus_distance_m)
    emit(args, config, "zero_gains", ZEROS_HEADER, rows)
