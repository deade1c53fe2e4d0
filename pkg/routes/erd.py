"""
Effective Rayleigh distance routes
"""
import argparse
import logging
from typing import Any, List

import numpy as np

from models.schemas import ArrayGeometry, ArrayLayout
from routes.base import CommandRouter, emit, load_experiment, require_layout
from services.gain_service import GainService, erd_ratio, erd_ula, erd_uca

logger = logging.getLogger(__name__)

router = CommandRouter()

ERD_HEADER = ["phi_rad", "erd_uca_m", "erd_ula_m", "erd_numeric_m", "erd_ula_numeric_m", "ratio"]


def erd_rows(geometry: ArrayGeometry, ula_elements: int, delta: float, angles: np.ndarray) -> List[List[Any]]:
    """
    Closed-form and numeric ERDs of the UCA and of a ULA with the same aperture.

    The ULA spans D = 2R with `ula_elements` elements along the y-axis.
    """
    aperture, wavelength = geometry.aperture, geometry.wavelength_m
    ula = ArrayGeometry(layout=ArrayLayout.ULA, n=ula_elements, wavelength_m=wavelength, aperture_m=aperture)
    uca_service, ula_service = GainService(geometry), GainService(ula)
    closed_uca = erd_uca(geometry.radius_m, wavelength, delta)

    rows: List[List[Any]] = []
    for phi in angles:
        phi = float(phi)
        rows.append([
            phi,
            closed_uca.distance_m,
            erd_ula(aperture, wavelength, phi, delta).distance_m,
            uca_service.erd_numeric(phi, delta).distance_m,
            ula_service.erd_numeric(phi, delta).distance_m,
            erd_ratio(aperture, wavelength, phi, delta),
        ])
    return rows


@router.command("erd-map", help="UCA and ULA effective Rayleigh distances over azimuth")
def erd_map(args: argparse.Namespace) -> None:
    config = load_experiment(args)
    geometry = config.geometry.to_geometry()
    require_layout(geometry, ArrayLayout.UCA, command="erd-map")
    delta = config.analysis.erd_threshold
    rows = erd_rows(geometry, config.analysis.ula_elements, delta, config.sweep.erd_angles.values())
    logger.info("ERD map: %d angles at delta=%.3g", len(rows), delta)
    emit(args, config, "erd_map", ERD_HEADER, rows, {"delta": delta})
