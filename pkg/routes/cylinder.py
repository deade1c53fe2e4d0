"""
Cylindrical array route: stacked rings against the |G(mu) J0(zeta)| approximation
"""
import argparse
import logging
import math
from typing import Any, List, Sequence

import numpy as np

from models.errors import ConfigError
from models.schemas import ArrayGeometry, ArrayLayout, FocusPoint
from routes.base import CommandRouter, emit, load_experiment, require_layout
from services.gain_service import GainService, distance_argument, fresnel_argument
from services.special_functions import bessel_j, g_mu

logger = logging.getLogger(__name__)

router = CommandRouter()

CYLINDER_HEADER = ["r_m", "exact_gain", "geometric_gain", "fresnel_j0_gain", "abs_error", "M"]


def cylinder_rows(base: ArrayGeometry, ring_half_counts: Sequence[int], azimuth_rad: float,
                  distances: np.ndarray) -> List[List[Any]]:
    """
    Gain between the far-field beam at `azimuth_rad` and near-field points on the same ray,
    in the central plane, for each number of stacked rings.

    exact_gain sums over the second-order element distances; geometric_gain over exact ones.
    """
    rows: List[List[Any]] = []
    reference = FocusPoint.far_field(azimuth_rad)
    radius, wavelength = base.radius_m, base.wavelength_m
    zeta = distance_argument(radius, wavelength, math.inf, distances)
    bessel = np.abs(bessel_j(0, zeta))
    for m in ring_half_counts:
        if m > 0 and base.spacing_m is None:
            raise ConfigError("cylinder sweep with stacked rings needs geometry.spacing_m")
        geometry = base.with_rings(m)
        service = GainService(geometry)
        series = service.gain_curve(reference, distances, azimuth_rad, second_order=True)
        geometric = service.gain_curve(reference, distances, azimuth_rad)
        if m:
            approx = g_mu(fresnel_argument(base.spacing_m, m, wavelength, math.inf, distances)) * bessel
        else:
            approx = bessel
        for r, s, g, a in zip(distances, series, geometric, approx):
            rows.append([float(r), float(s), float(g), float(a), float(abs(s - a)), m])
        logger.info("M=%d (%d elements): max abs error %.4g", m, geometry.n * (2 * m + 1),
                    float(np.max(np.abs(series - approx))) if distances.size else 0.0)
    return rows


@router.command(
    "cylinder-sweep",
    help="Exact and Fresnel-Bessel gains of stacked-ring arrays over distance",
)
def cylinder_sweep(args: argparse.Namespace) -> None:
    config = load_experiment(args)
    base = config.geometry.to_geometry()
    require_layout(base, ArrayLayout.UCA, ArrayLayout.CYLINDRICAL, command="cylinder-sweep")
    analysis = config.analysis
    rows = cylinder_rows(base, analysis.ring_half_counts, analysis.focus_azimuth_rad,
                         config.sweep.cylinder.values())
    emit(args, config, "cylinder_sweep", CYLINDER_HEADER, rows, {"ring_half_counts": analysis.ring_half_counts})
