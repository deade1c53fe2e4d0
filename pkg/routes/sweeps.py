"""
Gain sweep routes: angular and distance domain comparisons of exact and closed-form gains
"""
import argparse
import logging
import math
from typing import Any, List

import numpy as np

from models.schemas import ArrayGeometry, ArrayLayout, FocusPoint
from routes.base import CommandRouter, argument, emit, load_experiment, require_layout
from services.gain_service import (
    GainService, angular_argument, angular_error_bound, depth_of_focus, depth_of_focus_edges,
    distance_argument, gain_upper_bound,
)
from services.special_functions import bessel_j

logger = logging.getLogger(__name__)

router = CommandRouter()

ANGULAR_HEADER = ["r_m", "phi_rad", "exact_gain", "approx_gain", "abs_error", "error_bound"]
DISTANCE_HEADER = ["r_m", "exact_gain", "approx_gain", "upper_bound", "abs_error"]
RADIUS_HEADER = ["radius_m", "exact_gain", "approx_gain", "upper_bound", "abs_error", "zeta"]


def angular_rows(geometry: ArrayGeometry, distances_m: List[float], phi1: float,
                 offsets: np.ndarray) -> List[List[Any]]:
    """Exact gain and |J0(beta)| for phi2 = phi1 + offset at each distance"""
    service = GainService(geometry)
    radius, wavelength = geometry.radius_m, geometry.wavelength_m
    phi2 = phi1 + offsets
    beta = angular_argument(radius, wavelength, phi1, phi2)
    approx = np.abs(bessel_j(0, beta)) if offsets.size else np.empty(0)
    rows: List[List[Any]] = []
    for r in distances_m:
        exact = service.gain_curve(FocusPoint(distance_m=r, azimuth_rad=phi1), r, phi2) if offsets.size else []
        for i, phi in enumerate(phi2):
            rows.append([
                float(r), float(phi), float(exact[i]), float(approx[i]),
                float(abs(exact[i] - approx[i])), angular_error_bound(float(beta[i]), geometry.n),
            ])
    return rows


def distance_rows(geometry: ArrayGeometry, r0: float, azimuth_rad: float, distances: np.ndarray) -> List[List[Any]]:
    service = GainService(geometry)
    radius, wavelength = geometry.radius_m, geometry.wavelength_m
    if distances.size == 0:
        return []
    exact = service.gain_curve(FocusPoint(distance_m=r0, azimuth_rad=azimuth_rad), distances, azimuth_rad)
    approx = np.abs(bessel_j(0, distance_argument(radius, wavelength, r0, distances)))
    rows: List[List[Any]] = []
    for r, e, a in zip(distances, exact, approx):
        bound = gain_upper_bound(radius, wavelength, r0, float(r)) if r != r0 else None
        rows.append([float(r), float(e), float(a), bound, float(abs(e - a))])
    return rows


def radius_rows(geometry: ArrayGeometry, r1: float, r2: float, radii: np.ndarray) -> List[List[Any]]:
    """Gain between (r1, 0) and (r2, 0) as the ring radius varies with the element count fixed"""
    rows: List[List[Any]] = []
    for radius in radii:
        ring = ArrayGeometry(layout=ArrayLayout.UCA, n=geometry.n, wavelength_m=geometry.wavelength_m,
                             radius_m=float(radius))
        exact = float(GainService(ring).gain_curve(FocusPoint(distance_m=r1), r2, 0.0)[0])
        zeta = distance_argument(float(radius), geometry.wavelength_m, r1, r2)
        approx = abs(bessel_j(0, zeta))
        bound = gain_upper_bound(float(radius), geometry.wavelength_m, r1, r2)
        rows.append([float(radius), exact, approx, bound, abs(exact - approx), zeta])
    return rows


@router.command(
    "sweep-angular",
    help="Exact gain against |J0(beta)| over an azimuth sweep at fixed distances",
)
def sweep_angular(args: argparse.Namespace) -> None:
    config = load_experiment(args)
    geometry = config.geometry.to_geometry()
    require_layout(geometry, ArrayLayout.UCA, command="sweep-angular")
    rows = angular_rows(
        geometry, config.sweep.angular_distances_m, config.analysis.focus_azimuth_rad,
        config.sweep.angular.values(),
    )
    if rows:
        logger.info("Angular sweep: %d rows, max abs error %.4g", len(rows), max(row[4] for row in rows))
    emit(args, config, "sweep_angular", ANGULAR_HEADER, rows)


@router.command(
    "sweep-distance",
    help="Exact gain against |J0(zeta)| over distance (or ring radius) with the Bessel upper bound",
    arguments=[
        argument("--vary", choices=["distance", "radius"], default="distance",
                 help="sweep the target distance or the ring radius"),
    ],
)
def sweep_distance(args: argparse.Namespace) -> None:
    config = load_experiment(args)
    geometry = config.geometry.to_geometry()
    require_layout(geometry, ArrayLayout.UCA, command="sweep-distance")
    analysis = config.analysis

    if args.vary == "radius":
        r1, r2 = analysis.pair_distances_m
        rows = radius_rows(geometry, r1, r2, config.sweep.radius.values())
        emit(args, config, "sweep_radius", RADIUS_HEADER, rows)
        return

    r0, phi = analysis.focus_distance_m, analysis.focus_azimuth_rad
    rows = distance_rows(geometry, r0, phi, config.sweep.distance.values())
    width = depth_of_focus(geometry.radius_m, geometry.wavelength_m, r0, analysis.eta_level)
    near, far = depth_of_focus_edges(geometry.radius_m, geometry.wavelength_m, r0, analysis.eta_level)
    exact_near, exact_far = GainService(geometry).depth_of_focus_numeric(r0, phi, analysis.eta_level)
    logger.info(
        "Depth of focus at %.2f m: %.3f m closed form (%.3f..%s m), exact gain %.3f..%s m",
        r0, width, near, f"{far:.3f}" if math.isfinite(far) else "inf",
        exact_near, f"{exact_far:.3f}" if math.isfinite(exact_far) else "inf",
    )
    meta = {
        "focus_distance_m": r0,
        "depth_of_focus_m": width,
        "depth_of_focus_edges_m": [near, far],
        "exact_depth_of_focus_edges_m": [exact_near, exact_far],
    }
    emit(args, config, "sweep_distance", DISTANCE_HEADER, rows, meta)
