"""
Array geometry service: element placement, propagation distances and beam vectors

Sign conventions: the far-field steering vector uses exp(+j k p.u) and the
near-field focusing vector uses exp(-j k (r_n - r)); both agree as r -> inf
because r_n - r -> -p.u. Gains are magnitudes, so only this consistency matters.
"""
import logging
import math
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from models.errors import NumericDomainError
from models.schemas import (
    ArrayGeometry, ArrayLayout, BeamVector, DistanceExpansion, FocusPoint, TWO_PI
)

logger = logging.getLogger(__name__)

Angles = Union[float, Sequence[float], np.ndarray]


def direction(azimuth_rad: Angles, elevation_rad: Angles = math.pi / 2) -> np.ndarray:
    """Unit vectors (..., 3) pointing at (azimuth, elevation)"""
    phi = np.asarray(azimuth_rad, dtype=float)
    theta = np.asarray(elevation_rad, dtype=float)
    sin_t = np.sin(theta)
    return np.stack(np.broadcast_arrays(sin_t * np.cos(phi), sin_t * np.sin(phi), np.cos(theta)), axis=-1)


def fresnel_distance(aperture_m: float, wavelength_m: float) -> float:
    """(D/2)(D/lambda)^(1/3), beyond which the second-order expansion is accurate"""
    return aperture_m / 2.0 * (aperture_m / wavelength_m) ** (1.0 / 3.0)


def rayleigh_distance(aperture_m: float, wavelength_m: float) -> float:
    """Classical near/far boundary 2D^2/lambda"""
    return 2.0 * aperture_m ** 2 / wavelength_m


class GeometryService:
    """Element positions and beam vectors for one array geometry"""

    def __init__(self, geometry: ArrayGeometry):
        self.geometry = geometry
        self.wavenumber = geometry.wavenumber
        self._ring, self._azimuth, positions = self._layout(geometry)
        positions.setflags(write=False)
        self._positions = positions
        self._norm2 = np.sum(positions * positions, axis=1)

    @staticmethod
    def _layout(geometry: ArrayGeometry):
        """Ring offsets m, element azimuths psi_n and positions, ring-major"""
        n = geometry.n
        if geometry.layout == ArrayLayout.ULA:
            half = (geometry.aperture_m or 0.0) / 2.0
            y = np.linspace(-half, half, n) if n > 1 else np.zeros(1)
            positions = np.column_stack([np.zeros(n), y, np.zeros(n)])
            return np.zeros(n, dtype=int), np.full(n, math.pi / 2), positions

        psi = TWO_PI * np.arange(1, n + 1) / n
        M = geometry.ring_half_count
        rings = np.repeat(np.arange(-M, M + 1), n)
        azimuths = np.tile(psi, 2 * M + 1)
        spacing = geometry.spacing_m or 0.0
        positions = np.column_stack([
            geometry.radius_m * np.cos(azimuths),
            geometry.radius_m * np.sin(azimuths),
            rings * spacing,
        ])
        return rings, azimuths, positions

    @property
    def total_elements(self) -> int:
        return self._positions.shape[0]

    def element_positions(self) -> np.ndarray:
        """(total_elements, 3) coordinates in meters, ring-major then azimuth index"""
        return self._positions

    def _check_index(self, element_index: int) -> int:
        if not 0 <= int(element_index) < self.total_elements:
            raise NumericDomainError(
                f"element index {element_index} outside 0..{self.total_elements - 1}"
            )
        return int(element_index)

    def exact_distance(self, element_index: int, point: FocusPoint) -> float:
        """Euclidean distance between an element and a finite focal point"""
        if point.is_far_field:
            raise NumericDomainError("exact distance is undefined for a far-field point; use the steering vector")
        idx = self._check_index(element_index)
        target = point.distance_m * direction(point.azimuth_rad, point.elevation_rad)
        return float(np.linalg.norm(target - self._positions[idx]))

    def taylor_distance(self, element_index: int, point: FocusPoint, order: int = 2) -> DistanceExpansion:
        """
        Exact distance with its first- and second-order expansions in 1/r.

        For circular layouts the second-order term equals (chi1 + chi2 - chi3) / r.
        """
        if order not in (1, 2):
            raise NumericDomainError(f"expansion order must be 1 or 2, got {order}")
        if point.is_far_field:
            raise NumericDomainError("Taylor expansion needs a finite distance")
        idx = self._check_index(element_index)
        r = point.distance_m
        u = direction(point.azimuth_rad, point.elevation_rad)
        p = self._positions[idx]
        proj = float(np.dot(u, p))
        norm2 = float(self._norm2[idx])
        exact = math.sqrt(max(r * r - 2.0 * r * proj + norm2, 0.0))
        first = r - proj
        second = first + (norm2 - proj * proj) / (2.0 * r)

        chi1 = chi2 = chi3 = None
        if self.geometry.layout != ArrayLayout.ULA:
            R = self.geometry.radius_m
            m = int(self._ring[idx])
            d = self.geometry.spacing_m or 0.0
            cos_a = math.cos(point.azimuth_rad - self._azimuth[idx])
            sin_t, cos_t = math.sin(point.elevation_rad), math.cos(point.elevation_rad)
            chi1 = R * R / 2.0 * (1.0 - sin_t * sin_t * cos_a * cos_a)
            chi2 = m * m * d * d / 2.0 * (1.0 - cos_t * cos_t)
            chi3 = R * d * m * sin_t * cos_t * cos_a

        return DistanceExpansion(
            reference_m=r, exact=exact, first_order=first, second_order=second,
            order=order, chi1=chi1, chi2=chi2, chi3=chi3,
        )

    def _project(self, u: np.ndarray) -> np.ndarray:
        """u.p for (K, 3) directions; elementwise so each row is independent of K"""
        p = self._positions
        return u[:, 0:1] * p[None, :, 0] + u[:, 1:2] * p[None, :, 1] + u[:, 2:3] * p[None, :, 2]

    def path_differences(self, distances_m: Angles, azimuths_rad: Angles,
                         elevations_rad: Angles = math.pi / 2) -> np.ndarray:
        """
        r_n - r for every point (rows) and element (columns).

        Evaluated as (|p|^2 - 2 r u.p) / (r_n + r) to keep precision at large r;
        far-field rows (r = inf) hold the limit -u.p.
        """
        r, phi, theta = (
            a.ravel() for a in np.broadcast_arrays(
                np.atleast_1d(np.asarray(distances_m, dtype=float)),
                np.atleast_1d(np.asarray(azimuths_rad, dtype=float)),
                np.atleast_1d(np.asarray(elevations_rad, dtype=float)),
            )
        )
        u = direction(phi, theta)
        if np.any(np.isnan(r)) or np.any(r <= 0):
            raise NumericDomainError("focal distances must be > 0 or infinite")

        proj = self._project(u)
        far = np.isinf(r)
        r_col = np.where(far, 1.0, r)[:, None]
        r_n = np.sqrt(np.maximum(r_col * r_col - 2.0 * r_col * proj + self._norm2[None, :], 0.0))
        diff = (self._norm2[None, :] - 2.0 * r_col * proj) / (r_n + r_col)
        if np.any(far):
            diff[far] = -proj[far]
        return diff

    def second_order_differences(self, distances_m: Angles, azimuths_rad: Angles,
                                 elevations_rad: Angles = math.pi / 2) -> np.ndarray:
        """-u.p + (|p|^2 - (u.p)^2) / (2r), i.e. (chi1 + chi2 - chi3) / r - u.p on rings"""
        r, phi, theta = (
            a.ravel() for a in np.broadcast_arrays(
                np.atleast_1d(np.asarray(distances_m, dtype=float)),
                np.atleast_1d(np.asarray(azimuths_rad, dtype=float)),
                np.atleast_1d(np.asarray(elevations_rad, dtype=float)),
            )
        )
        if np.any(np.isnan(r)) or np.any(r <= 0):
            raise NumericDomainError("focal distances must be > 0 or infinite")
        proj = self._project(direction(phi, theta))
        inv_r = np.where(np.isinf(r), 0.0, 1.0 / np.where(np.isinf(r), 1.0, r))[:, None]
        return -proj + (self._norm2[None, :] - proj * proj) * inv_r / 2.0

    def focusing_matrix(self, distances_m: Angles, azimuths_rad: Angles,
                        elevations_rad: Angles = math.pi / 2, second_order: bool = False) -> np.ndarray:
        """
        Rows are unit-norm beam vectors; far-field rows equal steering vectors.

        second_order=True builds the rows from the truncated expansion instead of exact distances.
        """
        differences = self.second_order_differences if second_order else self.path_differences
        diff = differences(distances_m, azimuths_rad, elevations_rad)
        return np.exp(-1j * self.wavenumber * diff) / math.sqrt(self.total_elements)

    def far_steering_vector(self, azimuth_rad: float, elevation_rad: float = math.pi / 2) -> BeamVector:
        row = self.focusing_matrix([math.inf], [azimuth_rad], [elevation_rad])[0]
        return BeamVector(weights=row)

    def near_focusing_vector(self, point: FocusPoint) -> BeamVector:
        """Focusing vector from exact distances; a far-field point gives the steering vector"""
        if point.is_far_field:
            return self.far_steering_vector(point.azimuth_rad, point.elevation_rad)
        row = self.focusing_matrix([point.distance_m], [point.azimuth_rad], [point.elevation_rad])[0]
        return BeamVector(weights=row)

    def fresnel_distance(self) -> float:
        return fresnel_distance(self.geometry.aperture, self.geometry.wavelength_m)

    def rayleigh_distance(self) -> float:
        return rayleigh_distance(self.geometry.aperture, self.geometry.wavelength_m)


@lru_cache(maxsize=32)
def geometry_service(geometry: ArrayGeometry) -> GeometryService:
    """Shared service per geometry; geometries are immutable"""
    logger.debug("Building geometry service for %s with %d elements", geometry.layout.value, geometry.total_elements)
    return GeometryService(geometry)


def element_positions(geometry: ArrayGeometry) -> np.ndarray:
    return geometry_service(geometry).element_positions()


def exact_distance(geometry: ArrayGeometry, element_index: int, point: FocusPoint) -> float:
    return geometry_service(geometry).exact_distance(element_index, point)


def taylor_distance(geometry: ArrayGeometry, element_index: int, point: FocusPoint,
                    order: int = 2) -> DistanceExpansion:
    return geometry_service(geometry).taylor_distance(element_index, point, order)


def far_steering_vector(geometry: ArrayGeometry, azimuth_rad: float,
                        elevation_rad: float = math.pi / 2) -> BeamVector:
    return geometry_service(geometry).far_steering_vector(azimuth_rad, elevation_rad)


def near_focusing_vector(geometry: ArrayGeometry, point: FocusPoint) -> BeamVector:
    return geometry_service(geometry).near_focusing_vector(point)


def focusing_matrix(geometry: ArrayGeometry, distances_m: Angles, azimuths_rad: Angles,
                    elevations_rad: Optional[Angles] = None) -> np.ndarray:
    if elevations_rad is None:
        elevations_rad = math.pi / 2
    return geometry_service(geometry).focusing_matrix(distances_m, azimuths_rad, elevations_rad)
