"""
Gain service: exact beamforming gains by direct summation and the closed-form
Bessel / Fresnel approximations built on them (angular and distance gains,
upper bound, depth of focus, effective Rayleigh distances, zero-gain distances,
cylindrical gains).
"""
import logging
import math
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from config import settings
from models.errors import NumericDomainError
from models.schemas import (
    ArrayGeometry, ErdOutcome, ErdResult, FocusPoint, GainApprox, GainFormula,
    MainLobeValue, TWO_PI,
)
from services.geometry_service import GeometryService, geometry_service, rayleigh_distance
from services.special_functions import bessel_j, g_mu, inv_j0_main_lobe, j0_zeros

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Calibrated epsilon_L values of the ULA effective Rayleigh distance
ULA_EPSILON_TABLE = {0.05: 0.367}


def _inverse(r: ArrayLike) -> ArrayLike:
    """1/r with 1/inf = 0"""
    values = np.asarray(r, dtype=float)
    if np.any(np.isnan(values)) or np.any(values <= 0):
        raise NumericDomainError("distances must be > 0 or infinite")
    out = np.where(np.isinf(values), 0.0, 1.0 / np.where(np.isinf(values), 1.0, values))
    return float(out) if np.ndim(r) == 0 else out


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value) or value <= 0:
            raise NumericDomainError(f"{name} must be finite and > 0, got {value}")


def _check_threshold(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise NumericDomainError(f"loss threshold must lie in (0, 1), got {delta}")


def angular_argument(radius_m: float, wavelength_m: float, phi1: ArrayLike, phi2: ArrayLike) -> ArrayLike:
    """beta = (4 pi R / lambda) sin((phi2 - phi1) / 2)"""
    return 4.0 * math.pi * radius_m / wavelength_m * np.sin((np.asarray(phi2) - np.asarray(phi1)) / 2.0)


def distance_argument(radius_m: float, wavelength_m: float, r1: ArrayLike, r2: ArrayLike) -> ArrayLike:
    """zeta = (2 pi R^2 / lambda) |1/(4 r1) - 1/(4 r2)|"""
    zeta = TWO_PI * radius_m ** 2 / wavelength_m * np.abs(_inverse(r1) - _inverse(r2)) / 4.0
    return float(zeta) if np.ndim(zeta) == 0 else zeta


def fresnel_argument(spacing_m: float, ring_half_count: int, wavelength_m: float,
                     r1: ArrayLike, r2: ArrayLike) -> ArrayLike:
    """mu = sqrt((2 M^2 d^2 / lambda) |1/r1 - 1/r2|)"""
    mu = np.sqrt(2.0 * ring_half_count ** 2 * spacing_m ** 2 / wavelength_m
                 * np.abs(_inverse(r1) - _inverse(r2)))
    return float(mu) if np.ndim(mu) == 0 else mu


def angular_gain(radius_m: float, wavelength_m: float, phi1: float, phi2: float) -> GainApprox:
    """|J0(beta)|, the gain between two focal points at equal distance"""
    _check_positive(radius_m=radius_m, wavelength_m=wavelength_m)
    beta = float(angular_argument(radius_m, wavelength_m, phi1, phi2))
    return GainApprox(value=abs(bessel_j(0, beta)), formula=GainFormula.ANGULAR_J0, beta=beta)


def angular_error_bound(beta: float, n: int) -> float:
    """Truncation bound 2 (beta e / (2N))^N of the angular approximation"""
    beta = abs(beta)
    if beta == 0.0:
        return 0.0
    return 2.0 * math.exp(n * math.log(beta * math.e / (2.0 * n)))


def distance_gain(radius_m: float, wavelength_m: float, r1: float, r2: float) -> GainApprox:
    """|J0(zeta)|, the gain between two focal points on the same ray"""
    _check_positive(radius_m=radius_m, wavelength_m=wavelength_m)
    zeta = distance_argument(radius_m, wavelength_m, r1, r2)
    return GainApprox(value=abs(bessel_j(0, zeta)), formula=GainFormula.DISTANCE_J0, zeta=zeta)


def distance_gain_limit(radius_m: float, wavelength_m: float, r1: float) -> float:
    """Distance gain as r2 -> inf: |J0(pi R^2 / (2 lambda r1))|"""
    _check_positive(radius_m=radius_m, wavelength_m=wavelength_m, r1=r1)
    return abs(bessel_j(0, math.pi * radius_m ** 2 / (2.0 * wavelength_m * r1)))


def gain_upper_bound(radius_m: float, wavelength_m: float, r1: float, r2: float) -> float:
    """
    (2 / (pi R)) sqrt(lambda r1 r2 / |r2 - r1|), equal to sqrt(2 / (pi zeta)).

    Bounds the distance gain only where zeta is past the first J0 zero.
    """
    _check_positive(radius_m=radius_m, wavelength_m=wavelength_m, r1=r1, r2=r2)
    if r1 == r2:
        raise NumericDomainError("upper bound is undefined for r1 == r2")
    return 2.0 / (math.pi * radius_m) * math.sqrt(wavelength_m * r1 * r2 / abs(r2 - r1))


def _eta(level: Union[float, MainLobeValue]) -> float:
    eta = inv_j0_main_lobe(level)
    if eta == 0.0:
        raise NumericDomainError("depth of focus needs a level below 1")
    return eta


def depth_of_focus(radius_m: float, wavelength_m: float, r0: float,
                   level: Union[float, MainLobeValue] = 0.5) -> float:
    """
    Width of the distance interval around r0 where the distance gain stays above `level`.

    Returns inf once r0 >= pi R^2 / (2 eta lambda).
    """
    _check_positive(radius_m=radius_m, wavelength_m=wavelength_m, r0=r0)
    eta = _eta(level)
    if r0 >= math.pi * radius_m ** 2 / (2.0 * eta * wavelength_m):
        return math.inf
    numerator = 4.0 * math.pi * eta * wavelength_m * radius_m ** 2 * r0 ** 2
    denominator = math.pi ** 2 * radius_m ** 4 - 4.0 * eta ** 2 * wavelength_m ** 2 * r0 ** 2
    return numerator / denominator


def depth_of_focus_edges(radius_m: float, wavelength_m: float, r0: float,
                         level: Union[float, MainLobeValue] = 0.5) -> Tuple[float, float]:
    """Near and far distances where the distance gain falls to `level`; far may be inf"""
    _check_positive(radius_m=radius_m, wavelength_m=wavelength_m, r0=r0)
    a = 2.0 * _eta(level) * wavelength_m / (math.pi * radius_m ** 2)
    near = r0 / (1.0 + a * r0)
    far = r0 / (1.0 - a * r0) if a * r0 < 1.0 else math.inf
    return near, far


def erd_uca(radius_m: float, wavelength_m: float, delta: float) -> ErdResult:
    """pi R^2 / (2 lambda J0^-1(1 - delta)), the same at every angle"""
    _check_positive(radius_m=radius_m, wavelength_m=wavelength_m)
    _check_threshold(delta)
    y = inv_j0_main_lobe(1.0 - delta)
    return ErdResult(
        distance_m=math.pi * radius_m ** 2 / (2.0 * wavelength_m * y),
        threshold=delta,
        epsilon=math.pi / (16.0 * y),
    )


def ula_epsilon(delta: float) -> float:
    """
    epsilon_L for a loss threshold.

    Uses the calibration table when it holds delta, otherwise solves
    |G(T)| = 1 - delta for the continuous aperture and returns 1 / (4 T^2).
    """
    _check_threshold(delta)
    for known, epsilon in ULA_EPSILON_TABLE.items():
        if math.isclose(delta, known, rel_tol=0.0, abs_tol=1e-12):
            return epsilon
    target = 1.0 - delta
    lo, hi = 0.0, 0.05
    while g_mu(hi) > target:
        lo, hi = hi, hi + 0.05
        if hi > 100.0:
            raise NumericDomainError(f"no Fresnel crossing found for delta={delta}")
    while hi - lo > settings.BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if g_mu(mid) > target:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    return 1.0 / (4.0 * t * t)


def erd_ula(aperture_m: float, wavelength_m: float, azimuth_rad: float, delta: float) -> ErdResult:
    """epsilon_L 2 D^2 cos^2(phi) / lambda; zero at phi = +-pi/2"""
    _check_positive(aperture_m=aperture_m, wavelength_m=wavelength_m)
    epsilon = ula_epsilon(delta)
    cos2 = math.cos(azimuth_rad) ** 2
    if cos2 < 1e-24:
        cos2 = 0.0
    return ErdResult(
        distance_m=epsilon * rayleigh_distance(aperture_m, wavelength_m) * cos2,
        threshold=delta,
        epsilon=epsilon,
        azimuth_rad=azimuth_rad,
    )


def erd_ratio(aperture_m: float, wavelength_m: float, azimuth_rad: float, delta: float) -> float:
    """rho(phi) = epsilon_L cos^2(phi) / epsilon_C for a UCA and ULA of equal aperture"""
    uca = erd_uca(aperture_m / 2.0, wavelength_m, delta)
    ula = erd_ula(aperture_m, wavelength_m, azimuth_rad, delta)
    # both distances share the factor 2 D^2 / lambda
    return ula.distance_m / uca.distance_m


def cylindrical_gain(radius_m: float, spacing_m: float, ring_half_count: int, wavelength_m: float,
                     r1: float, r2: float) -> GainApprox:
    """|G(mu) J0(zeta)| for focal points in the central plane on the same ray"""
    _check_positive(radius_m=radius_m, wavelength_m=wavelength_m)
    if ring_half_count < 0:
        raise NumericDomainError(f"ring_half_count must be >= 0, got {ring_half_count}")
    zeta = distance_argument(radius_m, wavelength_m, r1, r2)
    mu = fresnel_argument(spacing_m, ring_half_count, wavelength_m, r1, r2) if ring_half_count else 0.0
    value = g_mu(mu) * abs(bessel_j(0, zeta))
    return GainApprox(value=value, formula=GainFormula.CYLINDRICAL_FRESNEL_J0, zeta=zeta, mu=mu)


class GainService:
    """Gains and searches that need the element positions of one geometry"""

    def __init__(self, geometry: ArrayGeometry):
        self.geometry = geometry
        self.arrays: GeometryService = geometry_service(geometry)

    def gain_curve(self, reference: FocusPoint, distances_m: ArrayLike, azimuths_rad: ArrayLike,
                   elevations_rad: ArrayLike = math.pi / 2, second_order: bool = False) -> np.ndarray:
        """
        |b(reference)^H b(p_k)| for every point p_k.

        Args:
            reference: focal point of the beamformer
            distances_m, azimuths_rad, elevations_rad: broadcastable coordinates of the points
            second_order: evaluate both vectors from the truncated distance expansion
        """
        ref = self.arrays.focusing_matrix(
            [reference.distance_m], [reference.azimuth_rad], [reference.elevation_rad], second_order
        )[0]
        r, phi, theta = (
            a.ravel() for a in np.broadcast_arrays(
                np.atleast_1d(np.asarray(distances_m, dtype=float)),
                np.atleast_1d(np.asarray(azimuths_rad, dtype=float)),
                np.atleast_1d(np.asarray(elevations_rad, dtype=float)),
            )
        )
        out = np.empty(r.size)
        chunk = settings.CODEBOOK_CHUNK_SIZE
        for start in range(0, r.size, chunk):
            stop = start + chunk
            rows = self.arrays.focusing_matrix(r[start:stop], phi[start:stop], theta[start:stop], second_order)
            out[start:stop] = np.abs(rows @ np.conj(ref))
        return np.minimum(out, 1.0)

    def exact_gain(self, p1: FocusPoint, p2: FocusPoint) -> GainApprox:
        value = self.gain_curve(p1, p2.distance_m, p2.azimuth_rad, p2.elevation_rad)[0]
        return GainApprox(value=float(value), formula=GainFormula.EXACT_SUM)

    def series_gain(self, p1: FocusPoint, p2: FocusPoint) -> GainApprox:
        """Double sum over rings and elements using second-order distances"""
        value = self.gain_curve(p1, p2.distance_m, p2.azimuth_rad, p2.elevation_rad, second_order=True)[0]
        return GainApprox(value=float(value), formula=GainFormula.EXACT_SUM)

    def _far_loss(self, distances_m: np.ndarray, azimuth_rad: float) -> np.ndarray:
        return 1.0 - self.gain_curve(FocusPoint.far_field(azimuth_rad), distances_m, azimuth_rad)

    def erd_numeric(self, azimuth_rad: float, delta: float) -> ErdResult:
        """
        Outermost distance where the far-field beamforming loss reaches delta.

        Scans a log grid downward from ERD_SEARCH_SPAN Rayleigh distances, then
        bisects between the first grid point at or above delta and its outer neighbour.
        """
        _check_threshold(delta)
        boundary = rayleigh_distance(self.geometry.aperture, self.geometry.wavelength_m)
        if boundary <= 0:
            raise NumericDomainError("ERD search needs an array with a non-zero aperture")
        top = settings.ERD_SEARCH_SPAN * boundary
        bottom = max(self.geometry.aperture, self.geometry.wavelength_m)
        grid = np.geomspace(top, bottom, settings.ERD_GRID_POINTS)
        loss = self._far_loss(grid, azimuth_rad)
        hits = np.nonzero(loss >= delta)[0]
        rayleigh_units = 1.0 / boundary

        if hits.size == 0:
            logger.warning("Far-field loss stays below %.3g at azimuth %.4f rad", delta, azimuth_rad)
            return ErdResult(distance_m=None, threshold=delta, azimuth_rad=azimuth_rad,
                             outcome=ErdOutcome.BELOW_THRESHOLD)
        first = int(hits[0])
        if first == 0:
            return ErdResult(distance_m=math.inf, threshold=delta, azimuth_rad=azimuth_rad,
                             outcome=ErdOutcome.BEYOND_RANGE)

        inner, outer = grid[first], grid[first - 1]
        while (outer - inner) > 1e-9 * outer:
            mid = math.sqrt(inner * outer)
            if self._far_loss(np.array([mid]), azimuth_rad)[0] >= delta:
                inner = mid
            else:
                outer = mid
        distance = 0.5 * (inner + outer)
        logger.info("Numeric ERD at azimuth %.4f rad: %.3f m", azimuth_rad, distance)
        return ErdResult(distance_m=distance, threshold=delta, epsilon=distance * rayleigh_units,
                         azimuth_rad=azimuth_rad, outcome=ErdOutcome.CROSSING)

    def depth_of_focus_numeric(self, r0: float, azimuth_rad: float = 0.0,
                               level: float = 0.5) -> Tuple[float, float]:
        """
        Near and far edges of the interval around r0 where the exact gain stays >= level.

        Steps in 1/r away from r0 until the gain drops below level, then bisects;
        the far edge is inf when the gain at infinity is still >= level.
        """
        _check_positive(r0=r0)
        reference = FocusPoint(distance_m=r0, azimuth_rad=azimuth_rad)

        def gain_at(x: float) -> float:
            r = math.inf if x <= 0 else 1.0 / x
            return float(self.gain_curve(reference, r, azimuth_rad)[0])

        x0 = 1.0 / r0
        step = 0.02 * self.geometry.wavelength_m / (self.geometry.aperture / 2.0) ** 2

        def edge(direction: int) -> float:
            x_in = x0
            for _ in range(100000):
                x_out = x_in + direction * step
                if direction < 0 and x_out <= 0:
                    if gain_at(0.0) >= level:
                        return 0.0
                    x_out = 0.0
                if gain_at(x_out) < level:
                    break
                x_in = x_out
            else:
                raise NumericDomainError(f"no {level} crossing found around r0={r0}")
            while abs(x_out - x_in) > 1e-12 * x0:
                mid = 0.5 * (x_in + x_out)
                if gain_at(mid) >= level:
                    x_in = mid
                else:
                    x_out = mid
            return 0.5 * (x_in + x_out)

        x_near = edge(+1)
        x_far = edge(-1)
        return 1.0 / x_near, (math.inf if x_far == 0.0 else 1.0 / x_far)

    def polish_zero(self, r1: float, r2: float, azimuth_rad: float = 0.0) -> float:
        """Local minimum of the exact gain near r2, searched in 1/r"""
        reference = FocusPoint(distance_m=r1, azimuth_rad=azimuth_rad)
        radius = self.geometry.aperture / 2.0
        half_width = self.geometry.wavelength_m / (2.0 * radius ** 2)
        x2 = 1.0 / r2
        lo = max(x2 - half_width, x2 * 0.5)
        hi = x2 + half_width
        result = minimize_scalar(
            lambda x: float(self.gain_curve(reference, 1.0 / x, azimuth_rad)[0]),
            bounds=(lo, hi), method="bounded", options={"xatol": 1e-12},
        )
        before = float(self.gain_curve(reference, r2, azimuth_rad)[0])
        if result.success and result.fun < before:
            return 1.0 / float(result.x)
        return r2


def exact_gain(geometry: ArrayGeometry, p1: FocusPoint, p2: FocusPoint) -> GainApprox:
    """|b(p1)^H b(p2)| by direct summation over exact element distances"""
    return GainService(geometry).exact_gain(p1, p2)


def cylindrical_series_gain(geometry: ArrayGeometry, p1: FocusPoint, p2: FocusPoint) -> GainApprox:
    return GainService(geometry).series_gain(p1, p2)


def erd_numeric(geometry: ArrayGeometry, azimuth_rad: float, delta: float) -> ErdResult:
    return GainService(geometry).erd_numeric(azimuth_rad, delta)


def depth_of_focus_numeric(geometry: ArrayGeometry, r0: float, azimuth_rad: float = 0.0,
                           level: float = 0.5) -> Tuple[float, float]:
    return GainService(geometry).depth_of_focus_numeric(r0, azimuth_rad, level)


def zero_gain_distances(radius_m: float, wavelength_m: float, r1: float, count: int,
                        geometry: Optional[ArrayGeometry] = None, polish: bool = False,
                        azimuth_rad: float = 0.0) -> List[float]:
    """
    Distances r2 on the ray of r1 where the distance gain vanishes.

    For each of the first `count` J0 zeros z_k both branches
    1/r2 = 1/r1 -+ 2 lambda z_k / (pi R^2) are tried; non-positive ones are
    skipped, so the list may be shorter than 2*count. Entries are ordered by
    zero index, the farther branch first. With polish=True and a geometry each
    r2 is moved to the local minimum of the exact gain on the ray at azimuth_rad.
    """
    _check_positive(radius_m=radius_m, wavelength_m=wavelength_m, r1=r1)
    if count < 1:
        raise NumericDomainError(f"count must be >= 1, got {count}")
    if polish and geometry is None:
        raise NumericDomainError("polishing zero-gain distances needs a geometry")

    service = GainService(geometry) if polish else None
    x1 = 1.0 / r1
    distances: List[float] = []
    for k, z in enumerate(j0_zeros(count), start=1):
        step = 2.0 * wavelength_m * z / (math.pi * radius_m ** 2)
        for x2 in (x1 - step, x1 + step):
            if x2 <= 0:
                logger.info("Zero %d has no positive solution on the far branch for r1=%.3f m", k, r1)
                continue
            r2 = 1.0 / x2
            if service is not None:
                r2 = service.polish_zero(r1, r2, azimuth_rad)
            distances.append(r2)
    return distances
