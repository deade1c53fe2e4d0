"""
Concentric-ring codebook service: sampling grid, lazy codebook, correlation
checks, codeword selection and the JSON / CSV exchange formats.
"""
import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from config import settings
from models.errors import ConfigError, NumericDomainError
from models.schemas import (
    FAR_FIELD, ArrayGeometry, ArrayLayout, BeamVector, ChannelRealization, CorrelationReport,
    FocusPoint, RingSpacing, SamplingGrid, TWO_PI, VerifyMode,
)
from services.gain_service import distance_argument
from services.geometry_service import geometry_service
from services.special_functions import bessel_j, inv_j0_main_lobe

logger = logging.getLogger(__name__)

# Peak of the first J0 sidelobe; lower thresholds let non-neighbours exceed the threshold
MIN_CORRELATION_THRESHOLD = 0.403

FAR_FIELD_TOKEN = "inf"


def build_grid(geometry: ArrayGeometry, delta: float, r_min_m: float,
               ring_spacing: RingSpacing = RingSpacing.THRESHOLD) -> SamplingGrid:
    """
    Angle rays and distance rings for a correlation threshold delta.

    Rays sit at s1 * phi_delta for s1 = 0..S1 with S1 = floor(2 pi / phi_delta) - 1.
    Rings sit at r_delta / s2 for s2 = 1..S2 with S2 = floor(r_delta / r_min); ring 0 is the far field.
    """
    if geometry.layout != ArrayLayout.UCA:
        raise NumericDomainError(f"concentric-ring codebooks need a UCA, got {geometry.layout.value}")
    if delta < MIN_CORRELATION_THRESHOLD:
        raise NumericDomainError(
            f"correlation threshold {delta} is below the first J0 sidelobe peak "
            f"{MIN_CORRELATION_THRESHOLD}; non-neighbouring codewords would exceed it"
        )
    if delta >= 1.0 - 1e-9:
        raise NumericDomainError(f"correlation threshold must stay below 1, got {delta}")
    if not math.isfinite(r_min_m) or r_min_m <= 0:
        raise NumericDomainError(f"r_min must be finite and > 0, got {r_min_m}")

    radius, wavelength = geometry.radius_m, geometry.wavelength_m
    y = inv_j0_main_lobe(delta)
    ratio = wavelength * y / (4.0 * math.pi * radius)
    if ratio > 1.0:
        raise NumericDomainError("array is too small to resolve the threshold in angle")
    step = 2.0 * math.asin(ratio)
    s1_count = max(int(math.floor(TWO_PI / step)) - 1, 0)
    angles = [s1 * step for s1 in range(s1_count + 1)]

    ring_scale = TWO_PI * radius ** 2 / (wavelength * y)
    if ring_spacing == RingSpacing.MATCHED:
        ring_scale /= 4.0
    if r_min_m >= ring_scale:
        raise NumericDomainError(
            f"r_min {r_min_m} m is not below the ring scale {ring_scale:.4f} m; no finite ring fits"
        )
    s2_count = int(math.floor(ring_scale / r_min_m))
    distances = [FAR_FIELD] + [ring_scale / s2 for s2 in range(1, s2_count + 1)]

    return SamplingGrid(
        angular_step_rad=step,
        angles_rad=angles,
        ring_scale_m=ring_scale,
        distances_m=distances,
        correlation_threshold=delta,
        r_min_m=r_min_m,
        ring_spacing=ring_spacing,
    )


@dataclass(frozen=True)
class Codebook:
    """
    Codewords for every (ray, ring) intersection, ordered s1-major then s2.

    Beam vectors are computed on demand from the focal points, so large
    codebooks are processed chunk by chunk.
    """
    geometry: ArrayGeometry
    grid: SamplingGrid

    def __len__(self) -> int:
        return self.grid.size

    @property
    def rings_per_ray(self) -> int:
        return len(self.grid.distances_m)

    def index(self, s1: int, s2: int) -> int:
        return s1 * self.rings_per_ray + s2

    def grid_indices(self, index: int) -> Tuple[int, int]:
        return divmod(index, self.rings_per_ray)

    def focal_point(self, index: int) -> FocusPoint:
        if not 0 <= index < len(self):
            raise IndexError(f"codeword index {index} outside 0..{len(self) - 1}")
        s1, s2 = self.grid_indices(index)
        return FocusPoint(distance_m=self.grid.distances_m[s2], azimuth_rad=self.grid.angles_rad[s1])

    def coordinates(self, start: int = 0, stop: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """Distances and azimuths of codewords start..stop-1"""
        stop = len(self) if stop is None else min(stop, len(self))
        idx = np.arange(start, stop)
        s1, s2 = np.divmod(idx, self.rings_per_ray)
        return np.asarray(self.grid.distances_m)[s2], np.asarray(self.grid.angles_rad)[s1]

    def matrix(self, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
        """Beam vectors of codewords start..stop-1 as rows"""
        distances, angles = self.coordinates(start, stop)
        return geometry_service(self.geometry).focusing_matrix(distances, angles)

    def chunks(self, size: Optional[int] = None) -> Iterator[Tuple[int, np.ndarray]]:
        size = size or settings.CODEBOOK_CHUNK_SIZE
        for start in range(0, len(self), size):
            yield start, self.matrix(start, start + size)

    def __getitem__(self, index: int) -> Tuple[FocusPoint, BeamVector]:
        point = self.focal_point(index)
        return point, BeamVector(weights=self.matrix(index, index + 1)[0])

    def __iter__(self) -> Iterator[Tuple[FocusPoint, BeamVector]]:
        for start, rows in self.chunks():
            for offset, row in enumerate(rows):
                yield self.focal_point(start + offset), BeamVector(weights=row)

    def far_field_slice(self) -> "Codebook":
        """The s2 = 0 ring alone: a classical far-field codebook on the same rays"""
        grid = self.grid.model_copy(update={"distances_m": [FAR_FIELD]})
        return Codebook(geometry=self.geometry, grid=grid)


def build_codebook(geometry: ArrayGeometry, delta: float, r_min_m: float,
                   ring_spacing: RingSpacing = RingSpacing.THRESHOLD) -> Codebook:
    grid = build_grid(geometry, delta, r_min_m, ring_spacing)
    codebook = Codebook(geometry=geometry, grid=grid)
    logger.info(
        "Built concentric-ring codebook: %d rays x %d rings = %d codewords",
        grid.s1_count + 1, grid.s2_count + 1, len(codebook),
    )
    return codebook


def ring_correlation(codebook: Codebook) -> float:
    """|J0(zeta)| between consecutive rings; the same for every pair of neighbours"""
    zeta = distance_argument(codebook.geometry.radius_m, codebook.geometry.wavelength_m,
                             FAR_FIELD, codebook.grid.ring_scale_m)
    return abs(bessel_j(0, zeta))


def _row_correlations(rows: np.ndarray, wrap: bool) -> np.ndarray:
    """|row_i^H row_{i+1}| for consecutive rows, plus last-to-first when wrap"""
    values = np.abs(np.sum(np.conj(rows[:-1]) * rows[1:], axis=1))
    if wrap:
        values = np.append(values, abs(np.vdot(rows[-1], rows[0])))
    return values


def _verify_neighbors(codebook: Codebook) -> CorrelationReport:
    grid = codebook.grid
    delta = grid.correlation_threshold
    tolerance = settings.NEIGHBOR_TOLERANCE
    ring_level = ring_correlation(codebook)
    arrays = geometry_service(codebook.geometry)
    angles = np.asarray(grid.angles_rad)
    rays, rings = len(grid.angles_rad), len(grid.distances_m)

    violations: List[Tuple[int, int, float]] = []
    checked = 0
    worst, worst_pair = 0.0, None

    def record(values: np.ndarray, pairs: List[Tuple[int, int]], limit: float) -> None:
        nonlocal checked, worst, worst_pair
        checked += len(pairs)
        for value, pair in zip(values, pairs):
            if value > worst:
                worst, worst_pair = float(value), pair
            if value > limit:
                violations.append((pair[0], pair[1], float(value)))

    # neighbouring rays on each ring, wrapping from the last ray to the first
    wrap = rays > 2
    for s2, distance in enumerate(grid.distances_m):
        if rays < 2:
            break
        rows = arrays.focusing_matrix(np.full(rays, distance), angles)
        pairs = [(codebook.index(s1, s2), codebook.index(s1 + 1, s2)) for s1 in range(rays - 1)]
        if wrap:
            pairs.append((codebook.index(rays - 1, s2), codebook.index(0, s2)))
        record(_row_correlations(rows, wrap), pairs, delta + tolerance)

    # neighbouring rings on each ray
    if rings > 1:
        distances = np.asarray(grid.distances_m)
        for s1, angle in enumerate(grid.angles_rad):
            rows = arrays.focusing_matrix(distances, np.full(rings, angle))
            pairs = [(codebook.index(s1, s2), codebook.index(s1, s2 + 1)) for s2 in range(rings - 1)]
            record(_row_correlations(rows, False), pairs, max(delta, ring_level) + tolerance)

    report = CorrelationReport(
        mode=VerifyMode.NEIGHBORS,
        passed=not violations,
        threshold=delta,
        tolerance=tolerance,
        codeword_count=len(codebook),
        checked_pairs=checked,
        max_correlation=worst,
        worst_pair=worst_pair,
        ring_correlation=ring_level,
        violations=violations[:100],
    )
    if violations:
        logger.warning("%d neighbouring codeword pairs exceed their correlation limit", len(violations))
    return report


def _verify_all_pairs(codebook: Codebook) -> CorrelationReport:
    size = len(codebook)
    if size > settings.MAX_ALL_PAIRS:
        raise NumericDomainError(
            f"all_pairs check limited to {settings.MAX_ALL_PAIRS} codewords, codebook has {size}"
        )
    delta = codebook.grid.correlation_threshold
    chunk = settings.CODEBOOK_CHUNK_SIZE
    worst, worst_pair = 0.0, None
    for i_start, left in codebook.chunks(chunk):
        for j_start in range(i_start, size, chunk):
            right = left if j_start == i_start else codebook.matrix(j_start, j_start + chunk)
            gram = np.abs(np.conj(left) @ right.T)
            i_idx = i_start + np.arange(gram.shape[0])[:, None]
            j_idx = j_start + np.arange(gram.shape[1])[None, :]
            gram[j_idx <= i_idx] = -1.0
            flat = int(np.argmax(gram))
            value = float(gram.flat[flat])
            if value > worst:
                row, col = divmod(flat, gram.shape[1])
                worst, worst_pair = value, (i_start + row, j_start + col)

    warnings = []
    if worst > delta:
        message = f"max off-diagonal correlation {worst:.4f} at pair {worst_pair} exceeds threshold {delta}"
        warnings.append(message)
        logger.warning(message)
    return CorrelationReport(
        mode=VerifyMode.ALL_PAIRS,
        passed=True,
        threshold=delta,
        tolerance=0.0,
        codeword_count=size,
        checked_pairs=size * (size - 1) // 2,
        max_correlation=worst,
        worst_pair=worst_pair,
        warnings=warnings,
    )


def verify_codebook(codebook: Codebook, mode: VerifyMode = VerifyMode.NEIGHBORS) -> CorrelationReport:
    """
    Check codeword correlations.

    neighbors: rays on a ring must stay within threshold + tolerance, rings on a
    ray within their design correlation + tolerance. all_pairs: reports the
    largest off-diagonal correlation; sidelobes may exceed the threshold, which
    is a warning, never a failure.
    """
    if len(codebook) < 2:
        return CorrelationReport(
            mode=mode, passed=True, threshold=codebook.grid.correlation_threshold,
            tolerance=settings.NEIGHBOR_TOLERANCE if mode == VerifyMode.NEIGHBORS else 0.0,
            codeword_count=len(codebook), checked_pairs=0, max_correlation=0.0,
        )
    if mode == VerifyMode.ALL_PAIRS:
        return _verify_all_pairs(codebook)
    return _verify_neighbors(codebook)


def _channel_matrix(codebook: Codebook, channels: np.ndarray) -> np.ndarray:
    h = np.atleast_2d(np.asarray(channels, dtype=np.complex128))
    if h.shape[1] != codebook.geometry.total_elements:
        raise NumericDomainError(
            f"channel has {h.shape[1]} entries, array has {codebook.geometry.total_elements} elements"
        )
    norms = np.linalg.norm(h, axis=1)
    if np.any(norms == 0):
        raise NumericDomainError("cannot select a codeword for a zero channel vector")
    return h / norms[:, None]


def select_codewords(codebook: Codebook, channels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Best codeword per channel row: argmax |h^H w| / ||h||.

    Ties resolve to the lowest index.
    """
    h = _channel_matrix(codebook, channels)
    best_index = np.zeros(h.shape[0], dtype=int)
    best_gain = np.full(h.shape[0], -1.0)
    for start, rows in codebook.chunks():
        gains = np.abs(rows @ np.conj(h).T)
        local = np.argmax(gains, axis=0)
        values = gains[local, np.arange(h.shape[0])]
        better = values > best_gain
        best_index[better] = start + local[better]
        best_gain[better] = values[better]
    return best_index, best_gain


def select_codeword(codebook: Codebook, channel: Union[ChannelRealization, np.ndarray]) -> Tuple[int, float]:
    vector = channel.vector if isinstance(channel, ChannelRealization) else channel
    vector = np.asarray(vector)
    if vector.ndim != 1:
        raise NumericDomainError("select_codeword takes a single channel vector")
    index, gain = select_codewords(codebook, vector[None, :])
    return int(index[0]), float(gain[0])


def _round_significant(values: np.ndarray, digits: int) -> List[float]:
    return [float(f"{v:.{digits}g}") for v in values]


def export_header(codebook: Codebook) -> Dict[str, Any]:
    geometry, grid = codebook.geometry, codebook.grid
    return {
        "layout": geometry.layout.value,
        "n": geometry.n,
        "radius_m": geometry.radius_m,
        "wavelength_m": geometry.wavelength_m,
        "delta": grid.correlation_threshold,
        "r_min_m": grid.r_min_m,
        "ring_spacing": grid.ring_spacing.value,
        "s1_count": grid.s1_count,
        "s2_count": grid.s2_count,
    }


def export_records(codebook: Codebook, include_phases: bool = True) -> Iterator[Dict[str, Any]]:
    """Codeword records in codebook order; the far ring carries the token "inf" as distance"""
    digits = settings.PHASE_SIGNIFICANT_DIGITS
    for start, rows in codebook.chunks():
        distances, angles = codebook.coordinates(start, start + rows.shape[0])
        phases = np.angle(rows) if include_phases else None
        for offset in range(rows.shape[0]):
            s1, s2 = codebook.grid_indices(start + offset)
            distance = float(distances[offset])
            record: Dict[str, Any] = {
                "s1": s1,
                "s2": s2,
                "angle_rad": float(angles[offset]),
                "distance_m": FAR_FIELD_TOKEN if math.isinf(distance) else distance,
            }
            if phases is not None:
                record["phases_rad"] = _round_significant(phases[offset], digits)
            yield record


def focal_point_rows(codebook: Codebook) -> Iterator[List[Any]]:
    """(s1, s2, angle_rad, distance_m) rows for the focal-point CSV"""
    distances, angles = codebook.coordinates()
    for index in range(len(codebook)):
        s1, s2 = codebook.grid_indices(index)
        distance = float(distances[index])
        yield [s1, s2, float(angles[index]), distance]


def load_codebook(path: str) -> Codebook:
    """
    Rebuild a codebook from an exported JSON document.

    The codebook is reconstructed from the header; the stored focal points must
    match the rebuilt ones exactly.
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            document = json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read codebook: {e}", path=path)

    header = document.get("header") if isinstance(document, dict) else None
    if not isinstance(header, dict):
        raise ConfigError("missing codebook header", path=path)
    try:
        geometry = ArrayGeometry(
            layout=header["layout"], n=header["n"],
            radius_m=header["radius_m"], wavelength_m=header["wavelength_m"],
        )
        codebook = build_codebook(
            geometry, header["delta"], header["r_min_m"],
            RingSpacing(header.get("ring_spacing", RingSpacing.THRESHOLD.value)),
        )
    except (KeyError, ValueError) as e:
        raise ConfigError(f"invalid codebook header: {e}", path=path)

    if (header.get("s1_count"), header.get("s2_count")) != (codebook.grid.s1_count, codebook.grid.s2_count):
        raise ConfigError("header grid counts do not match the rebuilt codebook", path=path)
    records = document.get("codewords", [])
    if len(records) != len(codebook):
        raise ConfigError(f"expected {len(codebook)} codewords, found {len(records)}", path=path)
    distances, angles = codebook.coordinates()
    for index, record in enumerate(records):
        stored = record.get("distance_m")
        distance = FAR_FIELD if stored == FAR_FIELD_TOKEN else stored
        if (record.get("s1"), record.get("s2")) != codebook.grid_indices(index) \
                or record.get("angle_rad") != float(angles[index]) or distance != float(distances[index]):
            raise ConfigError(f"codeword {index} does not match the rebuilt focal point", path=path)
    logger.info("Loaded codebook with %d codewords from %s", len(codebook), path)
    return codebook
