"""
Channel service: multipath near-field channels, achievable rates and the
Monte-Carlo codebook comparison
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from models.errors import NumericDomainError
from models.schemas import (
    ArrayGeometry, BeamVector, ChannelPath, ChannelRealization, ExperimentSection, FocusPoint,
    GainModel, LinkBudget, RateRow, RingSpacing, TWO_PI,
)
from services.codebook_service import build_codebook, select_codewords
from services.geometry_service import geometry_service

logger = logging.getLogger(__name__)

SCHEMES = ("concentric_ring", "far_field", "matched_filter")


def sample_channel(geometry: ArrayGeometry, path_count: int, distance_range_m: Tuple[float, float],
                   seed: int, gain_model: GainModel = GainModel.COMPLEX_NORMAL,
                   path_gains: Optional[Sequence[complex]] = None) -> ChannelRealization:
    """
    Draw h = sqrt(N/L) sum_l alpha_l b(r_l, phi_l).

    Distances are uniform on distance_range_m, azimuths uniform on [0, 2 pi),
    gains unit-variance circularly-symmetric complex normal (or 1 for GainModel.UNIT).
    path_gains overrides the drawn gains.
    """
    if path_count < 1:
        raise NumericDomainError(f"a channel needs at least one path, got {path_count}")
    low, high = distance_range_m
    if not (math.isfinite(low) and math.isfinite(high) and 0 < low < high):
        raise NumericDomainError(f"distance range must satisfy 0 < low < high, got {distance_range_m}")

    rng = np.random.default_rng(seed)
    distances = rng.uniform(low, high, path_count)
    azimuths = rng.uniform(0.0, TWO_PI, path_count)
    if gain_model == GainModel.UNIT:
        gains = np.ones(path_count, dtype=np.complex128)
    else:
        gains = (rng.standard_normal(path_count) + 1j * rng.standard_normal(path_count)) / math.sqrt(2.0)
    if path_gains is not None:
        gains = np.asarray(path_gains, dtype=np.complex128)
        if gains.shape != (path_count,):
            raise NumericDomainError(f"expected {path_count} path gains, got {gains.shape}")

    beams = geometry_service(geometry).focusing_matrix(distances, azimuths)
    scale = math.sqrt(geometry.total_elements / path_count)
    vector = scale * (gains @ beams)
    paths = [
        ChannelPath(gain=complex(g), point=FocusPoint(distance_m=float(r), azimuth_rad=float(phi)))
        for g, r, phi in zip(gains, distances, azimuths)
    ]
    return ChannelRealization(paths=paths, vector=vector, rng_seed=seed)


def _vector(value: Union[ChannelRealization, BeamVector, np.ndarray]) -> np.ndarray:
    if isinstance(value, ChannelRealization):
        return value.vector
    if isinstance(value, BeamVector):
        return value.weights
    return np.asarray(value, dtype=np.complex128)


def rate_from_power_gain(power_gain: Union[float, np.ndarray], budget: LinkBudget) -> Union[float, np.ndarray]:
    """log2(1 + P |h^H w|^2 / sigma^2) given |h^H w|^2"""
    return np.log2(1.0 + budget.transmit_power_w * np.asarray(power_gain) / budget.noise_power_w)


def achievable_rate(channel: Union[ChannelRealization, np.ndarray], beam: Union[BeamVector, np.ndarray],
                    budget: LinkBudget) -> float:
    h, w = _vector(channel), _vector(beam)
    if h.shape != w.shape:
        raise NumericDomainError(f"channel has {h.size} entries but the beam has {w.size}")
    return float(rate_from_power_gain(abs(np.vdot(h, w)) ** 2, budget))


def _summarise(rates: np.ndarray) -> Tuple[float, float]:
    n = rates.size
    mean = float(np.mean(rates))
    stderr = float(np.std(rates, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return mean, stderr


def rate_experiment(geometry: ArrayGeometry, delta: float, r_min_m: float, experiment: ExperimentSection,
                    ring_spacing: RingSpacing = RingSpacing.THRESHOLD) -> List[RateRow]:
    """
    Mean achievable rate per SNR point for the concentric-ring codebook, its
    far-field ring alone, and the matched filter w = h / ||h||.

    Seeds run from experiment.seed to experiment.seed + experiment.seeds - 1.
    """
    codebook = build_codebook(geometry, delta, r_min_m, ring_spacing)
    far_codebook = codebook.far_field_slice()
    seeds = range(experiment.seed, experiment.seed + experiment.seeds)

    channels = np.stack([
        sample_channel(geometry, experiment.paths, experiment.distance_range_m, seed,
                       experiment.gain_model).vector
        for seed in seeds
    ])
    channel_power = np.sum(np.abs(channels) ** 2, axis=1)
    _, ring_gain = select_codewords(codebook, channels)
    _, far_gain = select_codewords(far_codebook, channels)
    power_gains = {
        "concentric_ring": ring_gain ** 2 * channel_power,
        "far_field": far_gain ** 2 * channel_power,
        "matched_filter": channel_power,
    }

    rows: List[RateRow] = []
    for snr_db in experiment.snr_db.values():
        budget = LinkBudget.from_snr_db(float(snr_db), experiment.noise_power_w)
        for scheme in SCHEMES:
            mean, stderr = _summarise(rate_from_power_gain(power_gains[scheme], budget))
            rows.append(RateRow(snr_db=float(snr_db), scheme=scheme, mean_rate_bps_hz=mean,
                                stderr=stderr, n_seeds=len(seeds)))
    logger.info("Rate experiment finished: %d seeds, %d SNR points", len(seeds), len(rows) // len(SCHEMES))
    return rows
