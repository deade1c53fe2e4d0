"""
Multipath channels, achievable rates and the Monte-Carlo codebook comparison
"""
import math

import numpy as np
import pytest

from models.errors import NumericDomainError
from models.schemas import ExperimentSection, FocusPoint, GainModel, LinkBudget, SweepAxis
from services.channel_service import SCHEMES, achievable_rate, rate_experiment, sample_channel
from services.codebook_service import build_codebook, select_codeword
from services.geometry_service import near_focusing_vector


def test_channel_is_reproducible(small_uca):
    a = sample_channel(small_uca, 3, (4.0, 50.0), seed=5)
    b = sample_channel(small_uca, 3, (4.0, 50.0), seed=5)
    np.testing.assert_array_equal(a.vector, b.vector)
    assert a.path_count == 3
    assert all(4.0 <= path.point.distance_m <= 50.0 for path in a.paths)
    assert not np.array_equal(a.vector, sample_channel(small_uca, 3, (4.0, 50.0), seed=6).vector)


def test_single_path_channel_scaling(small_uca):
    channel = sample_channel(small_uca, 1, (4.0, 50.0), seed=1, path_gains=[0.5 - 0.5j])
    path = channel.paths[0]
    beam = near_focusing_vector(small_uca, path.point)
    np.testing.assert_allclose(channel.vector, math.sqrt(small_uca.n) * (0.5 - 0.5j) * beam.weights, atol=1e-12)


def test_channel_power_normalisation(small_uca):
    power = [
        np.sum(np.abs(sample_channel(small_uca, 3, (4.0, 50.0), seed=s).vector) ** 2) / small_uca.n
        for s in range(10000)
    ]
    assert np.mean(power) == pytest.approx(1.0, rel=0.05)


@pytest.mark.parametrize("paths, bounds", [(0, (4.0, 50.0)), (2, (5.0, 4.0)), (2, (0.0, 4.0))])
def test_channel_preconditions(small_uca, paths, bounds):
    with pytest.raises(NumericDomainError):
        sample_channel(small_uca, paths, bounds, seed=0)


def test_rate_formula(small_uca):
    channel = sample_channel(small_uca, 1, (4.0, 50.0), seed=2, gain_model=GainModel.UNIT)
    beam = near_focusing_vector(small_uca, channel.paths[0].point)
    rate = achievable_rate(channel, beam, LinkBudget())
    assert rate == pytest.approx(math.log2(1 + small_uca.n))
    assert achievable_rate(channel, beam, LinkBudget.from_snr_db(-300.0)) == pytest.approx(0.0, abs=1e-12)


def test_rate_of_orthogonal_beam_is_zero():
    h = np.array([1.0, 1.0]) / math.sqrt(2)
    w = np.array([1.0, -1.0]) / math.sqrt(2)
    assert achievable_rate(h, w, LinkBudget()) == 0.0
    with pytest.raises(NumericDomainError):
        achievable_rate(h, np.ones(3) / math.sqrt(3), LinkBudget())


def test_higher_gain_gives_higher_rate(small_uca):
    codebook = build_codebook(small_uca, 0.5, 0.3)
    channel = sample_channel(small_uca, 2, (1.0, 5.0), seed=9)
    index, gain = select_codeword(codebook, channel)
    _, best = codebook[index]
    _, other = codebook[(index + 7) % len(codebook)]
    budget = LinkBudget.from_snr_db(10.0)
    assert achievable_rate(channel, best, budget) >= achievable_rate(channel, other, budget)
    expected = math.log2(1 + 10.0 * gain ** 2 * np.sum(np.abs(channel.vector) ** 2))
    assert achievable_rate(channel, best, budget) == pytest.approx(expected)


def _experiment(**overrides) -> ExperimentSection:
    values = dict(paths=3, distance_range_m=(1.0, 5.0), snr_db=SweepAxis(start=-10.0, stop=20.0, step=10.0),
                  seeds=40, seed=0)
    values.update(overrides)
    return ExperimentSection(**values)


def test_rate_experiment_ordering(small_uca):
    rows = rate_experiment(small_uca, 0.5, 0.3, _experiment())
    assert len(rows) == 4 * len(SCHEMES)
    by_snr = {}
    for row in rows:
        assert row.n_seeds == 40
        by_snr.setdefault(row.snr_db, {})[row.scheme] = row.mean_rate_bps_hz
    for rates in by_snr.values():
        assert rates["matched_filter"] >= rates["concentric_ring"] - 1e-12
        assert rates["concentric_ring"] >= rates["far_field"] - 1e-12
    snrs = sorted(by_snr)
    assert all(by_snr[a]["matched_filter"] < by_snr[b]["matched_filter"] for a, b in zip(snrs, snrs[1:]))


def test_rate_experiment_is_seed_deterministic(small_uca):
    first = rate_experiment(small_uca, 0.5, 0.3, _experiment(seeds=5, seed=3))
    second = rate_experiment(small_uca, 0.5, 0.3, _experiment(seeds=5, seed=3))
    assert first == second


@pytest.mark.slow
def test_reference_rate_gain(reference_uca):
    rows = rate_experiment(reference_uca, 0.5, 4.0, ExperimentSection())
    mid = {row.scheme: row for row in rows if row.snr_db == 10.0}
    assert mid["matched_filter"].mean_rate_bps_hz >= mid["concentric_ring"].mean_rate_bps_hz
    gain = mid["concentric_ring"].mean_rate_bps_hz / mid["far_field"].mean_rate_bps_hz - 1.0
    assert 0.15 <= gain <= 0.35


@pytest.mark.slow
def test_reference_rate_beyond_erd(reference_uca):
    experiment = ExperimentSection(distance_range_m=(200.0, 500.0), seeds=200)
    rows = rate_experiment(reference_uca, 0.5, 4.0, experiment)
    for snr in {row.snr_db for row in rows}:
        rates = {row.scheme: row.mean_rate_bps_hz for row in rows if row.snr_db == snr}
        assert abs(rates["concentric_ring"] - rates["far_field"]) / rates["concentric_ring"] < 0.02
