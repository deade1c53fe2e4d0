"""
Experiment file loading and command-line overrides
"""
import math

import pytest

from models.errors import ConfigError
from models.schemas import ArrayLayout, OutputFormat, RingSpacing
from services.config_service import apply_overrides, load_config, locate, parse_config


def test_shipped_presets_load():
    config = load_config("presets/reference.toml")
    geometry = config.geometry.to_geometry()
    assert geometry.n == 800
    assert geometry.radius_m == 0.64
    assert geometry.wavelength_m == pytest.approx(0.00999308, rel=1e-6)
    assert config.analysis.ring_spacing == RingSpacing.THRESHOLD
    assert config.sweep.angular.values().size == 1001

    cylinder = load_config("presets/cylinder.toml").geometry.to_geometry()
    assert cylinder.layout == ArrayLayout.CYLINDRICAL
    assert cylinder.radius_m == pytest.approx(600 * 0.01 / (4 * math.pi))


def test_missing_default_falls_back_to_builtin(monkeypatch, tmp_path):
    from config import settings
    monkeypatch.setattr(settings, "DEFAULT_CONFIG_PATH", str(tmp_path / "absent.toml"))
    config = load_config()
    assert config.geometry.n == 800
    assert config.experiment.seeds == 1000


def test_half_wavelength_default_radius():
    config = parse_config('[geometry]\nn = 64\nwavelength_m = 0.01\n')
    assert config.geometry.to_geometry().radius_m == pytest.approx(64 * 0.01 / (4 * math.pi))


def test_validation_error_reports_line():
    text = "[geometry]\nn = 800\ncarrier_hz = 30e9\n\n[analysis]\nerd_threshold = 0.05\ncorrelation_threshold = 0.3\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text, "exp.toml")
    assert info.value.line == 7
    assert info.value.exit_code == 2
    assert str(info.value).startswith("exp.toml:7: analysis.correlation_threshold")


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config("[geometry]\nn = 8\nwavelength_m = 0.01\ncolour = 3\n")
    assert info.value.line == 4


def test_wavelength_sources_are_exclusive():
    with pytest.raises(ConfigError) as info:
        parse_config("[geometry]\nn = 8\nwavelength_m = 0.01\ncarrier_hz = 3e10\n")
    assert info.value.line == 1


def test_r_min_beyond_ring_scale_is_a_config_error():
    text = "[geometry]\nn = 800\ncarrier_hz = 30e9\nradius_m = 0.64\n[analysis]\nr_min_m = 500.0\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == 6


def test_invalid_toml_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_config("[geometry]\nn = = 3\n", "bad.toml")
    assert info.value.line == 2


def test_unreadable_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.toml"))


def test_locate_prefers_deepest_key():
    text = "[sweep]\nangular = { start = 0.0, stop = 1.0, step = 0.1 }\n"
    assert locate(text, ("sweep", "angular", "step")) == 2
    assert locate(text, ("sweep", "distance")) == 1
    assert locate(text, ("output",)) is None


def test_overrides():
    config = parse_config("[geometry]\nn = 8\nwavelength_m = 0.01\n")
    updated = apply_overrides(config, seed=42, out="out.json", output_format="json")
    assert updated.experiment.seed == 42
    assert updated.output.path == "out.json"
    assert updated.output.format == OutputFormat.JSON
    assert config.experiment.seed == 0
    with pytest.raises(ConfigError):
        apply_overrides(config, output_format="xml")
