"""
Command-line surface: subcommands, global flags, exit codes and output files
"""
import csv
import json

import pytest

from main import build_parser, main

SMALL_UCA = """
[geometry]
layout = "uca"
n = 128
wavelength_m = 0.01

[analysis]
correlation_threshold = 0.5
r_min_m = 2.0
focus_distance_m = 1.0
ula_elements = 64

[sweep]
angular = { start = -0.01, stop = 0.01, step = 0.005 }
angular_distances_m = [1.0, 2.0]
distance = { start = 0.5, stop = 3.0, step = 0.5 }
radius = { start = 0.1, stop = 0.2, step = 0.05 }
erd_angles = { start = 0.0, stop = 0.5, step = 0.25 }

[experiment]
paths = 2
distance_range_m = [1.0, 5.0]
snr_db = { start = 0.0, stop = 10.0, step = 10.0 }
seeds = 4
"""

SMALL_CYLINDER = """
[geometry]
layout = "cylindrical"
n = 64
radius_m = 0.05
wavelength_m = 0.01
spacing_m = 0.005

[analysis]
ring_half_counts = [0, 2]

[sweep]
cylinder = { start = 1.0, stop = 3.0, step = 1.0 }
"""


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.toml"
    path.write_text(SMALL_UCA)
    return str(path)


def read_csv(path):
    with open(path, newline="") as handle:
        return list(csv.reader(handle))


def test_parser_lists_every_command():
    parser = build_parser()
    choices = parser._subparsers._group_actions[0].choices
    assert set(choices) == {
        "sweep-angular", "sweep-distance", "erd-map", "codebook", "rate", "cylinder-sweep", "zero-gains",
    }


@pytest.mark.parametrize("flags_first", [True, False])
def test_sweep_angular_csv(small_config, tmp_path, flags_first):
    out = str(tmp_path / "angular.csv")
    flags = ["--config", small_config, "--out", out]
    argv = flags + ["sweep-angular"] if flags_first else ["sweep-angular"] + flags
    assert main(argv) == 0
    rows = read_csv(out)
    assert rows[0] == ["r_m", "phi_rad", "exact_gain", "approx_gain", "abs_error", "error_bound"]
    body = rows[1:]
    assert len(body) == 10
    near = [row[3] for row in body if float(row[0]) == 1.0]
    far = [row[3] for row in body if float(row[0]) == 2.0]
    assert near == far


def test_sweep_angular_empty_axis(tmp_path):
    config = tmp_path / "empty.toml"
    config.write_text(SMALL_UCA.replace("start = -0.01, stop = 0.01", "start = 0.01, stop = -0.01"))
    out = str(tmp_path / "angular.csv")
    assert main(["sweep-angular", "--config", str(config), "--out", out]) == 0
    assert read_csv(out) == [["r_m", "phi_rad", "exact_gain", "approx_gain", "abs_error", "error_bound"]]


def test_sweep_distance_json(small_config, tmp_path):
    out = tmp_path / "distance.json"
    assert main(["sweep-distance", "--config", small_config, "--out", str(out), "--format", "json"]) == 0
    document = json.loads(out.read_text())
    assert document["meta"]["focus_distance_m"] == 1.0
    assert len(document["rows"]) == 6
    at_focus = [row for row in document["rows"] if row["r_m"] == 1.0][0]
    assert at_focus["upper_bound"] is None
    assert at_focus["exact_gain"] == pytest.approx(1.0)


def test_sweep_radius(small_config, tmp_path):
    out = str(tmp_path / "radius.csv")
    assert main(["sweep-distance", "--vary", "radius", "--config", small_config, "--out", out]) == 0
    rows = read_csv(out)
    assert rows[0][0] == "radius_m" and len(rows) == 4


def test_erd_map(small_config, tmp_path):
    out = str(tmp_path / "erd.csv")
    assert main(["erd-map", "--config", small_config, "--out", out]) == 0
    rows = read_csv(out)
    assert rows[0] == ["phi_rad", "erd_uca_m", "erd_ula_m", "erd_numeric_m", "erd_ula_numeric_m", "ratio"]
    assert len(rows) == 4
    assert len({row[1] for row in rows[1:]}) == 1


def test_codebook_export_and_verify(small_config, tmp_path):
    export = tmp_path / "codebook.json"
    assert main(["codebook", "export", "--config", small_config, "--out", str(export)]) == 0
    document = json.loads(export.read_text())
    assert document["header"]["n"] == 128
    points = read_csv(tmp_path / "codebook_points.csv")
    assert points[0] == ["s1", "s2", "angle_rad", "distance_m"]
    assert len(points) - 1 == len(document["codewords"])
    assert points[1][3] == "inf"

    report = tmp_path / "report.json"
    assert main(["codebook", "verify", "--codebook", str(export), "--config", small_config,
                 "--out", str(report)]) == 0
    assert json.loads(report.read_text())["passed"] is True


def test_codebook_build_points(small_config, tmp_path):
    out = str(tmp_path / "points.csv")
    assert main(["codebook", "build", "--config", small_config, "--out", out]) == 0
    assert read_csv(out)[0] == ["s1", "s2", "angle_rad", "distance_m"]


def test_codebook_export_needs_output(small_config):
    assert main(["codebook", "export", "--config", small_config]) == 2


def test_rate_overrides(small_config, tmp_path):
    out = tmp_path / "rate.json"
    assert main(["rate", "--config", small_config, "--seeds", "3", "--distance-range", "1", "4",
                 "--seed", "7", "--format", "json", "--out", str(out)]) == 0
    rows = json.loads(out.read_text())["rows"]
    assert len(rows) == 6
    assert {row["n_seeds"] for row in rows} == {3}
    assert {row["scheme"] for row in rows} == {"concentric_ring", "far_field", "matched_filter"}


def test_rate_bad_override(small_config):
    assert main(["rate", "--config", small_config, "--distance-range", "5", "1"]) == 2


def test_zero_gains(small_config, tmp_path):
    out = str(tmp_path / "zeros.csv")
    assert main(["zero-gains", "--config", small_config, "--count", "2", "--no-polish", "--out", out]) == 0
    rows = read_csv(out)
    assert rows[0] == ["r1_m", "r2_m", "approx_gain", "exact_gain"]
    assert len(rows) > 1
    assert all(float(row[2]) < 1e-6 for row in rows[1:])


def test_cylinder_sweep(tmp_path):
    config = tmp_path / "cylinder.toml"
    config.write_text(SMALL_CYLINDER)
    out = str(tmp_path / "cylinder.csv")
    assert main(["cylinder-sweep", "--config", str(config), "--out", out]) == 0
    rows = read_csv(out)
    assert rows[0] == ["r_m", "exact_gain", "geometric_gain", "fresnel_j0_gain", "abs_error", "M"]
    assert len(rows) == 7
    assert {row[5] for row in rows[1:]} == {"0", "2"}


def test_cylinder_sweep_needs_spacing(tmp_path):
    config = tmp_path / "cylinder.toml"
    config.write_text(SMALL_CYLINDER.replace("spacing_m = 0.005\n", ""))
    assert main(["cylinder-sweep", "--config", str(config)]) == 2


def test_config_error_exit_code(tmp_path):
    config = tmp_path / "bad.toml"
    config.write_text("[analysis]\ncorrelation_threshold = 0.2\n")
    out = tmp_path / "never.csv"
    assert main(["sweep-angular", "--config", str(config), "--out", str(out)]) == 2
    assert not out.exists()


def test_layout_mismatch_exit_code(tmp_path):
    config = tmp_path / "ula.toml"
    config.write_text('[geometry]\nlayout = "ula"\nn = 16\nwavelength_m = 0.01\n')
    assert main(["erd-map", "--config", str(config)]) == 3


def test_golden_regeneration(small_config, tmp_path, monkeypatch):
    from config import settings
    golden = tmp_path / "golden"
    monkeypatch.setattr(settings, "GOLDEN_DIR", str(golden))
    out = str(tmp_path / "angular.csv")
    assert main(["sweep-angular", "--config", small_config, "--out", out, "--golden", "--yes"]) == 0
    assert (golden / "sweep_angular.csv").read_text() == open(out).read()


def test_stdout_output(small_config, capsys):
    assert main(["sweep-angular", "--config", small_config]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("r_m,phi_rad")
    assert len(lines) == 11


def test_erd_map_matches_golden_fixture(tmp_path):
    from services.report_service import golden_path
    golden = golden_path("erd_map")
    try:
        expected = read_csv(golden)
    except FileNotFoundError:
        pytest.skip(f"{golden} not generated; run `erd-map --golden` to create it")
    out = str(tmp_path / "erd.csv")
    assert main(["erd-map", "--config", "presets/reference.toml", "--out", out]) == 0
    actual = read_csv(out)
    assert actual[0] == expected[0] and len(actual) == len(expected)
    for got, want in zip(actual[1:], expected[1:]):
        assert [float(v) if v else None for v in got] == pytest.approx(
            [float(v) if v else None for v in want], rel=1e-9)
