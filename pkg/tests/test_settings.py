import math
from configparser import ConfigParser

import pytest

from magnetic_riesz import DEFAULT_SETTINGS, build_settings
from magnetic_riesz.check_config import power_of_two, validate_config
from magnetic_riesz.helper import confirm_boolean_param, format_seconds, split_list
from magnetic_riesz.settings import convert_value, flux_profile, grid_config

from .paths import SHIPPED_CONFIG


def parser_from(text: str) -> ConfigParser:
    parser = ConfigParser()
    parser.optionxform = str
    parser.read_string(text)
    return parser


def test_convert_value():
    assert convert_value("n_r", "32") == 32
    assert convert_value("r_max", "12.5") == 12.5
    assert convert_value("spacing", " geometric ") == "geometric"
    assert convert_value("write_manifest", "False") is False
    assert convert_value("deltas", "-0.3, -0.75") == [-0.3, -0.75]
    assert convert_value("truncation_orders", "16,32") == [16, 32]
    assert convert_value("families", "balls, tubes") == ["balls", "tubes"]
    assert convert_value("max_threads", "") is None
    assert convert_value("cos_coefficients", "") == []


def test_build_settings_layers():
    parser = parser_from("[grid]\nn_r = 16\nr_min =\n[flux]\nalpha = 0.25\n[unknown]\nkey = 1\n")
    settings = build_settings(parser, {"run": {"output_dir": "elsewhere", "max_threads": None}})
    assert settings["grid"]["n_r"] == 16
    assert settings["grid"]["r_min"] is None
    assert settings["flux"]["alpha"] == 0.25
    assert settings["run"]["output_dir"] == "elsewhere"
    assert settings["run"]["max_threads"] is None
    assert "unknown" not in settings
    assert DEFAULT_SETTINGS["grid"]["n_r"] == 64


def test_flux_profile_precedence(tmp_path):
    settings = build_settings()
    assert flux_profile(settings).is_constant
    settings["flux"]["cos_coefficients"] = [0.1]
    profile = flux_profile(settings)
    assert not profile.is_constant
    assert profile.alpha == pytest.approx(0.5)
    path = tmp_path / "flux.csv"
    path.write_text("\n".join(f"{2 * math.pi * k / 4},0.75" for k in range(4)), encoding="utf-8")
    settings["flux"]["flux_file"] = str(path)
    assert flux_profile(settings).alpha == pytest.approx(0.75)


def test_grid_config_from_settings():
    settings = build_settings(overrides={"grid": {"n_r": 8, "n_theta": 16, "r_max": 4.0}})
    assert grid_config(settings).build().shape == (8, 16)


def test_helpers():
    assert split_list(" a, ,b ,") == ["a", "b"]
    assert split_list(None) == []
    assert confirm_boolean_param("True")
    assert not confirm_boolean_param("no")
    assert format_seconds(12345.678) == "12,345.68"


def test_power_of_two():
    assert power_of_two(64)
    assert power_of_two(0.25)
    assert not power_of_two(48)
    assert not power_of_two(0)


def test_shipped_config_is_valid():
    assert validate_config(str(SHIPPED_CONFIG), no_banner=True)


def edited_config(tmp_path, section, key, value=None):
    lines = []
    current = None
    for line in SHIPPED_CONFIG.read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if stripped.startswith("["):
            current = stripped.strip("[]")
        elif current == section and stripped.split("=")[0].strip() == key:
            if value is None:
                continue
            line = f"{key} = {value}"
        lines.append(line)
    path = tmp_path / "edited.ini"
    path.write_text("\n".join(lines), encoding="utf-8")
    return str(path)


@pytest.mark.parametrize("section, key, value", [
    ("grid", "n_theta", "48"),
    ("grid", "spacing", "chebyshev"),
    ("sweeps", "deltas", "-0.3,0.2"),
    ("sweeps", "lemma_deltas", "-0.5,-1.5"),
    ("sweeps", "decay_alphas", "0.3,nan"),
    ("sweeps", "pair_samples", "1"),
    ("sweeps", "ratio_scales", "1,3"),
    ("sweeps", "scaling_lambdas", "1,2"),
    ("tolerances", "kernel_tol", "0.5"),
    ("thresholds", "ream1", "-1"),
    ("run", "write_manifest", "maybe"),
    ("flux", "flux_file", "/does/not/exist.csv"),
])
def test_bad_values_are_rejected(tmp_path, section, key, value):
    assert not validate_config(edited_config(tmp_path, section, key, value), no_banner=True)


def test_missing_grid_shape_is_fatal(tmp_path):
    assert not validate_config(edited_config(tmp_path, "grid", "n_r"), no_banner=True)


def test_missing_sweep_key_falls_back_to_default(tmp_path):
    assert validate_config(edited_config(tmp_path, "sweeps", "lemma_deltas"), no_banner=True)


def test_default_sweeps_cover_the_verification_matrix():
    sweeps = DEFAULT_SETTINGS["sweeps"]
    assert 0.9 in sweeps["decay_alphas"]
    assert 3 * sweeps["decay_samples"] >= 2000
    assert sweeps["lemma_deltas"] == [-0.5, -1.0]
    assert sweeps["pair_samples"] == 100


def test_missing_file_is_invalid(tmp_path):
    assert not validate_config(str(tmp_path / "missing.ini"), no_banner=True)
