"""Typed run settings built from the harness configuration file."""
from configparser import ConfigParser
from copy import deepcopy
from typing import Any, Dict, Optional

from .experiments import GridConfig
from .geometry import FluxProfile
from .helper import confirm_boolean_param, split_list
from .kernels import DEFAULT_TOL
from .polar_operator import DEFAULT_OPERATOR_TOL
from .quadrature import DEFAULT_MAX_EVALUATIONS

DEFAULT_SETTINGS: Dict[str, Dict[str, Any]] = {
    "run": {
        "output_dir": "riesz_output",
        "max_threads": None,
        "seed": 0,
        "write_manifest": True,
    },
    "grid": {
        "n_r": 64,
        "n_theta": 64,
        "r_max": 40.0,
        "spacing": "uniform",
        "r_min": None,
    },
    "flux": {
        "alpha": 0.5,
        "flux_file": None,
        "cos_coefficients": [],
        "sin_coefficients": [],
        "flux_samples": 256,
    },
    "tolerances": {
        "kernel_tol": DEFAULT_TOL,
        "operator_tol": DEFAULT_OPERATOR_TOL,
        "quad_max_evaluations": DEFAULT_MAX_EVALUATIONS,
    },
    "sweeps": {
        "deltas": [-0.3, -0.75, -1.2],
        "alphas": [0.3, 0.5],
        "decay_alphas": [0.3, 0.5, 0.9],
        "lemma_deltas": [-0.5, -1.0],
        "j_max": 8,
        "decay_samples": 667,
        "pair_samples": 100,
        "phase_samples": 1000,
        "ream_samples": 33,
        "lemma_radii": [0.25, 0.4, 0.6],
        "lemma_angles": [0.5, 1.5, 2.5, 3.0],
        "truncation_orders": [16, 32, 64, 128, 256, 512, 1024],
        "truncation_powers": [2.0, 4.0],
        "ratio_scales": [1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
        "families": ["balls", "annuli"],
        "lambdas": [0.5, 2.0, 8.0],
        "scaling_lambdas": [1.0, 2.0, 4.0, 8.0],
        "stability_orders": [2, 4, 8, 16, 32],
    },
    "thresholds": {
        "ream1": 1.000001,
        "ream2": 10.0,
        "ream34": 20.0,
        "decay_uniformity": 3.0,
        "lemma43_uniformity": 3.0,
        "model_uniformity": 3.0,
        "difference": 10.0,
        "phase_tolerance": 1e-12,
        "d2_constant": 1.0,
        "morse_tolerance": 1e-10,
        "truncation_slope_window": 0.15,
        "parseval_tolerance": 1e-6,
        "scaling_tolerance": 1e-6,
        "integer_flux_tolerance": 1e-10,
        "slope_inside": 0.05,
        "slope_outside_margin": 0.1,
    },
}

INT_KEYS = {"max_threads", "seed", "n_r", "n_theta", "flux_samples", "quad_max_evaluations", "j_max",
            "decay_samples", "pair_samples", "phase_samples", "ream_samples"}
BOOL_KEYS = {"write_manifest"}
STR_KEYS = {"output_dir", "spacing", "flux_file"}
INT_LIST_KEYS = {"truncation_orders", "stability_orders"}
STR_LIST_KEYS = {"families"}
FLOAT_LIST_KEYS = {"cos_coefficients", "sin_coefficients", "deltas", "alphas", "decay_alphas", "lemma_deltas", "lemma_radii", "lemma_angles",
                   "truncation_powers", "ratio_scales", "lambdas", "scaling_lambdas"}


def convert_value(key: str, val: str) -> Any:
    """Convert one raw configuration string to the type the key expects; empty means None."""
    if val is None or not str(val).strip():
        return [] if key in INT_LIST_KEYS | STR_LIST_KEYS | FLOAT_LIST_KEYS else None
    if key in BOOL_KEYS:
        return confirm_boolean_param(val)
    if key in STR_KEYS:
        return str(val).strip()
    if key in INT_KEYS:
        return int(val)
    if key in INT_LIST_KEYS:
        return [int(item) for item in split_list(val)]
    if key in STR_LIST_KEYS:
        return split_list(val)
    if key in FLOAT_LIST_KEYS:
        return [float(item) for item in split_list(val)]
    return float(val)


def build_settings(parser: Optional[ConfigParser] = None, overrides: Dict[str, Dict[str, Any]] = None) -> dict:
    """DEFAULT_SETTINGS updated from the parsed file, then from overrides (command line)."""
    settings = deepcopy(DEFAULT_SETTINGS)
    if parser is not None:
        for section, keys in settings.items():
            if section not in parser:
                continue
            for key, val in parser[section].items():
                if key in keys:
                    converted = convert_value(key, val)
                    if converted is not None:
                        keys[key] = converted
    for section, keys in (overrides or {}).items():
        for key, val in keys.items():
            if val is not None:
                settings[section][key] = val

    return settings


def grid_config(settings: dict) -> GridConfig:
    grid = settings["grid"]
    return GridConfig(grid["n_r"], grid["n_theta"], grid["r_max"], grid["spacing"], grid["r_min"])


def flux_profile(settings: dict) -> FluxProfile:
    """Flux from a file, from Fourier coefficients, or the constant alpha, in that order."""
    flux = settings["flux"]
    if flux["flux_file"]:
        return FluxProfile.from_csv(flux["flux_file"], flux["flux_samples"])
    if flux["cos_coefficients"] or flux["sin_coefficients"]:
        return FluxProfile.from_coefficients(flux["alpha"], flux["cos_coefficients"],
                                             flux["sin_coefficients"], flux["flux_samples"])
    return FluxProfile.constant(flux["alpha"])
