# src/dnls_ist/utils/helpers.py
"""
Helper utilities for configuration handling.
"""
import copy
import json
from pathlib import Path
from typing import Dict, Any, Optional
from .logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_CONFIG: Dict[str, Any] = {
    "logging": {"level": "INFO"},
    "scattering": {
        "c2_threshold": 1e-3,
        "d_lambda_threshold": 1e-6,
        "near_axis": 1e-3,
        "alpha_floor": 1e-8,
        "lambda_max": 5.0,
        "n_lambda": 1001,
        "eig_box": [-4.0, 4.0, 1e-3, 4.0],
        "newton_tol": 1e-10,
        "newton_max_iter": 50,
        "winding_points": 64,
        "max_depth": 10,
        "circle_nodes": 64,
        "proportionality_tol": 1e-6,
        "derivative_floor": 1e-8,
        "resolution_floor": 1e-6,
    },
    "inverse": {
        "real_nodes": 1001,
        "circle_nodes": 64,
        "dense_limit": 2000,
        "gmres_tol": 1e-12,
        "gmres_restart": 200,
        "tail_rho": 1e-8,
        "workers": 1,
        "cluster_ratio": 4.0,
        "cluster_width": 2.0,
        "oscillation_limit": 1e3,
    },
    "asymptotics": {
        "t_min": 10.0,
        "switchover_radius": 6.0,
        "kappa_cut": 1e-12,
        "region_M": 0.1,
        "zero_reflection": 1e-10,
        "velocity_tol": 1e-8,
    },
    "pde": {
        "L": 40.0,
        "n": 4096,
        "dt": 1e-4,
        "dealias": 2.0 / 3.0,
        "blowup": 1e3,
        "check_every": 100,
        "cfl": 2.8,
    },
    "verify": {
        "roundtrip_points": 21,
        "roundtrip_half_width": 4.0,
        "convergence_nodes": [101, 201, 801],
        "delta_lambda0": 0.5,
        "pc_times": [1e3, 1e4, 1e5],
        "pc_amplitude": 1.25,
        "pc_lambda0": -0.5,
        "resolution_times": [25.0, 50.0, 100.0, 200.0],
        "resolution_cone": [0.8, 1.2, -10.0, 10.0],
        "resolution_points": 41,
        "resolution_L": 400.0,
        "resolution_n": 8192,
        "resolution_dt": 2e-3,
        "stability_etas": [1e-3, 1e-2],
        "stability_time": 200.0,
    },
}

REQUIRED_SECTIONS = ["logging", "scattering", "inverse", "asymptotics", "pde"]


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Load configuration from JSON file.

    Args:
        config_path: Path to config file (defaults to config/config.json)

    Returns:
        Configuration dictionary
    """
    if config_path is None:
        config_path = Path(__file__).parent.parent.parent.parent / "config" / "config.json"

    try:
        with open(config_path, 'r') as f:
            config = json.load(f)
        logger.info(f"Configuration loaded from {config_path}")
        return config
    except FileNotFoundError:
        logger.error(f"Configuration file not found: {config_path}")
        raise
    except json.JSONDecodeError as e:
        logger.error(f"Invalid JSON in configuration file: {e}")
        raise


def merge_config(defaults: Dict[str, Any], overrides: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    """
    Deep-merge an override dictionary over defaults.

    Args:
        defaults: Base configuration
        overrides: Values taking precedence (may be None)

    Returns:
        New merged dictionary; inputs are not modified
    """
    merged = copy.deepcopy(defaults)
    for key, value in (overrides or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_config(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def resolve_config(config_path: Optional[str] = None, use_file: bool = True) -> Dict[str, Any]:
    """Defaults merged with the file at config_path (or the repository config)."""
    if not use_file:
        return copy.deepcopy(DEFAULT_CONFIG)
    if config_path is None:
        default_path = Path(__file__).parent.parent.parent.parent / "config" / "config.json"
        if not default_path.exists():
            logger.debug("No repository config found, using built-in defaults")
            return copy.deepcopy(DEFAULT_CONFIG)
    config = merge_config(DEFAULT_CONFIG, load_config(config_path))
    validate_config(config)
    return config


def validate_config(config: Dict[str, Any]) -> bool:
    """
    Validate configuration dictionary.

    Args:
        config: Configuration dictionary

    Returns:
        True if valid, raises exception if invalid
    """
    for section in REQUIRED_SECTIONS:
        if section not in config:
            raise ValueError(f"Missing required configuration section: {section}")

    for section, keys in DEFAULT_CONFIG.items():
        if section not in config or not isinstance(keys, dict):
            continue
        for key in keys:
            if key not in config[section]:
                raise ValueError(f"Missing required configuration key: {section}.{key}")

    for key in ("c2_threshold", "d_lambda_threshold", "near_axis", "newton_tol", "lambda_max"):
        if not config["scattering"][key] > 0:
            raise ValueError(f"scattering.{key} must be positive")

    if config["scattering"]["n_lambda"] < 3:
        raise ValueError("scattering.n_lambda must be at least 3")

    n_modes = int(config["pde"]["n"])
    if n_modes <= 0 or n_modes & (n_modes - 1):
        raise ValueError("pde.n must be a power of two")

    if not 0.0 < config["pde"]["dealias"] <= 1.0:
        raise ValueError("pde.dealias must lie in (0, 1]")

    logger.info("Configuration validation passed")
    return True
