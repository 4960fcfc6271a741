from typing import Dict, Any, List
import json
import os

import numpy as np
import psutil
import yaml


def load_yaml_config(config_path: str, key: str = "") -> Dict[str, Any]:
    """
    Load a YAML configuration file.
    Args:
        config_path (str): Path to the configuration file.
        key (str): Optional top-level key to retrieve.
                    If empty, returns the entire configuration.
    Returns:
        config (dict): dictionary containing the configuration values.

    Raises:
        FileNotFoundError: If config file doesn't exist
    """
    try:
        with open(config_path, "r") as file:
            config = yaml.safe_load(file) or {}
    except FileNotFoundError:
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    if key:
        return config.get(key, {}) or {}
    return config


def load_json_config(config_path: str, key: str = "") -> Dict[str, Any]:
    """Load JSON config files
    Args:
        config_path (str): Path to the configuration file.
        key (str): Optional key to retrieve specific configuration value.
                   If empty, returns the entire configuration.
    Returns:
        config (dict): Dictionary containing the configuration values.
    Raises:
        FileNotFoundError: If config file doesn't exist
        json.JSONDecodeError: If config file is not valid JSON
    """
    try:
        with open(config_path, "r") as f:
            config = json.load(f)
    except FileNotFoundError:
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    if key:
        return config.get(key, {})
    return config


def derive_seeds(master_seed: int, count: int) -> List[np.random.SeedSequence]:
    """Child seeds for independent tasks; child i depends only on (master_seed, i)."""
    return np.random.SeedSequence(master_seed).spawn(count)


def default_workers() -> int:
    """Worker count from QLAB_WORKERS, else the number of physical cores."""
    env_value = os.getenv("QLAB_WORKERS")
    if env_value:
        return max(1, int(env_value))
    return psutil.cpu_count(logical=False) or 1


def available_memory_bytes() -> int:
    return psutil.virtual_memory().available
