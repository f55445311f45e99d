import hashlib
import json
import logging
import os
from typing import Any, Dict

import numpy as np
import yaml

logger = logging.getLogger(__name__)


def ensure_directory(path: str) -> None:
    """
    Ensure that the given directory exists.
    """
    if path and not os.path.exists(path):
        os.makedirs(path)


def load_yaml(file_path: str) -> Dict[str, Any]:
    """
    Load a YAML file and return its contents as a dictionary.
    """
    with open(file_path, "r", encoding="utf-8") as file:
        return yaml.safe_load(file) or {}


def merge_dicts(dict1: Dict[str, Any], dict2: Dict[str, Any]) -> Dict[str, Any]:
    """
    Merge two dictionaries recursively. Values of dict2 win.
    """
    for key, value in dict2.items():
        if isinstance(value, dict):
            dict1[key] = merge_dicts(dict1.get(key, {}) or {}, value)
        else:
            dict1[key] = value
    return dict1


def dbm_to_linear(value_dbm):
    """
    Convert a power in dBm to milliwatts.
    """
    return np.power(10.0, np.asarray(value_dbm, dtype=float) / 10.0)


def rate_to_sinr(rate):
    """
    Target SINR 2^R - 1 for a target rate R in bits/s/Hz.
    """
    return np.exp2(np.asarray(rate, dtype=float)) - 1.0


def fingerprint(payload: Dict[str, Any]) -> str:
    """
    Short stable hash of a JSON-serializable payload.
    """
    encoded = json.dumps(payload, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(encoded).hexdigest()[:16]


def clamp_probability(value: float, what: str, warn_above: float = 1e-3) -> float:
    """
    Clamp an analytic probability into [0, 1]; the pre-clamp value is logged, as a
    warning once it leaves the interval by more than ``warn_above``.
    """
    value = float(value)
    if value < 0.0 or value > 1.0:
        excess = max(-value, value - 1.0)
        log = logger.warning if excess > warn_above else logger.debug
        log(f"Clamped {what} = {value!r} into [0, 1]")
    return min(max(value, 0.0), 1.0)
