"""dB/linear conversions and physical constants."""

from __future__ import annotations

import math

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s
DB_PER_NEPER_POWER = 10.0 * math.log10(math.e)  # 4.342944819...


def db_to_linear(x_db):
    """Convert a power ratio in dB to linear scale. Accepts scalars or arrays."""
    arr = np.asarray(x_db, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"db_to_linear needs finite input, got {x_db!r}")
    out = np.power(10.0, arr / 10.0)
    return float(out) if out.ndim == 0 else out


def linear_to_db(x):
    """Convert a positive linear power ratio to dB. Accepts scalars or arrays."""
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0) or not np.all(np.isfinite(arr)):
        raise ValueError(f"linear_to_db needs positive finite input, got {x!r}")
    out = 10.0 * np.log10(arr)
    return float(out) if out.ndim == 0 else out


def wavelength(freq_ghz: float) -> float:
    """Free-space wavelength in metres for a carrier in GHz."""
    if not freq_ghz > 0:
        raise ValueError(f"frequency must be positive, got {freq_ghz!r} GHz")
    return SPEED_OF_LIGHT / (freq_ghz * 1e9)
