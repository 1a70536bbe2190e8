"""System-factor calibration and radar-equation inversion.

The system factor absorbs transmit power, antenna gains and losses:
a free-space calibration shot with the receiver at the observation point
gives ``P_r``, and ``K = P_r / (4 pi d^2)`` then maps target power to RCS
through ``P_tar = K * rcs``. Explicit link budgets (:class:`Link`) only
exist to drive the synthetic forward model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import Frequency, Geometry, RcsError, SystemFactor

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class Link:
    """Linear link-budget terms: transmit power, antenna gains, loss factor (<= 1 is a loss)."""

    p_t: float = 1.0
    g_t: float = 1.0
    g_r: float = 1.0
    loss: float = 1.0

    def __post_init__(self):
        for name in ("p_t", "g_t", "g_r", "loss"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise RcsError(f"link {name} must be positive, got {v!r}")


def system_factor(p_r: float, d: float, freq: Frequency | None = None) -> SystemFactor:
    if not p_r > 0:
        raise RcsError(f"calibration power must be positive, got {p_r!r}")
    if not d > 0:
        raise RcsError(f"calibration distance must be positive, got {d!r}")
    return SystemFactor(freq=freq, k_cal=p_r / (FOUR_PI * d * d))


def rcs_from_power(p_tar: float, k: SystemFactor) -> float:
    """Invert ``P_tar = K * rcs``; returns RCS in m^2."""
    if not p_tar > 0:
        raise RcsError(f"target power must be positive, got {p_tar!r}")
    return p_tar / k.k_cal


def free_space_power(freq: Frequency, d: float, link: Link) -> float:
    """One-way received power ``P_t G_t G_r lambda^2 L / ((4 pi)^2 d^2)``."""
    if not d > 0:
        raise RcsError(f"distance must be positive, got {d!r}")
    lam = freq.wavelength
    return link.p_t * link.g_t * link.g_r * lam * lam * link.loss / (FOUR_PI**2 * d * d)


def forward_radar_power(rcs: float, freq: Frequency, geom: Geometry, link: Link) -> float:
    """Monostatic radar equation ``P_t G_t G_r lambda^2 rcs L / ((4 pi)^3 d^4)``."""
    if not rcs > 0:
        raise RcsError(f"RCS must be positive, got {rcs!r}")
    if geom.d_tx_tar != geom.d_rx_tar:
        raise RcsError(
            "radar equation assumes equal Tx-target and Rx-target distances, "
            f"got {geom.d_tx_tar} m and {geom.d_rx_tar} m"
        )
    d = geom.d_tx_tar
    lam = freq.wavelength
    return link.p_t * link.g_t * link.g_r * lam * lam * rcs * link.loss / (FOUR_PI**3 * d**4)
