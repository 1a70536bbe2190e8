"""Map log-normal fits onto the 3GPP (A, B1, B2) RCS triple."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .model import ConstantB1, DegenerateFitError, LognormalFit, RcsError, RcsTriple
from .units import DB_PER_NEPER_POWER

DEFAULT_CAP_K = 3.0


def a_dbsm(mu: float, sigma: float) -> float:
    """Mean RCS in dBsm, ``10 log10 E[X]`` with ``E[X] = exp(mu + sigma^2 / 2)``."""
    if not sigma >= 0:
        raise RcsError(f"sigma must be >= 0, got {sigma!r}")
    return DB_PER_NEPER_POWER * (mu + 0.5 * sigma * sigma)


def b2_db(sigma: float) -> float:
    """Fluctuation term in dB: squared coefficient of variation ``exp(sigma^2) - 1``."""
    if not sigma > 0:
        raise DegenerateFitError(f"B2 is undefined for sigma = {sigma!r} (would be -inf dB)")
    return 10.0 * math.log10(math.expm1(sigma * sigma))


def consolidate(
    per_freq: Mapping,
    b1=None,
    cap_k: float = DEFAULT_CAP_K,
) -> RcsTriple:
    """Average per-frequency A and B2 in the dB domain.

    Parameters
    ----------
    per_freq : mapping of Frequency -> LognormalFit
    b1 : B1 spec, optional
        Passed through unchanged; defaults to a constant 0 dB.
    cap_k : float
        Upper-bound factor for the B2 draw, passed through.
    """
    if not per_freq:
        raise RcsError("cannot consolidate an empty set of fits")
    bad = [f for f, fit in per_freq.items() if fit.sigma <= 0]
    if bad:
        names = ", ".join(str(f) for f in sorted(bad))
        raise DegenerateFitError(f"degenerate (sigma = 0) fit at {names}")
    a_vals = [a_dbsm(fit.mu, fit.sigma) for fit in per_freq.values()]
    b2_vals = [b2_db(fit.sigma) for fit in per_freq.values()]
    return RcsTriple(
        a_dbsm=math.fsum(a_vals) / len(a_vals),
        b1=ConstantB1(0.0) if b1 is None else b1,
        b2_db=math.fsum(b2_vals) / len(b2_vals),
        cap_k=cap_k,
    )


@dataclass(frozen=True)
class Deviation:
    delta_a_db: float
    delta_b2_db: float
    tol_db: float

    @property
    def within(self) -> bool:
        return self.delta_a_db <= self.tol_db and self.delta_b2_db <= self.tol_db


def compare_to_standard(triple: RcsTriple, standard: RcsTriple, tol_db: float = 1.0) -> Deviation:
    """Absolute A and B2 deviations (dB) against a standardized triple."""
    for name, t in (("measured", triple), ("standard", standard)):
        if not isinstance(t.b1, ConstantB1):
            raise RcsError(f"comparison needs a constant B1; {name} triple has {type(t.b1).__name__}")
        if t.b2_db is None:
            raise DegenerateFitError(f"{name} triple has no B2 value")
    return Deviation(
        delta_a_db=abs(triple.a_dbsm - standard.a_dbsm),
        delta_b2_db=abs(triple.b2_db - standard.b2_db),
        tol_db=tol_db,
    )


_STANDARDS = {
    "small_uav": (-12.81, 0.0, 3.74),
    "human": (-1.37, 0.0, 3.94),
}


def builtin_standards() -> dict[str, RcsTriple]:
    """Standardized monostatic triples agreed for single-scatterer targets."""
    return {
        name: RcsTriple(a_dbsm=a, b1=ConstantB1(b1), b2_db=b2, cap_k=DEFAULT_CAP_K)
        for name, (a, b1, b2) in _STANDARDS.items()
    }

