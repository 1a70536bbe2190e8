"""Domain types shared across the pipeline.

Powers and RCS values are linear (m^2 for RCS); dB appears only in the
fields that say so in their name. Every type collects *all* of its
invariant violations before raising, so a caller sees the full list.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .units import wavelength


class RcsError(ValueError):
    """Base class for domain and validation failures."""


class ValidationError(RcsError):
    """Raised with every violation found, not just the first."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DegenerateFitError(RcsError):
    """A log-normal fit with zero spread reached an operation needing B2."""


def _raise_if(violations: list[str]) -> None:
    if violations:
        raise ValidationError(violations)


@dataclass(frozen=True, order=True)
class Frequency:
    """Carrier frequency, keyed by its exact GHz label."""

    ghz: float

    def __post_init__(self):
        _raise_if(self.violations())

    def violations(self) -> list[str]:
        if not (isinstance(self.ghz, (int, float)) and math.isfinite(self.ghz) and self.ghz > 0):
            return [f"frequency must be a positive finite GHz value, got {self.ghz!r}"]
        return []

    @property
    def wavelength(self) -> float:
        return wavelength(self.ghz)

    def __str__(self):
        return f"{self.ghz:g} GHz"


class Kind(str, enum.Enum):
    REFERENCE = "reference"
    TARGET = "target"
    CALIBRATION = "calibration"


@dataclass(frozen=True, eq=False)
class CirRecord:
    """One complex CIR snapshot.

    ``taps`` is stored as a read-only complex array.
    """

    freq: Frequency
    kind: Kind
    taps: np.ndarray
    target: Optional[str] = None
    snapshot: int = 0

    def __post_init__(self):
        taps = np.array(self.taps, dtype=complex).ravel()
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "kind", Kind(self.kind))
        _raise_if(self.violations())

    def violations(self) -> list[str]:
        out = []
        if self.taps.size == 0:
            out.append("taps must be non-empty")
        elif not np.all(np.isfinite(self.taps)):
            out.append("taps must be finite")
        if self.kind is Kind.TARGET and not self.target:
            out.append("target records need a target label")
        if not isinstance(self.snapshot, (int, np.integer)) or self.snapshot < 0:
            out.append(f"snapshot must be a non-negative integer, got {self.snapshot!r}")
        return out

    def __eq__(self, other):
        if not isinstance(other, CirRecord):
            return NotImplemented
        return (
            self.freq == other.freq
            and self.kind is other.kind
            and self.target == other.target
            and self.snapshot == other.snapshot
            and np.array_equal(self.taps, other.taps)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class RcsSampleSet:
    """Linear RCS samples (m^2) for one target at one frequency."""

    target: str
    freq: Frequency
    samples: np.ndarray
    discarded: int = 0

    def __post_init__(self):
        s = np.array(self.samples, dtype=float).ravel()
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        _raise_if(self.violations())

    def violations(self) -> list[str]:
        out = []
        if not np.all(self.samples > 0):
            out.append(f"RCS samples must be positive ({self.target}, {self.freq})")
        if self.discarded < 0:
            out.append("discarded count must be non-negative")
        return out

    def __len__(self):
        return self.samples.size


@dataclass(frozen=True)
class LognormalFit:
    """Fitted (mu, sigma) of ln(RCS) with goodness-of-fit scores."""

    mu: float
    sigma: float
    n: int
    ks: float
    mse: float

    def __post_init__(self):
        _raise_if(self.violations())

    def violations(self) -> list[str]:
        out = []
        if not math.isfinite(self.mu):
            out.append(f"mu must be finite, got {self.mu!r}")
        if not self.sigma >= 0:
            out.append(f"sigma must be >= 0, got {self.sigma!r}")
        if not 0 <= self.ks <= 1:
            out.append(f"ks must lie in [0, 1], got {self.ks!r}")
        if not self.mse >= 0:
            out.append(f"mse must be >= 0, got {self.mse!r}")
        if self.n < 1:
            out.append(f"n must be >= 1, got {self.n!r}")
        return out

    @property
    def degenerate(self) -> bool:
        return self.sigma == 0.0


# -- B1 (angle-dependent term) -------------------------------------------------


@dataclass(frozen=True)
class ConstantB1:
    db: float = 0.0

    def __post_init__(self):
        _raise_if(self.violations())

    def violations(self) -> list[str]:
        return [] if math.isfinite(self.db) else [f"constant B1 must be finite, got {self.db!r}"]


@dataclass(frozen=True)
class AnalyticB1:
    """Cosine-power pattern: ``B1_dB = 10 * exponent * log10|cos(angle - boresight)|``.

    Clamped from below at ``floor_db`` so nulls stay finite.
    """

    exponent: float = 0.0
    boresight_deg: float = 0.0
    floor_db: float = -30.0

    def __post_init__(self):
        _raise_if(self.violations())

    def violations(self) -> list[str]:
        out = []
        if not (math.isfinite(self.exponent) and self.exponent >= 0):
            out.append(f"analytic B1 exponent must be finite and >= 0, got {self.exponent!r}")
        if not math.isfinite(self.boresight_deg):
            out.append("analytic B1 boresight must be finite")
        if not (math.isfinite(self.floor_db) and self.floor_db <= 0):
            out.append(f"analytic B1 floor must be finite and <= 0 dB, got {self.floor_db!r}")
        return out


@dataclass(frozen=True)
class TableB1:
    """Gain lookup over a strictly increasing angle grid (degrees).

    ``coverage`` is ``"full"`` for [0, 360) with wrap-around or ``"half"``
    for [0, 180] with angles folded by symmetry.
    """

    angles_deg: tuple
    gains_db: tuple
    coverage: str = "half"

    def __post_init__(self):
        object.__setattr__(self, "angles_deg", tuple(float(a) for a in self.angles_deg))
        object.__setattr__(self, "gains_db", tuple(float(g) for g in self.gains_db))
        _raise_if(self.violations())

    def violations(self) -> list[str]:
        out = []
        a = np.asarray(self.angles_deg)
        g = np.asarray(self.gains_db)
        if a.size < 2:
            out.append("table B1 needs at least two grid points")
        if a.size != g.size:
            out.append("table B1 angle and gain lengths differ")
        if a.size >= 2 and not np.all(np.diff(a) > 0):
            out.append("table B1 angle grid must be strictly increasing")
        if not np.all(np.isfinite(g)):
            out.append("table B1 gains must be finite")
        if self.coverage not in ("full", "half"):
            out.append(f"table B1 coverage must be 'full' or 'half', got {self.coverage!r}")
        elif a.size:
            hi = 360.0 if self.coverage == "full" else 180.0
            if a[0] < 0 or a[-1] > hi or (self.coverage == "full" and a[-1] >= 360.0):
                out.append(f"table B1 grid exceeds declared {self.coverage} coverage")
        return out


B1Spec = Union[ConstantB1, AnalyticB1, TableB1]


@dataclass(frozen=True)
class RcsTriple:
    """3GPP (A, B1, B2) RCS model.

    ``b2_db`` is ``None`` when the fluctuation term is undefined (a zero
    spread fit); the sampler refuses such triples unless told to bypass B2.
    """

    a_dbsm: float
    b1: B1Spec = field(default_factory=ConstantB1)
    b2_db: Optional[float] = None
    cap_k: float = 3.0

    def __post_init__(self):
        _raise_if(self.violations())

    def violations(self) -> list[str]:
        out = []
        if not math.isfinite(self.a_dbsm):
            out.append(f"A must be finite, got {self.a_dbsm!r}")
        if self.b2_db is not None and not math.isfinite(self.b2_db):
            out.append(f"B2 must be finite, got {self.b2_db!r}")
        if not (math.isfinite(self.cap_k) and self.cap_k > 0):
            out.append(f"cap_k must be positive, got {self.cap_k!r}")
        out.extend(self.b1.violations())
        return out


@dataclass(frozen=True)
class SystemFactor:
    """Calibration constant with ``P_tar = k_cal * rcs``."""

    freq: Frequency
    k_cal: float

    def __post_init__(self):
        if not (math.isfinite(self.k_cal) and self.k_cal > 0):
            raise ValidationError([f"system factor must be positive, got {self.k_cal!r}"])


@dataclass(frozen=True)
class Geometry:
    """Quasi-monostatic measurement geometry (metres)."""

    d_tx_tar: float = 3.0
    d_rx_tar: float = 3.0
    baseline: float = 0.55

    def __post_init__(self):
        _raise_if(self.violations())

    def violations(self) -> list[str]:
        out = []
        for name in ("d_tx_tar", "d_rx_tar", "baseline"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                out.append(f"{name} must be a positive distance, got {v!r}")
        return out

    @property
    def theta_offset(self) -> float:
        """Tx/Rx angular offset at the target, degrees."""
        d = 0.5 * (self.d_tx_tar + self.d_rx_tar)
        return math.degrees(2.0 * math.atan(0.5 * self.baseline / d))

    def is_quasi_monostatic(self, max_offset_deg: float = 15.0) -> bool:
        return self.theta_offset <= max_offset_deg
