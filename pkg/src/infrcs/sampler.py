"""Stochastic RCS draws ``RCS = A * B1 * B2`` for channel simulation.

B2 is a unit-mean log-normal variate. Its dB draw is clipped from above
at ``k`` dB-domain standard deviations, where ``sigma_dB = 10 log10(e) *
sigma_b2`` is the exact standard deviation of ``10 log10 B2``. Two
readings of where the cap sits are supported:

``"mean"`` (default)
    clip at ``mean_dB + k * sigma_dB``
``"unit"``
    clip at ``k * sigma_dB`` above 0 dB, the unit-mean point

The B2 parameter itself can be read as the squared coefficient of
variation in dB (``"cov"``, default, the inverse of
:func:`infrcs.gpp.b2_db`) or directly as ``sigma_dB`` (``"sigma_db"``).

Draws use ``numpy.random.Generator`` with an explicit ``PCG64`` bit
generator; golden values in the test-suite pin the stream.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .model import AnalyticB1, ConstantB1, DegenerateFitError, RcsError, RcsTriple, TableB1
from .units import DB_PER_NEPER_POWER

CAP_MODES = ("mean", "unit")
B2_FORMS = ("cov", "sigma_db")


def make_rng(seed: int) -> np.random.Generator:
    """Seeded generator with a fixed algorithm (PCG64)."""
    if seed is None:
        raise RcsError("an explicit seed is required")
    return np.random.Generator(np.random.PCG64(seed))


class Mode(str, enum.Enum):
    MONOSTATIC = "monostatic"
    BISTATIC = "bistatic"


@dataclass(frozen=True)
class SampleGeometry:
    incident_az: float = 0.0
    scattered_az: float | None = None
    mode: Mode = Mode.MONOSTATIC

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.scattered_az is None:
            object.__setattr__(self, "scattered_az", self.incident_az)
        if self.mode is Mode.MONOSTATIC and self.scattered_az != self.incident_az:
            raise RcsError("monostatic geometry needs equal incident and scattered angles")

    @classmethod
    def monostatic(cls, angle: float) -> SampleGeometry:
        return cls(angle, angle, Mode.MONOSTATIC)

    @classmethod
    def bistatic(cls, incident: float, scattered: float) -> SampleGeometry:
        return cls(incident, scattered, Mode.BISTATIC)

    @property
    def bisector(self) -> float:
        return 0.5 * (self.incident_az + self.scattered_az)


@dataclass(frozen=True)
class B2Law:
    """Natural-log parameters of the unit-mean B2 variate."""

    mu: float
    sigma: float

    @property
    def mean_db(self) -> float:
        return DB_PER_NEPER_POWER * self.mu

    @property
    def sigma_db(self) -> float:
        return DB_PER_NEPER_POWER * self.sigma


def b2_distribution(b2_param_db: float, form: str = "cov") -> B2Law:
    """Unit-mean log-normal behind a B2 value in dB.

    With ``form="cov"``, ``sigma^2 = ln(1 + 10^(B2/10))``; with
    ``form="sigma_db"``, ``sigma = B2 / (10 log10 e)``. Either way
    ``mu = -sigma^2 / 2`` so that ``E[B2] = 1``.
    """
    if not math.isfinite(b2_param_db):
        raise RcsError(f"B2 must be finite, got {b2_param_db!r}")
    if form == "cov":
        var = math.log1p(10.0 ** (b2_param_db / 10.0))
    elif form == "sigma_db":
        if b2_param_db < 0:
            raise RcsError("a dB-domain standard deviation cannot be negative")
        var = (b2_param_db / DB_PER_NEPER_POWER) ** 2
    else:
        raise RcsError(f"unknown B2 form {form!r}; expected one of {B2_FORMS}")
    return B2Law(mu=-0.5 * var, sigma=math.sqrt(var))


def _wrap360(a: float) -> float:
    return a % 360.0


def eval_b1(spec, geom: SampleGeometry) -> float:
    """B1 in dB at the bisector of the incident and scattered angles."""
    angle = geom.bisector
    if isinstance(spec, ConstantB1):
        return spec.db
    if isinstance(spec, AnalyticB1):
        if spec.exponent == 0:
            return 0.0
        c = abs(math.cos(math.radians(angle - spec.boresight_deg)))
        if c == 0.0:
            return spec.floor_db
        return max(10.0 * spec.exponent * math.log10(c), spec.floor_db)
    if isinstance(spec, TableB1):
        return _eval_table(spec, angle)
    raise RcsError(f"unsupported B1 spec {spec!r}")


def _eval_table(spec: TableB1, angle: float) -> float:
    grid = np.asarray(spec.angles_deg)
    gains = np.asarray(spec.gains_db)
    a = _wrap360(angle)
    if spec.coverage == "half":
        a = 360.0 - a if a > 180.0 else a
        if not grid[0] <= a <= grid[-1]:
            raise RcsError(f"angle {angle} deg outside B1 table coverage [{grid[0]}, {grid[-1]}]")
        return float(np.interp(a, grid, gains))
    # full circle: close the loop from the last grid point back to the first
    xs = np.append(grid, grid[0] + 360.0)
    ys = np.append(gains, gains[0])
    if a < grid[0]:
        a += 360.0
    return float(np.interp(a, xs, ys))


def _cap_db(law: B2Law, cap_k: float, cap_mode: str) -> float:
    if cap_mode == "mean":
        return law.mean_db + cap_k * law.sigma_db
    if cap_mode == "unit":
        return cap_k * law.sigma_db
    raise RcsError(f"unknown cap mode {cap_mode!r}; expected one of {CAP_MODES}")


def draw_b2_db(
    triple: RcsTriple,
    rng: np.random.Generator,
    n: int,
    *,
    capped: bool = True,
    cap_mode: str = "mean",
    b2_form: str = "cov",
) -> np.ndarray:
    """B2 draws in dB, clipped at the cap bound when ``capped``."""
    if n < 1:
        raise RcsError(f"sample count must be >= 1, got {n}")
    if triple.b2_db is None:
        raise DegenerateFitError("triple has no B2 term; pass bypass_b2=True for a deterministic draw")
    law = b2_distribution(triple.b2_db, b2_form)
    z = rng.normal(law.mu, law.sigma, size=n)
    out = DB_PER_NEPER_POWER * z
    if capped:
        out = np.minimum(out, _cap_db(law, triple.cap_k, cap_mode))
    return out


def sample_rcs_detailed(
    triple: RcsTriple,
    geom: SampleGeometry,
    rng: np.random.Generator,
    n: int,
    *,
    capped: bool = True,
    cap_mode: str = "mean",
    b2_form: str = "cov",
    bypass_b2: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Like :func:`sample_rcs` but also returns the B2 draws (dB)."""
    if n < 1:
        raise RcsError(f"sample count must be >= 1, got {n}")
    scale_db = triple.a_dbsm + eval_b1(triple.b1, geom)
    if bypass_b2:
        b2 = np.zeros(n)
    else:
        b2 = draw_b2_db(triple, rng, n, capped=capped, cap_mode=cap_mode, b2_form=b2_form)
    rcs = np.power(10.0, (scale_db + b2) / 10.0)
    return rcs, b2


def sample_rcs(triple: RcsTriple, geom: SampleGeometry, rng: np.random.Generator, n: int, **kw) -> np.ndarray:
    """Draw ``n`` linear RCS values (m^2).

    Keyword options are ``capped``, ``cap_mode``, ``b2_form`` and
    ``bypass_b2`` (deterministic ``A * B1`` with no fluctuation).
    """
    return sample_rcs_detailed(triple, geom, rng, n, **kw)[0]


def check_consistency(triple: RcsTriple, theta: float, seed: int, n: int = 64, **kw) -> bool:
    """Bistatic draws at coincident angles equal monostatic draws, sample for sample."""
    mono = sample_rcs(triple, SampleGeometry.monostatic(theta), make_rng(seed), n, **kw)
    bi = sample_rcs(triple, SampleGeometry.bistatic(theta, theta), make_rng(seed), n, **kw)
    return bool(np.array_equal(mono, bi))
