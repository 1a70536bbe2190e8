"""Radar cross section characterization for indoor-factory targets.

Turns channel-sounding sweeps into calibrated RCS samples, fits
log-normal models, derives the 3GPP (A, B1, B2) triple, and draws
standards-compliant RCS realizations for ISAC simulation.
"""

__version__ = "0.1.0"

from .calibration import Link, forward_radar_power, free_space_power, rcs_from_power, system_factor
from .gpp import a_dbsm, b2_db, builtin_standards, compare_to_standard, consolidate
from .ingest import SweepDataset, parse_config, parse_dataset, write_dataset
from .model import (
    AnalyticB1,
    CirRecord,
    ConstantB1,
    DegenerateFitError,
    Frequency,
    Geometry,
    Kind,
    LognormalFit,
    RcsError,
    RcsSampleSet,
    RcsTriple,
    SystemFactor,
    TableB1,
    ValidationError,
)
from .power import cir_power, mean_reference_power, target_power
from .sampler import SampleGeometry, b2_distribution, check_consistency, eval_b1, make_rng, sample_rcs
from .statfit import cdf_mse, empirical_cdf, fit_lognormal, ks_statistic, lognormal_cdf, lognormal_pdf
from .units import db_to_linear, linear_to_db
