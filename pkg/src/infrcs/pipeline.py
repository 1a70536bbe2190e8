"""Dataset -> RCS samples -> log-normal fits."""

from __future__ import annotations

import logging
from typing import Mapping, Optional

from .calibration import rcs_from_power, system_factor
from .ingest import RunConfig, SweepDataset, parse_sidecar
from .model import Frequency, Kind, RcsError, RcsSampleSet, SystemFactor, ValidationError
from .power import cir_power, mean_reference_power, target_power
from .statfit import fit_lognormal

log = logging.getLogger(__name__)


def system_factors(
    dataset: SweepDataset,
    config: RunConfig,
    sidecar: Optional[Mapping[Frequency, float]] = None,
    freqs=None,
) -> dict[Frequency, SystemFactor]:
    """One system factor per frequency, from calibration records or the sidecar.

    The calibration receiver sits at the observation point, so only the
    target-to-receiver leg is left to normalise: ``K = P_r / (4 pi d_rx^2)``.
    A frequency with both sources, or neither, is a validation error.
    """
    if sidecar is None and config.calibration_sidecar is not None:
        sidecar = parse_sidecar(config.calibration_sidecar)
    sidecar = dict(sidecar or {})
    wanted = sorted(freqs if freqs is not None else dataset.frequencies)
    out, errs = {}, []
    d = config.geometry.d_rx_tar
    for f in wanted:
        cal = dataset.group(f, Kind.CALIBRATION)
        if cal and f in sidecar:
            errs.append(f"{f}: calibration given both as records and in the sidecar")
            continue
        if cal:
            p_r = sum(cir_power(r) for r in cal) / len(cal)
        elif f in sidecar:
            p_r = sidecar[f]
        else:
            errs.append(f"{f}: no calibration power (records or sidecar)")
            continue
        try:
            out[f] = system_factor(p_r, d, f)
        except RcsError as exc:
            errs.append(f"{f}: {exc}")
    if errs:
        raise ValidationError(errs)
    return out


def extract_rcs(
    dataset: SweepDataset,
    config: RunConfig,
    sidecar: Optional[Mapping[Frequency, float]] = None,
) -> dict[tuple[str, Frequency], RcsSampleSet]:
    """Differential powers inverted to RCS for every (target, frequency) group."""
    freqs = sorted({r.freq for r in dataset.records if r.kind is Kind.TARGET})
    if config.frequencies is not None:
        keep = set(config.frequencies)
        freqs = [f for f in freqs if f in keep]
    factors = system_factors(dataset, config, sidecar, freqs)
    out = {}
    for f in freqs:
        p_ref = mean_reference_power(dataset.group(f, Kind.REFERENCE))
        for target in sorted({r.target for r in dataset.group(f, Kind.TARGET)}):
            samples, dropped = [], 0
            for rec in dataset.group(f, Kind.TARGET, target):
                p_tar = target_power(cir_power(rec), p_ref)
                if p_tar is None:
                    dropped += 1
                else:
                    samples.append(rcs_from_power(p_tar, factors[f]))
            if dropped:
                log.info("%s @ %s: %d snapshot(s) below the rejection floor", target, f, dropped)
            out[(target, f)] = RcsSampleSet(target, f, samples, dropped)
    return out


def fit_groups(sample_sets: Mapping) -> dict:
    """Log-normal fit per group; a group with fewer than two kept samples is an error."""
    fits, errs = {}, []
    for key in sorted(sample_sets, key=lambda k: (k[0], k[1])):
        s = sample_sets[key]
        if len(s) < 2:
            errs.append(f"{s.target} @ {s.freq}: only {len(s)} usable sample(s) ({s.discarded} rejected)")
            continue
        fits[key] = fit_lognormal(s)
    if errs:
        raise ValidationError(errs)
    return fits
