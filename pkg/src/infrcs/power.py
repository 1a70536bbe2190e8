"""Reference, total and differential target power from CIR snapshots."""

from __future__ import annotations

import math
from typing import Iterable, Optional

from .model import CirRecord, Kind, RcsError

ABS_FLOOR = 1e-12
REL_FLOOR = 1e-6


def cir_power(record: CirRecord) -> float:
    """Total CIR energy, ``sum(|h[n]|^2)``, with compensated summation."""
    taps = record.taps
    return math.fsum((taps.real * taps.real + taps.imag * taps.imag).tolist())


def mean_reference_power(refs: Iterable[CirRecord]) -> float:
    """Arithmetic mean of the reference-sweep powers at a single frequency."""
    refs = list(refs)
    if not refs:
        raise RcsError("no reference records to average")
    freqs = {r.freq for r in refs}
    if len(freqs) != 1:
        raise RcsError(f"reference records span several frequencies: {sorted(f.ghz for f in freqs)}")
    bad = [r.snapshot for r in refs if r.kind is not Kind.REFERENCE]
    if bad:
        raise RcsError(f"non-reference records passed as reference: snapshots {bad}")
    return math.fsum(cir_power(r) for r in refs) / len(refs)


def rejection_floor(p_ref: float) -> float:
    return max(ABS_FLOOR, REL_FLOOR * p_ref)


def target_power(p_tot: float, p_ref: float) -> Optional[float]:
    """Clutter-differenced target power ``p_tot - p_ref``.

    Returns ``None`` when the difference does not clear the rejection
    floor ``max(1e-12, 1e-6 * p_ref)``. Negative and near-zero
    differentials are dropped rather than clamped, since a non-positive
    RCS sample cannot enter a log-normal fit.
    """
    if p_tot < 0 or p_ref < 0:
        raise RcsError(f"powers must be non-negative, got p_tot={p_tot!r}, p_ref={p_ref!r}")
    diff = p_tot - p_ref
    if diff <= rejection_floor(p_ref):
        return None
    return diff
