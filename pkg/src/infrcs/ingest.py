"""Sweep dataset, run configuration and calibration sidecar files.

Dataset files are JSON Lines, one CIR record per line::

    {"freq_ghz": 28, "kind": "target", "target": "small_uav",
     "snapshot": 0, "taps_re": [...], "taps_im": [...]}

Configuration and sidecar files are single JSON documents.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .model import CirRecord, Frequency, Geometry, Kind, ValidationError

_KIND_ORDER = {Kind.REFERENCE: 0, Kind.CALIBRATION: 1, Kind.TARGET: 2}
RECORD_FIELDS = {"freq_ghz", "kind", "target", "snapshot", "taps_re", "taps_im"}


def _record_key(r: CirRecord):
    return (r.freq.ghz, _KIND_ORDER[r.kind], r.target or "", r.snapshot)


@dataclass(frozen=True, eq=False)
class SweepDataset:
    """Validated collection of CIR records.

    Records are held sorted by (frequency, kind, target, snapshot), so
    each group comes out in snapshot order.
    """

    records: tuple
    geometry: Geometry = field(default_factory=Geometry)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(sorted(self.records, key=_record_key)))
        problems = self.violations()
        if problems:
            raise ValidationError(problems)

    @property
    def frequencies(self) -> frozenset:
        return frozenset(r.freq for r in self.records)

    @property
    def targets(self) -> frozenset:
        return frozenset(r.target for r in self.records if r.kind is Kind.TARGET)

    def violations(self) -> list[str]:
        out = []
        ref_freqs = {r.freq for r in self.records if r.kind is Kind.REFERENCE}
        tar_freqs = {r.freq for r in self.records if r.kind is Kind.TARGET}
        missing = sorted(tar_freqs - ref_freqs)
        if missing:
            out.append(
                "missing reference sweep for target frequencies: "
                + ", ".join(f"{f.ghz:g} GHz" for f in missing)
            )
        seen = set()
        for r in self.records:
            key = _record_key(r)
            if key in seen:
                out.append(
                    f"duplicate snapshot {r.snapshot} for {r.kind.value}"
                    f"{'/' + r.target if r.target else ''} at {r.freq}"
                )
            seen.add(key)
        return out

    def group(self, freq: Frequency, kind: Kind, target: Optional[str] = None) -> list[CirRecord]:
        kind = Kind(kind)
        return [
            r
            for r in self.records
            if r.freq == freq and r.kind is kind and (target is None or r.target == target)
        ]

    def __eq__(self, other):
        if not isinstance(other, SweepDataset):
            return NotImplemented
        return self.geometry == other.geometry and self.records == other.records

    __hash__ = None


def _parse_record(obj, lineno: int) -> tuple[Optional[CirRecord], list[str]]:
    where = f"line {lineno}"
    if not isinstance(obj, dict):
        return None, [f"{where}: expected a JSON object"]
    errs = []
    unknown = sorted(set(obj) - RECORD_FIELDS)
    if unknown:
        errs.append(f"{where}: unknown field(s) {', '.join(unknown)}")
    freq = obj.get("freq_ghz")
    if isinstance(freq, bool) or not isinstance(freq, (int, float)) or not freq > 0:
        errs.append(f"{where}: freq_ghz must be a positive number")
    kind = obj.get("kind")
    if kind not in {k.value for k in Kind}:
        errs.append(f"{where}: kind must be reference, target or calibration, got {kind!r}")
    target = obj.get("target")
    if kind == "target" and not (isinstance(target, str) and target):
        errs.append(f"{where}: target records need a non-empty 'target' string")
    if kind in ("reference", "calibration") and target is not None:
        errs.append(f"{where}: 'target' is only allowed on target records")
    snap = obj.get("snapshot", 0)
    if isinstance(snap, bool) or not isinstance(snap, int) or snap < 0:
        errs.append(f"{where}: snapshot must be an integer >= 0")
    re_, im_ = obj.get("taps_re"), obj.get("taps_im")
    if not isinstance(re_, list) or not isinstance(im_, list):
        errs.append(f"{where}: taps_re and taps_im must be arrays")
    elif len(re_) != len(im_):
        errs.append(f"{where}: taps_re has {len(re_)} values but taps_im has {len(im_)}")
    elif not re_:
        errs.append(f"{where}: taps must be non-empty")
    elif not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) for v in re_ + im_
    ):
        errs.append(f"{where}: taps must be finite numbers")
    if errs:
        return None, errs
    taps = np.asarray(re_, dtype=float) + 1j * np.asarray(im_, dtype=float)
    rec = CirRecord(freq=Frequency(freq), kind=Kind(kind), taps=taps, target=target, snapshot=snap)
    return rec, []


def parse_dataset(path, geometry: Optional[Geometry] = None) -> SweepDataset:
    """Read and validate a JSON Lines sweep file.

    Every malformed line and every dataset-level violation is collected
    into a single :class:`ValidationError`. Blank lines are skipped.
    """
    records, errs = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                errs.append(f"line {lineno}: malformed JSON ({exc.msg})")
                continue
            rec, rec_errs = _parse_record(obj, lineno)
            errs.extend(rec_errs)
            if rec is not None:
                records.append(rec)
    if errs:
        raise ValidationError(errs)
    return SweepDataset(records=tuple(records), geometry=geometry or Geometry())


def record_to_json(r: CirRecord) -> str:
    obj = {"freq_ghz": r.freq.ghz, "kind": r.kind.value}
    if r.target is not None:
        obj["target"] = r.target
    obj["snapshot"] = int(r.snapshot)
    obj["taps_re"] = r.taps.real.tolist()
    obj["taps_im"] = r.taps.imag.tolist()
    return json.dumps(obj, separators=(",", ":"))


def write_dataset(dataset: SweepDataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in dataset.records:
            fh.write(record_to_json(r))
            fh.write("\n")


# -- run configuration ---------------------------------------------------------

CONFIG_FIELDS = {
    "d_m",
    "d_tx_tar_m",
    "d_rx_tar_m",
    "baseline_m",
    "frequencies_ghz",
    "cap_k",
    "calibration_sidecar",
}


@dataclass(frozen=True)
class RunConfig:
    geometry: Geometry = field(default_factory=Geometry)
    frequencies: Optional[tuple] = None
    cap_k: float = 3.0
    calibration_sidecar: Optional[Path] = None


def _positive(obj, key, errs, default):
    v = obj.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not (math.isfinite(v) and v > 0):
        errs.append(f"{key}: must be a positive number, got {v!r}")
        return default
    return float(v)


def config_from_dict(obj: dict, base_dir: Path = Path(".")) -> RunConfig:
    """Build a :class:`RunConfig`; ``d_m`` sets both target distances at once."""
    if not isinstance(obj, dict):
        raise ValidationError(["config: expected a JSON object"])
    errs = [f"{k}: unknown config field" for k in sorted(set(obj) - CONFIG_FIELDS)]
    d = _positive(obj, "d_m", errs, 3.0)
    d_tx = _positive(obj, "d_tx_tar_m", errs, d)
    d_rx = _positive(obj, "d_rx_tar_m", errs, d)
    baseline = _positive(obj, "baseline_m", errs, 0.55)
    cap_k = _positive(obj, "cap_k", errs, 3.0)
    freqs = obj.get("frequencies_ghz")
    if freqs is not None:
        if not isinstance(freqs, list) or not freqs or not all(
            isinstance(f, (int, float)) and not isinstance(f, bool) and f > 0 for f in freqs
        ):
            errs.append("frequencies_ghz: must be a non-empty list of positive numbers")
            freqs = None
        else:
            freqs = tuple(Frequency(f) for f in freqs)
    sidecar = obj.get("calibration_sidecar")
    if sidecar is not None:
        if not isinstance(sidecar, str) or not sidecar:
            errs.append("calibration_sidecar: must be a path string")
            sidecar = None
        else:
            sidecar = Path(base_dir) / sidecar
    if errs:
        raise ValidationError(errs)
    return RunConfig(
        geometry=Geometry(d_tx, d_rx, baseline),
        frequencies=freqs,
        cap_k=cap_k,
        calibration_sidecar=sidecar,
    )


def parse_config(path) -> RunConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        obj = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ValidationError([f"{path}: malformed JSON ({exc.msg})"]) from None
    return config_from_dict(obj, base_dir=path.parent)


# -- calibration sidecar -------------------------------------------------------


def parse_sidecar(path) -> dict:
    """Read ``[{"freq_ghz": f, "p_r": p}, ...]`` into ``{Frequency: p_r}``.

    A plain ``{"28": p_r}`` mapping is accepted too.
    """
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError([f"{path}: malformed JSON ({exc.msg})"]) from None
    if isinstance(obj, dict):
        rows = [{"freq_ghz": _num(k), "p_r": v} for k, v in obj.items()]
    elif isinstance(obj, list):
        rows = obj
    else:
        raise ValidationError([f"{path}: expected a list of rows or a mapping"])
    out, errs = {}, []
    for i, row in enumerate(rows):
        if not isinstance(row, dict):
            errs.append(f"sidecar row {i}: expected an object")
            continue
        f, p = row.get("freq_ghz"), row.get("p_r")
        if not isinstance(f, (int, float)) or isinstance(f, bool) or not f > 0:
            errs.append(f"sidecar row {i}: freq_ghz must be a positive number")
            continue
        if not isinstance(p, (int, float)) or isinstance(p, bool) or not (math.isfinite(p) and p > 0):
            errs.append(f"sidecar row {i}: p_r must be a positive number")
            continue
        freq = Frequency(f)
        if freq in out:
            errs.append(f"sidecar row {i}: duplicate entry for {freq}")
        out[freq] = float(p)
    if errs:
        raise ValidationError(errs)
    return out


def _num(s):
    try:
        return float(s)
    except (TypeError, ValueError):
        return s


def write_sidecar(p_r: dict, path) -> None:
    rows = [{"freq_ghz": f.ghz, "p_r": p} for f, p in sorted(p_r.items())]
    Path(path).write_text(json.dumps(rows, indent=1) + "\n", encoding="utf-8")

