"""Synthetic sounding campaigns with known ground-truth RCS.

A campaign builds, per frequency, a fixed clutter CIR (the reference
sweep), a free-space calibration power, and target snapshots whose extra
tap carries exactly the radar-equation power of an RCS value drawn by
the sampler. Optionally every CIR is passed through Zadoff-Chu sounding
and correlation recovery, with additive noise.

The target reflection sits on a tap the clutter never occupies, so the
total power is exactly clutter plus target power and the differential
pipeline must give back the drawn RCS.
"""

from __future__ import annotations

import csv
import json
import math
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

import numpy as np

from .calibration import Link, forward_radar_power, free_space_power
from .ingest import SweepDataset, write_dataset, write_sidecar
from .model import (
    CirRecord,
    Frequency,
    Geometry,
    Kind,
    RcsError,
    RcsTriple,
    ValidationError,
)
from .report import triple_from_json
from .sampler import SampleGeometry, sample_rcs

LEDGER_HEADER = ("target", "freq_ghz", "snapshot", "sigma_true_m2")


def zc_sequence(length: int, root: int) -> np.ndarray:
    """Zadoff-Chu sequence.

    ``exp(-j pi u n^2 / N)`` for even ``N``, ``exp(-j pi u n (n+1) / N)``
    for odd ``N``. The exponent is reduced modulo ``2N`` in exact integer
    arithmetic before the complex exponential, which keeps long sequences
    accurate.
    """
    if length < 2:
        raise RcsError(f"ZC length must be >= 2, got {length}")
    if math.gcd(root, length) != 1:
        raise RcsError(f"ZC root {root} is not coprime to length {length}")
    n = np.arange(length, dtype=np.int64)
    k = n * n if length % 2 == 0 else n * (n + 1)
    k = (root * k) % (2 * length)
    return np.exp(-1j * np.pi * k / length)


def synth_cir(paths, length: int) -> np.ndarray:
    """Place complex path gains on their delay taps (gains on a shared tap add)."""
    if length < 1:
        raise RcsError(f"CIR length must be >= 1, got {length}")
    taps = np.zeros(length, dtype=complex)
    for delay, gain in paths:
        if not 0 <= delay < length:
            raise RcsError(f"path delay {delay} outside [0, {length})")
        taps[int(delay)] += gain
    return taps


def _sound_batch(taps: np.ndarray, zc: np.ndarray, noise_power: float, rng) -> np.ndarray:
    """Circular ZC sounding and correlation recovery for a (snapshots, L) batch."""
    taps = np.atleast_2d(taps)
    n = zc.size
    L = taps.shape[1]
    if n < L:
        raise RcsError(f"ZC length {n} shorter than CIR length {L}")
    h = np.zeros((taps.shape[0], n), dtype=complex)
    h[:, :L] = taps
    z = np.fft.fft(zc)
    y = np.fft.ifft(np.fft.fft(h, axis=1) * z, axis=1)
    if noise_power > 0:
        if rng is None:
            raise RcsError("a seeded generator is required when noise_power > 0")
        scale = math.sqrt(noise_power / 2.0)
        y = y + scale * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))
    energy = float(np.sum(np.abs(zc) ** 2))
    est = np.fft.ifft(np.fft.fft(y, axis=1) * np.conj(z), axis=1) / energy
    return est[:, :L]


def sound_and_recover(taps, zc, noise_power: float = 0.0, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Transmit ``zc`` through the CIR ``taps`` and estimate the taps back.

    The received block is the circular convolution of the sequence with
    the channel plus complex white noise of power ``noise_power`` per
    sample; the estimate is the circular cross-correlation with ``zc``
    normalised by its energy, truncated to ``len(taps)``.
    """
    taps = np.asarray(taps, dtype=complex)
    return _sound_batch(taps[None, :], np.asarray(zc, dtype=complex), noise_power, rng)[0]


# -- campaigns -----------------------------------------------------------------


@dataclass(frozen=True)
class LedgerRow:
    target: str
    freq_ghz: float
    snapshot: int
    sigma_true_m2: float


@dataclass
class Campaign:
    dataset: SweepDataset
    sidecar: dict
    ledger: list = field(default_factory=list)


def _stream(seed: int, *tags) -> np.random.Generator:
    """Independent generator for ``(seed, tags...)``; tags may be strings or floats."""
    words = [int(seed)]
    for t in tags:
        if isinstance(t, str):
            words.append(zlib.crc32(t.encode("utf-8")))
        elif isinstance(t, float):
            words.append(int(round(t * 1000)))
        else:
            words.append(int(t))
    return np.random.Generator(np.random.PCG64(words))


def clutter_profile(seed: int, freq: Frequency, length: int, power: float, skip_tap: int) -> np.ndarray:
    """Fixed multipath clutter for one frequency with an exponential decay, total power ``power``."""
    rng = _stream(seed, "clutter", freq.ghz)
    decay = np.exp(-np.arange(length) / max(length / 3.0, 1.0))
    gains = (rng.standard_normal(length) + 1j * rng.standard_normal(length)) * np.sqrt(decay / 2.0)
    gains[skip_tap] = 0.0
    gains *= math.sqrt(power / float(np.sum(np.abs(gains) ** 2)))
    return gains


def generate_campaign(
    target_triples: Mapping[str, RcsTriple],
    geom: Geometry,
    link: Link,
    freqs,
    snapshots_per_freq: int,
    seed: int,
    *,
    cir_length: int = 8,
    target_tap: int = 1,
    clutter_rel_power: float = 0.1,
    clutter_jitter: float = 0.0,
    reference_snapshots: int = 1,
    noise_power: float = 0.0,
    zc_length: Optional[int] = 128,
    zc_root: int = 1,
    calibration: str = "sidecar",
    sampler_options: Optional[dict] = None,
) -> Campaign:
    """Simulate a reference / calibration / target sweep.

    Parameters
    ----------
    target_triples : mapping of target label -> RcsTriple
        RCS models the per-snapshot ground truth is drawn from.
    geom : Geometry
        Must have equal Tx-target and Rx-target distances.
    link : Link
        Hidden link budget; only its products reach the files.
    freqs : iterable of Frequency
    snapshots_per_freq : int
        Target snapshots per (target, frequency).
    seed : int
    cir_length, target_tap : int
        CIR size and the clutter-free tap holding the target echo.
    clutter_rel_power : float
        Clutter energy relative to the calibration power.
    clutter_jitter : float
        Relative per-snapshot amplitude jitter on the clutter taps. Zero
        keeps the clutter static; non-zero exercises the rejection floor.
    reference_snapshots : int
    noise_power : float
        Complex noise power per received sample, in the same units as the
        tap powers. Requires ``zc_length``.
    zc_length : int or None
        Sounding sequence length; ``None`` writes the CIRs directly.
    calibration : {"sidecar", "records"}
        Emit the calibration power as a sidecar table or as
        calibration-kind records.
    """
    freqs = sorted(freqs)
    if snapshots_per_freq < 1 or reference_snapshots < 1:
        raise RcsError("snapshot counts must be >= 1")
    if not 0 <= target_tap < cir_length:
        raise RcsError(f"target tap {target_tap} outside CIR length {cir_length}")
    if calibration not in ("sidecar", "records"):
        raise RcsError(f"calibration must be 'sidecar' or 'records', got {calibration!r}")
    if noise_power > 0 and zc_length is None:
        raise RcsError("noise requires ZC sounding (zc_length)")
    zc = zc_sequence(zc_length, zc_root) if zc_length else None
    sampler_options = dict(sampler_options or {})

    records, sidecar, ledger = [], {}, []
    for freq in freqs:
        p_r = free_space_power(freq, geom.d_tx_tar, link)
        clutter = clutter_profile(seed, freq, cir_length, clutter_rel_power * p_r, target_tap)
        jit = _stream(seed, "jitter", freq.ghz)
        noise = _stream(seed, "noise", freq.ghz)

        def observe(batch):
            if zc is None:
                return batch
            return _sound_batch(batch, zc, noise_power, noise)

        def with_jitter(count):
            batch = np.tile(clutter, (count, 1))
            if clutter_jitter > 0:
                batch = batch * (1.0 + clutter_jitter * jit.standard_normal((count, 1)))
            return batch

        refs = observe(with_jitter(reference_snapshots))
        for i, taps in enumerate(refs):
            records.append(CirRecord(freq, Kind.REFERENCE, taps, snapshot=i))

        if calibration == "sidecar":
            sidecar[freq] = p_r
        else:
            cal = np.zeros(cir_length, dtype=complex)
            cal[0] = math.sqrt(p_r)
            records.append(CirRecord(freq, Kind.CALIBRATION, observe(cal[None, :])[0], snapshot=0))

        for name in sorted(target_triples):
            triple = target_triples[name]
            sigmas = sample_rcs(
                triple,
                SampleGeometry.monostatic(0.0),
                _stream(seed, "rcs", name, freq.ghz),
                snapshots_per_freq,
                **sampler_options,
            )
            phase = _stream(seed, "phase", name, freq.ghz).uniform(0.0, 2 * math.pi, snapshots_per_freq)
            p_tar = np.array([forward_radar_power(float(s), freq, geom, link) for s in sigmas])
            batch = with_jitter(snapshots_per_freq)
            batch[:, target_tap] += np.sqrt(p_tar) * np.exp(1j * phase)
            batch = observe(batch)
            for i, (taps, s) in enumerate(zip(batch, sigmas)):
                records.append(CirRecord(freq, Kind.TARGET, taps, target=name, snapshot=i))
                ledger.append(LedgerRow(name, freq.ghz, i, float(s)))

    return Campaign(SweepDataset(tuple(records), geom), sidecar, ledger)


def write_ledger(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(LEDGER_HEADER)
        for r in rows:
            w.writerow([r.target, f"{r.freq_ghz:g}", r.snapshot, repr(r.sigma_true_m2)])


def read_ledger(path) -> list[LedgerRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            LedgerRow(r["target"], float(r["freq_ghz"]), int(r["snapshot"]), float(r["sigma_true_m2"]))
            for r in csv.DictReader(fh)
        ]


# -- scenario files ------------------------------------------------------------

SCENARIO_FIELDS = {
    "targets",
    "frequencies_ghz",
    "snapshots_per_freq",
    "reference_snapshots",
    "geometry",
    "link",
    "cir_length",
    "target_tap",
    "clutter_rel_power",
    "clutter_jitter",
    "noise_power",
    "zc_length",
    "zc_root",
    "calibration",
    "sampler",
}
TARGET_FIELDS = {"standard", "a_dbsm", "b2_db", "b1", "cap_k"}
GEOMETRY_FIELDS = {"d_m", "baseline_m"}
LINK_FIELDS = {"p_t_w", "g_t_db", "g_r_db", "loss_db"}
SAMPLER_FIELDS = {"capped", "cap_mode", "b2_form"}

DEFAULT_SCENARIO = {
    "targets": {"small_uav": {"a_dbsm": -13.57, "b2_db": 3.065}},
    "frequencies_ghz": [25, 26, 27, 28],
    "snapshots_per_freq": 10000,
    "reference_snapshots": 1,
    "geometry": {"d_m": 3.0, "baseline_m": 0.55},
    "link": {"p_t_w": 0.01, "g_t_db": 20.0, "g_r_db": 20.0, "loss_db": -6.0},
    "cir_length": 8,
    "target_tap": 1,
    "clutter_rel_power": 0.1,
    "clutter_jitter": 0.0,
    "noise_power": 0.0,
    "zc_length": 128,
    "zc_root": 1,
    "calibration": "sidecar",
}


@dataclass
class Scenario:
    targets: dict
    freqs: list
    geometry: Geometry
    link: Link
    snapshots_per_freq: int
    options: dict


def _check_fields(obj, allowed, where, errs) -> bool:
    if not isinstance(obj, dict):
        errs.append(f"{where}: expected an object")
        return False
    for k in sorted(set(obj) - allowed):
        errs.append(f"{where}.{k}: unknown field")
    return True


def _number(obj, key, where, errs, *, positive=False, integer=False, minimum=None):
    v = obj[key]
    ok = isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
    if ok and integer:
        ok = isinstance(v, int)
    if ok and positive:
        ok = v > 0
    if ok and minimum is not None:
        ok = v >= minimum
    if not ok:
        kind = "integer" if integer else "number"
        cond = " > 0" if positive else (f" >= {minimum}" if minimum is not None else "")
        errs.append(f"{where}.{key}: expected a {kind}{cond}, got {v!r}")
        return None
    return v


def scenario_from_dict(obj: dict) -> Scenario:
    """Merge ``obj`` over :data:`DEFAULT_SCENARIO` and validate it.

    Errors carry dotted field paths such as ``scenario.link.g_t_db``.
    """
    errs: list[str] = []
    if not _check_fields(obj, SCENARIO_FIELDS, "scenario", errs):
        raise ValidationError(errs)
    merged = {**DEFAULT_SCENARIO, **obj}
    for sub in ("geometry", "link"):
        if isinstance(obj.get(sub), dict):
            merged[sub] = {**DEFAULT_SCENARIO[sub], **obj[sub]}

    targets = {}
    if not isinstance(merged["targets"], dict):
        errs.append("scenario.targets: expected an object mapping target label to model")
    else:
        for name, spec in merged["targets"].items():
            where = f"scenario.targets.{name}"
            try:
                targets[name] = triple_from_json(spec, where=where, allowed=TARGET_FIELDS)
            except ValidationError as exc:
                errs.extend(exc.violations)

    freqs = merged["frequencies_ghz"]
    if not (isinstance(freqs, list) and freqs and all(
        isinstance(f, (int, float)) and not isinstance(f, bool) and f > 0 for f in freqs
    )):
        errs.append("scenario.frequencies_ghz: expected a non-empty list of positive numbers")
        freqs = []
    elif len(set(freqs)) != len(freqs):
        errs.append("scenario.frequencies_ghz: duplicate frequencies")

    geom = None
    if _check_fields(merged["geometry"], GEOMETRY_FIELDS, "scenario.geometry", errs):
        g = merged["geometry"]
        d = _number(g, "d_m", "scenario.geometry", errs, positive=True)
        b = _number(g, "baseline_m", "scenario.geometry", errs, positive=True)
        if d is not None and b is not None:
            geom = Geometry(float(d), float(d), float(b))

    link = None
    if _check_fields(merged["link"], LINK_FIELDS, "scenario.link", errs):
        lk = merged["link"]
        p_t = _number(lk, "p_t_w", "scenario.link", errs, positive=True)
        vals = [_number(lk, k, "scenario.link", errs) for k in ("g_t_db", "g_r_db", "loss_db")]
        if p_t is not None and None not in vals:
            g_t, g_r, loss = (10.0 ** (v / 10.0) for v in vals)
            link = Link(p_t=float(p_t), g_t=g_t, g_r=g_r, loss=loss)

    snaps = _number(merged, "snapshots_per_freq", "scenario", errs, integer=True, positive=True)
    opts = {
        "reference_snapshots": _number(merged, "reference_snapshots", "scenario", errs, integer=True, positive=True),
        "cir_length": _number(merged, "cir_length", "scenario", errs, integer=True, minimum=2),
        "target_tap": _number(merged, "target_tap", "scenario", errs, integer=True, minimum=0),
        "clutter_rel_power": _number(merged, "clutter_rel_power", "scenario", errs, positive=True),
        "clutter_jitter": _number(merged, "clutter_jitter", "scenario", errs, minimum=0),
        "noise_power": _number(merged, "noise_power", "scenario", errs, minimum=0),
        "zc_root": _number(merged, "zc_root", "scenario", errs, integer=True, positive=True),
    }
    zc_len = merged["zc_length"]
    if zc_len is not None:
        zc_len = _number(merged, "zc_length", "scenario", errs, integer=True, minimum=2)
    opts["zc_length"] = zc_len
    if merged["calibration"] not in ("sidecar", "records"):
        errs.append(f"scenario.calibration: expected 'sidecar' or 'records', got {merged['calibration']!r}")
    opts["calibration"] = merged["calibration"]
    samp = merged.get("sampler", {})
    if _check_fields(samp, SAMPLER_FIELDS, "scenario.sampler", errs):
        opts["sampler_options"] = dict(samp)
    if not errs and opts["target_tap"] >= opts["cir_length"]:
        errs.append("scenario.target_tap: must be smaller than cir_length")
    if not errs and opts["zc_length"] is not None:
        if opts["zc_length"] < opts["cir_length"]:
            errs.append("scenario.zc_length: must be at least cir_length")
        elif math.gcd(opts["zc_root"], opts["zc_length"]) != 1:
            errs.append("scenario.zc_root: must be coprime to zc_length")
    if errs:
        raise ValidationError(errs)
    return Scenario(
        targets=targets,
        freqs=[Frequency(f) for f in freqs],
        geometry=geom,
        link=link,
        snapshots_per_freq=snaps,
        options=opts,
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError([f"{path}: malformed JSON ({exc.msg})"]) from None
    return scenario_from_dict(obj)


def run_scenario(scenario: Scenario, seed: int) -> Campaign:
    return generate_campaign(
        scenario.targets,
        scenario.geometry,
        scenario.link,
        scenario.freqs,
        scenario.snapshots_per_freq,
        seed,
        **scenario.options,
    )


def write_campaign(campaign: Campaign, out_dir, scenario: Optional[Scenario] = None) -> dict:
    """Write dataset, sidecar, ledger and a matching run config into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "dataset": out / "dataset.jsonl",
        "ledger": out / "ledger.csv",
        "config": out / "config.json",
    }
    write_dataset(campaign.dataset, paths["dataset"])
    write_ledger(campaign.ledger, paths["ledger"])
    g = campaign.dataset.geometry
    config = {"d_tx_tar_m": g.d_tx_tar, "d_rx_tar_m": g.d_rx_tar, "baseline_m": g.baseline}
    if scenario is not None:
        config["frequencies_ghz"] = [f.ghz for f in scenario.freqs]
    if campaign.sidecar:
        paths["sidecar"] = out / "calibration.json"
        write_sidecar(campaign.sidecar, paths["sidecar"])
        config["calibration_sidecar"] = paths["sidecar"].name
    paths["config"].write_text(json.dumps(config, indent=1) + "\n", encoding="utf-8")
    return paths
