"""Delimited report tables and triple files.

Fit tables carry one row per (target, frequency) with columns
``target, freq_ghz, n, discarded, mu, sigma, ks_e2, mse_e3, a_dbsm, b2_db``
(KS scaled by 1e2, MSE by 1e3). Triple tables carry
``target, a_dbsm, b1_db, b2_db, cap_k``. Triples with a non-constant B1
travel as JSON instead.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .gpp import a_dbsm, b2_db, builtin_standards, consolidate
from .model import AnalyticB1, ConstantB1, Frequency, RcsTriple, TableB1, ValidationError
from .statfit import empirical_cdf, lognormal_cdf, lognormal_pdf

FIT_COLUMNS = ("target", "freq_ghz", "n", "discarded", "mu", "sigma", "ks_e2", "mse_e3", "a_dbsm", "b2_db")
TRIPLE_COLUMNS = ("target", "a_dbsm", "b1_db", "b2_db", "cap_k")
CURVE_COLUMNS = ("target", "freq_ghz", "x_m2", "empirical_pdf", "fitted_pdf", "empirical_cdf", "fitted_cdf")
SAMPLE_COLUMNS = ("index", "b2_linear", "rcs_m2", "rcs_dbsm")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.12g}"


@dataclass(frozen=True)
class FitRow:
    target: str
    freq: Frequency
    mu: float
    sigma: float
    n: Optional[int] = None
    discarded: int = 0
    ks: Optional[float] = None
    mse: Optional[float] = None


def fit_rows(fits: dict, sample_sets: Optional[dict] = None) -> list[FitRow]:
    rows = []
    for (target, freq), fit in sorted(fits.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        dropped = sample_sets[(target, freq)].discarded if sample_sets else 0
        rows.append(FitRow(target, freq, fit.mu, fit.sigma, fit.n, dropped, fit.ks, fit.mse))
    return rows


def write_fit_table(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FIT_COLUMNS)
        for r in rows:
            b2 = b2_db(r.sigma) if r.sigma > 0 else None
            w.writerow([
                r.target,
                fmt(r.freq.ghz),
                fmt(r.n),
                fmt(r.discarded),
                fmt(r.mu),
                fmt(r.sigma),
                fmt(None if r.ks is None else 100.0 * r.ks),
                fmt(None if r.mse is None else 1000.0 * r.mse),
                fmt(a_dbsm(r.mu, r.sigma)),
                fmt(b2),
            ])


def _float(row, key, where, errs, required=True):
    raw = (row.get(key) or "").strip()
    if not raw:
        if required:
            errs.append(f"{where}: missing {key}")
        return None
    try:
        v = float(raw)
    except ValueError:
        errs.append(f"{where}: {key} is not a number ({raw!r})")
        return None
    if not math.isfinite(v):
        errs.append(f"{where}: {key} must be finite")
        return None
    return v


def read_fit_table(path) -> list[FitRow]:
    """Read a fit table; only ``target, freq_ghz, mu, sigma`` are required."""
    rows, errs = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"target", "freq_ghz", "mu", "sigma"} - set(reader.fieldnames or ())
        if missing:
            raise ValidationError([f"fit table lacks column(s): {', '.join(sorted(missing))}"])
        for i, row in enumerate(reader, start=2):
            where = f"row {i}"
            target = (row.get("target") or "").strip()
            if not target:
                errs.append(f"{where}: missing target")
            f = _float(row, "freq_ghz", where, errs)
            mu = _float(row, "mu", where, errs)
            sigma = _float(row, "sigma", where, errs)
            n = _float(row, "n", where, errs, required=False)
            dropped = _float(row, "discarded", where, errs, required=False)
            ks = _float(row, "ks_e2", where, errs, required=False)
            mse = _float(row, "mse_e3", where, errs, required=False)
            if f is not None and f <= 0:
                errs.append(f"{where}: freq_ghz must be positive")
                f = None
            if sigma is not None and sigma < 0:
                errs.append(f"{where}: sigma must be >= 0")
                sigma = None
            if not target or None in (f, mu, sigma):
                continue
            rows.append(FitRow(
                target,
                Frequency(f),
                mu,
                sigma,
                None if n is None else int(n),
                0 if dropped is None else int(dropped),
                None if ks is None else ks / 100.0,
                None if mse is None else mse / 1000.0,
            ))
    if errs:
        raise ValidationError(errs)
    return rows


def derive_triples(rows, cap_k: float = 3.0) -> dict[str, RcsTriple]:
    """Consolidate fit rows per target; degenerate or duplicate rows are named in the error."""
    if not rows:
        raise ValidationError(["fit table has no rows"])
    errs, grouped = [], {}
    for r in rows:
        per = grouped.setdefault(r.target, {})
        if r.freq in per:
            errs.append(f"{r.target} @ {r.freq}: duplicate row")
        if r.sigma <= 0:
            errs.append(f"{r.target} @ {r.freq}: degenerate fit (sigma = 0), B2 undefined")
        per[r.freq] = r
    if errs:
        raise ValidationError(errs)
    return {t: consolidate(per, cap_k=cap_k) for t, per in sorted(grouped.items())}


def write_triples(triples: dict, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRIPLE_COLUMNS)
        for name, t in triples.items():
            if not isinstance(t.b1, ConstantB1):
                raise ValidationError([f"{name}: non-constant B1 needs the JSON triple format"])
            w.writerow([name, fmt(t.a_dbsm), fmt(t.b1.db), fmt(t.b2_db), fmt(t.cap_k)])


# -- JSON triples --------------------------------------------------------------

B1_FIELDS = {
    "constant": {"kind", "db"},
    "analytic": {"kind", "exponent", "boresight_deg", "floor_db"},
    "table": {"kind", "angles_deg", "gains_db", "coverage"},
}
TRIPLE_FIELDS = {"standard", "a_dbsm", "b2_db", "b1", "cap_k"}


def b1_to_json(b1) -> dict:
    if isinstance(b1, ConstantB1):
        return {"kind": "constant", "db": b1.db}
    if isinstance(b1, AnalyticB1):
        return {"kind": "analytic", "exponent": b1.exponent, "boresight_deg": b1.boresight_deg, "floor_db": b1.floor_db}
    return {"kind": "table", "angles_deg": list(b1.angles_deg), "gains_db": list(b1.gains_db), "coverage": b1.coverage}


def triple_to_json(t: RcsTriple) -> dict:
    return {"a_dbsm": t.a_dbsm, "b1": b1_to_json(t.b1), "b2_db": t.b2_db, "cap_k": t.cap_k}


def _b1_from_json(obj, where: str):
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return ConstantB1(float(obj))
    if not isinstance(obj, dict):
        raise ValidationError([f"{where}: expected a number or an object"])
    kind = obj.get("kind", "constant")
    if kind not in B1_FIELDS:
        raise ValidationError([f"{where}.kind: expected constant, analytic or table, got {kind!r}"])
    unknown = sorted(set(obj) - B1_FIELDS[kind])
    if unknown:
        raise ValidationError([f"{where}.{k}: unknown field" for k in unknown])
    args = {k: v for k, v in obj.items() if k != "kind"}
    cls = {"constant": ConstantB1, "analytic": AnalyticB1, "table": TableB1}[kind]
    try:
        return cls(**args)
    except TypeError as exc:
        raise ValidationError([f"{where}: {exc}"]) from None
    except ValidationError as exc:
        raise ValidationError([f"{where}: {v}" for v in exc.violations]) from None


def triple_from_json(obj, where: str = "triple", allowed=TRIPLE_FIELDS) -> RcsTriple:
    """Build a triple from JSON; ``{"standard": "small_uav"}`` selects a built-in one."""
    if not isinstance(obj, dict):
        raise ValidationError([f"{where}: expected an object"])
    errs = [f"{where}.{k}: unknown field" for k in sorted(set(obj) - allowed)]
    if errs:
        raise ValidationError(errs)
    if "standard" in obj:
        std = builtin_standards().get(obj["standard"])
        if std is None:
            raise ValidationError([f"{where}.standard: no standardized values for {obj['standard']!r}"])
        extra = sorted(set(obj) - {"standard"})
        if extra:
            raise ValidationError([f"{where}.{k}: not allowed together with 'standard'" for k in extra])
        return std
    for key in ("a_dbsm", "b2_db"):
        v = obj.get(key)
        if key not in obj:
            errs.append(f"{where}.{key}: required")
        elif v is not None and (isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v)):
            errs.append(f"{where}.{key}: expected a finite number, got {v!r}")
    if obj.get("a_dbsm", 0) is None:
        errs.append(f"{where}.a_dbsm: expected a finite number")
    cap_k = obj.get("cap_k", 3.0)
    if isinstance(cap_k, bool) or not isinstance(cap_k, (int, float)) or not cap_k > 0:
        errs.append(f"{where}.cap_k: expected a positive number, got {cap_k!r}")
    b1 = ConstantB1(0.0)
    if "b1" in obj:
        try:
            b1 = _b1_from_json(obj["b1"], f"{where}.b1")
        except ValidationError as exc:
            errs.extend(exc.violations)
    if errs:
        raise ValidationError(errs)
    b2 = obj["b2_db"]
    return RcsTriple(float(obj["a_dbsm"]), b1, None if b2 is None else float(b2), float(cap_k))


def read_triples(path) -> dict[str, RcsTriple]:
    """Triples from a CSV triple table or a JSON file.

    JSON may hold a single triple object or a mapping of label -> triple.
    A single JSON triple is returned under the file's stem.
    """
    path = Path(path)
    if path.suffix.lower() == ".json":
        try:
            obj = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError([f"{path}: malformed JSON ({exc.msg})"]) from None
        if isinstance(obj, dict) and ("a_dbsm" in obj or "standard" in obj):
            return {path.stem: triple_from_json(obj)}
        if not isinstance(obj, dict) or not obj:
            raise ValidationError([f"{path}: expected a triple or a non-empty mapping of triples"])
        out, errs = {}, []
        for name, spec in obj.items():
            try:
                out[name] = triple_from_json(spec, where=name)
            except ValidationError as exc:
                errs.extend(exc.violations)
        if errs:
            raise ValidationError(errs)
        return out
    out, errs = {}, []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"target", "a_dbsm", "b2_db"} - set(reader.fieldnames or ())
        if missing:
            raise ValidationError([f"triple table lacks column(s): {', '.join(sorted(missing))}"])
        for i, row in enumerate(reader, start=2):
            where = f"row {i}"
            a = _float(row, "a_dbsm", where, errs)
            b2 = _float(row, "b2_db", where, errs)
            b1 = _float(row, "b1_db", where, errs, required=False)
            k = _float(row, "cap_k", where, errs, required=False)
            if None in (a, b2):
                continue
            try:
                out[row["target"]] = RcsTriple(a, ConstantB1(b1 or 0.0), b2, 3.0 if k is None else k)
            except ValidationError as exc:
                errs.extend(f"{where}: {v}" for v in exc.violations)
    if errs:
        raise ValidationError(errs)
    if not out:
        raise ValidationError([f"{path}: no triples"])
    return out


# -- plot-ready curves and sample dumps ----------------------------------------


def curve_rows(target: str, freq: Frequency, samples: np.ndarray, mu: float, sigma: float, points: int = 200):
    """Empirical vs fitted PDF/CDF on a log-spaced grid spanning the samples.

    The empirical PDF is a density histogram over ``points`` log-spaced
    bins, reported at each bin's geometric centre.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    lo, hi = x[0], x[-1]
    if hi <= lo:
        hi = lo * 1.0001
    edges = np.geomspace(lo, hi, points + 1)
    centres = np.sqrt(edges[:-1] * edges[1:])
    hist, _ = np.histogram(x, bins=edges, density=True)
    ecdf = empirical_cdf(x)(centres)
    if sigma > 0:
        pdf = lognormal_pdf(centres, mu, sigma)
        cdf = lognormal_cdf(centres, mu, sigma)
    else:
        pdf = np.full(points, np.nan)
        cdf = (centres >= math.exp(mu)).astype(float)
    for row in zip(centres, hist, pdf, ecdf, cdf):
        yield [target, fmt(freq.ghz)] + [fmt(float(v)) for v in row]


def write_curves(sample_sets: dict, fits: dict, path, points: int = 200) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_COLUMNS)
        for key in sorted(fits, key=lambda k: (k[0], k[1])):
            fit = fits[key]
            w.writerows(curve_rows(key[0], key[1], sample_sets[key].samples, fit.mu, fit.sigma, points))


def write_sample_dump(rcs: np.ndarray, b2_db_draws: np.ndarray, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SAMPLE_COLUMNS)
        b2_lin = np.power(10.0, b2_db_draws / 10.0)
        for i, (b, r) in enumerate(zip(b2_lin, rcs)):
            w.writerow([i, repr(float(b)), repr(float(r)), repr(float(10.0 * math.log10(r)))])
