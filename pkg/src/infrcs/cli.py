"""Batch command-line front end.

Exit codes: 0 success, 1 validation or domain error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .gpp import builtin_standards, compare_to_standard
from .ingest import RunConfig, parse_config, parse_dataset
from .model import RcsError
from .pipeline import extract_rcs, fit_groups
from .report import (
    derive_triples,
    fit_rows,
    read_fit_table,
    read_triples,
    write_curves,
    write_fit_table,
    write_sample_dump,
    write_triples,
)
from .sampler import B2_FORMS, CAP_MODES, SampleGeometry, make_rng, sample_rcs_detailed
from .synth import DEFAULT_SCENARIO, load_scenario, run_scenario, scenario_from_dict, write_campaign

log = logging.getLogger("infrcs")


class UsageError(RcsError):
    pass


class _Parser(argparse.ArgumentParser):
    # bad arguments are a validation failure (1); 2 is reserved for I/O
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load(dataset_path, config_path):
    config = parse_config(config_path) if config_path else RunConfig()
    dataset = parse_dataset(dataset_path, config.geometry)
    return dataset, config


def _fit(args):
    dataset, config = _load(args.dataset, args.config)
    sets = extract_rcs(dataset, config)
    fits = fit_groups(sets)
    return config, sets, fits


def cmd_fit(args) -> int:
    _, sets, fits = _fit(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = fit_rows(fits, sets)
    write_fit_table(rows, out / "fits.csv")
    if args.curves:
        write_curves(sets, fits, out / "curves.csv", points=args.points)
    print(format_fit_table(rows))
    return 0


def format_fit_table(rows) -> str:
    lines = [f"{'target':<14}{'freq':>6}{'KS e-2':>9}{'MSE e-3':>9}{'mu':>9}{'sigma':>8}{'n':>8}{'drop':>6}"]
    for r in rows:
        ks = "-" if r.ks is None else f"{100 * r.ks:.2f}"
        mse = "-" if r.mse is None else f"{1000 * r.mse:.2f}"
        n = "-" if r.n is None else str(r.n)
        lines.append(
            f"{r.target:<14}{r.freq.ghz:>6g}{ks:>9}{mse:>9}{r.mu:>9.3f}{r.sigma:>8.3f}{n:>8}{r.discarded:>6}"
        )
    return "\n".join(lines)


def format_triples(triples) -> str:
    lines = [f"{'target':<14}{'A dBsm':>10}{'B1 dB':>8}{'B2 dB':>9}"]
    for name, t in triples.items():
        lines.append(f"{name:<14}{t.a_dbsm:>10.3f}{t.b1.db:>8.3g}{t.b2_db:>9.3f}")
    return "\n".join(lines)


def cmd_derive(args) -> int:
    rows = read_fit_table(args.fit_table)
    triples = derive_triples(rows, cap_k=args.cap_k)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        write_triples(triples, args.out)
    print(format_triples(triples))
    return 0


def _pick(triples: dict, name, source) -> tuple:
    if name is not None:
        if name not in triples:
            raise UsageError(f"{source}: no triple named {name!r}; have {', '.join(sorted(triples))}")
        return name, triples[name]
    if len(triples) != 1:
        raise UsageError(f"{source} holds several triples; choose one with --target")
    return next(iter(triples.items()))


def compare_report(name, triple, std_name, std, tol) -> str:
    dev = compare_to_standard(triple, std, tol)
    verdict = "within" if dev.within else "outside"
    return "\n".join([
        f"target      {name}",
        f"standard    {std_name}",
        f"measured    A = {triple.a_dbsm:.3f} dBsm, B1 = {triple.b1.db:g} dB, B2 = {triple.b2_db:.3f} dB",
        f"reference   A = {std.a_dbsm:.3f} dBsm, B1 = {std.b1.db:g} dB, B2 = {std.b2_db:.3f} dB",
        f"delta_A     {dev.delta_a_db:.3f} dB",
        f"delta_B2    {dev.delta_b2_db:.3f} dB",
        f"verdict     {verdict} {tol:g} dB",
    ])


def cmd_compare(args) -> int:
    standards = builtin_standards()
    if args.standard not in standards:
        raise UsageError(
            f"no standardized values for {args.standard!r}; known: {', '.join(sorted(standards))}"
        )
    name, triple = _pick(read_triples(args.triples), args.target, args.triples)
    text = compare_report(name, triple, args.standard, standards[args.standard], args.tol)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def _parse_angles(text: str) -> SampleGeometry:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"--angles expects 'theta' or 'incident,scattered', got {text!r}") from None
    if len(parts) == 1:
        return SampleGeometry.monostatic(parts[0])
    if len(parts) == 2:
        return SampleGeometry.bistatic(*parts)
    raise UsageError(f"--angles expects one or two values, got {text!r}")


def cmd_sample(args) -> int:
    if args.n < 1:
        raise UsageError(f"--n must be >= 1, got {args.n}")
    if args.target and not args.triple:
        standards = builtin_standards()
        if args.target not in standards:
            raise UsageError(f"no standardized values for {args.target!r}; use --triple")
        name, triple = args.target, standards[args.target]
    else:
        name, triple = _pick(read_triples(args.triple), args.target, args.triple)
    geom = _parse_angles(args.angles)
    rcs, b2 = sample_rcs_detailed(
        triple,
        geom,
        make_rng(args.seed),
        args.n,
        capped=not args.no_cap,
        cap_mode=args.cap_mode,
        b2_form=args.b2_form,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_sample_dump(rcs, b2, out)
    print(f"{name}: wrote {args.n} draws to {out}")
    return 0


def cmd_synth(args) -> int:
    scenario = load_scenario(args.config) if args.config else scenario_from_dict(dict(DEFAULT_SCENARIO))
    campaign = run_scenario(scenario, args.seed)
    paths = write_campaign(campaign, args.out, scenario)
    for key, p in paths.items():
        print(f"{key:<8}{p}")
    return 0


def cmd_report(args) -> int:
    config, sets, fits = _fit(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = fit_rows(fits, sets)
    write_fit_table(rows, out / "fits.csv")
    write_curves(sets, fits, out / "curves.csv", points=args.points)
    triples = derive_triples(rows, cap_k=config.cap_k)
    write_triples(triples, out / "triples.csv")
    sections = ["Per-frequency log-normal fits", format_fit_table(rows), "", "Consolidated triples", format_triples(triples)]
    standards = builtin_standards()
    for name, triple in triples.items():
        std_name = args.standard or (name if name in standards else None)
        if std_name is None:
            continue
        if std_name not in standards:
            raise UsageError(f"no standardized values for {std_name!r}")
        sections += ["", compare_report(name, triple, std_name, standards[std_name], args.tol)]
    text = "\n".join(sections) + "\n"
    (out / "summary.txt").write_text(text, encoding="utf-8")
    print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="infrcs", description="RCS characterization toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("fit", help="fit log-normal RCS models per target and frequency")
    f.add_argument("dataset")
    f.add_argument("--config")
    f.add_argument("--out", required=True, help="output directory")
    f.add_argument("--curves", action="store_true", help="also write plot-ready PDF/CDF curves")
    f.add_argument("--points", type=int, default=200)
    f.set_defaults(func=cmd_fit)

    d = sub.add_parser("derive", help="consolidate a fit table into (A, B1, B2) triples")
    d.add_argument("fit_table")
    d.add_argument("--out")
    d.add_argument("--cap-k", type=float, default=3.0)
    d.set_defaults(func=cmd_derive)

    c = sub.add_parser("compare", help="compare a triple with a standardized one")
    c.add_argument("triples")
    c.add_argument("--standard", required=True)
    c.add_argument("--target")
    c.add_argument("--tol", type=float, default=1.0)
    c.add_argument("--out")
    c.set_defaults(func=cmd_compare)

    s = sub.add_parser("sample", help="draw RCS realizations")
    s.add_argument("--target")
    s.add_argument("--triple")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--angles", default="0")
    s.add_argument("--cap-mode", choices=CAP_MODES, default="mean")
    s.add_argument("--b2-form", choices=B2_FORMS, default="cov")
    s.add_argument("--no-cap", action="store_true")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)

    y = sub.add_parser("synth", help="generate a synthetic sounding campaign")
    y.add_argument("--config", help="scenario JSON; built-in default when omitted")
    y.add_argument("--out", required=True, help="output directory")
    y.add_argument("--seed", type=int, required=True)
    y.set_defaults(func=cmd_synth)

    r = sub.add_parser("report", help="fit, derive and compare in one pass")
    r.add_argument("dataset")
    r.add_argument("--config")
    r.add_argument("--out", required=True)
    r.add_argument("--standard")
    r.add_argument("--tol", type=float, default=1.0)
    r.add_argument("--points", type=int, default=200)
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "sample" and not (args.target or args.triple):
        parser.error("sample needs --target or --triple")
    try:
        return args.func(args)
    except RcsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
