"""Command-line entry point.

Subcommands mirror the analysis modules: ingest, decay, chow, premium, hhi,
dea, malmquist, regress, robustness, and report. Every subcommand accepts
--config (JSON) plus flag overrides, writes its outputs under --out-dir, and
finishes with a one-line summary on stdout. Exit codes: 0 success, 1 data or
analysis error, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from datetime import date, datetime, timezone
from pathlib import Path

from . import figures, reports
from .decay import OUTLIER_PRICE_BAND, fit_exponential
from .errors import SchemaError, TokenlabError
from .ingest import (
    RunConfig,
    fetch_catalog,
    file_fingerprint,
    load_factors,
    load_milestones,
    load_shares,
    load_snapshot,
    load_training,
    persist_snapshot,
)
from .records import Quarter

__version__ = "0.1.0"


def _parse_date(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a YYYY-MM-DD date: {text!r}") from None


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="JSON run configuration")
    parser.add_argument("--out-dir", metavar="DIR", default=".",
                        help="directory for emitted files (default: current)")


def _config_from(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {}
    for attr, key in (
        ("min_segment", "chow_min_segment"),
        ("bootstrap_b", "bootstrap_b"),
        ("seed", "bootstrap_seed"),
        ("representative", "malmquist_representative"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = value
    return dataclasses.replace(config, **overrides) if overrides else config


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_run_metadata(out: Path, bundle: reports.ReportBundle) -> None:
    stamp = datetime.now(timezone.utc).isoformat()
    payload = bundle.to_dict(generated_at=stamp)
    payload["version"] = __version__
    (out / "run.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _bundle(config: RunConfig, inputs: dict[str, str | Path]) -> reports.ReportBundle:
    bundle = reports.ReportBundle(config_hash=config.config_hash())
    for name, path in inputs.items():
        bundle.inputs[name] = file_fingerprint(path)
    return bundle


def _load_catalog_records(path: Path):
    """Accept either a persisted snapshot or a raw catalog payload."""
    try:
        return load_snapshot(path).records
    except SchemaError:
        return fetch_catalog("unused", fixture_path=path).records


# ---------------------------------------------------------------------------
# subcommand bodies, shared between single commands and `report --all`

def _emit_decay(records, config, out, bundle, tiers, window=(None, None),
                outlier_band=None) -> str:
    rows = reports.decay_table(records, tiers, config, window, outlier_band)
    path = out / "table2_decay.csv"
    bundle.add_table("T2_decay", path, reports.write_csv(path, reports.DECAY_HEADER, rows))

    series_by_tier, fits_by_tier = {}, {}
    for name in tiers:
        series = reports.series_for(records, name, config.tier_thresholds,
                                    window, outlier_band)
        series_by_tier[name] = series
        fits_by_tier[name] = fit_exponential(series)
    f1_csv, f1_png = out / "fig1_price_evolution.csv", out / "fig1_price_evolution.png"
    figures.price_evolution(records, config.tier_thresholds, f1_csv, f1_png)
    bundle.add_figure("F1_price_evolution", [f1_csv, f1_png])
    f2_csv, f2_png = out / "fig2_decay_fits.csv", out / "fig2_decay_fits.png"
    figures.decay_fits(series_by_tier, fits_by_tier, f2_csv, f2_png)
    bundle.add_figure("F2_decay_fits", [f2_csv, f2_png])
    return f"decay: {len(rows)} tier fit(s) -> {path}"


def _emit_chow(records, config, out, bundle, scan_window=None,
               min_segment=None) -> str:
    main_rows, trace_rows = reports.chow_report(records, config, scan_window, min_segment)
    path = out / "table3_panel_a.csv"
    bundle.add_table("T3_panel_a_break", path,
                     reports.write_csv(path, reports.CHOW_HEADER, main_rows))
    f3_csv, f3_png = out / "fig3_break_trace.csv", out / "fig3_break_trace.png"
    figures.break_trace(trace_rows, main_rows[0][0], f3_csv, f3_png)
    bundle.add_figure("F3_break_trace", [f3_csv, f3_png])
    break_date, f_stat, p_value = main_rows[0][0], main_rows[0][1], main_rows[0][2]
    return (f"chow: best break {break_date} F={f_stat:.3f} p={p_value:.4g} "
            f"({len(trace_rows)} candidates) -> {path}")


def _emit_premium(records, out, bundle) -> str:
    rows = reports.premium_table(records)
    path = out / "table3_panel_b.csv"
    bundle.add_table("T3_panel_b_premium", path,
                     reports.write_csv(path, reports.PREMIUM_HEADER, rows))
    return f"premium: {max(len(rows) - 1, 0)} quarter(s) -> {path}"


def _emit_hhi(shares, out, bundle) -> str:
    rows = reports.concentration_table(shares)
    path = out / "concentration.csv"
    bundle.add_table("concentration", path,
                     reports.write_csv(path, reports.CONCENTRATION_HEADER, rows))
    f8_csv, f8_png = out / "fig8_concentration.csv", out / "fig8_concentration.png"
    figures.concentration_trajectory(rows, f8_csv, f8_png)
    bundle.add_figure("F8_concentration", [f8_csv, f8_png])
    return f"hhi: {len(rows)} period(s) -> {path}"


def _emit_dea(catalog_records, config, out, bundle) -> str:
    score_rows, vendor_rows, ccr, _, dmus, skipped = reports.dea_tables(
        catalog_records, config
    )
    scores_path = out / "dea_scores.csv"
    bundle.add_table("dea_scores", scores_path,
                     reports.write_csv(scores_path, reports.DEA_SCORES_HEADER, score_rows))
    path = out / "table4_panel_a.csv"
    bundle.add_table("T4_panel_a_efficiency", path,
                     reports.write_csv(path, reports.DEA_VENDOR_HEADER, vendor_rows))
    f6_csv, f6_png = out / "fig6_vendor_efficiency.csv", out / "fig6_vendor_efficiency.png"
    figures.vendor_efficiency(vendor_rows, f6_csv, f6_png)
    bundle.add_figure("F6_vendor_efficiency", [f6_csv, f6_png])
    mean_theta = sum(ccr.scores) / len(ccr.scores)
    note = f", {skipped} unscored skipped" if skipped else ""
    return (f"dea: {len(dmus)} models, mean theta {mean_theta:.3f}, "
            f"{len(ccr.frontier)} on frontier{note} -> {path}")


def _emit_malmquist(records, config, out, bundle, quarters=None) -> str:
    rows = reports.malmquist_table(records, config, quarters)
    path = out / "table4_panel_b.csv"
    bundle.add_table("T4_panel_b_malmquist", path,
                     reports.write_csv(path, reports.MALMQUIST_HEADER, rows))
    f7_csv, f7_png = out / "fig7_malmquist.csv", out / "fig7_malmquist.png"
    figures.malmquist_decomposition(rows, f7_csv, f7_png)
    bundle.add_figure("F7_malmquist", [f7_csv, f7_png])
    return f"malmquist: {len(rows)} transition(s) -> {path}"


def _emit_regress(training, milestones, config, out, bundle, factors_path=None) -> str:
    result = reports.regression_bundle(training, milestones, config)
    path = out / "table5_regressions.csv"
    bundle.add_table("T5_regressions", path,
                     reports.write_csv(path, reports.REGRESSION_HEADER, result.table_rows))
    welch_path = out / "unit_cost_welch.csv"
    bundle.add_table("unit_cost_welch", welch_path,
                     reports.write_csv(welch_path, reports.WELCH_HEADER, result.welch_rows))
    f9_csv, f9_png = out / "fig9_training_scatter.csv", out / "fig9_training_scatter.png"
    figures.training_scatter(result.scatter_rows, f9_csv, f9_png)
    bundle.add_figure("F9_training_scatter", [f9_csv, f9_png])
    extra = ""
    if factors_path is not None:
        total, factors = load_factors(factors_path)
        tfp_path = out / "tfp_decomposition.csv"
        bundle.add_table("tfp_decomposition", tfp_path,
                         reports.write_csv(tfp_path, reports.TFP_HEADER,
                                           reports.tfp_table(total, factors)))
        extra = f", TFP decomposition -> {tfp_path.name}"
    return f"regress: {result.matched} matched models -> {path}{extra}"


def _emit_robustness(records, catalog_records, config, out, bundle) -> str:
    rows, trace = reports.robustness_tables(records, catalog_records, config)
    path = out / "table6_robustness.csv"
    bundle.add_table("T6_robustness", path,
                     reports.write_csv(path, reports.ROBUSTNESS_HEADER, rows))
    trace_path = out / "bootstrap_trace.csv"
    bundle.add_table("bootstrap_trace", trace_path,
                     reports.write_csv(trace_path, reports.BOOTSTRAP_TRACE_HEADER, trace))
    return f"robustness: {len(rows)} checks, B={config.bootstrap_b} -> {path}"


# ---------------------------------------------------------------------------
# handlers

def cmd_ingest(args: argparse.Namespace) -> int:
    config = _config_from(args)
    out = _out_dir(args)
    fixture = args.fixture or config.fixture_path
    endpoint = args.endpoint or config.endpoint
    credential = os.environ.get(config.credential_env)
    snapshot = fetch_catalog(
        endpoint,
        credential=credential,
        fixture_path=fixture,
        retries=config.retries,
        backoff=config.backoff,
    )
    target = out / args.snapshot_out
    persist_snapshot(snapshot, target)
    bundle = _bundle(config, {"catalog": fixture} if fixture else {})
    bundle.add_table("catalog_snapshot", target, len(snapshot.records))
    _write_run_metadata(out, bundle)
    print(f"ingest: {len(snapshot.records)} models from {snapshot.source} -> {target}")
    return 0


def cmd_decay(args: argparse.Namespace) -> int:
    config = _config_from(args)
    out = _out_dir(args)
    records = load_milestones(args.input)
    tiers = list(reports.TIER_CHOICES) if args.tier == "all" else [args.tier]
    window = (args.window_start, args.window_end)
    band = tuple(args.outlier_band) if args.outlier_band else (
        OUTLIER_PRICE_BAND if args.drop_outliers else None
    )
    bundle = _bundle(config, {"milestones": args.input})
    print(_emit_decay(records, config, out, bundle, tiers, window, band))
    _write_run_metadata(out, bundle)
    return 0


def cmd_chow(args: argparse.Namespace) -> int:
    config = _config_from(args)
    out = _out_dir(args)
    records = load_milestones(args.input)
    if (args.scan_start is None) != (args.scan_end is None):
        raise TokenlabError("--scan-start and --scan-end must be given together")
    scan_window = (args.scan_start, args.scan_end) if args.scan_start else None
    bundle = _bundle(config, {"milestones": args.input})
    print(_emit_chow(records, config, out, bundle, scan_window, args.min_segment))
    _write_run_metadata(out, bundle)
    return 0


def cmd_premium(args: argparse.Namespace) -> int:
    config = _config_from(args)
    out = _out_dir(args)
    records = load_milestones(args.input)
    bundle = _bundle(config, {"milestones": args.input})
    print(_emit_premium(records, out, bundle))
    _write_run_metadata(out, bundle)
    return 0


def cmd_hhi(args: argparse.Namespace) -> int:
    config = _config_from(args)
    out = _out_dir(args)
    shares = load_shares(args.shares)
    bundle = _bundle(config, {"shares": args.shares})
    print(_emit_hhi(shares, out, bundle))
    _write_run_metadata(out, bundle)
    return 0


def cmd_dea(args: argparse.Namespace) -> int:
    config = _config_from(args)
    out = _out_dir(args)
    catalog_records = _load_catalog_records(Path(args.catalog))
    bundle = _bundle(config, {"catalog": args.catalog})
    print(_emit_dea(catalog_records, config, out, bundle))
    _write_run_metadata(out, bundle)
    return 0


def cmd_malmquist(args: argparse.Namespace) -> int:
    config = _config_from(args)
    out = _out_dir(args)
    records = load_milestones(args.input)
    quarters = None
    if args.quarters:
        quarters = [Quarter.parse(q) for q in args.quarters.split(",") if q]
    bundle = _bundle(config, {"milestones": args.input})
    print(_emit_malmquist(records, config, out, bundle, quarters))
    _write_run_metadata(out, bundle)
    return 0


def cmd_regress(args: argparse.Namespace) -> int:
    config = _config_from(args)
    out = _out_dir(args)
    training = load_training(args.training)
    milestones = load_milestones(args.input)
    inputs = {"training": args.training, "milestones": args.input}
    if args.growth_factors:
        inputs["factors"] = args.growth_factors
    bundle = _bundle(config, inputs)
    print(_emit_regress(training, milestones, config, out, bundle, args.growth_factors))
    _write_run_metadata(out, bundle)
    return 0


def cmd_robustness(args: argparse.Namespace) -> int:
    config = _config_from(args)
    out = _out_dir(args)
    records = load_milestones(args.input)
    catalog_records = _load_catalog_records(Path(args.catalog))
    bundle = _bundle(config, {"milestones": args.input, "catalog": args.catalog})
    print(_emit_robustness(records, catalog_records, config, out, bundle))
    _write_run_metadata(out, bundle)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    config = _config_from(args)
    out = _out_dir(args)
    data = Path(args.data_dir)
    paths = {
        "milestones": data / "milestones.csv",
        "training": data / "training.csv",
        "shares": data / "shares.csv",
        "catalog": data / "catalog.json",
    }
    for name, path in paths.items():
        if not path.exists():
            raise TokenlabError(f"{name} file missing from data dir: {path}")
    factors_path = data / "factors.json"
    if factors_path.exists():
        paths["factors"] = factors_path
    else:
        factors_path = None

    records = load_milestones(paths["milestones"])
    training = load_training(paths["training"])
    shares = load_shares(paths["shares"])
    catalog_records = _load_catalog_records(paths["catalog"])

    bundle = _bundle(config, paths)
    lines = [
        _emit_decay(records, config, out, bundle, list(reports.TIER_CHOICES)),
        _emit_chow(records, config, out, bundle),
        _emit_premium(records, out, bundle),
        _emit_hhi(shares, out, bundle),
        _emit_dea(catalog_records, config, out, bundle),
        _emit_malmquist(records, config, out, bundle),
        _emit_regress(training, milestones=records, config=config, out=out,
                      bundle=bundle, factors_path=factors_path),
        _emit_robustness(records, catalog_records, config, out, bundle),
    ]
    t1_path = out / "table1_summary.csv"
    bundle.add_table(
        "T1_summary", t1_path,
        reports.write_csv(t1_path, reports.SUMMARY_HEADER,
                          reports.summary_table(catalog_records, records, training)),
    )
    _write_run_metadata(out, bundle)
    for line in lines:
        print(line)
    numbers = sorted({n.split("_")[0] for n in bundle.tables if n[0] == "T" and n[1].isdigit()})
    print(f"report: {len(numbers)} tables ({', '.join(numbers)}); "
          f"{len(bundle.figures)} figures; metadata -> {out / 'run.json'}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tokenlab",
        description="Token-price analytics: decay, breaks, market structure, "
                    "efficiency frontiers, and regression reports.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("ingest", help="fetch the price catalog and persist a snapshot")
    _add_common(p)
    p.add_argument("--endpoint", help="catalog base URL (default from config)")
    p.add_argument("--fixture", metavar="PATH",
                   help="read a local payload instead of the network")
    p.add_argument("--snapshot-out", metavar="NAME", default="catalog_snapshot.json",
                   help="snapshot file name under --out-dir")
    p.set_defaults(handler=cmd_ingest)

    p = sub.add_parser("decay", help="tier decay fits (half-life, Moore ratio)")
    _add_common(p)
    p.add_argument("--input", required=True, metavar="CSV", help="milestone panel")
    p.add_argument("--tier", default="all",
                   choices=list(reports.TIER_CHOICES) + ["all"])
    p.add_argument("--window-start", type=_parse_date, metavar="DATE")
    p.add_argument("--window-end", type=_parse_date, metavar="DATE")
    p.add_argument("--drop-outliers", action="store_true",
                   help="drop prices outside the plausible band before fitting")
    p.add_argument("--outlier-band", nargs=2, type=float, metavar=("LOW", "HIGH"))
    p.set_defaults(handler=cmd_decay)

    p = sub.add_parser("chow", help="structural-break scan over the pooled series")
    _add_common(p)
    p.add_argument("--input", required=True, metavar="CSV")
    p.add_argument("--min-segment", type=int, metavar="N",
                   help="minimum observations per segment (default from config)")
    p.add_argument("--scan-start", type=_parse_date, metavar="DATE",
                   help="earliest candidate break date")
    p.add_argument("--scan-end", type=_parse_date, metavar="DATE",
                   help="latest candidate break date")
    p.set_defaults(handler=cmd_chow)

    p = sub.add_parser("premium", help="quarterly reasoning-model price premium")
    _add_common(p)
    p.add_argument("--input", required=True, metavar="CSV")
    p.set_defaults(handler=cmd_premium)

    p = sub.add_parser("hhi", help="market concentration (HHI, CR4, bands)")
    _add_common(p)
    p.add_argument("--shares", required=True, metavar="CSV")
    p.set_defaults(handler=cmd_hhi)

    p = sub.add_parser("dea", help="price-quality efficiency frontier (CCR and BCC)")
    _add_common(p)
    p.add_argument("--catalog", required=True, metavar="PATH",
                   help="catalog snapshot or raw payload JSON")
    p.set_defaults(handler=cmd_dea)

    p = sub.add_parser("malmquist", help="cross-period productivity decomposition")
    _add_common(p)
    p.add_argument("--input", required=True, metavar="CSV")
    p.add_argument("--quarters", metavar="Q1,Q2,...",
                   help="comma-separated quarter labels, e.g. 2024Q1,2024Q4")
    p.add_argument("--representative", choices=("best-ratio", "mean"),
                   help="per-period representative rule (default from config)")
    p.set_defaults(handler=cmd_malmquist)

    p = sub.add_parser("regress", help="training-cost elasticity and unit-cost tests")
    _add_common(p)
    p.add_argument("--training", required=True, metavar="CSV")
    p.add_argument("--input", required=True, metavar="CSV",
                   help="milestone panel for launch-price matching")
    p.add_argument("--growth-factors", metavar="JSON",
                   help="factor shares and price changes for the TFP decomposition")
    p.set_defaults(handler=cmd_regress)

    p = sub.add_parser("robustness", help="bootstrap, sub-sample, and sensitivity checks")
    _add_common(p)
    p.add_argument("--input", required=True, metavar="CSV")
    p.add_argument("--catalog", required=True, metavar="PATH")
    p.add_argument("--bootstrap-b", type=int, metavar="B", dest="bootstrap_b")
    p.add_argument("--seed", type=int, metavar="SEED")
    p.set_defaults(handler=cmd_robustness)

    p = sub.add_parser("report", help="regenerate every table and figure in one pass")
    _add_common(p)
    p.add_argument("--all", action="store_true", required=True,
                   help="emit all tables, figures, and run metadata")
    p.add_argument("--data-dir", required=True, metavar="DIR",
                   help="directory holding milestones.csv, training.csv, "
                        "shares.csv, catalog.json, and optionally factors.json")
    p.set_defaults(handler=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except TokenlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
