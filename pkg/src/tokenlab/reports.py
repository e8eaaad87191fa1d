"""Analysis orchestration and delimited report emission.

Every public emitter here returns (header, rows) so the CLI can write the
file and record its row count in one place. Formatting is centralized in
fmt(): identical inputs produce identical bytes, which is what the
end-to-end determinism guarantee rests on.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import econometrics
from .breaks import chow_scan
from .decay import (
    DecayFit,
    compare_specifications,
    filter_outliers,
    filter_window,
    fit_exponential,
    moore_ratio,
    wald_decay_diff,
)
from .errors import InsufficientDataError, ValidationError
from .frontier import (
    Dmu,
    ReturnsToScale,
    bcc_efficiency,
    ccr_efficiency,
    malmquist,
    sensitivity_quality,
)
from .ingest import RunConfig
from .market import concentration, premium_average, reasoning_premium
from .records import (
    PriceRecord,
    Quarter,
    Region,
    Tier,
    TrainingRecord,
    blended_price,
    classify_tier,
    quarter_of,
)

TIER_CHOICES = ("economy", "mid", "flagship", "pooled")


def fmt(value) -> str:
    """Render one CSV cell deterministically."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.10g}"
    if isinstance(value, (np.integer, int)):
        return str(int(value))
    if isinstance(value, date):
        return value.isoformat()
    if isinstance(value, Tier):
        return value.label
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> int:
    """Write rows through fmt(); returns the data row count."""
    path = Path(path)
    count = 0
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(cell) for cell in row])
            count += 1
    return count


# ---------------------------------------------------------------------------
# series construction

def tier_series(
    records: Sequence[PriceRecord],
    tier: Tier,
    thresholds: tuple[float, float] = None,
) -> list[tuple[date, float]]:
    """Input-price series for one tier, classified per observation."""
    kwargs = {} if thresholds is None else {"thresholds": thresholds}
    return [
        (r.observed_date, r.input_price)
        for r in records
        if classify_tier(r.input_price, **kwargs) is tier
    ]


def pooled_series(records: Sequence[PriceRecord]) -> list[tuple[date, float]]:
    return [(r.observed_date, r.input_price) for r in records]


def series_for(
    records: Sequence[PriceRecord],
    tier_name: str,
    thresholds: tuple[float, float] = None,
    window: tuple[date | None, date | None] = (None, None),
    outlier_band: tuple[float, float] | None = None,
) -> list[tuple[date, float]]:
    """Resolve a tier keyword ('economy'..'pooled') to a filtered series."""
    if tier_name == "pooled":
        series = pooled_series(records)
    else:
        series = tier_series(records, Tier.parse(tier_name), thresholds)
    start, end = window
    if start is not None or end is not None:
        series = filter_window(series, start, end)
    if outlier_band is not None:
        series = filter_outliers(series, outlier_band)
    return series


def dmus_from_records(
    records: Sequence[PriceRecord],
    weights: tuple[float, float],
) -> tuple[list[Dmu], list[PriceRecord], int]:
    """Pair each quality-scored record with its (blended price -> quality) DMU.

    Returns (dmus, matching records, count skipped for missing quality).
    """
    dmus, kept, skipped = [], [], 0
    for r in records:
        if r.quality_score is None:
            skipped += 1
            continue
        dmus.append(Dmu.single(r.model_id, blended_price(r.input_price, r.output_price, weights), r.quality_score))
        kept.append(r)
    return dmus, kept, skipped


def quarterly_dmus(
    records: Sequence[PriceRecord],
    weights: tuple[float, float],
) -> dict[Quarter, list[Dmu]]:
    buckets: dict[Quarter, list[Dmu]] = {}
    for r in records:
        if r.quality_score is None:
            continue
        dmu = Dmu.single(
            r.model_id,
            blended_price(r.input_price, r.output_price, weights),
            r.quality_score,
        )
        buckets.setdefault(quarter_of(r.observed_date), []).append(dmu)
    return dict(sorted(buckets.items()))


# ---------------------------------------------------------------------------
# table emitters

DECAY_HEADER = (
    "tier", "n", "p0_usd_per_m", "decay_rate_per_year", "decay_rate_se",
    "half_life_years", "moore_ratio", "r_squared", "window_start", "window_end",
)


def decay_table(
    records: Sequence[PriceRecord],
    tiers: Sequence[str],
    config: RunConfig,
    window: tuple[date | None, date | None] = (None, None),
    outlier_band: tuple[float, float] | None = None,
) -> list[tuple]:
    rows = []
    for name in tiers:
        series = series_for(records, name, config.tier_thresholds, window, outlier_band)
        fit = fit_exponential(series)
        rows.append(
            (
                name, fit.n, fit.p0, fit.decay_rate, fit.decay_rate_se,
                fit.half_life, moore_ratio(fit.half_life), fit.r_squared,
                fit.period[0], fit.period[1],
            )
        )
    return rows


CHOW_HEADER = ("break_date", "f_statistic", "p_value", "n_pre", "n_post", "n_total")
CHOW_TRACE_HEADER = ("candidate_date", "f_statistic", "p_value")


def chow_report(
    records: Sequence[PriceRecord],
    config: RunConfig,
    scan_window: tuple[date, date] | None = None,
    min_segment: int | None = None,
    k: int = 2,
):
    # the scan window bounds candidate break dates; every candidate's F is
    # still computed on the full pooled series
    series = [
        (d, math.log(p))
        for d, p in series_for(records, "pooled", config.tier_thresholds)
    ]
    result, trace = chow_scan(
        series,
        window=scan_window,
        min_segment=config.chow_min_segment if min_segment is None else min_segment,
        k=k,
    )
    main = [(result.break_date, result.f_statistic, result.p_value,
             result.n_pre, result.n_post, result.n_pre + result.n_post)]
    trace_rows = [(d, f, p) for d, f, p in trace]
    return main, trace_rows


PREMIUM_HEADER = (
    "quarter", "mean_reasoning_price", "mean_nonreasoning_price",
    "premium_ratio", "n_reasoning", "n_nonreasoning",
)


def premium_table(records: Sequence[PriceRecord]) -> list[tuple]:
    """Reasoning premium per quarter that has both model groups."""
    quarters = sorted({quarter_of(r.observed_date) for r in records})
    rows, computed = [], []
    for q in quarters:
        try:
            row = reasoning_premium(records, q)
        except ValidationError:
            continue
        computed.append(row)
        rows.append(
            (str(q), row.mean_reasoning_price, row.mean_nonreasoning_price,
             row.premium, row.n_reasoning, row.n_nonreasoning)
        )
    if computed:
        rows.append(("average", None, None, premium_average(computed), None, None))
    return rows


CONCENTRATION_HEADER = ("period", "n_vendors", "hhi", "cr4", "band")


def concentration_table(shares: dict[str, list[tuple[str, float]]]) -> list[tuple]:
    rows = []
    for period, vendor_shares in shares.items():
        result = concentration(period, vendor_shares)
        rows.append(
            (period, len(vendor_shares), result.hhi, result.cr4, result.band.value)
        )
    return rows


DEA_SCORES_HEADER = (
    "model_id", "vendor", "blended_price", "quality_score",
    "theta_ccr", "theta_bcc", "on_frontier",
)
DEA_VENDOR_HEADER = ("vendor", "n_models", "mean_theta_ccr", "n_frontier")


def dea_tables(records: Sequence[PriceRecord], config: RunConfig):
    """Per-model scores plus the vendor efficiency summary (CCR based)."""
    dmus, kept, skipped = dmus_from_records(records, config.blend_weights)
    if not dmus:
        raise InsufficientDataError("no records carry a quality score")
    ccr = ccr_efficiency(dmus, tol=config.dea_tolerance)
    bcc = bcc_efficiency(dmus, tol=config.dea_tolerance)
    frontier = set(ccr.frontier)

    score_rows = []
    by_vendor: dict[str, list[float]] = {}
    for record, dmu, s_ccr, s_bcc in zip(kept, dmus, ccr.scores, bcc.scores):
        score_rows.append(
            (dmu.id, record.vendor, dmu.inputs[0], dmu.outputs[0],
             s_ccr, s_bcc, dmu.id in frontier)
        )
        by_vendor.setdefault(record.vendor, []).append(s_ccr)

    vendor_rows = []
    for vendor, scores in by_vendor.items():
        n_front = sum(
            1 for r, d in zip(kept, dmus) if r.vendor == vendor and d.id in frontier
        )
        vendor_rows.append((vendor, len(scores), float(np.mean(scores)), n_front))
    # highest mean efficiency first; name breaks exact ties
    vendor_rows.sort(key=lambda row: (-row[2], row[0]))
    vendor_rows.append(
        ("all", len(dmus), float(np.mean(ccr.scores)), len(frontier))
    )
    return score_rows, vendor_rows, ccr, bcc, dmus, skipped


MALMQUIST_HEADER = (
    "from_period", "to_period", "efficiency_change", "technical_change",
    "mpi", "n_from", "n_to",
)


def malmquist_table(
    records: Sequence[PriceRecord],
    config: RunConfig,
    quarters: Sequence[Quarter] | None = None,
) -> list[tuple]:
    buckets = quarterly_dmus(records, config.blend_weights)
    if quarters is None:
        selected = [q for q, dmus in buckets.items() if len(dmus) >= 2]
    else:
        missing = [str(q) for q in quarters if q not in buckets]
        if missing:
            raise InsufficientDataError(
                f"no quality-scored records in {', '.join(missing)}"
            )
        selected = list(quarters)
    if len(selected) < 2:
        raise InsufficientDataError("need at least two periods with scored models")
    rows = []
    for q_from, q_to in zip(selected, selected[1:]):
        result = malmquist(
            buckets[q_from],
            buckets[q_to],
            representative_rule=config.malmquist_representative,
            tol=config.dea_tolerance,
        )
        rows.append(
            (str(q_from), str(q_to), result.ec, result.tc, result.mpi,
             len(buckets[q_from]), len(buckets[q_to]))
        )
    return rows


REGRESSION_HEADER = (
    "specification", "beta_ln_compute", "se_ln_compute", "se_type",
    "p_ln_compute", "beta_ln_params", "r_squared", "n",
)
WELCH_HEADER = (
    "group_a", "group_b", "mean_a", "mean_b", "n_a", "n_b",
    "t_statistic", "df", "p_value",
)


@dataclass(frozen=True)
class RegressionBundle:
    table_rows: list[tuple]
    welch_rows: list[tuple]
    scatter_rows: list[tuple]
    matched: int


def match_training_prices(
    training: Sequence[TrainingRecord],
    milestones: Sequence[PriceRecord],
) -> list[tuple[TrainingRecord, float]]:
    """Pair each trained model with its launch input price from the panel.

    The earliest panel observation for the model id wins; unmatched models
    are dropped with a warning so the regression sample stays transparent.
    """
    earliest: dict[str, PriceRecord] = {}
    for r in milestones:
        prior = earliest.get(r.model_id)
        if prior is None or r.observed_date < prior.observed_date:
            earliest[r.model_id] = r
    matched, unmatched = [], []
    for t in training:
        record = earliest.get(t.model_id)
        if record is None:
            unmatched.append(t.model_id)
        else:
            matched.append((t, record.input_price))
    if unmatched:
        warnings.warn(
            f"dropping {len(unmatched)} training record(s) without a price match: "
            + ", ".join(sorted(unmatched)),
            stacklevel=2,
        )
    return matched


def regression_bundle(
    training: Sequence[TrainingRecord],
    milestones: Sequence[PriceRecord],
    config: RunConfig,
) -> RegressionBundle:
    matched = match_training_prices(training, milestones)
    if len(matched) < 3:
        raise InsufficientDataError(
            f"need at least 3 matched training records, have {len(matched)}"
        )
    ln_price = np.log([price for _, price in matched])
    ln_compute = np.log([t.training_compute for t, _ in matched])
    ln_params = np.log([t.parameter_count for t, _ in matched])
    vendors = [t.vendor for t, _ in matched]
    X = econometrics.add_intercept(np.column_stack([ln_compute]))
    names = ("intercept", "ln_compute")

    base = econometrics.ols(ln_price, X, names=names)
    robust = econometrics.with_hc3(base, X)
    wins = econometrics.ols(
        econometrics.winsorize(ln_price, config.winsor_lower, config.winsor_upper),
        X,
        names=names,
    )
    fe = econometrics.fixed_effects(
        ln_price,
        np.column_stack([ln_compute, ln_params]),
        vendors,
        names=("ln_compute", "ln_params"),
    )
    j = fe.names.index("ln_compute")
    jp = fe.names.index("ln_params")

    table_rows = [
        ("ols", base.coefficients[1], base.ols_se[1], "ols",
         base.p_values[1], None, base.r_squared, base.n),
        ("ols_hc3", robust.coefficients[1], robust.hc3_se[1], "hc3",
         robust.p_values[1], None, robust.r_squared, robust.n),
        ("winsorized", wins.coefficients[1], wins.ols_se[1], "ols",
         wins.p_values[1], None, wins.r_squared, wins.n),
        ("vendor_fe", fe.coefficients[j], fe.ols_se[j], "ols",
         fe.p_values[j], fe.coefficients[jp], fe.r_squared, fe.n),
    ]

    us = [t.unit_cost for t, _ in matched if t.region is Region.US_EU]
    cn = [t.unit_cost for t, _ in matched if t.region is Region.CN]
    welch_rows = []
    if len(us) >= 2 and len(cn) >= 2:
        t_stat, df, p = econometrics.welch_t(cn, us)
        welch_rows.append(
            ("CN", "US_EU", float(np.mean(cn)), float(np.mean(us)),
             len(cn), len(us), t_stat, df, p)
        )

    scatter_rows = [
        (t.model_id, t.vendor, t.training_compute, price, t.parameter_count)
        for t, price in matched
    ]
    return RegressionBundle(table_rows, welch_rows, scatter_rows, len(matched))


TFP_HEADER = ("component", "share", "log_price_change", "contribution", "percent_of_total")


def tfp_table(total: float, factors: Sequence[tuple[str, float, float]]) -> list[tuple]:
    accounting = econometrics.growth_accounting(total, factors)
    rows = [("total", None, None, accounting.total_change, 100.0)]
    for f in accounting.factors:
        rows.append((f.name, f.share, f.price_change, f.contribution, f.percent_of_total))
    rows.append(("tfp_residual", None, None, accounting.residual, accounting.residual_percent))
    return rows


ROBUSTNESS_HEADER = ("check", "detail", "metric", "value")
BOOTSTRAP_TRACE_HEADER = ("tier", "replicate", "decay_rate")


def robustness_tables(
    records: Sequence[PriceRecord],
    catalog_records: Sequence[PriceRecord],
    config: RunConfig,
):
    rows: list[tuple] = []
    trace: list[tuple] = []

    def decay_statistic(sample):
        return fit_exponential(sample).decay_rate

    for name in TIER_CHOICES:
        series = series_for(records, name, config.tier_thresholds)
        summary = econometrics.bootstrap(
            series, decay_statistic, config.bootstrap_b, config.bootstrap_seed
        )
        rows.extend(
            [
                ("bootstrap_decay", name, "fraction_positive", summary.fraction_positive),
                ("bootstrap_decay", name, "ci_lower", summary.ci_lower),
                ("bootstrap_decay", name, "ci_upper", summary.ci_upper),
                ("bootstrap_decay", name, "n_failed", summary.n_failed),
            ]
        )
        trace.extend(
            (name, r, value)
            for r, value in zip(summary.replicate_indices, summary.replicates)
        )

    pooled = series_for(records, "pooled", config.tier_thresholds)
    by_region = {
        region: [
            (r.observed_date, r.input_price) for r in records if r.region is region
        ]
        for region in (Region.US_EU, Region.CN)
    }
    try:
        fit_us = fit_exponential(by_region[Region.US_EU])
        fit_cn = fit_exponential(by_region[Region.CN])
        w, p = wald_decay_diff(fit_us, fit_cn)
        rows.extend(
            [
                ("wald_region_decay", "US_EU_vs_CN", "lambda_us_eu", fit_us.decay_rate),
                ("wald_region_decay", "US_EU_vs_CN", "lambda_cn", fit_cn.decay_rate),
                ("wald_region_decay", "US_EU_vs_CN", "w_statistic", w),
                ("wald_region_decay", "US_EU_vs_CN", "p_value", p),
            ]
        )
    except InsufficientDataError:
        rows.append(("wald_region_decay", "US_EU_vs_CN", "status", "insufficient data"))

    dmus, _, _ = dmus_from_records(catalog_records, config.blend_weights)
    if dmus:
        ccr = ccr_efficiency(dmus, tol=config.dea_tolerance)
        bcc = bcc_efficiency(dmus, tol=config.dea_tolerance)
        rows.append(
            ("ccr_vs_bcc", "all_models", "spearman_rho",
             econometrics.spearman(ccr.scores, bcc.scores))
        )
        for label, shift in (("plus_20pct", 0.20), ("minus_20pct", -0.20)):
            _, rho = sensitivity_quality(dmus, shift, tol=config.dea_tolerance)
            rows.append(("quality_sensitivity", label, "spearman_rho", rho))

    for name in TIER_CHOICES:
        series = series_for(records, name, config.tier_thresholds)
        try:
            comparison = compare_specifications(series)
        except (InsufficientDataError, ValidationError):
            continue
        for fit in comparison.fits:
            rows.append(("functional_form", name, f"aic_{fit.form}", fit.aic))
        for form in comparison.unavailable:
            rows.append(("functional_form", name, f"aic_{form}", "unavailable"))
        rows.append(("functional_form", name, "winner", comparison.winner))

    return rows, trace


SUMMARY_HEADER = ("group", "variable", "n", "mean", "median", "sd", "min", "max", "note")


def _stats_row(group: str, variable: str, values: Sequence[float], note: str = "") -> tuple:
    arr = np.asarray(list(values), dtype=float)
    n = arr.size
    if n == 0:
        return (group, variable, 0, None, None, None, None, None, note or "no data")
    sd = float(np.std(arr, ddof=1)) if n > 1 else None
    return (
        group, variable, n, float(np.mean(arr)), float(np.median(arr)),
        sd, float(np.min(arr)), float(np.max(arr)), note,
    )


def summary_table(
    cross_section: Sequence[PriceRecord],
    panel: Sequence[PriceRecord],
    training: Sequence[TrainingRecord],
) -> list[tuple]:
    """Table of sample moments; standard deviations use the n-1 convention."""
    rows = []
    if cross_section:
        rows.append(
            _stats_row("cross_section", "input_price", [r.input_price for r in cross_section])
        )
        rows.append(
            _stats_row("cross_section", "output_price", [r.output_price for r in cross_section])
        )
        quality = [r.quality_score for r in cross_section if r.quality_score is not None]
        missing = len(cross_section) - len(quality)
        rows.append(
            _stats_row(
                "cross_section", "quality_score", quality,
                note=f"missing for {missing} models" if missing else "",
            )
        )
    if panel:
        rows.append(_stats_row("panel", "input_price", [r.input_price for r in panel]))
        rows.append(_stats_row("panel", "output_price", [r.output_price for r in panel]))
    if training:
        rows.append(
            _stats_row("training", "training_cost_usd", [t.training_cost for t in training])
        )
        rows.append(
            _stats_row("training", "training_compute_flop", [t.training_compute for t in training])
        )
        rows.append(
            _stats_row("training", "parameter_count", [t.parameter_count for t in training])
        )
    return rows


# ---------------------------------------------------------------------------
# bundle metadata

@dataclass
class ReportBundle:
    """Everything one run emitted, for run.json and the summary line."""

    config_hash: str
    inputs: dict[str, str] = field(default_factory=dict)
    tables: dict[str, dict] = field(default_factory=dict)
    figures: dict[str, list[str]] = field(default_factory=dict)

    def add_table(self, name: str, path: Path, rows: int) -> None:
        self.tables[name] = {"path": path.name, "rows": rows}

    def add_figure(self, name: str, paths: Sequence[Path]) -> None:
        self.figures[name] = [p.name for p in paths]

    def to_dict(self, generated_at: str) -> dict:
        return {
            "config_hash": self.config_hash,
            "inputs": self.inputs,
            "tables": self.tables,
            "figures": self.figures,
            "generated_at": generated_at,
        }
