"""Figure emission: one data CSV plus one rendered PNG per figure.

Rendering runs on the Agg backend with fixed geometry and no timestamps in
the image metadata, so identical data produces identical bytes.
"""

from __future__ import annotations

from datetime import date
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.dates as mdates  # noqa: E402
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .records import PriceRecord, Tier, classify_tier  # noqa: E402
from .reports import write_csv  # noqa: E402

DPI = 144
TIER_COLORS = {"economy": "#2a9d8f", "mid": "#e9c46a", "flagship": "#e76f51"}


def _save(fig, png_path: Path) -> None:
    fig.savefig(png_path, dpi=DPI, metadata={"Software": None})
    plt.close(fig)


def _axes(title: str, xlabel: str, ylabel: str, figsize=(7.0, 4.2)):
    fig, ax = plt.subplots(figsize=figsize)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3, linewidth=0.5)
    return fig, ax


def _date_axis(ax) -> None:
    ax.xaxis.set_major_locator(mdates.AutoDateLocator())
    ax.xaxis.set_major_formatter(mdates.ConciseDateFormatter(mdates.AutoDateLocator()))


def price_evolution(
    records: Sequence[PriceRecord],
    thresholds: tuple[float, float],
    csv_path: Path,
    png_path: Path,
) -> int:
    rows = [
        (r.observed_date, classify_tier(r.input_price, thresholds).label,
         r.model_id, r.input_price)
        for r in records
    ]
    count = write_csv(csv_path, ("date", "tier", "model_id", "input_price"), rows)

    fig, ax = _axes("Input price over time by tier", "date", "USD per million tokens")
    ax.set_yscale("log")
    for tier in Tier:
        pts = [(r.observed_date, r.input_price) for r in records
               if classify_tier(r.input_price, thresholds) is tier]
        if pts:
            xs, ys = zip(*pts)
            ax.scatter(xs, ys, s=18, label=tier.label,
                       color=TIER_COLORS[tier.label], alpha=0.8)
    _date_axis(ax)
    ax.legend()
    _save(fig, png_path)
    return count


def decay_fits(
    series_by_tier: dict[str, list[tuple[date, float]]],
    fits_by_tier: dict[str, object],
    csv_path: Path,
    png_path: Path,
) -> int:
    """Observed points and fitted exponential curves, one curve per tier."""
    rows = []
    curves = {}
    for tier, series in series_by_tier.items():
        fit = fits_by_tier[tier]
        first = series[0][0] if series else fit.period[0]
        xs = np.linspace(0.0, max((fit.period[1] - fit.period[0]).days / 365.25, 0.1), 60)
        fitted = fit.p0 * np.exp(-fit.decay_rate * xs)
        curve_dates = [
            date.fromordinal(int(first.toordinal() + x * 365.25)) for x in xs
        ]
        curves[tier] = (curve_dates, fitted)
        for d, value in zip(curve_dates, fitted):
            rows.append((tier, d, value))
    count = write_csv(csv_path, ("tier", "date", "fitted_price"), rows)

    fig, ax = _axes("Fitted exponential decay by tier", "date", "USD per million tokens")
    ax.set_yscale("log")
    for tier, series in series_by_tier.items():
        color = TIER_COLORS.get(tier, "#555555")
        if series:
            xs, ys = zip(*series)
            ax.scatter(xs, ys, s=14, alpha=0.5, color=color)
        curve_dates, fitted = curves[tier]
        ax.plot(curve_dates, fitted, color=color, linewidth=1.6, label=tier)
    _date_axis(ax)
    ax.legend()
    _save(fig, png_path)
    return count


def break_trace(
    trace: Sequence[tuple[date, float, float]],
    break_date: date,
    csv_path: Path,
    png_path: Path,
) -> int:
    count = write_csv(csv_path, ("candidate_date", "f_statistic", "p_value"), trace)
    fig, ax = _axes("Structural-break scan", "candidate break date", "Chow F statistic")
    if trace:
        xs = [t[0] for t in trace]
        ys = [t[1] for t in trace]
        ax.plot(xs, ys, marker="o", markersize=3, linewidth=1.2, color="#264653")
    ax.axvline(break_date, color="#e76f51", linestyle="--", linewidth=1.2,
               label=f"break {break_date.isoformat()}")
    _date_axis(ax)
    ax.legend()
    _save(fig, png_path)
    return count


def vendor_efficiency(
    vendor_rows: Sequence[tuple],
    csv_path: Path,
    png_path: Path,
) -> int:
    """Expects (vendor, n, mean_theta, n_frontier) rows, 'all' row last."""
    count = write_csv(
        csv_path, ("vendor", "n_models", "mean_theta_ccr", "n_frontier"), vendor_rows
    )
    plotted = [row for row in vendor_rows if row[0] != "all"]
    fig, ax = _axes("Mean price efficiency by vendor", "mean CCR efficiency", "",
                    figsize=(7.0, 0.35 * max(len(plotted), 6) + 1.2))
    names = [row[0] for row in plotted][::-1]
    values = [row[2] for row in plotted][::-1]
    ax.barh(names, values, color="#2a9d8f")
    ax.set_xlim(0, 1.0)
    _save(fig, png_path)
    return count


def malmquist_decomposition(
    rows: Sequence[tuple],
    csv_path: Path,
    png_path: Path,
) -> int:
    """Expects (from, to, ec, tc, mpi, n_from, n_to) rows."""
    count = write_csv(
        csv_path,
        ("from_period", "to_period", "efficiency_change", "technical_change", "mpi"),
        [(r[0], r[1], r[2], r[3], r[4]) for r in rows],
    )
    fig, ax = _axes("Malmquist decomposition", "transition", "index (log scale)")
    labels = [f"{r[0]}→{r[1]}" for r in rows]
    x = np.arange(len(rows))
    width = 0.27
    for offset, series, label, color in (
        (-width, [r[2] for r in rows], "efficiency change", "#2a9d8f"),
        (0.0, [r[3] for r in rows], "technical change", "#e9c46a"),
        (width, [r[4] for r in rows], "MPI", "#e76f51"),
    ):
        ax.bar(x + offset, series, width=width, label=label, color=color)
    ax.set_yscale("log")
    ax.axhline(1.0, color="#555555", linewidth=0.8)
    ax.set_xticks(x, labels, fontsize=8)
    ax.legend()
    _save(fig, png_path)
    return count


def concentration_trajectory(
    rows: Sequence[tuple],
    csv_path: Path,
    png_path: Path,
) -> int:
    """Expects (period, n_vendors, hhi, cr4, band) rows in period order."""
    count = write_csv(
        csv_path, ("period", "hhi", "cr4"), [(r[0], r[2], r[3]) for r in rows]
    )
    fig, ax = _axes("Market concentration", "period", "HHI")
    labels = [r[0] for r in rows]
    hhi_values = [r[2] for r in rows]
    x = np.arange(len(rows))
    ax.plot(x, hhi_values, marker="o", color="#264653", label="HHI")
    ax.axhline(2500, color="#e76f51", linestyle="--", linewidth=0.9, label="high floor")
    ax.axhline(1500, color="#e9c46a", linestyle="--", linewidth=0.9, label="moderate floor")
    ax.set_xticks(x, labels, fontsize=8)
    ax.set_ylim(0, max(hhi_values + [2600]) * 1.1)
    twin = ax.twinx()
    twin.plot(x, [r[3] for r in rows], marker="s", color="#2a9d8f", label="CR4")
    twin.set_ylabel("CR4 (%)")
    twin.set_ylim(0, 100)
    handles, labels_a = ax.get_legend_handles_labels()
    handles2, labels_b = twin.get_legend_handles_labels()
    ax.legend(handles + handles2, labels_a + labels_b, fontsize=8)
    _save(fig, png_path)
    return count


def training_scatter(
    rows: Sequence[tuple],
    csv_path: Path,
    png_path: Path,
) -> int:
    """Expects (model_id, vendor, training_compute, price, parameter_count)."""
    count = write_csv(
        csv_path,
        ("model_id", "vendor", "training_compute_flop", "launch_input_price", "parameter_count"),
        rows,
    )
    fig, ax = _axes("Launch price vs training compute", "training compute (FLOP)",
                    "launch input price (USD/M)")
    ax.set_xscale("log")
    ax.set_yscale("log")
    xs = [r[2] for r in rows]
    ys = [r[3] for r in rows]
    ax.scatter(xs, ys, s=22, color="#264653", alpha=0.85)
    if len(rows) >= 3:
        lx, ly = np.log(xs), np.log(ys)
        slope, intercept = np.polyfit(lx, ly, 1)
        grid = np.linspace(lx.min(), lx.max(), 50)
        ax.plot(np.exp(grid), np.exp(intercept + slope * grid),
                color="#e76f51", linewidth=1.4,
                label=f"elasticity {slope:.3f}")
        ax.legend()
    _save(fig, png_path)
    return count
