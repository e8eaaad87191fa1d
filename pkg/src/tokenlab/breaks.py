"""Chow structural-break test and candidate-date scanning.

Works on a series of (date, y) pairs where y is typically log price. The
test compares a pooled intercept+slope regression against separate fits on
the two segments either side of a candidate date; the scan walks a grid of
month-start candidates and returns the strongest one plus the full trace.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import InfeasibleCandidateError, InsufficientDataError
from .records import years_since

Series = Sequence[tuple[date, float]]

ZERO_SSR_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ChowResult:
    """Strongest break found by a scan: date, test value, and segment sizes."""

    break_date: date
    f_statistic: float
    p_value: float
    n_pre: int
    n_post: int


def _segment_ssr(t: np.ndarray, y: np.ndarray) -> float:
    design = np.column_stack([np.ones(t.size), t])
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return float(resid @ resid)


def chow_at(series: Series, candidate: date, k: int = 2) -> tuple[float, float]:
    """Chow F-statistic and p-value for a break at the candidate date.

    Observations strictly before the candidate form the first segment. Both
    segments need at least k + 1 observations. With all three residual sums
    effectively zero (a perfectly explained pooled series) the statistic is
    defined as 0: a perfect single line carries no break evidence.

    Returns
    -------
    (F, p) with p from the F(k, n - 2k) upper tail.
    """
    points = sorted(series, key=lambda dp: dp[0])
    n = len(points)
    dates = [d for d, _ in points]
    t = np.array([years_since(d, dates[0]) for d in dates])
    y = np.array([v for _, v in points], dtype=float)

    n_pre = sum(1 for d in dates if d < candidate)
    n_post = n - n_pre
    if n_pre < k + 1 or n_post < k + 1:
        raise InfeasibleCandidateError(
            f"candidate {candidate} leaves segments of {n_pre}/{n_post}; "
            f"need at least {k + 1} each"
        )

    ssr_pooled = _segment_ssr(t, y)
    ssr_pre = _segment_ssr(t[:n_pre], y[:n_pre])
    ssr_post = _segment_ssr(t[n_pre:], y[n_pre:])

    if ssr_pooled <= ZERO_SSR_TOLERANCE:
        return 0.0, 1.0
    denom = ssr_pre + ssr_post
    dof = n - 2 * k
    if denom <= ZERO_SSR_TOLERANCE:
        # Segments fit perfectly while the pooled line does not.
        return float("inf"), 0.0
    f = ((ssr_pooled - ssr_pre - ssr_post) / k) / (denom / dof)
    f = max(f, 0.0)
    return float(f), float(stats.f.sf(f, k, dof))


def _month_starts(first: date, last: date) -> list[date]:
    year, month = first.year, first.month
    if first.day > 1:
        year, month = (year + 1, 1) if month == 12 else (year, month + 1)
    out = []
    while date(year, month, 1) <= last:
        out.append(date(year, month, 1))
        year, month = (year + 1, 1) if month == 12 else (year, month + 1)
    return out


def chow_scan(
    series: Series,
    window: tuple[date, date] | None = None,
    min_segment: int = 8,
    k: int = 2,
) -> tuple[ChowResult, list[tuple[date, float, float]]]:
    """Scan month-start candidates and return the strongest break.

    Candidates are the first day of each month inside the window (default:
    the data range) that leave at least min_segment observations on each
    side. Ties in F go to the earlier date. Also returns the full
    (candidate, F, p) trace for plotting.
    """
    points = sorted(series, key=lambda dp: dp[0])
    if len(points) < 2 * max(min_segment, k + 1):
        raise InsufficientDataError(
            f"need at least {2 * max(min_segment, k + 1)} observations, got {len(points)}"
        )
    dates = [d for d, _ in points]
    lo = window[0] if window else dates[0]
    hi = window[1] if window else dates[-1]

    trace: list[tuple[date, float, float]] = []
    best: tuple[float, date, int] | None = None
    for candidate in _month_starts(lo, hi):
        n_pre = sum(1 for d in dates if d < candidate)
        n_post = len(dates) - n_pre
        if n_pre < min_segment or n_post < min_segment:
            continue
        f, p = chow_at(points, candidate, k=k)
        trace.append((candidate, f, p))
        if best is None or f > best[0]:
            best = (f, candidate, n_pre)
    if best is None:
        raise InfeasibleCandidateError(
            "no candidate leaves both segments at the minimum size"
        )
    f_best, date_best, n_pre = best
    p_best = next(p for d, f, p in trace if d == date_best)
    return (
        ChowResult(
            break_date=date_best,
            f_statistic=f_best,
            p_value=p_best,
            n_pre=n_pre,
            n_post=len(dates) - n_pre,
        ),
        trace,
    )
