"""Exponential price-decay estimation and functional-form comparison.

The headline estimator fits ln(price) on elapsed years by least squares,
which is the exact minimizer of the log-space problem; half-life and the
Moore ratio (2.0 / half-life, >1 meaning faster than a two-year doubling
benchmark) are derived from the decay rate. A five-form comparison refits
everything in raw price space so AIC values are commensurable across forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date
from typing import Sequence

import numpy as np
from scipy import stats

from .econometrics import add_intercept, ols
from .errors import InsufficientDataError, ValidationError
from .records import years_since

# Outlier rule used by the robustness harness: drop prices outside this band.
OUTLIER_PRICE_BAND = (0.05, 100.0)

Series = Sequence[tuple[date, float]]


@dataclass(frozen=True)
class DecayFit:
    """Fitted exponential decay for one price series.

    p0 is the fitted price at the series' first observation date; decay_rate
    is per year. rss is the residual sum of squares in log space, the space
    the fit and r_squared are computed in.
    """

    p0: float
    decay_rate: float
    half_life: float
    r_squared: float
    n: int
    period: tuple[date, date]
    rss: float
    decay_rate_se: float


@dataclass(frozen=True)
class FormFit:
    """One functional form fitted in raw price space."""

    form: str
    params: tuple[float, ...]
    n_params: int
    ssr: float
    aic: float


@dataclass(frozen=True)
class SpecComparison:
    """AIC comparison of the five candidate functional forms."""

    fits: tuple[FormFit, ...]
    unavailable: tuple[str, ...]
    winner: str


def _prepare(series: Series) -> tuple[list[date], np.ndarray, np.ndarray]:
    points = sorted(series, key=lambda dp: dp[0])
    if len(points) < 3:
        raise InsufficientDataError(f"need at least 3 observations, got {len(points)}")
    dates = [d for d, _ in points]
    prices = np.array([p for _, p in points], dtype=float)
    if np.any(prices <= 0):
        raise ValidationError("all prices must be positive")
    if len(set(dates)) < 2:
        raise InsufficientDataError("need at least 2 distinct observation dates")
    t = np.array([years_since(d, dates[0]) for d in dates])
    return dates, t, prices


def fit_exponential(series: Series) -> DecayFit:
    """Fit P(t) = p0 * exp(-decay_rate * t) by least squares on log price.

    t is measured in years (days / 365.25) since the series' first
    observation. R-squared and the residual sum of squares are reported in
    log space; the decay-rate standard error comes from the usual slope
    variance formula.
    """
    dates, t, prices = _prepare(series)
    result = ols(np.log(prices), add_intercept(t), names=("intercept", "t"))
    intercept, slope = result.coefficients
    decay_rate = -float(slope)
    return DecayFit(
        p0=float(np.exp(intercept)),
        decay_rate=decay_rate,
        half_life=half_life(decay_rate),
        r_squared=result.r_squared,
        n=len(dates),
        period=(dates[0], dates[-1]),
        rss=float(result.residuals @ result.residuals),
        decay_rate_se=float(result.ols_se[1]),
    )


def half_life(decay_rate: float) -> float:
    """Years for the price to halve: ln(2)/rate, +inf for a non-decaying series."""
    if not math.isfinite(decay_rate):
        raise ValidationError(f"decay rate must be finite, got {decay_rate}")
    if decay_rate <= 0:
        return math.inf
    return math.log(2.0) / decay_rate


def moore_ratio(half_life_years: float) -> float:
    """Speed relative to a two-year halving benchmark; >1 is faster."""
    if half_life_years == math.inf:
        return 0.0
    if not half_life_years > 0:
        raise ValidationError(f"half-life must be positive, got {half_life_years}")
    return 2.0 / half_life_years


def filter_window(
    series: Series,
    start: date | None = None,
    end: date | None = None,
) -> list[tuple[date, float]]:
    """Keep observations with start <= date <= end (either bound optional)."""
    out = []
    for d, p in series:
        if start is not None and d < start:
            continue
        if end is not None and d > end:
            continue
        out.append((d, p))
    return out


def filter_outliers(
    series: Series,
    band: tuple[float, float] = OUTLIER_PRICE_BAND,
) -> list[tuple[date, float]]:
    """Drop observations priced outside the band (robustness-check rule)."""
    low, high = band
    return [(d, p) for d, p in series if low <= p <= high]


def wald_decay_diff(fit_a: DecayFit, fit_b: DecayFit) -> tuple[float, float]:
    """Wald test of equal decay rates between two independent fits.

    W = (rate_a - rate_b)^2 / (se_a^2 + se_b^2), referred to chi-square(1).
    """
    if not (fit_a.decay_rate_se > 0 and fit_b.decay_rate_se > 0):
        raise ValidationError("both fits need positive decay-rate standard errors")
    w = (fit_a.decay_rate - fit_b.decay_rate) ** 2 / (
        fit_a.decay_rate_se**2 + fit_b.decay_rate_se**2
    )
    return float(w), float(stats.chi2.sf(w, 1))


def _aic(n: int, ssr: float, k: int) -> float:
    if ssr <= 0.0:
        return -math.inf
    return n * math.log(ssr / n) + 2 * k


def _lstsq_ssr(design: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, float]:
    coef, _, _, _ = np.linalg.lstsq(design, target, rcond=None)
    resid = target - design @ coef
    return coef, float(resid @ resid)


def _fit_exponential_raw(t: np.ndarray, p: np.ndarray) -> tuple[tuple[float, float], float]:
    # Seed from the log-space line, then refine in raw space by damped
    # Gauss-Newton so this form's SSR is commensurable with the others.
    coef, _ = _lstsq_ssr(add_intercept(t), np.log(p))
    p0, rate = float(np.exp(coef[0])), float(-coef[1])
    mu = 1e-8
    ssr_prev = float(np.sum((p - p0 * np.exp(-rate * t)) ** 2))
    for _ in range(200):
        decay = np.exp(-rate * t)
        resid = p - p0 * decay
        jac = np.column_stack([decay, -p0 * t * decay])
        lhs = jac.T @ jac + mu * np.eye(2)
        step = np.linalg.solve(lhs, jac.T @ resid)
        cand_p0, cand_rate = p0 + step[0], rate + step[1]
        ssr_cand = float(np.sum((p - cand_p0 * np.exp(-cand_rate * t)) ** 2))
        if ssr_cand <= ssr_prev:
            p0, rate = float(cand_p0), float(cand_rate)
            if ssr_prev - ssr_cand <= 1e-14 * (1.0 + ssr_prev):
                ssr_prev = ssr_cand
                break
            ssr_prev = ssr_cand
            mu = max(mu / 4.0, 1e-12)
        else:
            mu *= 8.0
            if mu > 1e8:
                break
    return (p0, rate), ssr_prev


def _month_starts(first: date, last: date) -> list[date]:
    months = []
    year, month = first.year, first.month
    if first.day > 1:
        year, month = (year + 1, 1) if month == 12 else (year, month + 1)
    while date(year, month, 1) <= last:
        months.append(date(year, month, 1))
        year, month = (year + 1, 1) if month == 12 else (year, month + 1)
    return months


def compare_specifications(series: Series) -> SpecComparison:
    """Fit five functional forms in raw price space and rank them by AIC.

    Forms and parameter counts: exponential (2), linear (2), log-linear (2,
    price on ln(1+t)), quadratic (3), piecewise-linear (4: two continuous
    segments, knot chosen by SSR grid search over month starts needing at
    least 3 points per side). AIC = n*ln(SSR/n) + 2k; ties break toward the
    form with fewer parameters.
    """
    dates, t, p = _prepare(series)
    n = len(p)
    if n < 6:
        raise InsufficientDataError(f"form comparison needs n >= 6, got {n}")

    fits: list[FormFit] = []
    unavailable: list[str] = []

    params, ssr = _fit_exponential_raw(t, p)
    fits.append(FormFit("exponential", params, 2, ssr, _aic(n, ssr, 2)))

    coef, ssr = _lstsq_ssr(add_intercept(t), p)
    fits.append(FormFit("linear", tuple(coef), 2, ssr, _aic(n, ssr, 2)))

    coef, ssr = _lstsq_ssr(add_intercept(np.log1p(t)), p)
    fits.append(FormFit("log-linear", tuple(coef), 2, ssr, _aic(n, ssr, 2)))

    coef, ssr = _lstsq_ssr(np.column_stack([np.ones(n), t, t * t]), p)
    fits.append(FormFit("quadratic", tuple(coef), 3, ssr, _aic(n, ssr, 3)))

    best: tuple[float, float, tuple[float, ...]] | None = None
    for knot_date in _month_starts(dates[0], dates[-1]):
        tau = years_since(knot_date, dates[0])
        left = int(np.sum(t < tau))
        if left < 3 or n - left < 3:
            continue
        hinge = np.maximum(t - tau, 0.0)
        coef, ssr = _lstsq_ssr(np.column_stack([np.ones(n), t, hinge]), p)
        if best is None or ssr < best[0] - 1e-15:
            best = (ssr, tau, tuple(coef) + (tau,))
    if best is None:
        unavailable.append("piecewise-linear")
    else:
        fits.append(FormFit("piecewise-linear", best[2], 4, best[0], _aic(n, best[0], 4)))

    winner = min(fits, key=lambda f: (f.aic, f.n_params, f.form)).form
    return SpecComparison(fits=tuple(fits), unavailable=tuple(unavailable), winner=winner)
