"""Regression and inference kernel.

Small-sample OLS with classical and HC3 covariance, winsorization, group
fixed effects via full dummy regression, Welch's unequal-variance t-test,
deterministic case-resampling bootstrap, Spearman rank correlation, and a
growth-accounting decomposition. Everything here is a pure function of its
inputs; the bootstrap derives one RNG substream per replicate so results are
independent of evaluation schedule.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .errors import (
    InsufficientDataError,
    SingularDesignError,
    ValidationError,
)

RANK_TOLERANCE = 1e-10


@dataclass(frozen=True)
class RegressionResult:
    """One fitted linear model.

    Coefficients are ordered as the design columns; hc3_se is attached by
    hc3_se() and is None on a freshly fitted result.
    """

    names: tuple[str, ...]
    coefficients: np.ndarray
    ols_se: np.ndarray
    p_values: np.ndarray
    r_squared: float
    n: int
    residuals: np.ndarray
    leverages: np.ndarray
    hc3_se: np.ndarray | None = None


@dataclass(frozen=True)
class BootstrapSummary:
    """Percentile summary of a case-resampling bootstrap run."""

    b: int
    master_seed: int
    ci_lower: float
    ci_upper: float
    fraction_positive: float
    n_failed: int
    replicates: tuple[float, ...]
    # original replicate index for each entry of `replicates`; failed
    # replicates appear in neither tuple
    replicate_indices: tuple[int, ...] = ()


@dataclass(frozen=True)
class FactorContribution:
    name: str
    share: float
    price_change: float
    contribution: float
    percent_of_total: float


@dataclass(frozen=True)
class GrowthAccounting:
    """Decomposition of a total log cost change into factor terms + residual.

    The percentages sum to exactly 100: the residual percentage is defined as
    the complement of the factor percentages.
    """

    total_change: float
    factors: tuple[FactorContribution, ...]
    residual: float
    residual_percent: float


def ols(
    y: Sequence[float] | np.ndarray,
    X: np.ndarray,
    names: Sequence[str] | None = None,
) -> RegressionResult:
    """Ordinary least squares of y on a design matrix X.

    The design must already contain its intercept column. Solved through a QR
    decomposition rather than the normal equations for numerical stability.
    Classical standard errors; two-sided p-values from t(n - k).

    Parameters
    ----------
    y : array-like, shape (n,)
    X : ndarray, shape (n, k)
    names : optional column names, defaults to x0..x{k-1}

    Raises
    ------
    InsufficientDataError
        If n <= k.
    SingularDesignError
        If X is rank deficient; the message names the dependent columns.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValidationError(f"design must be 2-d, got shape {X.shape}")
    n, k = X.shape
    if y.shape != (n,):
        raise ValidationError(f"y has shape {y.shape}, expected ({n},)")
    if n <= k:
        raise InsufficientDataError(f"need more than {k} observations, got {n}")
    if names is None:
        names = tuple(f"x{j}" for j in range(k))
    else:
        names = tuple(names)
        if len(names) != k:
            raise ValidationError(f"got {len(names)} names for {k} columns")

    _check_rank(X, names)

    Q, R = np.linalg.qr(X)
    beta = np.linalg.solve(R, Q.T @ y)
    fitted = X @ beta
    residuals = y - fitted

    leverages = np.sum(Q * Q, axis=1)
    sse = float(residuals @ residuals)
    sst = float(np.sum((y - y.mean()) ** 2))
    # A constant target is fit exactly; call that R^2 = 1 rather than 0/0.
    r_squared = 1.0 if sst == 0.0 else 1.0 - sse / sst

    dof = n - k
    sigma2 = sse / dof
    r_inv = np.linalg.solve(R, np.eye(k))
    xtx_inv = r_inv @ r_inv.T
    ols_se = np.sqrt(sigma2 * np.diag(xtx_inv))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_stats = np.where(ols_se > 0, beta / ols_se, np.inf * np.sign(beta))
    p_values = 2.0 * stats.t.sf(np.abs(t_stats), dof)

    return RegressionResult(
        names=names,
        coefficients=beta,
        ols_se=ols_se,
        p_values=np.asarray(p_values),
        r_squared=float(r_squared),
        n=n,
        residuals=residuals,
        leverages=leverages,
    )


def _check_rank(X: np.ndarray, names: tuple[str, ...]) -> None:
    from scipy import linalg as sla

    n, k = X.shape
    _, R, piv = sla.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    scale = diag[0] if diag.size and diag[0] > 0 else 1.0
    dependent = [names[piv[j]] for j in range(k) if diag[j] <= RANK_TOLERANCE * scale]
    if dependent:
        raise SingularDesignError(
            "design is rank deficient; dependent columns: " + ", ".join(dependent)
        )


def hc3_se(result: RegressionResult, X: np.ndarray) -> np.ndarray:
    """HC3 heteroskedasticity-robust standard errors for a fitted model.

    Sandwich form (X'X)^-1 X' diag(e_i^2 / (1 - h_ii)^2) X (X'X)^-1 with the
    leverages h_ii taken from the fit.

    Raises
    ------
    ValidationError
        If any leverage equals 1 (the weight is undefined).
    """
    X = np.asarray(X, dtype=float)
    e = result.residuals
    h = result.leverages
    if np.any(h >= 1.0 - 1e-12):
        raise ValidationError("HC3 undefined: a leverage equals 1")
    w = (e / (1.0 - h)) ** 2
    xtx_inv = np.linalg.inv(X.T @ X)
    meat = X.T @ (X * w[:, None])
    cov = xtx_inv @ meat @ xtx_inv
    return np.sqrt(np.diag(cov))


def with_hc3(result: RegressionResult, X: np.ndarray) -> RegressionResult:
    """Return a copy of result with the hc3_se field populated."""
    from dataclasses import replace

    return replace(result, hc3_se=hc3_se(result, X))


def winsorize(
    series: Sequence[float] | np.ndarray,
    lower: float = 5.0,
    upper: float = 95.0,
) -> np.ndarray:
    """Clamp values beyond the given percentiles to those percentiles.

    Percentiles use linear interpolation between order statistics, so with 20
    points at (5, 95) the clamp levels are 1.95 and 19.05 for data 1..20.
    """
    if not 0.0 < lower < upper < 100.0:
        raise ValidationError(
            f"percentiles must satisfy 0 < lower < upper < 100, got ({lower}, {upper})"
        )
    x = np.asarray(series, dtype=float)
    if x.size == 0:
        raise InsufficientDataError("cannot winsorize an empty series")
    lo, hi = np.percentile(x, [lower, upper])
    return np.clip(x, lo, hi)


def fixed_effects(
    y: Sequence[float] | np.ndarray,
    X: np.ndarray,
    groups: Sequence[str],
    names: Sequence[str] | None = None,
) -> RegressionResult:
    """OLS with one dummy per group replacing the intercept.

    Groups with a single observation are dropped with a warning, since their
    dummy would absorb the observation exactly. R^2 is reported on the full
    dummy regression. Coefficients are ordered slope columns first, then one
    dummy per retained group (sorted by label).
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    groups = list(groups)
    if len(groups) != n or y.shape != (n,):
        raise ValidationError("y, X, and groups must have a common length")

    counts: dict[str, int] = {}
    for g in groups:
        counts[g] = counts.get(g, 0) + 1
    singletons = sorted(g for g, c in counts.items() if c < 2)
    if singletons:
        warnings.warn(
            f"dropping {len(singletons)} singleton group(s): {', '.join(map(str, singletons))}",
            stacklevel=2,
        )
    keep = np.array([counts[g] >= 2 for g in groups])
    if not keep.any():
        raise InsufficientDataError("no group has at least 2 observations")
    y = y[keep]
    X = X[keep]
    groups = [g for g, k in zip(groups, keep) if k]

    labels = sorted(set(groups))
    dummies = np.zeros((len(groups), len(labels)))
    for i, g in enumerate(groups):
        dummies[i, labels.index(g)] = 1.0

    if names is None:
        names = tuple(f"x{j}" for j in range(X.shape[1]))
    full_names = tuple(names) + tuple(f"group[{lab}]" for lab in labels)
    design = np.hstack([X, dummies])
    return ols(y, design, names=full_names)


def welch_t(
    sample_a: Sequence[float] | np.ndarray,
    sample_b: Sequence[float] | np.ndarray,
) -> tuple[float, float, float]:
    """Welch's unequal-variance t-test.

    Returns (t, df, p) with Welch-Satterthwaite degrees of freedom and a
    two-sided p-value. Degenerate rule for two zero-variance samples: equal
    means give (0, n-2, 1); unequal means give (+/-inf, n-2, 0).
    """
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise InsufficientDataError("both samples need at least 2 observations")
    va = a.var(ddof=1)
    vb = b.var(ddof=1)
    diff = a.mean() - b.mean()
    if va == 0.0 and vb == 0.0:
        df = float(a.size + b.size - 2)
        if diff == 0.0:
            return 0.0, df, 1.0
        return float(np.copysign(np.inf, diff)), df, 0.0
    sa2 = va / a.size
    sb2 = vb / b.size
    t = diff / np.sqrt(sa2 + sb2)
    df = (sa2 + sb2) ** 2 / (sa2**2 / (a.size - 1) + sb2**2 / (b.size - 1))
    p = 2.0 * stats.t.sf(abs(t), df)
    return float(t), float(df), float(p)


def bootstrap(
    series: Sequence,
    statistic: Callable,
    n_replicates: int,
    master_seed: int,
) -> BootstrapSummary:
    """Case-resampling bootstrap with deterministic per-replicate streams.

    Replicate r draws its indices from default_rng((master_seed, r)), so the
    result is bitwise-reproducible and independent of evaluation order.
    Replicates where the statistic raises are recorded as failed and excluded
    from the summary.
    """
    if n_replicates < 1:
        raise ValidationError(f"need at least 1 replicate, got {n_replicates}")
    items = list(series)
    n = len(items)
    if n == 0:
        raise InsufficientDataError("cannot bootstrap an empty series")

    values: list[float] = []
    kept: list[int] = []
    n_failed = 0
    for r in range(n_replicates):
        rng = np.random.default_rng((master_seed, r))
        idx = rng.integers(0, n, size=n)
        resample = [items[i] for i in idx]
        try:
            values.append(float(statistic(resample)))
            kept.append(r)
        except (ValidationError, InsufficientDataError, ValueError,
                ArithmeticError, np.linalg.LinAlgError):
            n_failed += 1
    if not values:
        raise InsufficientDataError("every bootstrap replicate failed")

    arr = np.asarray(values)
    lo, hi = np.percentile(arr, [2.5, 97.5])
    return BootstrapSummary(
        b=n_replicates,
        master_seed=master_seed,
        ci_lower=float(lo),
        ci_upper=float(hi),
        fraction_positive=float(np.mean(arr > 0)),
        n_failed=n_failed,
        replicates=tuple(values),
        replicate_indices=tuple(kept),
    )


def spearman(
    x: Sequence[float] | np.ndarray,
    y: Sequence[float] | np.ndarray,
) -> float:
    """Spearman rank correlation: Pearson correlation of average ranks.

    Identical rank vectors return exactly 1.0, covering the degenerate case
    where every value ties.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("x and y must be 1-d of equal length")
    if x.size < 2:
        raise InsufficientDataError("need at least 2 points")
    rx = stats.rankdata(x, method="average")
    ry = stats.rankdata(y, method="average")
    if np.array_equal(rx, ry):
        return 1.0
    if rx.std() == 0.0 or ry.std() == 0.0:
        raise ValidationError("rank correlation undefined: zero rank variance")
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    return float((rx @ ry) / np.sqrt((rx @ rx) * (ry @ ry)))


def growth_accounting(
    total_change: float,
    factors: Sequence[tuple[str, float, float]],
) -> GrowthAccounting:
    """Split a total log cost change into factor contributions and a residual.

    Each factor contributes share * factor_price_change (log points). The
    residual is total minus the factor sum; its percentage is defined as the
    complement so the percentages add to exactly 100.
    """
    if total_change == 0.0:
        raise ValidationError("total change must be nonzero to express percentages")
    contributions = []
    pct_sum = 0.0
    contrib_sum = 0.0
    for name, share, change in factors:
        if share < 0:
            raise ValidationError(f"factor {name!r} has negative share {share}")
        contribution = share * change
        pct = contribution / total_change * 100.0
        contributions.append(
            FactorContribution(
                name=name,
                share=share,
                price_change=change,
                contribution=contribution,
                percent_of_total=pct,
            )
        )
        pct_sum += pct
        contrib_sum += contribution
    return GrowthAccounting(
        total_change=total_change,
        factors=tuple(contributions),
        residual=total_change - contrib_sum,
        residual_percent=100.0 - pct_sum,
    )


def add_intercept(X: np.ndarray | Sequence) -> np.ndarray:
    """Prepend a constant column to a design matrix (or 1-d regressor)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return np.hstack([np.ones((X.shape[0], 1)), X])
