"""Regression, resampling, and rank-statistic tests.

The OLS/HC3/FE cases are checked against closed-form textbook formulas
evaluated independently inside the tests.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from tokenlab import (
    InsufficientDataError,
    SingularDesignError,
    ValidationError,
    add_intercept,
    bootstrap,
    fixed_effects,
    growth_accounting,
    ols,
    spearman,
    welch_t,
    winsorize,
    with_hc3,
)

# simple-regression fixture small enough to verify by hand
X5 = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
Y5 = np.array([1.1, 1.9, 3.2, 3.8, 5.1])


def closed_form_simple_ols(x, y):
    """Textbook slope/intercept/standard errors for y = a + b x."""
    n = len(x)
    sxx = np.sum((x - x.mean()) ** 2)
    b = np.sum((x - x.mean()) * (y - y.mean())) / sxx
    a = y.mean() - b * x.mean()
    resid = y - a - b * x
    sigma2 = resid @ resid / (n - 2)
    se_b = math.sqrt(sigma2 / sxx)
    se_a = math.sqrt(sigma2 * (1 / n + x.mean() ** 2 / sxx))
    return a, b, se_a, se_b


class TestOls:
    def test_exact_line(self):
        y = 2.0 + 3.0 * X5
        result = ols(y, add_intercept(X5))
        assert result.coefficients == pytest.approx([2.0, 3.0], abs=1e-12)
        assert result.r_squared == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(result.residuals)) < 1e-12

    def test_matches_closed_form(self):
        a, b, se_a, se_b = closed_form_simple_ols(X5, Y5)
        result = ols(Y5, add_intercept(X5), names=("const", "x"))
        assert result.coefficients[0] == pytest.approx(a, abs=1e-9)
        assert result.coefficients[1] == pytest.approx(b, abs=1e-9)
        assert result.ols_se[0] == pytest.approx(se_a, abs=1e-9)
        assert result.ols_se[1] == pytest.approx(se_b, abs=1e-9)
        assert result.names == ("const", "x")
        assert result.n == 5

    def test_p_values_from_t_distribution(self):
        result = ols(Y5, add_intercept(X5))
        t = result.coefficients[1] / result.ols_se[1]
        expected = 2 * stats.t.sf(abs(t), 3)
        assert result.p_values[1] == pytest.approx(expected, rel=1e-12)

    def test_r_squared_definition(self):
        result = ols(Y5, add_intercept(X5))
        ssr = result.residuals @ result.residuals
        tss = np.sum((Y5 - Y5.mean()) ** 2)
        assert result.r_squared == pytest.approx(1 - ssr / tss, rel=1e-12)

    def test_duplicate_column_raises(self):
        X = np.column_stack([np.ones(5), X5, X5])
        with pytest.raises(SingularDesignError):
            ols(Y5, X)

    def test_underdetermined_raises(self):
        with pytest.raises((InsufficientDataError, SingularDesignError)):
            ols([1.0, 2.0], np.column_stack([np.ones(2), [0.0, 1.0], [2.0, 3.0]]))

    @given(scale=st.floats(min_value=1e-3, max_value=1e3))
    def test_response_scaling(self, scale):
        base = ols(Y5, add_intercept(X5))
        scaled = ols(scale * Y5, add_intercept(X5))
        assert scaled.coefficients == pytest.approx(scale * base.coefficients, rel=1e-9)
        assert scaled.ols_se == pytest.approx(scale * base.ols_se, rel=1e-9)
        assert scaled.r_squared == pytest.approx(base.r_squared, rel=1e-9)


class TestHc3:
    def test_matches_sandwich_formula(self):
        X = add_intercept(X5)
        result = with_hc3(ols(Y5, X), X)
        # independent sandwich evaluation
        xtx_inv = np.linalg.inv(X.T @ X)
        h = np.einsum("ij,jk,ik->i", X, xtx_inv, X)
        meat = X.T @ np.diag(result.residuals**2 / (1 - h) ** 2) @ X
        cov = xtx_inv @ meat @ xtx_inv
        assert result.hc3_se == pytest.approx(np.sqrt(np.diag(cov)), rel=1e-9)

    def test_fresh_fit_has_no_hc3(self):
        assert ols(Y5, add_intercept(X5)).hc3_se is None

    def test_hc3_exceeds_ols_se_under_outlier(self):
        y = Y5.copy()
        y[-1] += 10.0
        X = add_intercept(X5)
        result = with_hc3(ols(y, X), X)
        assert result.hc3_se[1] > result.ols_se[1]


class TestWinsorize:
    def test_one_to_twenty_clip_levels(self):
        x = np.arange(1.0, 21.0)
        w = winsorize(x, 5.0, 95.0)
        assert w.min() == pytest.approx(1.95)
        assert w.max() == pytest.approx(19.05)
        assert w[5] == x[5]

    def test_interior_untouched(self):
        x = np.array([10.0, -50.0, 11.0, 12.0, 13.0, 14.0, 90.0])
        w = winsorize(x, 10.0, 90.0)
        assert set(w) < set(np.concatenate([x, [np.percentile(x, 10), np.percentile(x, 90)]]))

    @given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=2, max_size=40))
    def test_order_preserved(self, values):
        w = winsorize(np.array(values))
        order = np.argsort(values, kind="stable")
        assert np.all(np.diff(w[order]) >= 0)

    @given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=1, max_size=40))
    def test_bounded_by_percentiles(self, values):
        x = np.array(values)
        lo, hi = np.percentile(x, [5.0, 95.0])
        w = winsorize(x)
        assert np.all(w >= lo - 1e-9) and np.all(w <= hi + 1e-9)

    @pytest.mark.parametrize("bounds", [(0.0, 95.0), (5.0, 100.0), (95.0, 5.0), (50.0, 50.0)])
    def test_rejects_bad_percentiles(self, bounds):
        with pytest.raises(ValidationError):
            winsorize([1.0, 2.0], *bounds)

    def test_rejects_empty(self):
        with pytest.raises(InsufficientDataError):
            winsorize([])


class TestFixedEffects:
    def test_recovers_slope_and_group_effects(self):
        x = np.array([0.0, 1.0, 2.0, 0.0, 1.0, 2.0])
        groups = ["a", "a", "a", "b", "b", "b"]
        y = 3.0 * x + np.where(np.array(groups) == "a", 10.0, -5.0)
        result = fixed_effects(y, x[:, None], groups, names=("x",))
        coef = dict(zip(result.names, result.coefficients))
        assert coef["x"] == pytest.approx(3.0, abs=1e-9)
        assert coef["group[a]"] == pytest.approx(10.0, abs=1e-9)
        assert coef["group[b]"] == pytest.approx(-5.0, abs=1e-9)
        assert result.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_matches_within_estimator(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=12)
        groups = ["a"] * 4 + ["b"] * 4 + ["c"] * 4
        y = 1.7 * x + np.repeat([2.0, -1.0, 0.5], 4) + rng.normal(0, 0.1, 12)
        result = fixed_effects(y, x[:, None], groups)
        # demeaned-by-group OLS gives the identical slope
        xd, yd = x.copy(), y.copy()
        for g in set(groups):
            idx = [i for i, gi in enumerate(groups) if gi == g]
            xd[idx] -= xd[idx].mean()
            yd[idx] -= yd[idx].mean()
        slope = (xd @ yd) / (xd @ xd)
        assert result.coefficients[0] == pytest.approx(slope, rel=1e-9)

    def test_singleton_groups_dropped_with_warning(self):
        x = np.array([0.0, 1.0, 2.0, 5.0])
        groups = ["a", "a", "a", "lone"]
        y = 2.0 * x
        with pytest.warns(UserWarning, match="lone"):
            result = fixed_effects(y, x[:, None], groups)
        assert result.n == 3
        assert all(name != "group[lone]" for name in result.names)

    def test_group_length_mismatch(self):
        with pytest.raises(ValidationError):
            fixed_effects([1.0, 2.0], np.ones((2, 1)), ["a"])


class TestWelch:
    def test_known_values(self):
        t, df, p = welch_t([1.0, 2.0, 3.0], [2.0, 3.0, 4.0])
        assert t == pytest.approx(-1.224744871391589, rel=1e-12)
        assert df == pytest.approx(4.0, rel=1e-12)
        assert p == pytest.approx(0.2878641347266908, rel=1e-9)

    def test_antisymmetric(self):
        a, b = [1.0, 2.0, 5.0], [0.5, 4.0, 4.5, 8.0]
        ta, dfa, pa = welch_t(a, b)
        tb, dfb, pb = welch_t(b, a)
        assert ta == -tb
        assert dfa == dfb
        assert pa == pb

    def test_zero_variance_equal_means(self):
        assert welch_t([2.0, 2.0], [2.0, 2.0]) == (0.0, 2.0, 1.0)

    def test_zero_variance_distinct_means(self):
        t, df, p = welch_t([3.0, 3.0], [2.0, 2.0, 2.0])
        assert t == math.inf and p == 0.0
        assert df == 3.0

    def test_small_sample_rejected(self):
        with pytest.raises(InsufficientDataError):
            welch_t([1.0], [2.0, 3.0])


class TestBootstrap:
    def test_bitwise_reproducible(self):
        data = [1.0, 2.0, 3.0, 4.0, 5.0]
        first = bootstrap(data, np.mean, 200, master_seed=11)
        second = bootstrap(data, np.mean, 200, master_seed=11)
        assert first == second

    def test_replicate_stream_is_addressable(self):
        data = [3.0, 1.0, 4.0, 1.0, 5.0]
        summary = bootstrap(data, np.mean, 50, master_seed=9)
        r = summary.replicate_indices[17]
        rng = np.random.default_rng((9, r))
        idx = rng.integers(0, len(data), size=len(data))
        assert summary.replicates[17] == np.mean([data[i] for i in idx])

    def test_seed_changes_result(self):
        data = [1.0, 2.0, 3.0, 4.0]
        assert (
            bootstrap(data, np.mean, 100, master_seed=1).replicates
            != bootstrap(data, np.mean, 100, master_seed=2).replicates
        )

    def test_summary_statistics_consistent(self):
        summary = bootstrap([1.0, 2.0, 3.0, -4.0, 5.0], np.mean, 300, master_seed=3)
        arr = np.array(summary.replicates)
        lo, hi = np.percentile(arr, [2.5, 97.5])
        assert summary.ci_lower == pytest.approx(lo)
        assert summary.ci_upper == pytest.approx(hi)
        assert summary.fraction_positive == pytest.approx(np.mean(arr > 0))

    def test_failed_replicates_excluded(self):
        def statistic(sample):
            if sample[0] > 2.0:
                raise ValidationError("bad draw")
            return float(np.mean(sample))

        summary = bootstrap([1.0, 2.0, 3.0, 4.0], statistic, 100, master_seed=5)
        assert summary.n_failed > 0
        assert len(summary.replicates) + summary.n_failed == 100
        assert len(summary.replicate_indices) == len(summary.replicates)

    def test_all_failed_raises(self):
        def boom(sample):
            raise ValidationError("always")

        with pytest.raises(InsufficientDataError):
            bootstrap([1.0, 2.0], boom, 10, master_seed=1)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValidationError):
            bootstrap([1.0], np.mean, 0, master_seed=1)
        with pytest.raises(InsufficientDataError):
            bootstrap([], np.mean, 10, master_seed=1)


class TestSpearman:
    def test_monotone_map_is_exactly_one(self):
        x = [3.0, 1.0, 4.0, 1.5, 9.0]
        assert spearman(x, [math.exp(v) for v in x]) == 1.0

    def test_reversal_is_minus_one(self):
        assert spearman([1.0, 2.0, 3.0], [9.0, 5.0, 1.0]) == pytest.approx(-1.0)

    def test_tied_values_use_average_ranks(self):
        rho = spearman([1.0, 2.0, 2.0, 3.0], [1.0, 3.0, 2.0, 4.0])
        assert rho == pytest.approx(3 / math.sqrt(10), rel=1e-12)

    def test_all_tied_degenerate_case(self):
        assert spearman([2.0, 2.0, 2.0], [2.0, 2.0, 2.0]) == 1.0

    def test_zero_rank_variance_rejected(self):
        with pytest.raises(ValidationError):
            spearman([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_shape_checks(self):
        with pytest.raises(ValidationError):
            spearman([1.0, 2.0], [1.0, 2.0, 3.0])
        with pytest.raises(InsufficientDataError):
            spearman([1.0], [2.0])


class TestGrowthAccounting:
    def test_decomposition_identity(self):
        factors = [("k", 0.4, 0.14), ("l", 0.25, 0.5), ("e", 0.12, 0.45)]
        result = growth_accounting(-6.4, factors)
        contrib_sum = sum(f.contribution for f in result.factors)
        assert result.residual == -6.4 - contrib_sum
        assert result.residual_percent == 100.0 - sum(
            f.percent_of_total for f in result.factors
        )

    def test_single_factor_percentages(self):
        result = growth_accounting(-2.0, [("only", 0.5, -1.0)])
        assert result.factors[0].contribution == -0.5
        assert result.factors[0].percent_of_total == 25.0
        assert result.residual == -1.5
        assert result.residual_percent == 75.0

    def test_zero_total_rejected(self):
        with pytest.raises(ValidationError):
            growth_accounting(0.0, [("k", 0.5, 1.0)])

    def test_negative_share_rejected(self):
        with pytest.raises(ValidationError):
            growth_accounting(1.0, [("k", -0.1, 1.0)])


def test_add_intercept_shapes():
    flat = add_intercept([1.0, 2.0, 3.0])
    assert flat.shape == (3, 2)
    assert np.all(flat[:, 0] == 1.0)
    square = add_intercept(np.arange(6.0).reshape(3, 2))
    assert square.shape == (3, 3)
