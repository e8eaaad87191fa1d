"""Reasoning-premium and concentration metric tests."""

from datetime import date

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tokenlab import (
    ConcentrationBand,
    PriceRecord,
    Quarter,
    ValidationError,
    classify_hhi,
    concentration,
    cr4,
    hhi,
    premium_average,
    reasoning_premium,
)


class TestHhi:
    def test_monopoly(self):
        assert hhi([100.0]) == 10000.0

    def test_three_vendor_example(self):
        assert hhi([50.0, 30.0, 20.0]) == 3800.0

    def test_four_way_split(self):
        assert hhi([25.0, 25.0, 25.0, 25.0]) == 2500.0

    def test_sum_tolerance(self):
        assert hhi([50.0, 50.005]) > 0
        with pytest.raises(ValidationError):
            hhi([50.0, 49.5])
        with pytest.raises(ValidationError):
            hhi([50.0, 50.5])

    def test_rejects_negative_and_empty(self):
        with pytest.raises(ValidationError):
            hhi([101.0, -1.0])
        with pytest.raises(ValidationError):
            hhi([])

    def test_merger_raises_hhi(self):
        rng = np.random.default_rng(123)
        for _ in range(100):
            k = int(rng.integers(3, 12))
            raw = rng.uniform(0.5, 10.0, size=k)
            shares = (100.0 * raw / raw.sum()).tolist()
            shares[-1] = 100.0 - sum(shares[:-1])
            i, j = rng.choice(k, size=2, replace=False)
            merged = [s for idx, s in enumerate(shares) if idx not in (i, j)]
            merged.append(shares[i] + shares[j])
            assert hhi(merged) > hhi(shares)

    @given(
        st.lists(st.floats(min_value=1.0, max_value=50.0), min_size=2, max_size=10)
    )
    def test_merger_monotone_property(self, raw):
        shares = [100.0 * r / sum(raw) for r in raw]
        shares[-1] = 100.0 - sum(shares[:-1])
        merged = shares[2:] + [shares[0] + shares[1]]
        assert hhi(merged) > hhi(shares)


class TestCr4:
    def test_top_four(self):
        shares = [30.0, 25.0, 20.0, 10.0, 10.0, 5.0]
        assert cr4(shares) == 85.0

    def test_fewer_than_four(self):
        assert cr4([60.0, 40.0]) == 100.0

    def test_unsorted_input(self):
        assert cr4([5.0, 30.0, 10.0, 25.0, 10.0, 20.0]) == 85.0


class TestClassifyHhi:
    @pytest.mark.parametrize(
        "value,band",
        [
            (0.0, ConcentrationBand.UNCONCENTRATED),
            (1499.99, ConcentrationBand.UNCONCENTRATED),
            (1500.0, ConcentrationBand.MODERATE),
            (2500.0, ConcentrationBand.MODERATE),
            (2500.01, ConcentrationBand.HIGH),
            (10000.0, ConcentrationBand.HIGH),
        ],
    )
    def test_band_edges(self, value, band):
        assert classify_hhi(value) is band

    @pytest.mark.parametrize(
        "value,band",
        [
            (4558.0, ConcentrationBand.HIGH),
            (3215.0, ConcentrationBand.HIGH),
            (2650.0, ConcentrationBand.HIGH),
            (2290.0, ConcentrationBand.MODERATE),
            (2086.0, ConcentrationBand.MODERATE),
        ],
    )
    def test_reference_values(self, value, band):
        assert classify_hhi(value) is band

    @pytest.mark.parametrize("bad", [-1.0, 10001.0])
    def test_out_of_range(self, bad):
        with pytest.raises(ValidationError):
            classify_hhi(bad)


def test_concentration_summary():
    result = concentration("2024Q1", [("a", 50.0), ("b", 30.0), ("c", 20.0)])
    assert result.period == "2024Q1"
    assert result.hhi == 3800.0
    assert result.cr4 == 100.0
    assert result.band is ConcentrationBand.HIGH
    assert result.shares == (("a", 50.0), ("b", 30.0), ("c", 20.0))


def _rec(model, day, price, reasoning):
    return PriceRecord(
        model_id=model,
        vendor="v",
        observed_date=day,
        input_price=price,
        output_price=price,
        reasoning=reasoning,
    )


class TestReasoningPremium:
    def test_quarter_means_and_ratio(self):
        records = [
            _rec("r1", date(2024, 10, 5), 15.0, True),
            _rec("r2", date(2024, 11, 2), 5.0, True),
            _rec("p1", date(2024, 12, 30), 0.5, False),
            _rec("p2", date(2024, 10, 1), 1.5, False),
            # outside the quarter, must be ignored
            _rec("p3", date(2025, 1, 1), 99.0, False),
        ]
        row = reasoning_premium(records, Quarter(2024, 4))
        assert row.mean_reasoning_price == 10.0
        assert row.mean_nonreasoning_price == 1.0
        assert row.premium == 10.0
        assert (row.n_reasoning, row.n_nonreasoning) == (2, 2)

    def test_premium_below_one_is_legal(self):
        records = [
            _rec("r", date(2025, 2, 1), 0.55, True),
            _rec("p", date(2025, 2, 1), 1.07, False),
        ]
        row = reasoning_premium(records, Quarter(2025, 1))
        assert row.premium == pytest.approx(0.514, abs=5e-4)

    def test_missing_side_named_in_error(self):
        records = [_rec("p", date(2024, 5, 1), 1.0, False)]
        with pytest.raises(ValidationError, match="no reasoning"):
            reasoning_premium(records, Quarter(2024, 2))
        records = [_rec("r", date(2024, 5, 1), 1.0, True)]
        with pytest.raises(ValidationError, match="no non-reasoning"):
            reasoning_premium(records, Quarter(2024, 2))


class TestPremiumAverage:
    def test_plain_numbers(self):
        assert premium_average([2.0, 4.0]) == 3.0

    def test_mixes_rows_and_numbers(self):
        records = [
            _rec("r", date(2024, 8, 1), 6.0, True),
            _rec("p", date(2024, 8, 1), 2.0, False),
        ]
        row = reasoning_premium(records, Quarter(2024, 3))
        assert premium_average([row, 5.0]) == 4.0

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            premium_average([])
