"""Reasoning-premium and market-concentration metrics.

The premium compares unweighted mean input prices of reasoning versus
non-reasoning models inside a calendar quarter. Concentration works on
percentage-point vendor shares: HHI on the conventional 0-10000 scale, CR4,
and the antitrust-guideline bands (High above 2500, Moderate 1500-2500
inclusive, Unconcentrated below 1500).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError
from .records import PriceRecord, Quarter, quarter_of

SHARE_SUM_TOLERANCE = 0.01

HHI_HIGH_FLOOR = 2500.0
HHI_MODERATE_FLOOR = 1500.0


class ConcentrationBand(str, enum.Enum):
    UNCONCENTRATED = "Unconcentrated"
    MODERATE = "Moderate"
    HIGH = "High"


@dataclass(frozen=True)
class PremiumRow:
    """Per-quarter reasoning premium and the group means behind it."""

    quarter: Quarter
    mean_reasoning_price: float
    mean_nonreasoning_price: float
    premium: float
    n_reasoning: int
    n_nonreasoning: int


@dataclass(frozen=True)
class ConcentrationResult:
    """HHI/CR4 summary of one period's vendor shares."""

    period: str
    shares: tuple[tuple[str, float], ...]
    hhi: float
    cr4: float
    band: ConcentrationBand


def reasoning_premium(records: Sequence[PriceRecord], quarter: Quarter) -> PremiumRow:
    """Ratio of mean reasoning to mean non-reasoning input price in a quarter.

    Means are unweighted across models. Raises if either side of the quarter
    is empty, naming the missing side.
    """
    reasoning = [r.input_price for r in records
                 if r.reasoning and quarter.contains(r.observed_date)]
    plain = [r.input_price for r in records
             if not r.reasoning and quarter.contains(r.observed_date)]
    if not reasoning:
        raise ValidationError(f"{quarter} has no reasoning-model records")
    if not plain:
        raise ValidationError(f"{quarter} has no non-reasoning records")
    mean_r = sum(reasoning) / len(reasoning)
    mean_p = sum(plain) / len(plain)
    return PremiumRow(
        quarter=quarter,
        mean_reasoning_price=mean_r,
        mean_nonreasoning_price=mean_p,
        premium=mean_r / mean_p,
        n_reasoning=len(reasoning),
        n_nonreasoning=len(plain),
    )


def premium_average(rows: Sequence[PremiumRow | float]) -> float:
    """Arithmetic mean of per-quarter premiums (rows or bare ratios)."""
    if not rows:
        raise ValidationError("cannot average zero premium rows")
    values = [row.premium if isinstance(row, PremiumRow) else float(row) for row in rows]
    return sum(values) / len(values)


def _check_shares(shares: Sequence[float]) -> list[float]:
    values = [float(s) for s in shares]
    if not values:
        raise ValidationError("share list is empty")
    if any(s < 0 for s in values):
        raise ValidationError("shares must be non-negative")
    total = sum(values)
    if abs(total - 100.0) > SHARE_SUM_TOLERANCE:
        raise ValidationError(
            f"shares must sum to 100 +/- {SHARE_SUM_TOLERANCE}, got {total:.4f}"
        )
    return values


def hhi(shares: Sequence[float]) -> float:
    """Sum of squared percentage-point shares, in points (0-10000)."""
    return sum(s * s for s in _check_shares(shares))


def cr4(shares: Sequence[float]) -> float:
    """Combined share of the four largest vendors (all vendors if fewer)."""
    values = sorted(_check_shares(shares), reverse=True)
    return sum(values[:4])


def classify_hhi(value: float) -> ConcentrationBand:
    """Guideline band for an HHI value; the 1500 and 2500 edges are Moderate."""
    if not 0 <= value <= 10000:
        raise ValidationError(f"HHI must lie in [0, 10000], got {value}")
    if value > HHI_HIGH_FLOOR:
        return ConcentrationBand.HIGH
    if value >= HHI_MODERATE_FLOOR:
        return ConcentrationBand.MODERATE
    return ConcentrationBand.UNCONCENTRATED


def concentration(period: str, shares: Sequence[tuple[str, float]]) -> ConcentrationResult:
    """Full HHI/CR4/band summary for one period's (vendor, share) table."""
    values = [s for _, s in shares]
    h = hhi(values)
    return ConcentrationResult(
        period=period,
        shares=tuple(shares),
        hhi=h,
        cr4=cr4(values),
        band=classify_hhi(h),
    )
