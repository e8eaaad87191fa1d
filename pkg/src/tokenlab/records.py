"""Domain records shared by every analysis.

PriceRecord is the atom of both the cross-section and the milestone panel:
one model's price/quality observation at a date. TrainingRecord carries the
cost side. Tier, Quarter and the small derivation helpers here (tier
classification, blended price, calendar quarters, elapsed years) are used by
all downstream modules, so their conventions live in exactly one place.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from datetime import date

from .errors import ValidationError

# Input-price band edges in $/M tokens: below the first edge is economy,
# above the second is flagship, boundaries belong to mid.
DEFAULT_TIER_THRESHOLDS: tuple[float, float] = (0.5, 5.0)

# Input:output weighting for the blended price, a 3:1 usage-ratio convention.
DEFAULT_BLEND_WEIGHTS: tuple[float, float] = (3.0, 1.0)

DAYS_PER_YEAR = 365.25


class Tier(enum.IntEnum):
    """Price band of a single observation, ordered cheapest to dearest."""

    ECONOMY = 0
    MID = 1
    FLAGSHIP = 2

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: str) -> "Tier":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValidationError(f"unknown tier {text!r}") from None


class Region(str, enum.Enum):
    """Vendor headquarters bucket used by the regional comparisons."""

    US_EU = "US_EU"
    CN = "CN"
    OTHER = "OTHER"

    @classmethod
    def parse(cls, text: str) -> "Region":
        try:
            return cls(text.strip())
        except ValueError:
            raise ValidationError(f"unknown region {text!r}") from None


@dataclass(frozen=True, order=True)
class Quarter:
    """Calendar quarter, ordered by (year, quarter)."""

    year: int
    quarter: int

    def __post_init__(self) -> None:
        if self.quarter not in (1, 2, 3, 4):
            raise ValidationError(f"quarter must be in 1..4, got {self.quarter}")

    def __str__(self) -> str:
        return f"{self.year}Q{self.quarter}"

    @classmethod
    def parse(cls, text: str) -> "Quarter":
        m = re.fullmatch(r"(\d{4})[Qq]([1-4])", text.strip())
        if m is None:
            raise ValidationError(f"cannot parse quarter {text!r} (expected e.g. 2024Q2)")
        return cls(int(m.group(1)), int(m.group(2)))

    def contains(self, day: date) -> bool:
        return quarter_of(day) == self


@dataclass(frozen=True)
class PriceRecord:
    """One model's price/quality observation at a date, in $/M tokens."""

    model_id: str
    vendor: str
    observed_date: date
    input_price: float
    output_price: float
    context_window: int | None = None
    quality_score: float | None = None
    reasoning: bool = False
    open_weight: bool = False
    region: Region = Region.OTHER


@dataclass(frozen=True)
class TrainingRecord:
    """One model's training cost, compute, and size."""

    model_id: str
    vendor: str
    region: Region
    release_date: date
    training_cost: float
    training_compute: float
    parameter_count: float

    @property
    def unit_cost(self) -> float:
        """Training dollars per FLOP."""
        return self.training_cost / self.training_compute


@dataclass(frozen=True)
class Violation:
    """One validation failure: which record, which rule, and why."""

    index: int
    rule: str
    message: str


def classify_tier(
    input_price: float,
    thresholds: tuple[float, float] = DEFAULT_TIER_THRESHOLDS,
) -> Tier:
    """Assign a price band from the input price alone.

    Prices below the lower threshold are economy, above the upper are
    flagship; both boundary values are assigned to mid.
    """
    if not input_price > 0:
        raise ValidationError(f"input price must be positive, got {input_price}")
    low, high = thresholds
    if not 0 < low < high:
        raise ValidationError(f"thresholds must satisfy 0 < low < high, got {thresholds}")
    if input_price < low:
        return Tier.ECONOMY
    if input_price > high:
        return Tier.FLAGSHIP
    return Tier.MID


def blended_price(
    input_price: float,
    output_price: float,
    weights: tuple[float, float] = DEFAULT_BLEND_WEIGHTS,
) -> float:
    """Weighted mean of input and output price, default 3:1 input:output."""
    if not (input_price > 0 and output_price > 0):
        raise ValidationError(
            f"prices must be positive, got ({input_price}, {output_price})"
        )
    w_in, w_out = weights
    if w_in < 0 or w_out < 0:
        raise ValidationError(f"weights must be non-negative, got {weights}")
    total = w_in + w_out
    if total == 0:
        raise ValidationError("blend weights must not both be zero")
    return (w_in * input_price + w_out * output_price) / total


def quarter_of(day: date) -> Quarter:
    return Quarter(day.year, (day.month - 1) // 3 + 1)


def years_since(day: date, origin: date) -> float:
    """Elapsed time in years (days / 365.25) from origin to day."""
    return (day - origin).days / DAYS_PER_YEAR


def validate_dataset(records: list[PriceRecord]) -> list[Violation]:
    """Check type invariants and key uniqueness over a record list.

    Returns an empty list iff every record is valid and no two records share
    (model_id, observed_date). Each duplicate pair is reported once, at the
    position of the later record.
    """
    violations: list[Violation] = []
    seen: set[tuple[str, date]] = set()
    for index, record in enumerate(records):
        if not (record.input_price > 0 and record.output_price > 0):
            violations.append(
                Violation(
                    index,
                    "non-positive price",
                    f"{record.model_id}: prices must be positive, got "
                    f"({record.input_price}, {record.output_price})",
                )
            )
        q = record.quality_score
        if q is not None and not 0 <= q <= 100:
            violations.append(
                Violation(
                    index,
                    "quality out of range",
                    f"{record.model_id}: quality_score must lie in [0, 100], got {q}",
                )
            )
        key = (record.model_id, record.observed_date)
        if key in seen:
            violations.append(
                Violation(
                    index,
                    "duplicate key",
                    f"duplicate (model_id, observed_date) {key}",
                )
            )
        seen.add(key)
    return violations
