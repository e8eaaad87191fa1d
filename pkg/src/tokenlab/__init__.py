"""Token-price analytics: decay fitting, structural breaks, market structure,
efficiency frontiers, and supporting econometrics, with a reporting CLI."""

from .errors import (
    CatalogError,
    CredentialError,
    InfeasibleCandidateError,
    InsufficientDataError,
    PayloadError,
    SchemaError,
    SingularDesignError,
    SolverError,
    TokenlabError,
    ValidationError,
)
from .records import (
    DAYS_PER_YEAR,
    DEFAULT_BLEND_WEIGHTS,
    DEFAULT_TIER_THRESHOLDS,
    PriceRecord,
    Quarter,
    Region,
    Tier,
    TrainingRecord,
    Violation,
    blended_price,
    classify_tier,
    quarter_of,
    validate_dataset,
    years_since,
)
from .decay import (
    DecayFit,
    FormFit,
    SpecComparison,
    compare_specifications,
    filter_outliers,
    filter_window,
    fit_exponential,
    half_life,
    moore_ratio,
    wald_decay_diff,
)
from .breaks import ChowResult, chow_at, chow_scan
from .market import (
    ConcentrationBand,
    ConcentrationResult,
    PremiumRow,
    classify_hhi,
    concentration,
    cr4,
    hhi,
    premium_average,
    reasoning_premium,
)
from .econometrics import (
    BootstrapSummary,
    GrowthAccounting,
    RegressionResult,
    add_intercept,
    bootstrap,
    fixed_effects,
    growth_accounting,
    hc3_se,
    ols,
    spearman,
    welch_t,
    winsorize,
    with_hc3,
)
from .frontier import (
    DeaResult,
    Dmu,
    MalmquistResult,
    ReturnsToScale,
    bcc_efficiency,
    ccr_efficiency,
    distance,
    malmquist,
    ratio_efficiency,
    representative,
    sensitivity_quality,
)
from .ingest import (
    CatalogSnapshot,
    RunConfig,
    fetch_catalog,
    load_factors,
    load_milestones,
    load_shares,
    load_snapshot,
    load_training,
    parse_catalog_payload,
    persist_snapshot,
)

__version__ = "0.1.0"

__all__ = [
    "BootstrapSummary",
    "CatalogError",
    "CatalogSnapshot",
    "ChowResult",
    "ConcentrationBand",
    "ConcentrationResult",
    "CredentialError",
    "DAYS_PER_YEAR",
    "DEFAULT_BLEND_WEIGHTS",
    "DEFAULT_TIER_THRESHOLDS",
    "DeaResult",
    "DecayFit",
    "Dmu",
    "FormFit",
    "GrowthAccounting",
    "InfeasibleCandidateError",
    "InsufficientDataError",
    "MalmquistResult",
    "PayloadError",
    "PremiumRow",
    "PriceRecord",
    "Quarter",
    "Region",
    "RegressionResult",
    "ReturnsToScale",
    "RunConfig",
    "SchemaError",
    "SingularDesignError",
    "SolverError",
    "SpecComparison",
    "Tier",
    "TokenlabError",
    "TrainingRecord",
    "ValidationError",
    "Violation",
    "add_intercept",
    "bcc_efficiency",
    "blended_price",
    "bootstrap",
    "ccr_efficiency",
    "chow_at",
    "chow_scan",
    "classify_hhi",
    "classify_tier",
    "compare_specifications",
    "concentration",
    "cr4",
    "distance",
    "fetch_catalog",
    "filter_outliers",
    "filter_window",
    "fit_exponential",
    "fixed_effects",
    "growth_accounting",
    "half_life",
    "hc3_se",
    "hhi",
    "load_factors",
    "load_milestones",
    "load_shares",
    "load_snapshot",
    "load_training",
    "malmquist",
    "moore_ratio",
    "ols",
    "parse_catalog_payload",
    "persist_snapshot",
    "premium_average",
    "quarter_of",
    "ratio_efficiency",
    "reasoning_premium",
    "representative",
    "sensitivity_quality",
    "spearman",
    "validate_dataset",
    "wald_decay_diff",
    "welch_t",
    "winsorize",
    "with_hc3",
    "years_since",
]
