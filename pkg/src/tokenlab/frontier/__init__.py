"""Production-frontier analysis: DEA efficiency and Malmquist decomposition."""

from .dea import (
    Dmu,
    DeaResult,
    ReturnsToScale,
    bcc_efficiency,
    ccr_efficiency,
    distance,
    ratio_efficiency,
    sensitivity_quality,
)
from .malmquist import MalmquistResult, malmquist, representative
from .simplex import DEFAULT_TOLERANCE, SimplexResult, solve_lp

__all__ = [
    "Dmu",
    "DeaResult",
    "ReturnsToScale",
    "bcc_efficiency",
    "ccr_efficiency",
    "distance",
    "ratio_efficiency",
    "sensitivity_quality",
    "MalmquistResult",
    "malmquist",
    "representative",
    "DEFAULT_TOLERANCE",
    "SimplexResult",
    "solve_lp",
]
