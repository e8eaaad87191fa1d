"""Input-oriented DEA efficiency via envelopment linear programs.

Each decision-making unit (DMU) is a (inputs, outputs) point; here the
default usage is a single blended price as input and a quality score as
output. Efficiency solves, per DMU o:

    minimize theta
    subject to  sum_j lambda_j * x_j <= theta * x_o   (componentwise)
                sum_j lambda_j * y_j >= y_o           (componentwise)
                lambda_j >= 0
                sum_j lambda_j = 1                    (VRS only)

using the bundled simplex solver. distance() evaluates a DMU against an
arbitrary reference technology, where scores above 1 are possible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..econometrics import spearman
from ..errors import SolverError, ValidationError
from .simplex import DEFAULT_TOLERANCE, solve_lp

# Scores within this distance of 1 count as frontier membership.
ON_FRONTIER_TOLERANCE = 1e-8


class ReturnsToScale(str, enum.Enum):
    CRS = "CRS"
    VRS = "VRS"


@dataclass(frozen=True)
class Dmu:
    """One decision-making unit: strictly positive input/output vectors."""

    id: str
    inputs: tuple[float, ...]
    outputs: tuple[float, ...]

    @classmethod
    def single(cls, id: str, price: float, quality: float) -> "Dmu":
        return cls(id=id, inputs=(price,), outputs=(quality,))


@dataclass(frozen=True)
class DeaResult:
    """Efficiency scores aligned with the input DMU order."""

    ids: tuple[str, ...]
    scores: tuple[float, ...]
    frontier: tuple[str, ...]
    rts: ReturnsToScale
    orientation: str = "input"

    def score_of(self, dmu_id: str) -> float:
        return self.scores[self.ids.index(dmu_id)]


def _validate(dmus: Sequence[Dmu]) -> None:
    if not dmus:
        raise ValidationError("DMU set is empty")
    n_in = len(dmus[0].inputs)
    n_out = len(dmus[0].outputs)
    for dmu in dmus:
        if len(dmu.inputs) != n_in or len(dmu.outputs) != n_out:
            raise ValidationError(
                f"DMU {dmu.id}: input/output dimensions differ across the set"
            )
        if any(v <= 0 for v in dmu.inputs) or any(v <= 0 for v in dmu.outputs):
            raise ValidationError(f"DMU {dmu.id}: all components must be positive")


def _envelopment_theta(
    subject: Dmu,
    reference: Sequence[Dmu],
    rts: ReturnsToScale,
    tol: float,
) -> float:
    n_in = len(subject.inputs)
    n_out = len(subject.outputs)
    n_ref = len(reference)

    # Variables: [theta, lambda_1 .. lambda_n].
    c = np.zeros(1 + n_ref)
    c[0] = 1.0

    a_ub = np.zeros((n_in + n_out, 1 + n_ref))
    b_ub = np.zeros(n_in + n_out)
    for i in range(n_in):
        a_ub[i, 0] = -subject.inputs[i]
        for j, ref in enumerate(reference):
            a_ub[i, 1 + j] = ref.inputs[i]
    for r in range(n_out):
        for j, ref in enumerate(reference):
            a_ub[n_in + r, 1 + j] = -ref.outputs[r]
        b_ub[n_in + r] = -subject.outputs[r]

    a_eq = b_eq = None
    if rts is ReturnsToScale.VRS:
        a_eq = np.zeros((1, 1 + n_ref))
        a_eq[0, 1:] = 1.0
        b_eq = np.array([1.0])

    result = solve_lp(c, a_ub, b_ub, a_eq, b_eq, tol=tol)
    if result.status == "infeasible":
        raise SolverError(
            f"envelopment program infeasible for DMU {subject.id} "
            f"against {n_ref} reference DMUs under {rts.value}"
        )
    if result.status != "optimal":
        raise SolverError(
            f"envelopment program for DMU {subject.id} ended {result.status}"
        )
    return float(result.objective)


def _efficiency(
    dmus: Sequence[Dmu], rts: ReturnsToScale, tol: float
) -> DeaResult:
    _validate(dmus)
    scores = []
    for dmu in dmus:
        theta = _envelopment_theta(dmu, dmus, rts, tol)
        # In-set evaluation is bounded by 1; shave off solver noise.
        scores.append(min(theta, 1.0))
    frontier = tuple(
        dmu.id for dmu, s in zip(dmus, scores) if s >= 1.0 - ON_FRONTIER_TOLERANCE
    )
    return DeaResult(
        ids=tuple(d.id for d in dmus),
        scores=tuple(scores),
        frontier=frontier,
        rts=rts,
    )


def ccr_efficiency(dmus: Sequence[Dmu], tol: float = DEFAULT_TOLERANCE) -> DeaResult:
    """Constant-returns-to-scale efficiency for every DMU in the set."""
    return _efficiency(dmus, ReturnsToScale.CRS, tol)


def bcc_efficiency(dmus: Sequence[Dmu], tol: float = DEFAULT_TOLERANCE) -> DeaResult:
    """Variable-returns-to-scale efficiency; componentwise >= the CRS score."""
    return _efficiency(dmus, ReturnsToScale.VRS, tol)


def distance(
    dmu: Dmu,
    reference: Sequence[Dmu],
    rts: ReturnsToScale = ReturnsToScale.CRS,
    tol: float = DEFAULT_TOLERANCE,
) -> float:
    """Input-oriented efficiency of dmu against a reference technology.

    The reference set defines the technology; dmu itself need not belong to
    it, so cross-period scores above 1 are legitimate.
    """
    _validate(list(reference) + [dmu])
    return _envelopment_theta(dmu, reference, rts, tol)


def ratio_efficiency(dmus: Sequence[Dmu]) -> tuple[float, ...]:
    """Closed-form CRS scores for the 1-input/1-output case.

    theta_i = (y_i/x_i) / max_j (y_j/x_j). Used as the independent check on
    the LP route; only defined for single-dimension DMUs.
    """
    _validate(dmus)
    if len(dmus[0].inputs) != 1 or len(dmus[0].outputs) != 1:
        raise ValidationError("ratio formula requires 1 input and 1 output")
    ratios = [d.outputs[0] / d.inputs[0] for d in dmus]
    best = max(ratios)
    return tuple(r / best for r in ratios)


def sensitivity_quality(
    dmus: Sequence[Dmu],
    perturbation: float,
    rts: ReturnsToScale = ReturnsToScale.CRS,
    tol: float = DEFAULT_TOLERANCE,
) -> tuple[DeaResult, float]:
    """Scale every output by (1 + perturbation), re-run DEA, report rank rho.

    Returns the perturbed result and the Spearman correlation between
    baseline and perturbed scores.
    """
    if perturbation <= -1.0:
        raise ValidationError(f"perturbation must exceed -1, got {perturbation}")
    baseline = _efficiency(dmus, rts, tol)
    scaled = [
        Dmu(
            id=d.id,
            inputs=d.inputs,
            outputs=tuple(v * (1.0 + perturbation) for v in d.outputs),
        )
        for d in dmus
    ]
    perturbed = _efficiency(scaled, rts, tol)
    rho = spearman(baseline.scores, perturbed.scores)
    return perturbed, rho
