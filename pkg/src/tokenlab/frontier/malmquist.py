"""Malmquist productivity decomposition between two DMU sets.

Productivity change between periods a and b splits into efficiency
catch-up EC = D_b(rep_b) / D_a(rep_a) and the geometric-mean frontier shift
TC = sqrt[(D_a(rep_b)/D_b(rep_b)) * (D_a(rep_a)/D_b(rep_a))], where D_t(s)
is the input-oriented distance of subject s against period t's technology.
The index is their product. The subject of each period is a representative
DMU: by default the unit with the best output/input ratio, configurable to
the componentwise mean unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..errors import ValidationError
from .dea import Dmu, ReturnsToScale, distance
from .simplex import DEFAULT_TOLERANCE

REPRESENTATIVE_RULES = ("best-ratio", "mean")


@dataclass(frozen=True)
class MalmquistResult:
    """EC/TC/index triple plus the four distances they came from.

    d_tech{T}_subject{S} is the distance of period S's representative
    against period T's technology.
    """

    ec: float
    tc: float
    mpi: float
    d_tech_a_subject_a: float
    d_tech_a_subject_b: float
    d_tech_b_subject_a: float
    d_tech_b_subject_b: float
    rep_a_id: str
    rep_b_id: str


def representative(dmus: Sequence[Dmu], rule: str = "best-ratio") -> Dmu:
    """Pick the period's representative DMU under the given rule.

    best-ratio: the unit with maximal first-output/first-input ratio (ties
    go to the earliest in the list). mean: a synthetic unit at the
    componentwise means.
    """
    if not dmus:
        raise ValidationError("cannot pick a representative of an empty period")
    if rule == "best-ratio":
        if len(dmus[0].inputs) != 1 or len(dmus[0].outputs) != 1:
            raise ValidationError("best-ratio rule requires 1 input and 1 output")
        return max(dmus, key=lambda d: d.outputs[0] / d.inputs[0])
    if rule == "mean":
        n = len(dmus)
        inputs = tuple(
            sum(d.inputs[i] for d in dmus) / n for i in range(len(dmus[0].inputs))
        )
        outputs = tuple(
            sum(d.outputs[r] for d in dmus) / n for r in range(len(dmus[0].outputs))
        )
        return Dmu(id="mean", inputs=inputs, outputs=outputs)
    raise ValidationError(f"unknown representative rule {rule!r}; use one of {REPRESENTATIVE_RULES}")


def malmquist(
    period_a: Sequence[Dmu],
    period_b: Sequence[Dmu],
    representative_rule: str = "best-ratio",
    rts: ReturnsToScale = ReturnsToScale.CRS,
    tol: float = DEFAULT_TOLERANCE,
) -> MalmquistResult:
    """Malmquist decomposition from period a to period b."""
    rep_a = representative(period_a, representative_rule)
    rep_b = representative(period_b, representative_rule)

    d_aa = distance(rep_a, period_a, rts, tol)
    d_ab = distance(rep_b, period_a, rts, tol)
    d_ba = distance(rep_a, period_b, rts, tol)
    d_bb = distance(rep_b, period_b, rts, tol)
    for label, value in (("D_a(a)", d_aa), ("D_a(b)", d_ab),
                         ("D_b(a)", d_ba), ("D_b(b)", d_bb)):
        if value <= 0:
            raise ValidationError(f"degenerate distance {label} = {value}")

    ec = d_bb / d_aa
    tc = math.sqrt((d_ab / d_bb) * (d_aa / d_ba))
    return MalmquistResult(
        ec=ec,
        tc=tc,
        mpi=ec * tc,
        d_tech_a_subject_a=d_aa,
        d_tech_a_subject_b=d_ab,
        d_tech_b_subject_a=d_ba,
        d_tech_b_subject_b=d_bb,
        rep_a_id=rep_a.id,
        rep_b_id=rep_b.id,
    )
