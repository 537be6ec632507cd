"""Closed-form risk evaluation.

Per event, the hypotheses combine into P(A) either by total probability
(sum of prior * conditional) or by noisy-OR. Per property, events combine by
the complement rule, P = 1 - prod(1 - P(A)). Risk is P times the summed
losses, and total risk sums the per-property risks.

Sums and products are accumulated exactly (as fractions of the input
doubles) and rounded to a double once, so every result is independent of
the order of events and hypotheses and monotone in every input.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Sequence

from riskq.model import (
    PROB_SLACK,
    CauseEvent,
    CombinationMode,
    MissingProperty,
    OutOfRange,
    PropertyAssessment,
    RiskModel,
    SecurityProperty,
    require_valid,
)

CENT = Decimal("0.01")


def round_money(value: Decimal | Fraction | float) -> Decimal:
    """Round half-to-even to two fractional digits."""
    with decimal.localcontext() as ctx:
        ctx.prec = 120
        if isinstance(value, Fraction):
            value = Decimal(value.numerator) / Decimal(value.denominator)
        elif isinstance(value, float):
            value = Decimal(value)
        return value.quantize(CENT, rounding=decimal.ROUND_HALF_EVEN)


def _check_unit(x: float, what: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not 0.0 <= x <= 1.0:
        raise OutOfRange(f"{what} {x!r} is outside [0, 1]")
    return Fraction(x)


def _at_least_one(probs: Iterable[Fraction]) -> Fraction:
    none_occur = Fraction(1)
    for p in probs:
        none_occur *= 1 - p
    return 1 - none_occur


def event_probability(event: CauseEvent, mode: CombinationMode) -> float:
    """P(A) for one event under the given hypothesis combination mode."""
    weights = [
        _check_unit(h.prior, f"prior of {h.id}") * _check_unit(h.conditional, f"conditional of {h.id}")
        for h in event.hypotheses
    ]
    if mode is CombinationMode.TOTAL_PROBABILITY:
        p = sum(weights, Fraction(0))
        if p > 1 + Fraction(PROB_SLACK):
            raise OutOfRange(f"event {event.id}: total probability {float(p)!r} exceeds 1")
        return min(float(p), 1.0)
    if mode is CombinationMode.NOISY_OR:
        return float(_at_least_one(weights))
    raise ValueError(f"unknown combination mode {mode!r}")


def violation_probability(event_probs: Sequence[float]) -> float:
    """Probability that at least one of several independent events occurs."""
    return float(_at_least_one(_check_unit(p, "event probability") for p in event_probs))


def expected_loss(assessment: PropertyAssessment) -> Decimal:
    total = sum((loss.amount for loss in assessment.losses), Decimal(0))
    return round_money(total)


@dataclass(frozen=True)
class PropertyRisk:
    property: SecurityProperty
    event_probabilities: tuple[tuple[str, float], ...]
    violation_probability: float
    expected_loss: Decimal
    risk: Decimal

    def to_dict(self) -> dict:
        return {
            "property": self.property.value,
            "event_probabilities": [
                {"event": eid, "probability": p} for eid, p in self.event_probabilities
            ],
            "violation_probability": self.violation_probability,
            "expected_loss": str(self.expected_loss),
            "risk": str(self.risk),
        }


@dataclass(frozen=True)
class RiskReport:
    asset_id: str
    properties: tuple[PropertyRisk, ...]
    total_risk: Decimal
    combination_mode: CombinationMode
    currency: str

    def get(self, prop: SecurityProperty) -> PropertyRisk:
        for entry in self.properties:
            if entry.property is prop:
                return entry
        raise MissingProperty(prop)

    def to_dict(self) -> dict:
        return {
            "asset": self.asset_id,
            "currency": self.currency,
            "combination_mode": self.combination_mode.value,
            "properties": [p.to_dict() for p in self.properties],
            "total_risk": str(self.total_risk),
        }


def assess_property(assessment: PropertyAssessment, mode: CombinationMode) -> PropertyRisk:
    event_probs = tuple((ev.id, event_probability(ev, mode)) for ev in assessment.events)
    p = violation_probability([q for _, q in event_probs])
    loss = expected_loss(assessment)
    return PropertyRisk(
        property=assessment.property,
        event_probabilities=event_probs,
        violation_probability=p,
        expected_loss=loss,
        risk=round_money(Fraction(p) * Fraction(loss)),
    )


def assess(model: RiskModel) -> RiskReport:
    """Evaluate every assessed property of a model.

    Raises InvalidModel when the model does not validate. Properties absent
    from the model simply do not contribute to the total.
    """
    require_valid(model)
    entries = tuple(assess_property(a, model.combination_mode) for a in model.assessments)
    return RiskReport(
        asset_id=model.asset.id,
        properties=entries,
        total_risk=sum((e.risk for e in entries), Decimal("0.00")),
        combination_mode=model.combination_mode,
        currency=model.currency,
    )
