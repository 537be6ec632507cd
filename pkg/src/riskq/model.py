"""Domain types for cause-effect risk models and their semantic validation.

A model describes one asset. For each security property (confidentiality,
integrity, availability) it lists the events that violate the property, the
hypotheses (causes) behind each event, and the monetary losses incurred when
the property is violated.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Iterator

SCHEMA_VERSION = "1.0"

# Absolute slack on every "<= 1" probability check.
PROB_SLACK = 1e-12

ID_RE = re.compile(r"[A-Za-z0-9_-]+")
ISO_CONTROL_RE = re.compile(r"A\.\d+(\.\d+)*")
CURRENCY_RE = re.compile(r"[A-Z]{3}")


class RiskqError(Exception):
    """Base class for library errors."""


class OutOfRange(RiskqError, ValueError):
    pass


class InvalidModel(RiskqError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        errors = [f for f in report.findings if f.severity is Severity.ERROR]
        head = "; ".join(f"{f.path}: {f.message}" for f in errors[:3])
        super().__init__(f"model failed validation ({len(errors)} error(s)): {head}")


class MissingProperty(RiskqError, KeyError):
    def __init__(self, prop: "SecurityProperty"):
        self.prop = prop
        super().__init__(f"model has no {prop.value} assessment")

    def __str__(self) -> str:
        return self.args[0]


class SecurityProperty(enum.Enum):
    CONFIDENTIALITY = "confidentiality"
    INTEGRITY = "integrity"
    AVAILABILITY = "availability"

    @property
    def title(self) -> str:
        return self.value.capitalize()

    @classmethod
    def parse(cls, text: str) -> "SecurityProperty":
        """Accept full names in any case, or the C/I/A initials."""
        key = text.strip().lower()
        for prop in cls:
            if key == prop.value or key == prop.value[0]:
                return prop
        raise ValueError(f"unknown security property {text!r}")


class CombinationMode(enum.Enum):
    # hypotheses are mutually exclusive causes with an implicit "no cause" residual
    TOTAL_PROBABILITY = "total_probability"
    # hypotheses are independent causal channels
    NOISY_OR = "noisy_or"


@dataclass(frozen=True)
class Asset:
    id: str
    name: str = ""
    description: str = ""


@dataclass(frozen=True)
class Hypothesis:
    id: str
    prior: float
    conditional: float
    description: str = ""
    cause: str = ""
    iso_control: str = ""

    @property
    def iso_references(self) -> tuple[str, ...]:
        """Individual control clauses; multi-reference cells are comma-separated."""
        return tuple(p.strip() for p in self.iso_control.split(",") if p.strip())


@dataclass(frozen=True)
class CauseEvent:
    id: str
    hypotheses: tuple[Hypothesis, ...]
    description: str = ""


@dataclass(frozen=True)
class LossComponent:
    form: str
    amount: Decimal


@dataclass(frozen=True)
class PropertyAssessment:
    property: SecurityProperty
    events: tuple[CauseEvent, ...]
    losses: tuple[LossComponent, ...] = ()

    @property
    def hypothesis_count(self) -> int:
        return sum(len(e.hypotheses) for e in self.events)


@dataclass(frozen=True)
class RiskModel:
    asset: Asset
    assessments: tuple[PropertyAssessment, ...]
    currency: str = "USD"
    combination_mode: CombinationMode = CombinationMode.TOTAL_PROBABILITY
    schema_version: str = SCHEMA_VERSION

    def assessment(self, prop: SecurityProperty) -> PropertyAssessment:
        for a in self.assessments:
            if a.property is prop:
                return a
        raise MissingProperty(prop)

    def has_property(self, prop: SecurityProperty) -> bool:
        return any(a.property is prop for a in self.assessments)


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    severity: Severity
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity.value}: {self.path or '<document>'}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not any(f.severity is Severity.ERROR for f in self.findings)

    @property
    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity is Severity.ERROR)

    @property
    def warnings(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity is Severity.WARNING)


def _is_probability(x: float) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and 0.0 <= x <= 1.0


def _fmt(x: float) -> str:
    return format(x, ".12g")


def validate_model(model: RiskModel) -> ValidationReport:
    """Check every model invariant and collect the violations as findings.

    Never raises; errors are data. Paths use the file-format spelling, e.g.
    ``properties[0].events[1].hypotheses[2].prior``.
    """
    return ValidationReport(tuple(_check_model(model)))


def _check_model(model: RiskModel) -> Iterator[Finding]:
    E, W = Severity.ERROR, Severity.WARNING
    if model.schema_version != SCHEMA_VERSION:
        yield Finding(E, "schema_version",
                      f"unsupported schema version {model.schema_version!r} (expected {SCHEMA_VERSION!r})")
    if not CURRENCY_RE.fullmatch(model.currency or ""):
        yield Finding(E, "currency", f"currency {model.currency!r} is not a 3-letter ISO 4217 code")

    seen_ids: dict[str, str] = {}

    def claim(ident: str, path: str) -> Iterator[Finding]:
        if not ID_RE.fullmatch(ident or ""):
            yield Finding(E, path, f"identifier {ident!r} must match [A-Za-z0-9_-]+")
        elif ident in seen_ids:
            yield Finding(E, path, f"duplicate identifier {ident!r} (first used at {seen_ids[ident]})")
        else:
            seen_ids[ident] = path

    yield from claim(model.asset.id, "asset.id")

    seen_props: dict[SecurityProperty, int] = {}
    tp = model.combination_mode is CombinationMode.TOTAL_PROBABILITY
    for pi, pa in enumerate(model.assessments):
        ppath = f"properties[{pi}]"
        if pa.property in seen_props:
            yield Finding(E, f"{ppath}.property",
                          f"{pa.property.value} already assessed at properties[{seen_props[pa.property]}]")
        else:
            seen_props[pa.property] = pi
        if not pa.events:
            yield Finding(E, f"{ppath}.events", "an assessment needs at least one event")
        for ei, ev in enumerate(pa.events):
            epath = f"{ppath}.events[{ei}]"
            yield from claim(ev.id, f"{epath}.id")
            if not ev.hypotheses:
                yield Finding(E, f"{epath}.hypotheses", f"event {ev.id} has no hypotheses")
            priors_ok = True
            for hi, h in enumerate(ev.hypotheses):
                hpath = f"{epath}.hypotheses[{hi}]"
                yield from claim(h.id, f"{hpath}.id")
                for name in ("prior", "conditional"):
                    value = getattr(h, name)
                    if not _is_probability(value):
                        priors_ok = False
                        yield Finding(E, f"{hpath}.{name}",
                                      f"{name} {value!r} of hypothesis {h.id} is outside [0, 1]")
                yield from _check_iso(h, f"{hpath}.iso_control")
            if tp and priors_ok and ev.hypotheses:
                prior_sum = Fraction(0)
                mass = Fraction(0)
                for h in ev.hypotheses:
                    prior_sum += Fraction(h.prior)
                    mass += Fraction(h.prior) * Fraction(h.conditional)
                if prior_sum > 1 + Fraction(PROB_SLACK):
                    yield Finding(E, f"{epath}.hypotheses",
                                  f"event {ev.id}: priors sum {_fmt(float(prior_sum))} > 1 "
                                  "(total-probability hypotheses must be mutually exclusive)")
                elif mass > 1 + Fraction(PROB_SLACK):
                    yield Finding(E, epath, f"event {ev.id}: probability {_fmt(float(mass))} exceeds 1")
        forms: set[str] = set()
        for li, loss in enumerate(pa.losses):
            lpath = f"{ppath}.losses[{li}]"
            amt = loss.amount
            if not isinstance(amt, Decimal) or not amt.is_finite():
                yield Finding(E, f"{lpath}.amount", f"amount {amt!r} is not a finite decimal")
            else:
                if amt < 0:
                    yield Finding(E, f"{lpath}.amount", f"loss amount {amt} is negative")
                if amt.as_tuple().exponent < -2:
                    yield Finding(E, f"{lpath}.amount", f"loss amount {amt} has more than 2 fractional digits")
            if loss.form in forms:
                yield Finding(W, f"{lpath}.form", f"duplicate loss form {loss.form!r}")
            forms.add(loss.form)


def _check_iso(h: Hypothesis, path: str) -> Iterator[Finding]:
    refs = h.iso_references
    if not refs:
        if h.iso_control.strip():
            yield Finding(Severity.ERROR, path, f"malformed ISO 27001 control reference {h.iso_control!r}")
        else:
            yield Finding(Severity.WARNING, path, f"hypothesis {h.id} has no ISO 27001 control reference")
        return
    bad = [r for r in refs if not ISO_CONTROL_RE.fullmatch(r)]
    if bad:
        yield Finding(Severity.ERROR, path,
                      f"ISO 27001 control reference {bad[0]!r} must look like A.<n>(.<n>)*")
    elif len(refs) > 1:
        yield Finding(Severity.WARNING, path,
                      f"hypothesis {h.id} cites {len(refs)} controls in one field ({h.iso_control})")


def require_valid(model: RiskModel) -> None:
    report = validate_model(model)
    if not report.ok:
        raise InvalidModel(report)

