"""Quantitative information-risk assessment from cause-effect models."""

from importlib import resources

from riskq.banding import Band, BandLadder, FairComparison, compare, frequency_band, magnitude_band, qualitative_risk
from riskq.diagram import TableFormat, cause_effect_table, ishikawa_dot
from riskq.engine import RiskReport, assess, event_probability, expected_loss, violation_probability
from riskq.mc_oracle import CheckResult, McEstimate, TooLarge, check, enumerate_probability, simulate
from riskq.model import (
    Asset,
    CauseEvent,
    CombinationMode,
    Hypothesis,
    InvalidModel,
    LossComponent,
    MissingProperty,
    OutOfRange,
    PropertyAssessment,
    RiskModel,
    SecurityProperty,
    ValidationReport,
    validate_model,
)
from riskq.model_io import ParseError, load_model, parse_model, serialize_model

__version__ = "0.1.0"


def table1_fixture_text() -> str:
    """Bundled example: one confidentiality assessment, two events, seven hypotheses."""
    return resources.files("riskq").joinpath("fixtures/table1.riskq.json").read_text(encoding="utf-8")
