"""Qualitative FAIR-style bands for comparing against the quantitative result.

Frequency and loss magnitude each map onto a five-level ladder; the overall
qualitative risk is the rounded-up mean of the two ranks. All bands are
lower-inclusive and upper-exclusive, except the top one. The built-in
ladders are anchored so that a frequency of 0.1 to 1 per year is Low and a
loss of 1000 to 10000 is Medium, which together give a Medium risk.
"""

from __future__ import annotations

import enum
import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path

from riskq.engine import RiskReport
from riskq.model import OutOfRange, SecurityProperty


class Band(enum.IntEnum):
    VERY_LOW = 1
    LOW = 2
    MEDIUM = 3
    HIGH = 4
    VERY_HIGH = 5

    @property
    def rank(self) -> int:
        return int(self)

    @property
    def label(self) -> str:
        return "".join(w.capitalize() for w in self.name.split("_"))

    @classmethod
    def from_label(cls, label: str) -> "Band":
        for band in cls:
            if band.label.lower() == label.replace("_", "").replace(" ", "").lower():
                return band
        raise ValueError(f"unknown band {label!r}")


def _ascending(values: tuple[float, ...]) -> bool:
    return all(a < b for a, b in zip(values, values[1:]))


@dataclass(frozen=True)
class BandLadder:
    """Lower bounds of bands Low, Medium, High, VeryHigh.

    ``frequency`` bands a probability, so it may list fewer than four
    thresholds (all within (0, 1]); bands past the last threshold are then
    unreachable. Annual frequencies of 1, 10 and 100 would open Medium, High
    and VeryHigh on the documented frequency ladder, but a probability never
    gets there.
    """

    frequency: tuple[float, ...] = (0.1,)
    magnitude: tuple[Decimal, ...] = field(
        default=(Decimal(100), Decimal(1000), Decimal(10000), Decimal(100000))
    )

    def __post_init__(self):
        if not 1 <= len(self.frequency) <= 4 or not _ascending(self.frequency):
            raise ValueError("frequency thresholds: 1 to 4 strictly ascending values")
        if not all(0.0 < t <= 1.0 for t in self.frequency):
            raise ValueError("frequency thresholds must lie in (0, 1]")
        if len(self.magnitude) != 4 or not _ascending(self.magnitude):
            raise ValueError("magnitude thresholds: exactly 4 strictly ascending values")
        if self.magnitude[0] <= 0:
            raise ValueError("magnitude thresholds must be positive")

    def magnitude_upper(self, band: Band) -> Decimal | float:
        """Exclusive upper bound of a magnitude band (infinite for the top band)."""
        if band.rank > len(self.magnitude):
            return math.inf
        return self.magnitude[band.rank - 1]


DEFAULT_LADDER = BandLadder()


def load_ladder(path: str | Path) -> BandLadder:
    """Read a ladder from a JSON file.

    Format: ``{"schema_version": "1.0", "frequency": [0.1],
    "magnitude": ["100", "1000", "10000", "100000"]}``. Magnitudes are
    decimal strings, as money is in model files.
    """
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError("band ladder file must hold a JSON object")
    extra = set(data) - {"schema_version", "frequency", "magnitude"}
    if extra:
        raise ValueError(f"unknown band ladder field(s): {', '.join(sorted(extra))}")
    if data.get("schema_version", "1.0") != "1.0":
        raise ValueError(f"unsupported band ladder schema_version {data['schema_version']!r}")
    kwargs = {}
    if "frequency" in data:
        kwargs["frequency"] = tuple(float(x) for x in data["frequency"])
    if "magnitude" in data:
        kwargs["magnitude"] = tuple(Decimal(str(x)) for x in data["magnitude"])
    return BandLadder(**kwargs)


def frequency_band(annual_probability: float, ladder: BandLadder = DEFAULT_LADDER) -> Band:
    p = annual_probability
    if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0.0 <= p <= 1.0:
        raise OutOfRange(f"probability {p!r} is outside [0, 1]")
    return Band(1 + bisect_right(ladder.frequency, p))


def magnitude_band(loss: Decimal | float, ladder: BandLadder = DEFAULT_LADDER) -> Band:
    amount = Decimal(loss) if isinstance(loss, (int, float)) else loss
    if not amount.is_finite() or amount < 0:
        raise OutOfRange(f"loss {loss!r} must be a non-negative amount")
    return Band(1 + bisect_right(ladder.magnitude, amount))


def qualitative_risk(frequency: Band, magnitude: Band) -> Band:
    # ceil((f + m) / 2)
    return Band((frequency.rank + magnitude.rank + 1) // 2)


@dataclass(frozen=True)
class FairComparison:
    property: SecurityProperty
    frequency_band: Band
    magnitude_band: Band
    qualitative_risk: Band
    quantitative_risk: Decimal
    consistent: bool

    def to_dict(self) -> dict:
        return {
            "property": self.property.value,
            "frequency_band": self.frequency_band.label,
            "magnitude_band": self.magnitude_band.label,
            "qualitative_risk": self.qualitative_risk.label,
            "quantitative_risk": str(self.quantitative_risk),
            "consistent": self.consistent,
        }


def is_consistent(risk: Decimal, magnitude: Band, ladder: BandLadder = DEFAULT_LADDER) -> bool:
    """The quantitative risk lies inside the loss range the magnitude band implies."""
    return 0 <= risk < ladder.magnitude_upper(magnitude)


def compare(
    report: RiskReport, prop: SecurityProperty, ladder: BandLadder = DEFAULT_LADDER
) -> FairComparison:
    entry = report.get(prop)
    f = frequency_band(entry.violation_probability, ladder)
    m = magnitude_band(entry.expected_loss, ladder)
    return FairComparison(
        property=prop,
        frequency_band=f,
        magnitude_band=m,
        qualitative_risk=qualitative_risk(f, m),
        quantitative_risk=entry.risk,
        consistent=is_consistent(entry.risk, m, ladder),
    )
