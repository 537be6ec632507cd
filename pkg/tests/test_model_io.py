import json
from decimal import Decimal
from pathlib import Path

import jsonschema
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riskq.model import CombinationMode, SecurityProperty
from riskq.model_io import ParseError, format_probability, parse_model, serialize_model
from strategies import models

SCHEMA = json.loads((Path(__file__).parents[1] / "docs" / "riskq-schema-1.0.json").read_text())

MINIMAL = """{
  "schema_version": "1.0",
  "asset": {"id": "a"},
  "currency": "USD",
  "properties": [
    {
      "property": "integrity",
      "events": [
        {"id": "A1", "hypotheses": [{"id": "H1", "prior": 0.5, "conditional": PRIOR2}]}
      ],
      "losses": [{"form": "response", "amount": "1000"}]
    }
  ]
}
"""


def minimal(conditional="0.25"):
    return MINIMAL.replace("PRIOR2", conditional)


def parse_error(text) -> ParseError:
    with pytest.raises(ParseError) as exc:
        parse_model(text)
    return exc.value


def test_fixture_structure(table1):
    assert table1.asset.id == "confidential-file"
    assert table1.combination_mode is CombinationMode.TOTAL_PROBABILITY
    (pa,) = table1.assessments
    assert pa.property is SecurityProperty.CONFIDENTIALITY
    assert [ev.id for ev in pa.events] == ["A11", "A12"]
    assert [[h.id for h in ev.hypotheses] for ev in pa.events] == [
        ["H111", "H112"], ["H121", "H122", "H123", "H124", "H125"]]
    assert [h.iso_control for ev in pa.events for h in ev.hypotheses] == [
        "A.11.1", "A.11.2.9", "A.9.2, A.9.4", "A.9.4.3", "A.8.3", "A.7", "A.7"]


def test_fixture_conforms_to_published_schema(table1_text):
    jsonschema.validate(json.loads(table1_text), SCHEMA)


def test_minimal_defaults():
    m = parse_model(minimal())
    assert m.combination_mode is CombinationMode.TOTAL_PROBABILITY
    h = m.assessments[0].events[0].hypotheses[0]
    assert (h.prior, h.conditional, h.description, h.iso_control) == (0.5, 0.25, "", "")
    assert m.assessments[0].losses[0].amount == Decimal("1000")


def test_accepts_bytes_and_str():
    assert parse_model(minimal().encode()) == parse_model(minimal())


def test_empty_document():
    for text in ("", "   \n  "):
        err = parse_error(text)
        assert (err.line, err.column) == (1, 1)
        assert "missing schema_version" in err.message


def test_missing_schema_version_in_object():
    err = parse_error('{"asset": {"id": "a"}}')
    assert (err.line, err.column, err.path) == (1, 1, "")
    assert err.message == "missing schema_version"


def test_malformed_probability_literal():
    err = parse_error(minimal("0.2.1"))
    assert err.path == "properties[0].events[0].hypotheses[0].conditional"
    assert err.line == 9
    assert "0.2.1" in err.message


def test_probability_as_string_is_wrong_type():
    err = parse_error(minimal('"0.2.1"'))
    assert err.path.endswith("hypotheses[0].conditional")
    assert "number" in err.message


@pytest.mark.parametrize("literal, fragment", [
    ("1.5", "outside [0, 1]"),
    ("-0.1", "outside [0, 1]"),
    ("1e-1", "no exponent"),
    ("true", "number"),
    ("NaN", "unexpected character"),
])
def test_probability_literal_errors(literal, fragment):
    err = parse_error(minimal(literal))
    assert err.path.endswith("conditional")
    assert fragment in err.message


def test_negative_zero_folds_to_zero():
    h = parse_model(minimal("-0.0")).assessments[0].events[0].hypotheses[0]
    assert str(h.conditional) == "0.0"


@pytest.mark.parametrize("amount, fragment", [
    ('"1000.001"', "more than 2 fractional digits"),
    ('"-5.00"', "negative"),
    ('"12,5"', "malformed"),
    ("1000", "decimal string"),
    ('"1234567890123456"', "integer digits"),
])
def test_money_errors(amount, fragment):
    err = parse_error(minimal().replace('"1000"', amount))
    assert err.path == "properties[0].losses[0].amount"
    assert fragment in err.message


def test_unknown_field_points_at_key():
    text = minimal().replace('"conditional": 0.25', '"conditional": 0.25, "condtional": 0.3')
    err = parse_error(text)
    assert err.path == "properties[0].events[0].hypotheses[0].condtional"
    assert "unknown field" in err.message
    assert text.splitlines()[err.line - 1][err.column - 1:].startswith('"condtional"')


def test_duplicate_key_rejected():
    err = parse_error('{"schema_version": "1.0", "schema_version": "1.0"}')
    assert (err.line, err.column, err.path) == (1, 27, "schema_version")
    assert "duplicate" in err.message


@pytest.mark.parametrize("text, fragment", [
    ('{"schema_version": "1.0",}', "quoted field name"),
    ('{"schema_version": "1.0"} x', "after the top-level value"),
    ("[1, 2]", "top level"),
    ('{"a": "\\x"}', "invalid escape"),
    ('{"a": "\\ud800"}', "surrogate"),
    ('{"a": "tab\there"}', "control character"),
    ('{"a": "open', "unterminated"),
    ("/* c */ {}", "unexpected character"),
    ("[" * 100, "nesting too deep"),
    (b'{"a": "\xff"}', "UTF-8"),
    (b"\xef\xbb\xbf{}", "unexpected character"),
    ('{"a": "\ud800"}', "surrogate"),
])
def test_syntax_errors(text, fragment):
    assert fragment in parse_error(text).message


def test_wrong_container_types():
    err = parse_error(minimal().replace('"events": [', '"events": {"x": [').replace("]}\n      ],", "]}]},", 1))
    assert err.path == "properties[0].events"


def test_enum_errors():
    err = parse_error(minimal().replace('"integrity"', '"secrecy"'))
    assert err.path == "properties[0].property"
    err = parse_error(minimal().replace('"currency"', '"combination_mode": "bayes", "currency"'))
    assert err.path == "combination_mode"


def test_error_location_multiline():
    text = '{\n  "schema_version": "1.0",\n  "asset": 7,\n  "currency": "USD",\n  "properties": []\n}'
    err = parse_error(text)
    assert (err.line, err.column, err.path) == (3, 12, "asset")


# serialization

def test_fixture_is_canonical(table1, table1_text):
    assert serialize_model(table1) == table1_text
    assert parse_model(serialize_model(table1)) == table1


def test_money_rendering():
    assert '"amount": "1000.00"' in serialize_model(parse_model(minimal()))


@pytest.mark.parametrize("x, text", [
    (0.0, "0"), (1.0, "1"), (0.5, "0.5"), (1e-05, "0.00001"), (0.1 + 0.2, "0.30000000000000004"),
    (5e-324, "0." + "0" * 323 + "5"),
])
def test_format_probability(x, text):
    assert format_probability(x) == text
    assert float(text) == x


@given(models())
def test_round_trip(model):
    text = serialize_model(model)
    assert parse_model(text) == model
    assert serialize_model(parse_model(text)) == text


@given(models())
def test_serialized_models_match_published_schema(model):
    jsonschema.validate(json.loads(serialize_model(model)), SCHEMA)


def _in_bounds(text: str, err: ParseError) -> bool:
    lines = text.split("\n")
    return 1 <= err.line <= len(lines) and 1 <= err.column <= len(lines[err.line - 1]) + 1


@given(st.binary(max_size=200))
def test_arbitrary_bytes_only_raise_parse_error(data):
    try:
        parse_model(data)
    except ParseError as err:
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            text = data[:exc.start].decode("utf-8")
        assert _in_bounds(text, err)


@given(st.text(max_size=200))
def test_arbitrary_text_only_raises_parse_error(text):
    try:
        parse_model(text)
    except ParseError as err:
        assert _in_bounds(text, err)
