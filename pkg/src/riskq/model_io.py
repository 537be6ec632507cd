"""Reading and writing ``.riskq.json`` model files.

The file format is a strict subset of JSON: UTF-8, no duplicate keys, no
comments, no NaN/Infinity, and a closed schema in which unknown fields are
errors. Every error carries the 1-based line and column of the offending
token plus its document path, e.g. ``properties[0].events[1].hypotheses[2].prior``.

Probabilities are plain decimal number literals; money amounts are decimal
strings with at most two fractional digits.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Any, Callable

from riskq.model import (
    Asset,
    CauseEvent,
    CombinationMode,
    Hypothesis,
    LossComponent,
    PropertyAssessment,
    RiskModel,
    RiskqError,
    SecurityProperty,
)

MAX_DEPTH = 32
MAX_MONEY_DIGITS = 15

_WS = re.compile(r"[ \t\n\r]*")
_NUMBER = re.compile(r"-?(?:0|[1-9][0-9]*)(?:\.[0-9]+)?(?:[eE][-+]?[0-9]+)?")
_STR_CHUNK = re.compile(r'([^"\\\x00-\x1f]*)(["\\\x00-\x1f]?)')
_NUMBER_TAIL = frozenset("0123456789.eE+-")
_ESCAPES = {'"': '"', "\\": "\\", "/": "/", "b": "\b", "f": "\f", "n": "\n", "r": "\r", "t": "\t"}
_MONEY = re.compile(r"(-?)([0-9]+)(?:\.([0-9]+))?")


class ParseError(RiskqError):
    def __init__(self, line: int, column: int, path: str, message: str):
        self.line = line
        self.column = column
        self.path = path
        self.message = message
        super().__init__(str(self))

    def __str__(self) -> str:
        where = f" ({self.path})" if self.path else ""
        return f"{self.line}:{self.column}{where}: {self.message}"


@dataclass(frozen=True)
class JsonNumber:
    text: str


class _Doc:
    """Parsed JSON plus the source offset of every value and key, by path."""

    def __init__(self, text: str):
        self.text = text
        self.value_at: dict[str, int] = {}
        self.key_at: dict[str, int] = {}

    def location(self, offset: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, offset) + 1
        column = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return line, column

    def error(self, offset: int, path: str, message: str) -> ParseError:
        return ParseError(*self.location(offset), path, message)


def _child(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


class _Reader:
    def __init__(self, doc: _Doc):
        self.doc = doc
        self.s = doc.text

    def ws(self, i: int) -> int:
        return _WS.match(self.s, i).end()

    def fail(self, i: int, path: str, message: str):
        raise self.doc.error(i, path, message)

    def value(self, i: int, path: str, depth: int) -> tuple[Any, int]:
        s = self.s
        self.doc.value_at[path] = i
        if i >= len(s):
            self.fail(i, path, "unexpected end of document, expected a value")
        c = s[i]
        if c == "{":
            return self.obj(i, path, depth + 1)
        if c == "[":
            return self.arr(i, path, depth + 1)
        if c == '"':
            return self.string(i, path)
        if c == "-" or "0" <= c <= "9":
            m = _NUMBER.match(s, i)
            if m is None:
                self.fail(i, path, "malformed number literal")
            end = m.end()
            if end < len(s) and (s[end] in _NUMBER_TAIL or s[end].isalnum()):
                j = end
                while j < len(s) and (s[j] in _NUMBER_TAIL or s[j].isalnum()):
                    j += 1
                self.fail(i, path, f"malformed number literal {s[i:j]!r}")
            return JsonNumber(m.group()), end
        for word, val in (("true", True), ("false", False), ("null", None)):
            if s.startswith(word, i):
                return val, i + len(word)
        self.fail(i, path, f"unexpected character {c!r}, expected a value")

    def obj(self, i: int, path: str, depth: int) -> tuple[dict, int]:
        if depth > MAX_DEPTH:
            self.fail(i, path, "nesting too deep")
        s = self.s
        out: dict[str, Any] = {}
        i = self.ws(i + 1)
        if i < len(s) and s[i] == "}":
            return out, i + 1
        while True:
            if i >= len(s) or s[i] != '"':
                self.fail(i, path, "expected a quoted field name")
            key_start = i
            key, i = self.string(i, path)
            sub = _child(path, key)
            if key in out:
                self.fail(key_start, sub, f"duplicate field {key!r}")
            self.doc.key_at[sub] = key_start
            i = self.ws(i)
            if i >= len(s) or s[i] != ":":
                self.fail(i, sub, "expected ':' after field name")
            i = self.ws(i + 1)
            out[key], i = self.value(i, sub, depth)
            i = self.ws(i)
            if i < len(s) and s[i] == ",":
                i = self.ws(i + 1)
                continue
            if i < len(s) and s[i] == "}":
                return out, i + 1
            self.fail(i, path, "expected ',' or '}' in object")

    def arr(self, i: int, path: str, depth: int) -> tuple[list, int]:
        if depth > MAX_DEPTH:
            self.fail(i, path, "nesting too deep")
        s = self.s
        out: list[Any] = []
        i = self.ws(i + 1)
        if i < len(s) and s[i] == "]":
            return out, i + 1
        while True:
            item, i = self.value(i, f"{path}[{len(out)}]", depth)
            out.append(item)
            i = self.ws(i)
            if i < len(s) and s[i] == ",":
                i = self.ws(i + 1)
                continue
            if i < len(s) and s[i] == "]":
                return out, i + 1
            self.fail(i, path, "expected ',' or ']' in array")

    def string(self, i: int, path: str) -> tuple[str, int]:
        s = self.s
        start = i
        i += 1
        parts: list[str] = []
        while True:
            m = _STR_CHUNK.match(s, i)
            content, term = m.groups()
            parts.append(content)
            i = m.end()
            if term == '"':
                return "".join(parts), i
            if term == "":
                self.fail(start, path, "unterminated string")
            if term != "\\":
                self.fail(i - 1, path, f"control character {term!r} in string")
            if i >= len(s):
                self.fail(start, path, "unterminated string")
            esc = s[i]
            if esc in _ESCAPES:
                parts.append(_ESCAPES[esc])
                i += 1
                continue
            if esc != "u":
                self.fail(i - 1, path, f"invalid escape '\\{esc}'")
            code, i = self._hex4(i + 1, path)
            if 0xD800 <= code <= 0xDBFF:
                if s.startswith("\\u", i):
                    low, j = self._hex4(i + 2, path)
                    if 0xDC00 <= low <= 0xDFFF:
                        parts.append(chr(0x10000 + ((code - 0xD800) << 10) + (low - 0xDC00)))
                        i = j
                        continue
                self.fail(i - 6, path, "unpaired surrogate escape")
            if 0xDC00 <= code <= 0xDFFF:
                self.fail(i - 6, path, "unpaired surrogate escape")
            parts.append(chr(code))

    def _hex4(self, i: int, path: str) -> tuple[int, int]:
        digits = self.s[i:i + 4]
        if len(digits) != 4 or any(c not in "0123456789abcdefABCDEF" for c in digits):
            self.fail(i - 2, path, "invalid \\u escape")
        return int(digits, 16), i + 4


_SURROGATE = re.compile("[\ud800-\udfff]")


def _decode(data: str | bytes) -> str:
    if isinstance(data, str):
        bad = _SURROGATE.search(data)
        if bad:
            raise _Doc(data).error(bad.start(), "", "lone surrogate code point in text")
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        prefix = data[:exc.start].decode("utf-8")
        raise _Doc(prefix).error(len(prefix), "", "invalid UTF-8 byte sequence") from None


def _read_json(text: str) -> tuple[Any, _Doc]:
    doc = _Doc(text)
    reader = _Reader(doc)
    i = reader.ws(0)
    if i == len(text):
        raise doc.error(0, "", "missing schema_version (empty document)")
    value, i = reader.value(i, "", 0)
    i = reader.ws(i)
    if i != len(text):
        raise doc.error(i, "", "unexpected content after the top-level value")
    return value, doc


# --- schema mapping -------------------------------------------------------

_TYPE_NAMES = {dict: "an object", list: "an array", str: "a string"}


class _Schema:
    def __init__(self, doc: _Doc):
        self.doc = doc

    def error(self, path: str, message: str, at_key: bool = False) -> ParseError:
        offset = self.doc.key_at.get(path) if at_key else None
        if offset is None:
            offset = self.doc.value_at.get(path, 0)
        return self.doc.error(offset, path, message)

    def expect(self, value: Any, kind: type, path: str) -> Any:
        if not isinstance(value, kind) or isinstance(value, bool):
            raise self.error(path, f"expected {_TYPE_NAMES[kind]}, found {_describe(value)}")
        return value

    def fields(self, value: Any, path: str, required: tuple[str, ...], optional: tuple[str, ...]) -> dict:
        obj = self.expect(value, dict, path)
        allowed = set(required) | set(optional)
        for key in obj:
            if key not in allowed:
                expected = ", ".join(required + optional)
                raise self.error(_child(path, key), f"unknown field {key!r} (allowed: {expected})", at_key=True)
        for key in required:
            if key not in obj:
                raise self.error(path, f"missing {key}")
        return obj

    def text(self, obj: dict, key: str, path: str, default: str | None = None) -> str:
        if key not in obj:
            return default  # type: ignore[return-value]
        return self.expect(obj[key], str, _child(path, key))

    def probability(self, obj: dict, key: str, path: str) -> float:
        sub = _child(path, key)
        value = obj[key]
        if not isinstance(value, JsonNumber):
            raise self.error(sub, f"{key} must be a number literal, found {_describe(value)}")
        if any(c in value.text for c in "eE"):
            raise self.error(sub, f"{key} {value.text} must be a plain decimal literal (no exponent)")
        x = float(value.text)
        if not 0.0 <= x <= 1.0:
            raise self.error(sub, f"{key} {value.text} is outside [0, 1]")
        return x + 0.0  # folds -0.0 into 0.0

    def money(self, obj: dict, key: str, path: str) -> Decimal:
        sub = _child(path, key)
        value = obj[key]
        if not isinstance(value, str):
            raise self.error(sub, f"{key} must be a decimal string such as \"1000.00\", found {_describe(value)}")
        m = _MONEY.fullmatch(value)
        if m is None:
            raise self.error(sub, f"malformed money amount {value!r}")
        sign, whole, frac = m.groups()
        if sign:
            raise self.error(sub, f"money amount {value} is negative")
        if frac is not None and len(frac) > 2:
            raise self.error(sub, f"money amount {value} has more than 2 fractional digits")
        if len(whole.lstrip("0")) > MAX_MONEY_DIGITS:
            raise self.error(sub, f"money amount {value} exceeds {MAX_MONEY_DIGITS} integer digits")
        return Decimal(value)

    def enum(self, obj: dict, key: str, path: str, kind: type) -> Any:
        sub = _child(path, key)
        raw = self.expect(obj[key], str, sub)
        for member in kind:
            if member.value == raw:
                return member
        choices = ", ".join(repr(m.value) for m in kind)
        raise self.error(sub, f"{key} {raw!r} is not one of {choices}")

    def items(self, obj: dict, key: str, path: str, build: Callable[[Any, str], Any]) -> tuple:
        sub = _child(path, key)
        if key not in obj:
            return ()
        seq = self.expect(obj[key], list, sub)
        return tuple(build(item, f"{sub}[{i}]") for i, item in enumerate(seq))

    # model pieces

    def model(self, value: Any) -> RiskModel:
        if not isinstance(value, dict):
            raise self.error("", f"expected a JSON object at top level, found {_describe(value)}")
        obj = self.fields(value, "", ("schema_version", "asset", "currency", "properties"),
                          ("combination_mode",))
        mode = CombinationMode.TOTAL_PROBABILITY
        if "combination_mode" in obj:
            mode = self.enum(obj, "combination_mode", "", CombinationMode)
        self.expect(obj["properties"], list, "properties")
        return RiskModel(
            schema_version=self.text(obj, "schema_version", ""),
            asset=self.asset(obj["asset"], "asset"),
            currency=self.text(obj, "currency", ""),
            combination_mode=mode,
            assessments=self.items(obj, "properties", "", self.assessment),
        )

    def asset(self, value: Any, path: str) -> Asset:
        obj = self.fields(value, path, ("id",), ("name", "description"))
        return Asset(
            id=self.text(obj, "id", path),
            name=self.text(obj, "name", path, ""),
            description=self.text(obj, "description", path, ""),
        )

    def assessment(self, value: Any, path: str) -> PropertyAssessment:
        obj = self.fields(value, path, ("property", "events"), ("losses",))
        self.expect(obj["events"], list, _child(path, "events"))
        return PropertyAssessment(
            property=self.enum(obj, "property", path, SecurityProperty),
            events=self.items(obj, "events", path, self.event),
            losses=self.items(obj, "losses", path, self.loss),
        )

    def event(self, value: Any, path: str) -> CauseEvent:
        obj = self.fields(value, path, ("id", "hypotheses"), ("description",))
        self.expect(obj["hypotheses"], list, _child(path, "hypotheses"))
        return CauseEvent(
            id=self.text(obj, "id", path),
            description=self.text(obj, "description", path, ""),
            hypotheses=self.items(obj, "hypotheses", path, self.hypothesis),
        )

    def hypothesis(self, value: Any, path: str) -> Hypothesis:
        obj = self.fields(value, path, ("id", "prior", "conditional"),
                          ("description", "cause", "iso_control"))
        return Hypothesis(
            id=self.text(obj, "id", path),
            description=self.text(obj, "description", path, ""),
            cause=self.text(obj, "cause", path, ""),
            iso_control=self.text(obj, "iso_control", path, ""),
            prior=self.probability(obj, "prior", path),
            conditional=self.probability(obj, "conditional", path),
        )

    def loss(self, value: Any, path: str) -> LossComponent:
        obj = self.fields(value, path, ("form", "amount"), ())
        return LossComponent(form=self.text(obj, "form", path), amount=self.money(obj, "amount", path))


def _describe(value: Any) -> str:
    if isinstance(value, JsonNumber):
        return f"number {value.text}"
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "a boolean"
    return _TYPE_NAMES.get(type(value), type(value).__name__)


def parse_model(data: str | bytes) -> RiskModel:
    """Parse a model document. Raises ParseError; semantic checks are separate."""
    value, doc = _read_json(_decode(data))
    return _Schema(doc).model(value)


def load_model(path: str | Path) -> RiskModel:
    return parse_model(Path(path).read_bytes())


# --- canonical serialization ---------------------------------------------


def format_probability(x: float) -> str:
    """Shortest round-tripping positional decimal, e.g. 0.2, 0.00001, 1."""
    text = format(Decimal(repr(float(x) + 0.0)), "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


def format_money(amount: Decimal) -> str:
    return str(Decimal(amount).quantize(Decimal("0.01")))


class _Raw(str):
    """Pre-rendered JSON token."""


def _emit(value: Any, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if isinstance(value, _Raw):
        out.append(value)
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        for n, (k, v) in enumerate(value.items()):
            out.append(f"{pad}  {json.dumps(k, ensure_ascii=False)}: ")
            _emit(v, indent + 1, out)
            out.append(",\n" if n < len(value) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, list):
        if not value:
            out.append("[]")
            return
        out.append("[\n")
        for n, v in enumerate(value):
            out.append(pad + "  ")
            _emit(v, indent + 1, out)
            out.append(",\n" if n < len(value) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def model_to_tree(model: RiskModel) -> dict:
    """Schema-ordered document tree; probabilities and money are pre-rendered."""
    return {
        "schema_version": model.schema_version,
        "asset": {
            "id": model.asset.id,
            "name": model.asset.name,
            "description": model.asset.description,
        },
        "currency": model.currency,
        "combination_mode": model.combination_mode.value,
        "properties": [
            {
                "property": pa.property.value,
                "events": [
                    {
                        "id": ev.id,
                        "description": ev.description,
                        "hypotheses": [
                            {
                                "id": h.id,
                                "description": h.description,
                                "cause": h.cause,
                                "iso_control": h.iso_control,
                                "prior": _Raw(format_probability(h.prior)),
                                "conditional": _Raw(format_probability(h.conditional)),
                            }
                            for h in ev.hypotheses
                        ],
                    }
                    for ev in pa.events
                ],
                "losses": [
                    {"form": loss.form, "amount": format_money(loss.amount)} for loss in pa.losses
                ],
            }
            for pa in model.assessments
        ],
    }


def serialize_model(model: RiskModel) -> str:
    out: list[str] = []
    _emit(model_to_tree(model), 0, out)
    out.append("\n")
    return "".join(out)
