"""Ishikawa (fishbone) DOT graphs and cause-effect tables."""

from __future__ import annotations

import csv
import enum
import io
import re

from riskq.engine import event_probability
from riskq.model import RiskModel, SecurityProperty

TABLE_HEADERS = (
    "Possible event and its probability",
    "Hypothesis and its probability",
    "Cause and ISO/IEC 27001 control",
    "Conditional probability of the event",
)


class TableFormat(enum.Enum):
    MARKDOWN = "markdown"
    CSV = "csv"


def _dot_id(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]", "_", text) or "_"


def _dot_str(text: str) -> str:
    escaped = text.replace("\x00", "\ufffd").replace("\\", "\\\\").replace('"', '\\"')
    escaped = escaped.replace("\r\n", "\n").replace("\r", "\n").replace("\n", "\\n")
    return f'"{escaped}"'


def fmt_prob(p: float) -> str:
    return format(p, ".6g")


def ishikawa_dot(model: RiskModel, prop: SecurityProperty) -> str:
    """Render one property's cause-effect structure as a DOT digraph.

    Hypotheses point at their event, events point at the effect. The graph
    is laid out right to left so the effect sits at the fish's head.
    """
    assessment = model.assessment(prop)
    asset_name = model.asset.name or model.asset.id
    lines = [
        f"digraph {_dot_id(f'ishikawa_{model.asset.id}_{prop.value}')} {{",
        "  rankdir=RL;",
        '  node [fontname="Helvetica"];',
        f"  effect [shape=box, style=bold, label={_dot_str(f'Violation of {prop.value} of {asset_name}')}];",
    ]
    edges = []
    for ev in assessment.events:
        ev_node = _dot_str(f"event:{ev.id}")
        label = f"{ev.id}\n{ev.description}" if ev.description else ev.id
        lines.append(f"  {ev_node} [shape=ellipse, label={_dot_str(label)}];")
        for h in ev.hypotheses:
            h_node = _dot_str(f"hypothesis:{h.id}")
            parts = [h.id]
            if h.description:
                parts.append(h.description)
            if h.iso_control:
                parts.append(f"({h.iso_control})")
            lines.append(f"  {h_node} [shape=note, label={_dot_str(chr(10).join(parts))}];")
            edges.append(f"  {h_node} -> {ev_node};")
        edges.append(f"  {ev_node} -> effect;")
    lines.extend(edges)
    lines.append("}")
    return "\n".join(lines) + "\n"


def _cell(ident: str, description: str, probability: str) -> str:
    return " ".join(x for x in (f"{ident}:", description, probability) if x)


def _rows(model: RiskModel, prop: SecurityProperty) -> list[tuple[bool, list[str]]]:
    """(first row of its event?, four cells) per hypothesis."""
    assessment = model.assessment(prop)
    rows = []
    for ev in assessment.events:
        p_event = event_probability(ev, model.combination_mode)
        event_cell = _cell(ev.id, ev.description, f"P({ev.id})={fmt_prob(p_event)}")
        for j, h in enumerate(ev.hypotheses):
            cause = h.cause
            if h.iso_control:
                cause = f"{cause} ({h.iso_control})" if cause else f"({h.iso_control})"
            rows.append((j == 0, [
                event_cell,
                _cell(h.id, h.description, f"P({h.id})={fmt_prob(h.prior)}"),
                cause,
                f"P({ev.id}|{h.id})={fmt_prob(h.conditional)}",
            ]))
    return rows


def _md_cell(text: str) -> str:
    text = text.replace("\\", "\\\\").replace("|", "\\|")
    return text.replace("\r\n", " ").replace("\r", " ").replace("\n", " ")


def cause_effect_table(
    model: RiskModel, prop: SecurityProperty, fmt: TableFormat = TableFormat.MARKDOWN
) -> str:
    """One row per hypothesis. In Markdown an event's cell is written only on
    its first row; CSV repeats it on every row."""
    rows = _rows(model, prop)
    if fmt is TableFormat.CSV:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(TABLE_HEADERS)
        # the csv module cannot write NUL
        writer.writerows([c.replace("\x00", "\ufffd") for c in cells] for _, cells in rows)
        return buf.getvalue()
    out = [
        "| " + " | ".join(TABLE_HEADERS) + " |",
        "|" + "---|" * len(TABLE_HEADERS),
    ]
    for first, cells in rows:
        if not first:
            cells = [""] + cells[1:]
        out.append("| " + " | ".join(_md_cell(c) for c in cells) + " |")
    return "\n".join(out) + "\n"
