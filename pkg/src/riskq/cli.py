"""Command-line interface.

Exit codes: 0 success, 1 semantic error (validation failure, missing
property), 2 parse error, 3 Monte Carlo check failure, 64 usage error.
Requested output goes to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from decimal import Decimal
from pathlib import Path
from typing import Sequence

from riskq import banding, diagram, mc_oracle
from riskq.engine import RiskReport, assess
from riskq.model import MissingProperty, RiskModel, SecurityProperty, validate_model
from riskq.model_io import ParseError, load_model

EXIT_OK = 0
EXIT_SEMANTIC = 1
EXIT_PARSE = 2
EXIT_CHECK_FAILED = 3
EXIT_USAGE = 64


class _Exit(Exception):
    def __init__(self, code: int):
        self.code = code


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load(path: str) -> RiskModel:
    try:
        return load_model(path)
    except ParseError as exc:
        _err(f"{path}:{exc}")
        raise _Exit(EXIT_PARSE)
    except OSError as exc:
        _err(f"{path}: cannot read model: {exc.strerror or exc}")
        raise _Exit(EXIT_PARSE)


def _load_valid(path: str) -> RiskModel:
    model = _load(path)
    report = validate_model(model)
    for finding in report.findings:
        _err(f"{path}: {finding}")
    if not report.ok:
        raise _Exit(EXIT_SEMANTIC)
    return model


def _properties(model: RiskModel, wanted: SecurityProperty | None) -> list[SecurityProperty]:
    if wanted is None:
        return [a.property for a in model.assessments]
    if not model.has_property(wanted):
        raise MissingProperty(wanted)
    return [wanted]


def _emit(text: str, out: str | None = None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _json(data: dict) -> str:
    return json.dumps(data, indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def _property_arg(text: str) -> SecurityProperty:
    try:
        return SecurityProperty.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not value > 0 or value == float("inf"):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}")
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


# --- report rendering ------------------------------------------------------


def render_report(report: RiskReport, fmt: str) -> str:
    if fmt == "json":
        return _json(report.to_dict())
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["property", "violation_probability", "expected_loss", "risk", "currency"])
        for p in report.properties:
            w.writerow([p.property.value, repr(p.violation_probability), p.expected_loss, p.risk,
                        report.currency])
        w.writerow(["total", "", "", report.total_risk, report.currency])
        return buf.getvalue()
    lines = [f"# Risk report: {report.asset_id}", "",
             f"Combination mode: {report.combination_mode.value}", ""]
    for p in report.properties:
        lines += [f"## {p.property.title}", "", "| Event | P(A) |", "|---|---|"]
        lines += [f"| {eid} | {diagram.fmt_prob(q)} |" for eid, q in p.event_probabilities]
        lines += [
            "",
            f"- Violation probability: {diagram.fmt_prob(p.violation_probability)}",
            f"- Expected loss: {p.expected_loss} {report.currency}",
            f"- Risk: {p.risk} {report.currency}",
            "",
        ]
    lines.append(f"**Total risk: {report.total_risk} {report.currency}**")
    return "\n".join(lines) + "\n"


def _subset(report: RiskReport, props: list[SecurityProperty]) -> RiskReport:
    entries = tuple(report.get(p) for p in props)
    total = sum((e.risk for e in entries), Decimal("0.00"))
    return RiskReport(report.asset_id, entries, total, report.combination_mode, report.currency)


# --- commands --------------------------------------------------------------


def cmd_validate(args) -> int:
    model = _load(args.model)
    report = validate_model(model)
    for finding in report.findings:
        print(finding)
    errors, warnings = len(report.errors), len(report.warnings)
    print(f"{'OK' if report.ok else 'INVALID'}: {errors} error(s), {warnings} warning(s)")
    return EXIT_OK if report.ok else EXIT_SEMANTIC


def cmd_assess(args) -> int:
    model = _load_valid(args.model)
    props = _properties(model, args.property)
    report = assess(model)
    if args.property is not None:
        report = _subset(report, props)
    _emit(render_report(report, args.format))
    return EXIT_OK


def cmd_band(args) -> int:
    model = _load_valid(args.model)
    ladder = banding.load_ladder(args.ladder) if args.ladder else banding.DEFAULT_LADDER
    props = _properties(model, args.property)
    report = assess(model)
    comparisons = [banding.compare(report, p, ladder) for p in props]
    if args.format == "json":
        _emit(_json({"currency": report.currency,
                     "comparisons": [c.to_dict() for c in comparisons]}))
        return EXIT_OK
    header = f"{'property':<16} {'frequency':<10} {'magnitude':<10} {'qualitative':<12} {'quantitative':>16}  consistent"
    lines = [header]
    for c in comparisons:
        lines.append(
            f"{c.property.value:<16} {c.frequency_band.label:<10} {c.magnitude_band.label:<10} "
            f"{c.qualitative_risk.label:<12} {f'{c.quantitative_risk} {report.currency}':>16}  "
            f"{'yes' if c.consistent else 'no'}"
        )
    _emit("\n".join(lines) + "\n")
    return EXIT_OK


def _single_property(model: RiskModel, wanted: SecurityProperty | None) -> SecurityProperty:
    if wanted is not None:
        return _properties(model, wanted)[0]
    if not model.assessments:
        _err("error: model has no property assessments")
        raise _Exit(EXIT_SEMANTIC)
    return model.assessments[0].property


def cmd_diagram(args) -> int:
    model = _load_valid(args.model)
    prop = _single_property(model, args.property)
    _emit(diagram.ishikawa_dot(model, prop), args.output)
    return EXIT_OK


def cmd_table(args) -> int:
    model = _load_valid(args.model)
    prop = _single_property(model, args.property)
    fmt = diagram.TableFormat(args.format)
    _emit(diagram.cause_effect_table(model, prop, fmt), args.output)
    return EXIT_OK


def cmd_mc_check(args) -> int:
    model = _load_valid(args.model)
    result = mc_oracle.check(model, args.samples, args.seed, args.sigma, workers=args.workers)
    if args.format == "json":
        _emit(_json(result.to_dict()))
    else:
        lines = [f"prng={mc_oracle.PRNG_ALGORITHM} seed={args.seed} samples={args.samples} sigma={args.sigma:g}"]
        for pc in result.properties:
            est = pc.estimate
            z = "inf" if pc.z is None else f"{pc.z:.3f}"
            lines.append(
                f"{pc.property.value:<16} p={pc.engine_probability:.10f} p_hat={est.violation_probability_hat:.10f} "
                f"se={est.standard_error:.3e} z={z} {'PASS' if pc.passed else 'FAIL'}"
            )
        lines.append("PASS" if result.passed else "FAIL")
        _emit("\n".join(lines) + "\n")
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="riskq", description="Quantitative cause-effect information risk assessment.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def command(name: str, func, help: str, prop: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("model", help="path to a .riskq.json model file")
        if prop:
            p.add_argument("--property", type=_property_arg, default=None,
                           help="confidentiality, integrity or availability (or C/I/A)")
        p.set_defaults(func=func)
        return p

    command("validate", cmd_validate, "check a model and list findings", prop=False)

    p = command("assess", cmd_assess, "compute violation probabilities and risk")
    p.add_argument("--format", choices=("json", "markdown", "csv"), default="json")

    p = command("band", cmd_band, "compare qualitative FAIR bands with the quantitative risk")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--ladder", help="JSON file with custom band thresholds")

    p = command("diagram", cmd_diagram, "Ishikawa diagram as DOT")
    p.add_argument("-o", "--output", help="write to this file instead of stdout")

    p = command("table", cmd_table, "cause-effect table")
    p.add_argument("--format", choices=("markdown", "csv"), default="markdown")
    p.add_argument("-o", "--output", help="write to this file instead of stdout")

    p = command("mc-check", cmd_mc_check, "verify the engine against Monte Carlo simulation", prop=False)
    p.add_argument("--samples", type=_positive_int, default=1_000_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--sigma", type=_positive_float, default=mc_oracle.DEFAULT_SIGMA)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        return exc.code
    except MissingProperty as exc:
        _err(f"error: {exc}")
        return EXIT_SEMANTIC
    except (ValueError, OSError) as exc:  # unreadable or malformed band ladder file
        _err(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
