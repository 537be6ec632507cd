"""Assess the bundled Table-1 model under both combination modes, band the
result, and verify it against Monte Carlo simulation.

    python scripts/run_table1.py [--samples N] [--seed S]
"""

import argparse
from dataclasses import replace

import riskq
from riskq import banding, mc_oracle
from riskq.engine import assess
from riskq.model import CombinationMode

parser = argparse.ArgumentParser()
parser.add_argument("--samples", type=int, default=1_000_000)
parser.add_argument("--seed", type=int, default=0)
args = parser.parse_args()

base = riskq.parse_model(riskq.table1_fixture_text())
for mode in CombinationMode:
    model = replace(base, combination_mode=mode)
    report = assess(model)
    result = mc_oracle.check(model, args.samples, args.seed)
    print(f"== {mode.value}")
    for entry, pc in zip(report.properties, result.properties):
        cmp = banding.compare(report, entry.property)
        events = ", ".join(f"P({eid})={p:.6f}" for eid, p in entry.event_probabilities)
        print(f"  {entry.property.value}: {events}")
        print(f"  P={entry.violation_probability:.6f}  E={entry.expected_loss}  R={entry.risk} {report.currency}")
        print(f"  FAIR bands: frequency={cmp.frequency_band.label} magnitude={cmp.magnitude_band.label} "
              f"-> {cmp.qualitative_risk.label}; risk inside loss band: {cmp.consistent}")
        est = pc.estimate
        print(f"  Monte Carlo: p_hat={est.violation_probability_hat:.6f} se={est.standard_error:.2e} "
              f"z={pc.z:.2f} {'PASS' if pc.passed else 'FAIL'}")
    print(f"  total risk: {report.total_risk} {report.currency}")
