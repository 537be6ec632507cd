"""Engine vs exhaustive enumeration over random models.

    python scripts/oracle_sweep.py [--models N] [--max-hypotheses H] [--seed S]
"""

import argparse
import time

import numpy as np

from riskq.engine import assess
from riskq.generators import random_model
from riskq.mc_oracle import enumerate_probability
from riskq.model import CombinationMode

parser = argparse.ArgumentParser()
parser.add_argument("--models", type=int, default=1000)
parser.add_argument("--max-hypotheses", type=int, default=12)
parser.add_argument("--seed", type=int, default=0)
args = parser.parse_args()

rng = np.random.default_rng(args.seed)
t0 = time.perf_counter()
for mode in CombinationMode:
    diffs = []
    for _ in range(args.models):
        model = random_model(rng, mode=mode, max_hypotheses=args.max_hypotheses)
        for pa, entry in zip(model.assessments, assess(model).properties):
            diffs.append(abs(entry.violation_probability - enumerate_probability(pa, mode)))
    diffs = np.array(diffs)
    print(f"{mode.value:<18} properties={len(diffs):>5}  max|diff|={diffs.max():.3e}  "
          f"mean|diff|={diffs.mean():.3e}  exact={np.mean(diffs == 0):.1%}")
print(f"elapsed {time.perf_counter() - t0:.1f}s")
