"""Throw hostile inputs at the model parser; anything but ParseError is a crash.

    python scripts/fuzz_parser.py [--count N] [--seed S]
"""

import argparse
import collections
import sys
import time

import numpy as np

import riskq
from riskq.generators import fuzz_inputs, random_model
from riskq.model_io import ParseError, parse_model, serialize_model

parser = argparse.ArgumentParser()
parser.add_argument("--count", type=int, default=1_000_000)
parser.add_argument("--seed", type=int, default=0)
args = parser.parse_args()

corpus = [serialize_model(random_model(np.random.default_rng(1), max_hypotheses=2)).encode(),
          riskq.table1_fixture_text().encode()]
messages = collections.Counter()
accepted = crashes = 0
t0 = time.perf_counter()
for data in fuzz_inputs(args.seed, args.count, corpus):
    try:
        parse_model(data)
        accepted += 1
    except ParseError as err:
        messages[err.message.split(" ")[0]] += 1
    except Exception as exc:
        crashes += 1
        print(f"CRASH {exc!r} on {data[:80]!r}", file=sys.stderr)
elapsed = time.perf_counter() - t0
print(f"inputs={args.count} accepted={accepted} rejected={sum(messages.values())} crashes={crashes} "
      f"({args.count / elapsed:,.0f}/s)")
for word, n in messages.most_common(8):
    print(f"  {n:>8}  {word} ...")
sys.exit(1 if crashes else 0)
