"""Independent checks of the closed-form engine.

Both checks work from the generative model rather than the formulas:

* total probability: each event draws one cause from {H1..Hm, none} with
  weights {prior_j, 1 - sum(prior)}; the event then fires with the chosen
  cause's conditional probability (never for "none").
* noisy-OR: each hypothesis is an independent channel that fires with
  probability prior * conditional; the event fires if any channel did.

Events are independent. A property is violated when at least one of its
events fires.

``enumerate_probability`` walks the full joint outcome space exactly;
``simulate`` samples it. Random streams come from numpy's Philox4x64-10
counter-based generator keyed by SeedSequence(seed, spawn_key=(property
index, block index)). Samples are drawn in fixed-size blocks, so the
estimate does not depend on how many workers process the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from typing import Callable

import numpy as np

from riskq import engine
from riskq.engine import RiskReport, round_money
from riskq.model import (
    CombinationMode,
    PropertyAssessment,
    RiskModel,
    RiskqError,
    SecurityProperty,
    require_valid,
)

MAX_HYPOTHESES = 24
MAX_OUTCOMES = 1 << 24
BLOCK_SIZE = 1 << 16
DEFAULT_SIGMA = 4.0
PRNG_ALGORITHM = "Philox4x64-10"


class TooLarge(RiskqError):
    pass


def _factors(assessment: PropertyAssessment, mode: CombinationMode) -> list[tuple[list[float], list[bool]]]:
    """Independent random factors of the generative model, each as the
    probability and fired-flag of its distinguishable outcomes."""
    factors = []
    for ev in assessment.events:
        if mode is CombinationMode.TOTAL_PROBABILITY:
            probs: list[float] = []
            fired: list[bool] = []
            for h in ev.hypotheses:
                probs += [h.prior * h.conditional, h.prior * (1.0 - h.conditional)]
                fired += [True, False]
            probs.append(max(0.0, 1.0 - math.fsum(h.prior for h in ev.hypotheses)))
            fired.append(False)
            factors.append((probs, fired))
        else:
            for h in ev.hypotheses:
                q = h.prior * h.conditional
                factors.append(([q, 1.0 - q], [True, False]))
    return factors


def outcome_count(assessment: PropertyAssessment, mode: CombinationMode) -> int:
    n = 1
    for ev in assessment.events:
        m = len(ev.hypotheses)
        n *= (2 * m + 1) if mode is CombinationMode.TOTAL_PROBABILITY else (1 << m)
    return n


def enumerate_probability(assessment: PropertyAssessment, mode: CombinationMode) -> float:
    """Exact probability that at least one event fires, by brute-force
    enumeration of the joint outcome space."""
    hyps = assessment.hypothesis_count
    if hyps > MAX_HYPOTHESES:
        raise TooLarge(f"{hyps} hypotheses exceed the enumeration bound of {MAX_HYPOTHESES}")
    size = outcome_count(assessment, mode)
    if size > MAX_OUTCOMES:
        raise TooLarge(f"{size} joint outcomes exceed the enumeration bound of {MAX_OUTCOMES}")
    joint_p = np.ones(1)
    joint_fired = np.zeros(1, dtype=bool)
    for probs, fired in _factors(assessment, mode):
        joint_p = np.multiply.outer(joint_p, np.asarray(probs)).ravel()
        joint_fired = np.logical_or.outer(joint_fired, np.asarray(fired)).ravel()
    return float(math.fsum(joint_p[joint_fired]))


@dataclass(frozen=True)
class McEstimate:
    samples: int
    violation_probability_hat: float
    expected_risk_hat: Decimal
    standard_error: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "violation_probability_hat": self.violation_probability_hat,
            "expected_risk_hat": str(self.expected_risk_hat),
            "standard_error": self.standard_error,
            "seed": self.seed,
        }


def _rng(seed: int, prop_index: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(prop_index, block))
    return np.random.Generator(np.random.Philox(ss))


def _simulate_block(
    assessment: PropertyAssessment, mode: CombinationMode, n: int, rng: np.random.Generator
) -> int:
    violated = np.zeros(n, dtype=bool)
    for ev in assessment.events:
        priors = np.array([h.prior for h in ev.hypotheses])
        conds = np.array([h.conditional for h in ev.hypotheses])
        if mode is CombinationMode.TOTAL_PROBABILITY:
            # cause index m means "no cause"
            cause = np.searchsorted(np.cumsum(priors), rng.random(n), side="right")
            cond_or_zero = np.append(conds, 0.0)
            fired = rng.random(n) < cond_or_zero[cause]
        else:
            fired = (rng.random((n, len(priors))) < priors * conds).any(axis=1)
        violated |= fired
    return int(violated.sum())


def _block_sizes(samples: int) -> list[int]:
    full, rest = divmod(samples, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def simulate_property(
    model: RiskModel, prop: SecurityProperty, samples: int, seed: int, workers: int = 1
) -> McEstimate:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    index = [a.property for a in model.assessments].index(prop)
    assessment = model.assessments[index]
    mode = model.combination_mode

    def run(block: tuple[int, int]) -> int:
        b, n = block
        return _simulate_block(assessment, mode, n, _rng(seed, index, b))

    blocks = list(enumerate(_block_sizes(samples)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(run, blocks))
    else:
        hits = sum(map(run, blocks))
    p_hat = hits / samples
    return McEstimate(
        samples=samples,
        violation_probability_hat=p_hat,
        expected_risk_hat=round_money(p_hat * float(engine.expected_loss(assessment))),
        standard_error=math.sqrt(p_hat * (1.0 - p_hat) / samples),
        seed=seed,
    )


def simulate(
    model: RiskModel, samples: int, seed: int, workers: int = 1
) -> dict[SecurityProperty, McEstimate]:
    """Monte Carlo estimate per assessed property. Deterministic in
    (model, samples, seed) and independent of ``workers``."""
    require_valid(model)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    seed = int(seed) & ((1 << 64) - 1)
    return {
        a.property: simulate_property(model, a.property, samples, seed, workers)
        for a in model.assessments
    }


@dataclass(frozen=True)
class PropertyCheck:
    property: SecurityProperty
    engine_probability: float
    estimate: McEstimate
    z: float | None  # |p_hat - p| / SE; None when both are zero-width and disagree
    passed: bool

    def to_dict(self) -> dict:
        return {
            "property": self.property.value,
            "engine_probability": self.engine_probability,
            **self.estimate.to_dict(),
            "z": self.z,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class CheckResult:
    sigma: float
    properties: tuple[PropertyCheck, ...]

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "sigma": self.sigma,
            "prng": PRNG_ALGORITHM,
            "properties": [p.to_dict() for p in self.properties],
        }


def check(
    model: RiskModel,
    samples: int = 1_000_000,
    seed: int = 0,
    sigma: float = DEFAULT_SIGMA,
    *,
    workers: int = 1,
    assess: Callable[[RiskModel], RiskReport] | None = None,
) -> CheckResult:
    """Compare the engine against simulation: pass iff |p_hat - p| <= sigma * SE
    for every property.

    When the sample estimate is 0 or 1 its own standard error vanishes; the
    binomial error at the engine's value is used instead, so a tiny but
    non-zero p is not failed merely because no sample hit it.
    ``assess`` exists so tests can inject a perturbed engine.
    """
    report = (assess or engine.assess)(model)
    estimates = simulate(model, samples, seed, workers)
    results = []
    for entry in report.properties:
        est = estimates[entry.property]
        p = entry.violation_probability
        se = est.standard_error or math.sqrt(max(p * (1.0 - p), 0.0) / samples)
        diff = abs(est.violation_probability_hat - p)
        if se > 0:
            z: float | None = diff / se
        else:
            z = 0.0 if diff == 0 else None
        results.append(PropertyCheck(
            property=entry.property,
            engine_probability=p,
            estimate=est,
            z=z,
            passed=diff <= sigma * se,
        ))
    return CheckResult(sigma=sigma, properties=tuple(results))
