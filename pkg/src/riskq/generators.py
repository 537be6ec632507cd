"""Seeded random models for sweeps, property tests and experiment scripts."""

from __future__ import annotations

from decimal import Decimal

import numpy as np

from riskq.model import (
    Asset,
    CauseEvent,
    CombinationMode,
    Hypothesis,
    LossComponent,
    PropertyAssessment,
    RiskModel,
    SecurityProperty,
)

LOSS_FORMS = (
    "productivity",
    "response",
    "replacement",
    "fines_and_judgments",
    "competitive_advantage",
    "reputation",
)


def _probability(rng: np.random.Generator) -> float:
    # mix of round decimals, arbitrary doubles and the endpoints
    kind = rng.integers(0, 6)
    if kind == 0:
        return float(rng.choice([0.0, 1.0]))
    if kind <= 2:
        return int(rng.integers(0, 1001)) / 1000
    return float(rng.random())


def random_assessment(
    rng: np.random.Generator,
    prop: SecurityProperty,
    mode: CombinationMode,
    max_hypotheses: int = 12,
    max_events: int = 5,
    tag: str = "",
) -> PropertyAssessment:
    total = int(rng.integers(1, max_hypotheses + 1))
    n_events = int(rng.integers(1, min(max_events, total) + 1))
    # split `total` hypotheses over events, each getting at least one
    cuts = np.sort(rng.choice(np.arange(1, total), size=n_events - 1, replace=False)) if n_events > 1 else []
    sizes = np.diff(np.concatenate([[0], cuts, [total]])).astype(int)
    p0 = prop.value[0].upper()
    events = []
    for i, m in enumerate(sizes):
        priors = [_probability(rng) for _ in range(m)]
        if mode is CombinationMode.TOTAL_PROBABILITY and sum(priors) > 1.0:
            scale = sum(priors) * (1.0 + float(rng.random()) * 0.5)
            priors = [p / scale for p in priors]
        hyps = tuple(
            Hypothesis(
                id=f"H{tag}{p0}{i}_{j}",
                prior=priors[j],
                conditional=_probability(rng),
                description=f"hypothesis {j} of event {i}",
                cause="random cause",
                iso_control=f"A.{int(rng.integers(5, 19))}.{int(rng.integers(1, 8))}",
            )
            for j in range(m)
        )
        events.append(CauseEvent(id=f"A{tag}{p0}{i}", hypotheses=hyps, description=f"event {i}"))
    n_losses = int(rng.integers(0, len(LOSS_FORMS) + 1))
    forms = rng.choice(LOSS_FORMS, size=n_losses, replace=False)
    losses = tuple(
        LossComponent(form=str(f), amount=Decimal(int(rng.integers(0, 2_000_000))).scaleb(-2))
        for f in forms
    )
    return PropertyAssessment(property=prop, events=tuple(events), losses=losses)


def random_model(
    rng: np.random.Generator,
    mode: CombinationMode | None = None,
    max_hypotheses: int = 12,
) -> RiskModel:
    """A model that passes validation, with up to ``max_hypotheses`` per property."""
    if mode is None:
        mode = CombinationMode.TOTAL_PROBABILITY if rng.random() < 0.5 else CombinationMode.NOISY_OR
    props = [p for p in SecurityProperty if rng.random() < 0.6] or [SecurityProperty.CONFIDENTIALITY]
    rng.shuffle(props)
    return RiskModel(
        asset=Asset(id="asset", name="random asset"),
        assessments=tuple(random_assessment(rng, p, mode, max_hypotheses) for p in props),
        combination_mode=mode,
    )


_TOKENS = (
    b"{", b"}", b"[", b"]", b":", b",", b'"', b"\\", b"\\u", b"\\ud800", b"-", b"0", b"1.5", b"0.2.1",
    b"1e5", b"NaN", b"true", b"null", b" ", b"\n", b"\xff", b"\xe2\x82", b"\xef\xbb\xbf",
    b'"prior"', b'"amount"', b'"1000.001"', b'"schema_version"', b'"events"', b'"x"',
)


def _mutate(rng: np.random.Generator, doc: bytes) -> bytes:
    data = bytearray(doc)
    for _ in range(int(rng.integers(1, 4))):
        op = int(rng.integers(0, 6))
        pos = int(rng.integers(0, len(data) + 1))
        if op == 0 and data:
            data[min(pos, len(data) - 1)] = int(rng.integers(0, 256))
        elif op == 1:
            data[pos:pos] = _TOKENS[int(rng.integers(0, len(_TOKENS)))]
        elif op == 2:
            del data[pos:pos + int(rng.integers(1, 16))]
        elif op == 3:
            end = pos + int(rng.integers(1, 32))
            data[pos:pos] = data[pos:end]
        elif op == 4:
            del data[pos:]
        else:
            data[pos:pos] = bytes(rng.integers(0, 256, size=int(rng.integers(1, 8)), dtype=np.uint8))
    return bytes(data)


def fuzz_inputs(seed: int, count: int, corpus: list[bytes]):
    """Yield ``count`` hostile byte strings: random bytes, random token soup,
    and mutations of the documents in ``corpus`` (smaller documents are
    mutated more often)."""
    rng = np.random.default_rng(seed)
    small = min(corpus, key=len)
    for _ in range(count):
        kind = rng.random()
        if kind < 0.45:
            yield rng.bytes(int(rng.integers(0, 33)))
        elif kind < 0.85:
            picks = rng.integers(0, len(_TOKENS), size=int(rng.integers(0, 12)))
            yield b"".join(_TOKENS[i] for i in picks)
        elif kind < 0.99:
            yield _mutate(rng, small)
        else:
            yield _mutate(rng, corpus[int(rng.integers(0, len(corpus)))])
