from dataclasses import replace
from decimal import Decimal

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from riskq.engine import (
    assess,
    event_probability,
    expected_loss,
    round_money,
    violation_probability,
)
from riskq.model import (
    Asset,
    CauseEvent,
    CombinationMode,
    Hypothesis,
    InvalidModel,
    LossComponent,
    OutOfRange,
    PropertyAssessment,
    RiskModel,
    SecurityProperty,
    validate_model,
)
from oracles import brute_force_violation
from strategies import models

TP = CombinationMode.TOTAL_PROBABILITY
NOR = CombinationMode.NOISY_OR
C, I = SecurityProperty.CONFIDENTIALITY, SecurityProperty.INTEGRITY


def event(eid, *pairs):
    return CauseEvent(eid, tuple(Hypothesis(f"{eid}H{j}", p, c, iso_control="A.7") for j, (p, c) in enumerate(pairs)))


def losses(*amounts):
    return tuple(LossComponent(f"form{k}", Decimal(a)) for k, a in enumerate(amounts))


def model_of(*assessments, mode=TP):
    return RiskModel(asset=Asset("asset"), assessments=tuple(assessments), combination_mode=mode)


# event_probability

@pytest.mark.parametrize("mode", list(CombinationMode))
def test_certain_hypothesis(mode):
    assert event_probability(event("A", (1, 1)), mode) == 1.0


def test_total_probability_example():
    ev = event("A", (0.2, 0.4), (0.5, 0.1))
    p = event_probability(ev, TP)
    assert p == pytest.approx(0.13, abs=1e-15)
    single = PropertyAssessment(C, (ev,))
    assert brute_force_violation(single, TP) == pytest.approx(0.13, abs=1e-15)


def test_noisy_or_example():
    ev = event("A", (0.2, 0.4), (0.5, 0.1))
    assert event_probability(ev, NOR) == pytest.approx(1 - 0.92 * 0.95, abs=1e-15)
    assert event_probability(ev, NOR) == pytest.approx(0.126, abs=1e-15)
    assert brute_force_violation(PropertyAssessment(C, (ev,)), NOR) == pytest.approx(0.126, abs=1e-15)


def test_total_probability_out_of_range_on_unvalidated_input():
    with pytest.raises(OutOfRange):
        event_probability(event("A", (0.9, 1), (0.9, 1)), TP)
    with pytest.raises(OutOfRange):
        event_probability(event("A", (1.2, 0.5)), NOR)


# violation_probability

@pytest.mark.parametrize("probs, expected", [
    ([0, 0, 0], 0.0),
    ([1, 0.3], 1.0),
    ([0.5, 0.5], 0.75),
    ([], 0.0),
])
def test_violation_probability_examples(probs, expected):
    assert violation_probability(probs) == expected


def test_violation_probability_enumerated():
    # four joint outcomes of two fair coins; three contain a head
    outcomes = [(a, b) for a in (0, 1) for b in (0, 1)]
    assert sum(0.25 for a, b in outcomes if a or b) == violation_probability([0.5, 0.5])


@pytest.mark.parametrize("bad", [-0.01, 1.01, float("nan")])
def test_violation_probability_rejects_out_of_range(bad):
    with pytest.raises(OutOfRange):
        violation_probability([0.2, bad])


@given(st.lists(st.floats(0, 1), max_size=8), st.data())
def test_violation_probability_monotone(probs, data):
    assume(probs)
    i = data.draw(st.integers(0, len(probs) - 1))
    bumped = list(probs)
    bumped[i] = data.draw(st.floats(probs[i], 1))
    assert 0.0 <= violation_probability(probs) <= violation_probability(bumped) <= 1.0


# expected_loss

@pytest.mark.parametrize("amounts, expected", [
    ((), "0.00"),
    (("1000.00",), "1000.00"),
    (("2500.00", "1800.50", "499.50"), "4800.00"),
])
def test_expected_loss_examples(amounts, expected):
    e = expected_loss(PropertyAssessment(C, (event("A", (0, 0)),), losses(*amounts)))
    assert e == Decimal(expected) and str(e) == expected


def test_round_money_half_even():
    assert round_money(Decimal("2.675")) == Decimal("2.68")
    assert round_money(Decimal("2.665")) == Decimal("2.66")
    assert round_money(0.23962 * 4800) == Decimal("1150.18")


# assess

def test_zero_probability_property():
    report = assess(model_of(PropertyAssessment(C, (event("A", (0, 0.5)),), losses("5000.00"))))
    (entry,) = report.properties
    assert entry.violation_probability == 0.0
    assert entry.risk == Decimal("0.00")
    assert report.total_risk == Decimal("0.00")


def chained_model(mode):
    if mode is TP:
        events = (event("A1", (0.2, 0.4), (0.5, 0.1)), event("A2", (0.63, 0.2)))
    else:
        events = (event("A1", (0.13, 1)), event("A2", (0.2, 0.4), (0.5, 0.1)))
    return model_of(PropertyAssessment(C, events, losses("2500.00", "1800.50", "499.50")), mode=mode)


@pytest.mark.parametrize("mode", list(CombinationMode))
def test_chained_example(mode):
    model = chained_model(mode)
    report = assess(model)
    (entry,) = report.properties
    probs = [p for _, p in entry.event_probabilities]
    assert probs == pytest.approx([0.13, 0.126], abs=1e-15)
    assert entry.violation_probability == pytest.approx(1 - 0.87 * 0.874, abs=1e-15)
    assert entry.violation_probability == pytest.approx(0.23962, abs=1e-12)
    assert brute_force_violation(model.assessments[0], mode) == pytest.approx(0.23962, abs=1e-12)
    assert entry.expected_loss == Decimal("4800.00")
    assert entry.risk == Decimal("1150.18")
    assert report.total_risk == Decimal("1150.18")


def test_identical_properties_double_total():
    single = chained_model(TP).assessments[0]
    renamed = PropertyAssessment(I, tuple(
        CauseEvent("I" + ev.id, tuple(replace(h, id="I" + h.id) for h in ev.hypotheses))
        for ev in single.events), single.losses)
    report = assess(model_of(single, renamed))
    assert report.total_risk == 2 * report.get(C).risk


def test_assess_rejects_invalid_model():
    bad = model_of(PropertyAssessment(C, (event("A", (0.7, 1), (0.6, 1)),)))
    with pytest.raises(InvalidModel) as exc:
        assess(bad)
    assert "A" in str(exc.value)


def test_fixture_report(table1):
    report = assess(table1)
    entry = report.get(C)
    assert dict(entry.event_probabilities) == pytest.approx({"A11": 0.065, "A12": 0.239}, abs=1e-15)
    assert entry.violation_probability == pytest.approx(1 - 0.935 * 0.761, abs=1e-15)
    assert entry.expected_loss == Decimal("4800.00")
    assert entry.risk == Decimal("1384.63")


# invariants

@given(models())
def test_bounds(model):
    report = assess(model)
    for entry in report.properties:
        assert 0.0 <= entry.violation_probability <= 1.0
        assert all(0.0 <= p <= 1.0 for _, p in entry.event_probabilities)
        assert entry.risk >= 0
    assert abs(report.total_risk - sum(e.risk for e in report.properties)) <= Decimal("0.01")


@given(models(max_events=3, max_per_event=3))
def test_matches_brute_force(model):
    report = assess(model)
    for pa, entry in zip(model.assessments, report.properties):
        assert entry.violation_probability == pytest.approx(
            brute_force_violation(pa, model.combination_mode), abs=1e-12)


@given(models(), st.randoms(use_true_random=False))
def test_permutation_invariance(model, rnd):
    def shuffled(seq):
        seq = list(seq)
        rnd.shuffle(seq)
        return tuple(seq)

    permuted = replace(model, assessments=tuple(
        replace(pa, events=shuffled(replace(ev, hypotheses=shuffled(ev.hypotheses)) for ev in pa.events))
        for pa in model.assessments))
    a, b = assess(model), assess(permuted)
    for ea in a.properties:
        eb = b.get(ea.property)
        assert eb.violation_probability == ea.violation_probability
        assert dict(eb.event_probabilities) == dict(ea.event_probabilities)
        assert eb.risk == ea.risk
    assert a.total_risk == b.total_risk


@given(models(), st.data())
def test_monotone_in_priors_and_conditionals(model, data):
    pi = data.draw(st.integers(0, len(model.assessments) - 1))
    pa = model.assessments[pi]
    ei = data.draw(st.integers(0, len(pa.events) - 1))
    ev = pa.events[ei]
    hi = data.draw(st.integers(0, len(ev.hypotheses) - 1))
    h = ev.hypotheses[hi]
    field = data.draw(st.sampled_from(["prior", "conditional"]))
    new_value = data.draw(st.floats(getattr(h, field), 1.0))
    hyps = list(ev.hypotheses)
    hyps[hi] = replace(h, **{field: new_value})
    events = list(pa.events)
    events[ei] = replace(ev, hypotheses=tuple(hyps))
    assessments = list(model.assessments)
    assessments[pi] = replace(pa, events=tuple(events))
    bumped = replace(model, assessments=tuple(assessments))
    assume(validate_model(bumped).ok)
    before = assess(model).get(pa.property).violation_probability
    after = assess(bumped).get(pa.property).violation_probability
    assert after >= before


@given(models(mode=TP))
def test_noisy_or_never_exceeds_total_probability(model):
    for pa in model.assessments:
        for ev in pa.events:
            assert event_probability(ev, NOR) <= event_probability(ev, TP)


def test_exact_accumulation_is_order_free():
    probs = [0.1, 0.7, 0.3, 0.9, 0.55, 0.123456789]
    assert violation_probability(probs) == violation_probability(probs[::-1])
