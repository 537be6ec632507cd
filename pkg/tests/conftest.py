import os

import pytest
from hypothesis import settings

import riskq
from riskq.model_io import parse_model

settings.register_profile("default", max_examples=100, deadline=None)
settings.register_profile("thorough", max_examples=1000, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def table1_text():
    return riskq.table1_fixture_text()


@pytest.fixture(scope="session")
def table1(table1_text):
    return parse_model(table1_text)


_acceptance_lines: list[str] = []


@pytest.fixture
def acceptance():
    """Record one verdict line per acceptance criterion for the run summary."""
    def record(criterion: str, passed: bool, detail: str = "") -> bool:
        _acceptance_lines.append(f"{'PASS' if passed else 'FAIL'}  {criterion}" + (f"  [{detail}]" if detail else ""))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
