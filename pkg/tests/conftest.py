import warnings

import pytest

from instances import line_topology, star_topology

_ACCEPTANCE_LINES = []


@pytest.fixture
def line():
    return line_topology()


@pytest.fixture
def star():
    return star_topology()


@pytest.fixture
def verdict():
    """Record one pass/fail line per acceptance criterion."""

    def record(label: str, ok: bool, detail: str = ""):
        _ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(autouse=True)
def _quiet_unreachable():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        yield
