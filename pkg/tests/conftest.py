import pytest

from zkpetition.groups import SeededRng, setup

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def params():
    return setup("v1")


@pytest.fixture()
def rng():
    return SeededRng(b"test-fixture")


def make_rng(label):
    """Independent deterministic stream for tests that need several."""
    return SeededRng(b"test-" + label)


@pytest.fixture(scope="session")
def verdict():
    """Records one PASS/FAIL line per acceptance criterion; the lines are
    echoed uncaptured in the terminal summary."""

    def report(criterion, ok, extra=""):
        tail = f"  ({extra})" if extra else ""
        line = f"[{'PASS' if ok else 'FAIL'}] {criterion}{tail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, criterion

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
