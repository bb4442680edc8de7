"""Collects the one-line acceptance verdicts and prints them after the run."""

import contextlib

import pytest

VERDICTS: list[str] = []


@contextlib.contextmanager
def criterion(label: str):
    """Record PASS if the block completes, FAIL with the reason otherwise."""
    try:
        yield
    except BaseException as exc:
        line = f"FAIL  {label}: {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        VERDICTS.append(line)
        print(line)
        raise
    line = f"PASS  {label}"
    VERDICTS.append(line)
    print(line)


@pytest.fixture
def acceptance():
    return criterion


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
