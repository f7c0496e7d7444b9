import time

import pytest

from neural_waveform import cli

ACCEPTANCE_LINES = []


@pytest.fixture
def record():
    """Collect one PASS/FAIL line per acceptance check for the terminal summary."""

    def _record(name, ok, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def default_run(tmp_path_factory):
    """The full default experiment, trained once through the CLI."""
    out = tmp_path_factory.mktemp("default_run")
    start = time.perf_counter()
    code = cli.main(["train", "--out", str(out), "--steps", "5000", "--seed", "42"])
    elapsed = time.perf_counter() - start
    assert code == 0
    return out, elapsed
